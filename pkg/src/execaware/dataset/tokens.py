"""Token counting adapters and the corpus tokenizer.

The default splitter is self-contained (identifiers, numbers, and every
punctuation character as its own token); production counting goes
through a subprocess speaking the line protocol: one JSON-encoded string
per request line in, one decimal token count per line out.
"""

from __future__ import annotations

import json
import re
import shutil
import subprocess
from typing import Protocol

from ..errors import BackendUnavailable

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z_0-9]*|[0-9]+(?:\.[0-9]+)?|\S")


def split_tokens(text: str) -> list[str]:
    """Whitespace-and-punctuation token stream of a text."""
    return _TOKEN.findall(text)


class TokenCounter(Protocol):
    name: str

    def count(self, text: str) -> int: ...


class SplitTokenCounter:
    """Deterministic built-in counter over split_tokens."""

    name = "ws-punct-v1"

    def count(self, text: str) -> int:
        return len(split_tokens(text))


class SubprocessTokenCounter:
    """Counts through an external tokenizer process (line protocol)."""

    def __init__(self, cmd: tuple[str, ...]):
        if not cmd:
            raise ValueError("empty tokenizer command")
        self.cmd = tuple(cmd)
        self.name = f"subprocess:{' '.join(cmd)}"
        self._proc: subprocess.Popen | None = None

    def _ensure_started(self):
        if self._proc is not None and self._proc.poll() is None:
            return
        if shutil.which(self.cmd[0]) is None:
            raise BackendUnavailable(f"tokenizer command {self.cmd[0]!r} not found")
        self._proc = subprocess.Popen(
            list(self.cmd),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def count(self, text: str) -> int:
        self._ensure_started()
        assert self._proc is not None and self._proc.stdin and self._proc.stdout
        self._proc.stdin.write(json.dumps(text, ensure_ascii=True) + "\n")
        self._proc.stdin.flush()
        reply = self._proc.stdout.readline()
        if not reply:
            raise BackendUnavailable("tokenizer process closed its stream")
        return int(reply.strip())

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)
        self._proc = None
