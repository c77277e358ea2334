"""Single-stepping script executed inside gdb's embedded Python.

Invoked as ``gdb --batch -x _gdb_script.py <binary>`` with parameters in
the environment:

    EXECAWARE_TRACE_SOURCE  basename of the traced source file
    EXECAWARE_TRACE_OUT     output path for step/var records
    EXECAWARE_TRACE_STDIN   file redirected to the inferior's stdin
    EXECAWARE_TRACE_CAP     soft time cap in seconds
    EXECAWARE_PKG_PATH      sys.path entry for importing execaware

Emits ``step``/``var`` records in the trace file format, then a single
``end <complete|timeout|crashed>`` trailer. Only frames belonging to the
traced source file are recorded; stepping escapes foreign frames with
``finish`` so library internals never appear in the trace.
"""

import os
import sys
import time

import gdb  # noqa: F401 - provided by the gdb process

sys.path.insert(0, os.environ["EXECAWARE_PKG_PATH"])
from execaware.trace.model import _escape  # noqa: E402

SOURCE_NAME = os.environ["EXECAWARE_TRACE_SOURCE"]
OUT_PATH = os.environ["EXECAWARE_TRACE_OUT"]
STDIN_PATH = os.environ["EXECAWARE_TRACE_STDIN"]
TIME_CAP = float(os.environ["EXECAWARE_TRACE_CAP"])

state = {"running": True, "exit_code": None, "signalled": False}


def _on_exited(event):
    state["running"] = False
    state["exit_code"] = getattr(event, "exit_code", None)


def _on_stop(event):
    signal = getattr(event, "stop_signal", None)
    if signal not in (None, "SIGTRAP"):
        state["signalled"] = True


gdb.events.exited.connect(_on_exited)
gdb.events.stop.connect(_on_stop)


def _inferior_alive():
    try:
        inferior = gdb.selected_inferior()
    except gdb.error:
        return False
    return state["running"] and inferior is not None and inferior.pid != 0


def _snapshots(frame):
    """In-scope variables of the innermost blocks, innermost shadowing."""
    snaps = []
    seen = set()
    try:
        block = frame.block()
    except RuntimeError:
        return snaps
    while block is not None and not (block.is_global or block.is_static):
        for symbol in block:
            if not (symbol.is_variable or symbol.is_argument):
                continue
            if symbol.name in seen:
                continue
            seen.add(symbol.name)
            try:
                type_text = str(symbol.type)
            except gdb.error:
                type_text = "?"
            try:
                value_text = str(symbol.value(frame))
            except (gdb.error, gdb.MemoryError):
                value_text = "?"
            snaps.append((symbol.name, type_text, value_text))
        block = block.superblock
    return snaps


def _current_user_line():
    """Line number when stopped in the traced source, else None."""
    try:
        sal = gdb.selected_frame().find_sal()
    except gdb.error:
        return None
    if sal is None or sal.symtab is None or sal.line <= 0:
        return None
    if os.path.basename(sal.symtab.filename) != SOURCE_NAME:
        return None
    return sal.line


def main():
    out = open(OUT_PATH, "w", encoding="utf-8")
    status = "crashed"
    try:
        gdb.execute("set pagination off")
        gdb.execute("set confirm off")
        gdb.execute("set print elements 64")
        gdb.execute("set print repeats 8")
        # Break at main's entry address: the prologue maps to the line
        # that opens main, so that line is recorded like any other.
        gdb.execute("tbreak *main")
        gdb.execute(f'run < "{STDIN_PATH}" > /dev/null', to_string=True)

        deadline = time.monotonic() + TIME_CAP
        status = "complete"
        while _inferior_alive():
            if state["signalled"]:
                status = "crashed"
                break
            if time.monotonic() >= deadline:
                status = "timeout"
                break
            line = _current_user_line()
            try:
                if line is not None:
                    out.write(f"step {line}\n")
                    for name, type_text, value_text in _snapshots(gdb.selected_frame()):
                        out.write(
                            f"var {_escape(name)}\t{_escape(type_text)}\t{_escape(value_text)}\n"
                        )
                    out.flush()  # keep partial traces intact if gdb is killed
                    gdb.execute("step", to_string=True)
                else:
                    try:
                        gdb.execute("finish", to_string=True)
                    except gdb.error:
                        gdb.execute("step", to_string=True)
            except gdb.error:
                break

        if status == "complete":
            if state["signalled"]:
                status = "crashed"
            elif state["exit_code"] not in (0, None):
                status = "crashed"
            elif state["running"]:
                # Inferior still alive after the loop: treat as interrupted.
                status = "crashed"
            elif state["exit_code"] is None:
                status = "crashed"
    finally:
        out.write(f"end {status}\n")
        out.close()


main()
