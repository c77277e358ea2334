import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { readCandidates, readDataset, writeCandidates } from "../src/dataset.js";
import { FormatError } from "../src/errors.js";

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "bridge-test-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function record(overrides: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    id: "pair0",
    task: "optimize",
    source: "optimize: int main() { return 0; }",
    target: "int main() { return 0; }",
    meta: { program_id: "slow0", problem_id: "q0", split: "train", strategy: "BL" },
    ...overrides,
  };
}

function write(lines: unknown[]): string {
  const file = path.join(dir, "data.jsonl");
  fs.writeFileSync(file, lines.map((l) =>
    typeof l === "string" ? l : JSON.stringify(l)).join("\n") + "\n");
  return file;
}

describe("readDataset", () => {
  it("reads well-formed records", () => {
    const file = write([record(), record({ id: "pair1", task: "mlm", source: "mlm: x" })]);
    const records = readDataset(file);
    expect(records).toHaveLength(2);
    expect(records[0].meta.program_id).toBe("slow0");
  });

  it("reports the line number of malformed JSON", () => {
    const file = write([record(), "{not json"]);
    expect(() => readDataset(file)).toThrowError(FormatError);
    expect(() => readDataset(file)).toThrowError(/data\.jsonl:2/);
  });

  it("rejects records missing fields", () => {
    const bad = record();
    delete (bad as Record<string, unknown>).target;
    expect(() => readDataset(write([bad]))).toThrowError(/missing field 'target'/);
  });

  it("rejects wrong task prefixes", () => {
    const bad = record({ source: "classify: x" });
    expect(() => readDataset(write([bad]))).toThrowError(/must start with/);
  });

  it("rejects unknown tasks", () => {
    expect(() => readDataset(write([record({ task: "translate" })])))
      .toThrowError(/unknown task/);
  });

  it("rejects an empty dataset", () => {
    const file = path.join(dir, "empty.jsonl");
    fs.writeFileSync(file, "");
    expect(() => readDataset(file)).toThrowError(/no records/);
  });
});

describe("candidates", () => {
  it("round-trips through the candidate format", () => {
    const file = path.join(dir, "candidates.jsonl");
    const candidates = [
      {
        id: "pair0",
        meta: { program_id: "slow0", problem_id: "q0", strategy: "BL" },
        generated: "int main ( ) { }",
      },
    ];
    writeCandidates(file, candidates);
    expect(readCandidates(file)).toEqual(candidates);
  });
});
