/**
 * Readers/writers for the two file formats shared with the evaluator:
 * dataset records in, candidate records out. These formats are the only
 * coupling to the primary toolchain.
 */

import * as fs from "node:fs";

import { FormatError } from "./errors.js";

export type Task = "classify" | "optimize" | "mlm";

export interface DatasetRecord {
  id: string;
  task: Task;
  source: string;
  target: string;
  meta: {
    program_id: string;
    problem_id: string;
    split: string;
    strategy: string;
    case_id?: string | null;
    aspect?: string | null;
  };
}

const TASK_PREFIX: Record<Task, string> = {
  classify: "classify: ",
  optimize: "optimize: ",
  mlm: "mlm: ",
};

export function readDataset(path: string): DatasetRecord[] {
  const records: DatasetRecord[] = [];
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, i) => {
    if (!line.trim()) return;
    const where = `${path}:${i + 1}`;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new FormatError(`${where}: invalid JSON (${(err as Error).message})`);
    }
    const record = parsed as Partial<DatasetRecord>;
    for (const field of ["id", "task", "source", "target", "meta"] as const) {
      if (record[field] === undefined || record[field] === null) {
        throw new FormatError(`${where}: missing field '${field}'`);
      }
    }
    const prefix = TASK_PREFIX[record.task as Task];
    if (!prefix) {
      throw new FormatError(`${where}: unknown task '${record.task}'`);
    }
    if (!(record.source as string).startsWith(prefix)) {
      throw new FormatError(`${where}: ${record.task} source must start with '${prefix}'`);
    }
    const meta = record.meta as DatasetRecord["meta"];
    for (const field of ["program_id", "problem_id"] as const) {
      if (!meta[field]) {
        throw new FormatError(`${where}: missing meta.${field}`);
      }
    }
    records.push(record as DatasetRecord);
  });
  if (records.length === 0) {
    throw new FormatError(`${path}: dataset file holds no records`);
  }
  return records;
}

export interface CandidateRecord {
  id: string;
  meta: { program_id: string; problem_id: string; strategy: string };
  generated: string;
}

export function writeCandidates(path: string, candidates: CandidateRecord[]): void {
  const lines = candidates.map((candidate) =>
    JSON.stringify({
      generated: candidate.generated,
      id: candidate.id,
      meta: candidate.meta,
    }),
  );
  fs.writeFileSync(path, lines.join("\n") + (lines.length ? "\n" : ""), "utf-8");
}

export function readCandidates(path: string): CandidateRecord[] {
  return fs
    .readFileSync(path, "utf-8")
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line) as CandidateRecord);
}
