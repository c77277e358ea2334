#!/usr/bin/env node
/**
 * trainer-bridge CLI.
 *
 *   train --dataset FILE [--dataset FILE ...] --out MODEL.json
 *         [--epochs N] [--batch-size N] [--lr F]
 *         [--max-source-tokens N] [--max-target-tokens N]
 *         [--embed-dim N] [--hidden-dim N] [--vocab-size N] [--model-id S]
 *   generate --model MODEL.json --input DATASET.jsonl --out CANDIDATES.jsonl
 *            [--sample] [--max-new-tokens N] [--seed N]
 *   count-tokens           # line protocol: JSON string in, decimal out
 */

import * as readline from "node:readline";

import { generateFromArtifact } from "./generate.js";
import { countTokens } from "./tokenizer.js";
import { DEFAULTS, train } from "./train.js";

interface Flags {
  [key: string]: string[];
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument ${arg}`);
    }
    const key = arg.slice(2);
    if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      (flags[key] ??= []).push(argv[++i]);
    } else {
      (flags[key] ??= []).push("true");
    }
  }
  return flags;
}

function one(flags: Flags, key: string): string | undefined {
  return flags[key]?.[flags[key].length - 1];
}

function num(flags: Flags, key: string): number | undefined {
  const raw = one(flags, key);
  if (raw === undefined) return undefined;
  const value = Number(raw);
  if (!Number.isFinite(value)) throw new Error(`--${key} expects a number, got ${raw}`);
  return value;
}

async function cmdTrain(flags: Flags): Promise<number> {
  const datasets = flags["dataset"] ?? [];
  const out = one(flags, "out");
  if (datasets.length === 0 || !out) {
    throw new Error("train needs --dataset FILE and --out MODEL.json");
  }
  const result = await train({
    datasetPaths: datasets,
    outputModelPath: out,
    modelId: one(flags, "model-id"),
    epochs: num(flags, "epochs"),
    batchSize: num(flags, "batch-size"),
    learningRate: num(flags, "lr"),
    maxSourceTokens: num(flags, "max-source-tokens"),
    maxTargetTokens: num(flags, "max-target-tokens"),
    embedDim: num(flags, "embed-dim"),
    hiddenDim: num(flags, "hidden-dim"),
    vocabSize: num(flags, "vocab-size"),
  });
  console.log(
    `trained ${result.model.config.modelId} on ${result.instances} instances ` +
    `(final loss ${result.finalLoss.toFixed(4)}) -> ${out}`,
  );
  return 0;
}

async function cmdGenerate(flags: Flags): Promise<number> {
  const model = one(flags, "model");
  const input = one(flags, "input");
  const out = one(flags, "out");
  if (!model || !input || !out) {
    throw new Error("generate needs --model, --input and --out");
  }
  const candidates = await generateFromArtifact(model, input, out, {
    greedy: one(flags, "sample") !== "true",
    maxNewTokens: num(flags, "max-new-tokens"),
    seed: num(flags, "seed"),
  });
  console.log(`wrote ${candidates.length} candidates -> ${out}`);
  return 0;
}

function cmdCountTokens(): Promise<number> {
  return new Promise((resolve) => {
    const rl = readline.createInterface({ input: process.stdin, terminal: false });
    rl.on("line", (line) => {
      if (!line.trim()) {
        process.stdout.write("0\n");
        return;
      }
      let text: string;
      try {
        const parsed = JSON.parse(line);
        text = typeof parsed === "string" ? parsed : String(parsed);
      } catch {
        text = line;
      }
      process.stdout.write(`${countTokens(text)}\n`);
    });
    rl.on("close", () => resolve(0));
  });
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  try {
    switch (command) {
      case "train":
        return await cmdTrain(parseFlags(rest));
      case "generate":
        return await cmdGenerate(parseFlags(rest));
      case "count-tokens":
        return await cmdCountTokens();
      default:
        console.error(
          "usage: trainer-bridge <train|generate|count-tokens> [flags]\n" +
          `defaults: epochs=${DEFAULTS.epochs} batch-size=${DEFAULTS.batchSize} ` +
          `lr=${DEFAULTS.learningRate} max tokens=${DEFAULTS.maxSourceTokens}`,
        );
        return command ? 2 : 2;
    }
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => process.exit(code));
}
