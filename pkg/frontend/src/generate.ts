/**
 * Candidate generation: one decoded program per input record, written
 * in the evaluator's candidate format.
 */

import { CandidateRecord, readDataset, writeCandidates } from "./dataset.js";
import { BridgeModel, DecodeOptions, decodeTokens, loadModel } from "./model.js";

export interface GenerateOptions extends DecodeOptions {
  maxNewTokens?: number;
}

export async function generateCandidates(
  model: BridgeModel,
  inputPath: string,
  outputPath: string,
  options: GenerateOptions = {},
): Promise<CandidateRecord[]> {
  const records = readDataset(inputPath);
  const candidates: CandidateRecord[] = [];
  for (const record of records) {
    const tokens = await decodeTokens(model, record.source, options);
    candidates.push({
      id: record.id,
      meta: {
        program_id: record.meta.program_id,
        problem_id: record.meta.problem_id,
        strategy: record.meta.strategy ?? "BL",
      },
      generated: tokens.join(" "),
    });
  }
  writeCandidates(outputPath, candidates);
  return candidates;
}

export async function generateFromArtifact(
  modelPath: string,
  inputPath: string,
  outputPath: string,
  options: GenerateOptions = {},
): Promise<CandidateRecord[]> {
  return generateCandidates(loadModel(modelPath), inputPath, outputPath, options);
}
