/**
 * Sequence-to-sequence training on dataset files: source/target fields
 * are consumed verbatim, teacher-forced through the tiny GRU model.
 */

import * as tf from "@tensorflow/tfjs";

import { DatasetRecord, readDataset } from "./dataset.js";
import { FormatError, ResourceError } from "./errors.js";
import { BridgeModel, ModelConfig, buildNet, padTo, saveModel } from "./model.js";
import { BOS, EOS, PAD, buildVocab, encode, tokenize } from "./tokenizer.js";

export interface TrainRun {
  datasetPaths: string[];
  modelId?: string;
  epochs?: number;
  batchSize?: number;
  learningRate?: number;
  maxSourceTokens?: number;
  maxTargetTokens?: number;
  outputModelPath: string;
  embedDim?: number;
  hiddenDim?: number;
  vocabSize?: number;
}

export const DEFAULTS = {
  modelId: "tiny-seq2seq-gru",
  epochs: 1,
  batchSize: 16,
  learningRate: 1e-5,
  maxSourceTokens: 512,
  maxTargetTokens: 512,
  embedDim: 32,
  hiddenDim: 32,
  vocabSize: 4096,
} as const;

export interface TrainResult {
  model: BridgeModel;
  instances: number;
  finalLoss: number;
}

export async function train(run: TrainRun): Promise<TrainResult> {
  if (run.datasetPaths.length === 0) {
    throw new FormatError("no dataset files given");
  }
  const records: DatasetRecord[] = run.datasetPaths.flatMap((path) => readDataset(path));

  const config: ModelConfig = {
    modelId: run.modelId ?? DEFAULTS.modelId,
    embedDim: run.embedDim ?? DEFAULTS.embedDim,
    hiddenDim: run.hiddenDim ?? DEFAULTS.hiddenDim,
    maxSourceTokens: run.maxSourceTokens ?? DEFAULTS.maxSourceTokens,
    maxTargetTokens: run.maxTargetTokens ?? DEFAULTS.maxTargetTokens,
  };
  const vocab = buildVocab(
    records.flatMap((record) => [record.source, record.target]),
    run.vocabSize ?? DEFAULTS.vocabSize,
  );
  const padId = vocab.index.get(PAD)!;
  const bosId = vocab.index.get(BOS)!;
  const eosId = vocab.index.get(EOS)!;

  const sources: number[][] = [];
  const decoderInputs: number[][] = [];
  const labels: number[][] = [];
  for (const record of records) {
    const sourceIds = encode(vocab, tokenize(record.source));
    const targetIds = encode(vocab, tokenize(record.target));
    sources.push(padTo(sourceIds, config.maxSourceTokens, padId));
    decoderInputs.push(padTo([bosId, ...targetIds], config.maxTargetTokens, padId));
    labels.push(padTo([...targetIds, eosId], config.maxTargetTokens, padId));
  }

  const net = buildNet(vocab.tokens.length, config);
  net.compile({
    optimizer: tf.train.adam(run.learningRate ?? DEFAULTS.learningRate),
    loss: "categoricalCrossentropy",
  });

  const n = records.length;
  const sourceTensor = tf.tensor2d(sources, [n, config.maxSourceTokens], "int32");
  const decoderTensor = tf.tensor2d(decoderInputs, [n, config.maxTargetTokens], "int32");
  const labelTensor = tf.oneHot(
    tf.tensor2d(labels, [n, config.maxTargetTokens], "int32"), vocab.tokens.length);

  let history: tf.History;
  try {
    history = await net.fit([sourceTensor, decoderTensor], labelTensor, {
      epochs: run.epochs ?? DEFAULTS.epochs,
      batchSize: run.batchSize ?? DEFAULTS.batchSize,
      shuffle: false,
      verbose: 0,
    });
  } catch (err) {
    throw new ResourceError(`training failed: ${(err as Error).message}`);
  } finally {
    sourceTensor.dispose();
    decoderTensor.dispose();
    labelTensor.dispose();
  }

  const model: BridgeModel = { net, vocab, config };
  await saveModel(model, run.outputModelPath);
  const losses = history.history.loss as number[];
  return { model, instances: n, finalLoss: losses[losses.length - 1] };
}
