/**
 * A tiny GRU encoder-decoder over dataset tokens, with a JSON artifact
 * format (config + vocab + weights) so loading never depends on
 * framework-native file handlers.
 */

import * as fs from "node:fs";

import * as tf from "@tensorflow/tfjs";

import { ModelLoadError } from "./errors.js";
import { BOS, EOS, PAD, RESERVED, Vocab, encode, tokenize } from "./tokenizer.js";

export interface ModelConfig {
  modelId: string;
  embedDim: number;
  hiddenDim: number;
  maxSourceTokens: number;
  maxTargetTokens: number;
}

export interface BridgeModel {
  net: tf.LayersModel;
  vocab: Vocab;
  config: ModelConfig;
}

export function buildNet(vocabSize: number, config: ModelConfig): tf.LayersModel {
  const srcInput = tf.input({ shape: [config.maxSourceTokens], dtype: "int32" });
  const tgtInput = tf.input({ shape: [config.maxTargetTokens], dtype: "int32" });
  const srcEmbed = tf.layers.embedding({
    inputDim: vocabSize, outputDim: config.embedDim, name: "src_embed",
  });
  const tgtEmbed = tf.layers.embedding({
    inputDim: vocabSize, outputDim: config.embedDim, name: "tgt_embed",
  });
  const encoder = tf.layers.gru({
    units: config.hiddenDim, returnState: true, name: "encoder",
  });
  const decoder = tf.layers.gru({
    units: config.hiddenDim, returnSequences: true, returnState: true, name: "decoder",
  });
  const projection = tf.layers.dense({
    units: vocabSize, activation: "softmax", name: "projection",
  });

  const encoded = encoder.apply(srcEmbed.apply(srcInput)) as tf.SymbolicTensor[];
  const decoded = decoder.apply(tgtEmbed.apply(tgtInput), {
    initialState: [encoded[1]],
  }) as tf.SymbolicTensor[];
  const probabilities = projection.apply(decoded[0]) as tf.SymbolicTensor;
  return tf.model({ inputs: [srcInput, tgtInput], outputs: probabilities });
}

export function padTo(ids: number[], length: number, padId: number): number[] {
  const clipped = ids.slice(0, length);
  while (clipped.length < length) clipped.push(padId);
  return clipped;
}

export function encodeSource(model: BridgeModel, source: string): number[] {
  const padId = model.vocab.index.get(PAD)!;
  return padTo(encode(model.vocab, tokenize(source)), model.config.maxSourceTokens, padId);
}

interface ArtifactWeights {
  shape: number[];
  values: number[];
}

interface Artifact {
  format: "trainer-bridge-model";
  version: 1;
  config: ModelConfig;
  vocab: string[];
  weights: ArtifactWeights[];
}

export async function saveModel(model: BridgeModel, path: string): Promise<void> {
  const weights: ArtifactWeights[] = [];
  for (const tensor of model.net.getWeights()) {
    weights.push({ shape: tensor.shape.slice(), values: Array.from(await tensor.data()) });
  }
  const artifact: Artifact = {
    format: "trainer-bridge-model",
    version: 1,
    config: model.config,
    vocab: model.vocab.tokens,
    weights,
  };
  fs.writeFileSync(path, JSON.stringify(artifact), "utf-8");
}

export function loadModel(path: string): BridgeModel {
  let artifact: Artifact;
  try {
    artifact = JSON.parse(fs.readFileSync(path, "utf-8")) as Artifact;
  } catch (err) {
    throw new ModelLoadError(`${path}: ${(err as Error).message}`);
  }
  if (artifact.format !== "trainer-bridge-model" || artifact.version !== 1) {
    throw new ModelLoadError(`${path}: not a trainer-bridge model artifact`);
  }
  for (const reserved of RESERVED) {
    if (!artifact.vocab.includes(reserved)) {
      throw new ModelLoadError(`${path}: vocab lacks reserved token ${reserved}`);
    }
  }
  const vocab: Vocab = {
    tokens: artifact.vocab,
    index: new Map(artifact.vocab.map((token, id) => [token, id])),
  };
  const net = buildNet(artifact.vocab.length, artifact.config);
  try {
    net.setWeights(artifact.weights.map((w) => tf.tensor(w.values, w.shape)));
  } catch (err) {
    throw new ModelLoadError(`${path}: weight mismatch (${(err as Error).message})`);
  }
  return { net, vocab, config: artifact.config };
}

export interface DecodeOptions {
  greedy?: boolean;
  maxNewTokens?: number;
  seed?: number;
}

/** Decode target tokens for one source sequence. Greedy decoding is
 * fully deterministic for a given artifact. */
export async function decodeTokens(
  model: BridgeModel,
  source: string,
  options: DecodeOptions = {},
): Promise<string[]> {
  const greedy = options.greedy ?? true;
  const padId = model.vocab.index.get(PAD)!;
  const bosId = model.vocab.index.get(BOS)!;
  const eosId = model.vocab.index.get(EOS)!;
  const maxSteps = Math.min(
    options.maxNewTokens ?? model.config.maxTargetTokens,
    model.config.maxTargetTokens,
  );
  const sourceIds = encodeSource(model, source);
  const sourceTensor = tf.tensor2d([sourceIds], [1, model.config.maxSourceTokens], "int32");

  const generated: number[] = [];
  let rngState = (options.seed ?? 7) >>> 0;
  const nextRandom = () => {
    // xorshift32: repeatable sampling without a global RNG
    rngState ^= rngState << 13; rngState >>>= 0;
    rngState ^= rngState >> 17;
    rngState ^= rngState << 5; rngState >>>= 0;
    return rngState / 0x100000000;
  };

  for (let step = 0; step < maxSteps; step++) {
    const decoderIds = padTo([bosId, ...generated], model.config.maxTargetTokens, padId);
    const decoderTensor = tf.tensor2d(
      [decoderIds], [1, model.config.maxTargetTokens], "int32");
    const probabilities = model.net.predict([sourceTensor, decoderTensor]) as tf.Tensor;
    const stepProbs = (await probabilities.array() as number[][][])[0][generated.length];
    probabilities.dispose();
    decoderTensor.dispose();

    let nextId: number;
    if (greedy) {
      nextId = stepProbs.indexOf(Math.max(...stepProbs));
    } else {
      let cumulative = 0;
      const draw = nextRandom();
      nextId = stepProbs.length - 1;
      for (let id = 0; id < stepProbs.length; id++) {
        cumulative += stepProbs[id];
        if (draw <= cumulative) {
          nextId = id;
          break;
        }
      }
    }
    if (nextId === eosId || nextId === padId) break;
    generated.push(nextId);
  }
  sourceTensor.dispose();
  return generated
    .filter((id) => id >= RESERVED.length)
    .map((id) => model.vocab.tokens[id]);
}
