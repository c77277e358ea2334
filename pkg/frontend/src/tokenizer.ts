/**
 * Bridge tokenizer: identifiers, numbers, and single punctuation
 * characters, with the dataset's sentinel strings (`<SEP>`, `<mask_k>`)
 * kept atomic so they map onto single native specials.
 */

const SENTINEL = /<SEP>|<mask_\d+>/g;
const WORD = /[A-Za-z_][A-Za-z_0-9]*|[0-9]+(?:\.[0-9]+)?|\S/g;

export const PAD = "<pad>";
export const UNK = "<unk>";
export const BOS = "<bos>";
export const EOS = "<eos>";
export const RESERVED = [PAD, UNK, BOS, EOS];

export function tokenize(text: string): string[] {
  const tokens: string[] = [];
  let cursor = 0;
  for (const match of text.matchAll(SENTINEL)) {
    const start = match.index ?? 0;
    for (const plain of text.slice(cursor, start).matchAll(WORD)) {
      tokens.push(plain[0]);
    }
    tokens.push(match[0]);
    cursor = start + match[0].length;
  }
  for (const plain of text.slice(cursor).matchAll(WORD)) {
    tokens.push(plain[0]);
  }
  return tokens;
}

export function countTokens(text: string): number {
  return tokenize(text).length;
}

export interface Vocab {
  readonly tokens: string[];
  readonly index: Map<string, number>;
}

export function buildVocab(texts: Iterable<string>, maxSize = 4096): Vocab {
  const frequency = new Map<string, number>();
  for (const text of texts) {
    for (const token of tokenize(text)) {
      frequency.set(token, (frequency.get(token) ?? 0) + 1);
    }
  }
  const ranked = [...frequency.entries()]
    .sort((a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1))
    .slice(0, Math.max(0, maxSize - RESERVED.length))
    .map(([token]) => token);
  const tokens = [...RESERVED, ...ranked];
  const index = new Map(tokens.map((token, id) => [token, id]));
  return { tokens, index };
}

export function encode(vocab: Vocab, tokens: string[]): number[] {
  const unk = vocab.index.get(UNK)!;
  return tokens.map((token) => vocab.index.get(token) ?? unk);
}

export function decode(vocab: Vocab, ids: number[]): string[] {
  return ids
    .filter((id) => id >= RESERVED.length && id < vocab.tokens.length)
    .map((id) => vocab.tokens[id]);
}
