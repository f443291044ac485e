/** Flight command labels shared across the trainer. */

export const COMMAND_NAMES = ["takeoff", "land", "forward", "cw", "ccw"] as const;
export type CommandName = (typeof COMMAND_NAMES)[number];

export const LABEL_COUNT = 5;
export const NO_COMMAND = 255;

export function commandName(code: number): CommandName {
  if (code < 0 || code >= LABEL_COUNT) {
    throw new Error(`command code out of range: ${code}`);
  }
  return COMMAND_NAMES[code];
}

export function commandCode(name: string): number {
  const idx = COMMAND_NAMES.indexOf(name as CommandName);
  if (idx < 0) throw new Error(`unknown command token: ${name}`);
  return idx;
}

/** One-hot encode a previous-command code; 255 (none) encodes to zeros. */
export function oneHotPrev(code: number): number[] {
  const out = new Array(LABEL_COUNT).fill(0);
  if (code !== NO_COMMAND) {
    if (code < 0 || code >= LABEL_COUNT) {
      throw new Error(`previous-command code out of range: ${code}`);
    }
    out[code] = 1;
  }
  return out;
}

export function labelHistogram(labels: ArrayLike<number>): number[] {
  const counts = new Array(LABEL_COUNT).fill(0);
  for (let i = 0; i < labels.length; i++) counts[labels[i]] += 1;
  return counts;
}

/** Loss weights: majority-class count divided by each label's count. */
export function labelWeights(histogram: number[]): number[] {
  if (histogram.some((c) => c <= 0)) {
    throw new Error("all labels must be present to compute class weights");
  }
  const majority = Math.max(...histogram);
  return histogram.map((c) => majority / c);
}
