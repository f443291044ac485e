/** Confusion matrix and macro F1 (the model-selection metric). */

import { LABEL_COUNT } from "./labels";

export interface MetricsReport {
  confusion: number[][]; // [true][predicted]
  precision: number[];
  recall: number[];
  f1: number[];
  macroF1: number;
  accuracy: number;
}

export function confusionMatrix(
  predictions: ArrayLike<number>,
  labels: ArrayLike<number>,
  nLabels = LABEL_COUNT,
): number[][] {
  if (predictions.length !== labels.length || labels.length === 0) {
    throw new Error("need equal-length nonempty prediction/label sequences");
  }
  const cm = Array.from({ length: nLabels }, () => new Array(nLabels).fill(0));
  for (let i = 0; i < labels.length; i++) {
    cm[labels[i]][predictions[i]] += 1;
  }
  return cm;
}

export function metricsFromConfusion(cm: number[][]): MetricsReport {
  const n = cm.length;
  const predTotals = new Array(n).fill(0);
  const trueTotals = new Array(n).fill(0);
  let trace = 0;
  let total = 0;
  for (let t = 0; t < n; t++) {
    for (let p = 0; p < n; p++) {
      predTotals[p] += cm[t][p];
      trueTotals[t] += cm[t][p];
      total += cm[t][p];
    }
    trace += cm[t][t];
  }
  const precision = cm.map((_, i) => (predTotals[i] > 0 ? cm[i][i] / predTotals[i] : 0));
  const recall = cm.map((_, i) => (trueTotals[i] > 0 ? cm[i][i] / trueTotals[i] : 0));
  const f1 = precision.map((p, i) => {
    const r = recall[i];
    return p + r > 0 ? (2 * p * r) / (p + r) : 0;
  });
  const present = [...Array(n).keys()].filter((i) => predTotals[i] + trueTotals[i] > 0);
  const macroF1 = present.length
    ? present.reduce((acc, i) => acc + f1[i], 0) / present.length
    : 0;
  return { confusion: cm, precision, recall, f1, macroF1, accuracy: total ? trace / total : 0 };
}

export function macroF1Score(predictions: ArrayLike<number>, labels: ArrayLike<number>): number {
  return metricsFromConfusion(confusionMatrix(predictions, labels)).macroF1;
}
