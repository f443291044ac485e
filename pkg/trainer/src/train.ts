/** Training: flight-preserving 70/15/15 split, class-weighted categorical
 * cross-entropy, early stopping on validation macro F1 with the best
 * weights kept.
 *
 * The run is deterministic for a fixed seed: weight initializers are
 * seeded, the flight shuffle and the single up-front sample shuffle use
 * the seeded generator, and batches then iterate in fixed order.
 */

import * as tf from "@tensorflow/tfjs";

import { toTensors, disposeTensors, SampleTensors } from "./data";
import { labelHistogram, labelWeights } from "./labels";
import { macroF1Score, MetricsReport, confusionMatrix, metricsFromConfusion } from "./metrics";
import { buildModel, defaultConfig, ModelConfig } from "./model";
import { Rng, splitDataset } from "./split";
import { TdsDataset } from "./tds";

export interface EpochStat {
  epoch: number;
  loss: number;
  valMacroF1: number;
}

export interface TrainResult {
  model: tf.LayersModel;
  config: ModelConfig;
  classWeights: number[];
  history: EpochStat[];
  bestEpoch: number;
  bestValMacroF1: number;
  testReport: MetricsReport | null;
}

export interface TrainOptions {
  maxEpochs?: number;
  seed?: number;
  fractions?: [number, number, number];
  prevK?: number;
  log?: (line: string) => void;
}

export async function predictLabels(
  model: tf.LayersModel,
  tensors: SampleTensors,
  batchSize = 256,
): Promise<Int32Array> {
  const n = tensors.labels.length;
  const out = new Int32Array(n);
  for (let start = 0; start < n; start += batchSize) {
    const size = Math.min(batchSize, n - start);
    const pred = tf.tidy(() => {
      const img = tensors.image.slice([start, 0, 0, 0], [size, -1, -1, -1]);
      const aux = tensors.aux.slice([start, 0], [size, -1]);
      return (model.predict([img, aux]) as tf.Tensor).argMax(-1);
    });
    out.set(await pred.data() as unknown as Int32Array, start);
    pred.dispose();
  }
  return out;
}

export async function evaluateOnTensors(
  model: tf.LayersModel,
  tensors: SampleTensors,
): Promise<MetricsReport> {
  const preds = await predictLabels(model, tensors);
  return metricsFromConfusion(confusionMatrix(preds, tensors.labels));
}

function cloneWeights(model: tf.LayersModel): tf.Tensor[] {
  return model.getWeights().map((w) => w.clone());
}

export async function runTrainingLoop(
  model: tf.LayersModel,
  train: SampleTensors,
  val: SampleTensors,
  classWeights: number[],
  cfg: ModelConfig,
  maxEpochs: number,
  log: (line: string) => void = () => undefined,
): Promise<{ history: EpochStat[]; bestEpoch: number; bestValMacroF1: number }> {
  model.compile({
    optimizer: tf.train.adam(cfg.learningRate),
    loss: "categoricalCrossentropy",
  });
  const classWeight: { [label: number]: number } = {};
  classWeights.forEach((w, i) => (classWeight[i] = w));

  const haveVal = val.labels.length > 0;
  if (!haveVal) {
    log("validation split is empty: early stopping disabled, final weights kept");
  }
  const history: EpochStat[] = [];
  let best: tf.Tensor[] | null = null;
  let bestValMacroF1 = -1;
  let bestEpoch = -1;
  for (let epoch = 0; epoch < maxEpochs; epoch++) {
    const fit = await model.fit([train.image, train.aux], train.oneHotLabels, {
      batchSize: cfg.batchSize,
      epochs: 1,
      shuffle: false,
      verbose: 0,
      classWeight,
    });
    const loss = Number(fit.history.loss[0]);
    let valMacroF1 = 0;
    if (haveVal) {
      const preds = await predictLabels(model, val);
      valMacroF1 = macroF1Score(preds, val.labels);
    }
    history.push({ epoch, loss, valMacroF1 });
    log(`epoch ${epoch}: loss=${loss.toFixed(4)} val_macro_f1=${valMacroF1.toFixed(4)}`);
    if (!haveVal) {
      bestEpoch = epoch;
      continue;
    }
    if (valMacroF1 > bestValMacroF1) {
      bestValMacroF1 = valMacroF1;
      bestEpoch = epoch;
      if (best) best.forEach((t) => t.dispose());
      best = cloneWeights(model);
    } else if (epoch - bestEpoch > cfg.patience) {
      log(`early stop at epoch ${epoch} (no improvement since ${bestEpoch})`);
      break;
    }
  }
  if (best) {
    model.setWeights(best);
    best.forEach((t) => t.dispose());
  }
  return { history, bestEpoch, bestValMacroF1 };
}

export async function trainOnDataset(
  dataset: TdsDataset,
  options: TrainOptions = {},
): Promise<TrainResult> {
  const seed = options.seed ?? 1;
  const fractions = options.fractions ?? [0.7, 0.15, 0.15];
  const prevK = options.prevK ?? dataset.prevK;
  if (prevK > dataset.prevK) {
    throw new Error(`dataset stores ${dataset.prevK} previous commands, need ${prevK}`);
  }
  const log = options.log ?? (() => undefined);
  const cfg = defaultConfig({
    width: dataset.width,
    height: dataset.height,
    prevK,
    seed,
  });

  const [trainSet, valSet, testSet] = splitDataset(dataset, fractions, new Rng(seed));
  const hist = labelHistogram(trainSet.samples.map((s) => s.label));
  if (hist.some((c) => c === 0)) {
    throw new Error(`train split is missing labels (histogram ${hist})`);
  }
  const classWeights = labelWeights(hist);
  log(`split sizes: train=${trainSet.samples.length} val=${valSet.samples.length} `
    + `test=${testSet.samples.length}; class weights ${classWeights.map((w) => w.toFixed(2))}`);

  // one seeded shuffle up front; batches then run in fixed order
  const order = [...trainSet.samples];
  new Rng(seed ^ 0x5eed).shuffle(order);

  const trainT = toTensors(order, dataset.width, dataset.height, prevK);
  const valT = toTensors(valSet.samples, dataset.width, dataset.height, prevK);
  const model = buildModel(cfg);
  const loop = await runTrainingLoop(
    model, trainT, valT, classWeights, cfg, options.maxEpochs ?? 200, log);

  let testReport: MetricsReport | null = null;
  if (testSet.samples.length > 0) {
    const testT = toTensors(testSet.samples, dataset.width, dataset.height, prevK);
    testReport = await evaluateOnTensors(model, testT);
    disposeTensors(testT);
  }
  disposeTensors(trainT);
  disposeTensors(valT);
  return {
    model,
    config: cfg,
    classWeights,
    history: loop.history,
    bestEpoch: loop.bestEpoch,
    bestValMacroF1: loop.bestValMacroF1,
    testReport,
  };
}
