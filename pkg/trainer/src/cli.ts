/** Trainer command line.
 *
 *   train    --data D.tds --out model.json [--seed S] [--max-epochs N]
 *            [--prev-k K] [--max-samples N]
 *   evaluate --model model.json --data D.tds
 *   serve    --model model.json [--tcp PORT]
 *
 * `train` fits the flight-command CNN with a 70/15/15 flight-preserving
 * split and prints the held-out test metrics; `serve` runs the harness
 * wire protocol over stdio (or TCP).
 */

import * as fs from "fs";

import { useInferenceBackend, useTrainingBackend } from "./backend";
import { toTensors, disposeTensors } from "./data";
import { loadModel, saveModel } from "./io";
import { evaluateOnTensors, trainOnDataset } from "./train";
import { readDataset } from "./tds";
import { serveStdio, serveTcp } from "./serve";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad arguments near ${argv[i]}`);
    }
    flags.set(argv[i].slice(2), argv[i + 1]);
  }
  return flags;
}

function need(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (v === undefined) throw new Error(`missing required flag --${name}`);
  return v;
}

async function cmdTrain(flags: Map<string, string>): Promise<number> {
  await useTrainingBackend();
  const dataset = readDataset(need(flags, "data"));
  const maxSamples = Number(flags.get("max-samples") ?? dataset.samples.length);
  if (maxSamples < dataset.samples.length) {
    dataset.samples = dataset.samples.slice(0, maxSamples);
  }
  const result = await trainOnDataset(dataset, {
    seed: Number(flags.get("seed") ?? 1),
    maxEpochs: Number(flags.get("max-epochs") ?? 200),
    prevK: flags.has("prev-k") ? Number(flags.get("prev-k")) : undefined,
    log: (line) => console.error(line),
  });
  await saveModel(result.model, result.config, result.classWeights, need(flags, "out"));
  const report = {
    best_epoch: result.bestEpoch,
    best_val_macro_f1: result.bestValMacroF1 >= 0 ? result.bestValMacroF1 : null,
    test_macro_f1: result.testReport?.macroF1 ?? null,
    test_accuracy: result.testReport?.accuracy ?? null,
    confusion: result.testReport?.confusion ?? null,
  };
  console.log(JSON.stringify(report, null, 2));
  const metricsPath = flags.get("metrics");
  if (metricsPath) fs.writeFileSync(metricsPath, JSON.stringify(report, null, 2));
  return 0;
}

async function cmdEvaluate(flags: Map<string, string>): Promise<number> {
  await useInferenceBackend();
  const { model, config } = await loadModel(need(flags, "model"));
  const dataset = readDataset(need(flags, "data"));
  const tensors = toTensors(dataset.samples, config.width, config.height, config.prevK);
  const report = await evaluateOnTensors(model, tensors);
  disposeTensors(tensors);
  console.log(JSON.stringify({
    macro_f1: report.macroF1,
    accuracy: report.accuracy,
    per_label_f1: report.f1,
    confusion: report.confusion,
  }, null, 2));
  return 0;
}

async function cmdServe(flags: Map<string, string>): Promise<number> {
  await useInferenceBackend();
  const { model, config } = await loadModel(need(flags, "model"));
  const port = flags.get("tcp");
  if (port !== undefined) {
    serveTcp(model, config, Number(port));
    console.error(`serving policy on tcp port ${port}`);
    await new Promise(() => undefined); // run until killed
  } else {
    await serveStdio(model, config);
  }
  return 0;
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  const handlers: { [k: string]: (f: Map<string, string>) => Promise<number> } = {
    train: cmdTrain,
    evaluate: cmdEvaluate,
    serve: cmdServe,
  };
  if (!command || !(command in handlers)) {
    console.error("usage: cli <train|evaluate|serve> [--flag value ...]");
    return 1;
  }
  try {
    return await handlers[command](parseFlags(rest));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

if (require.main === module) {
  void main(process.argv.slice(2)).then((code) => process.exit(code));
}
