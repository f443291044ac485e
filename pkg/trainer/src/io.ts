/** Model artifact: one JSON file holding the topology, weight specs and
 * base64 weight data, plus the input configuration the policy server
 * validates its handshake against. */

import * as fs from "fs";

import * as tf from "@tensorflow/tfjs";

import { ModelConfig } from "./model";

export interface ModelArtifact {
  config: ModelConfig;
  classWeights: number[];
  topology: unknown;
  weightSpecs: unknown;
  weightDataB64: string;
}

export async function saveModel(
  model: tf.LayersModel,
  config: ModelConfig,
  classWeights: number[],
  path: string,
): Promise<void> {
  const artifacts = await new Promise<tf.io.ModelArtifacts>((resolve) => {
    void model.save(
      tf.io.withSaveHandler(async (a) => {
        resolve(a);
        return {
          modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" },
        };
      }),
    );
  });
  const weightData = artifacts.weightData as ArrayBuffer;
  const doc: ModelArtifact = {
    config,
    classWeights,
    topology: artifacts.modelTopology,
    weightSpecs: artifacts.weightSpecs,
    weightDataB64: Buffer.from(weightData).toString("base64"),
  };
  fs.writeFileSync(path, JSON.stringify(doc));
}

export async function loadModel(
  path: string,
): Promise<{ model: tf.LayersModel; config: ModelConfig; classWeights: number[] }> {
  const doc = JSON.parse(fs.readFileSync(path, "utf-8")) as ModelArtifact;
  const weightData = Uint8Array.from(Buffer.from(doc.weightDataB64, "base64")).buffer;
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: doc.topology as {},
      weightSpecs: doc.weightSpecs as tf.io.WeightsManifestEntry[],
      weightData,
    }),
  );
  return { model, config: doc.config, classWeights: doc.classWeights };
}
