/** Backend selection: wasm for inference when available, plain cpu
 * otherwise. Training always runs on cpu (the wasm kernels lack the
 * convolution gradients). */

import * as path from "path";

import * as tf from "@tensorflow/tfjs";
import { setWasmPaths } from "@tensorflow/tfjs-backend-wasm";

export async function useInferenceBackend(): Promise<string> {
  try {
    const wasmDist = path.join(
      path.dirname(require.resolve("@tensorflow/tfjs-backend-wasm/package.json")),
      "dist",
    );
    setWasmPaths(wasmDist + path.sep);
    await tf.setBackend("wasm");
  } catch {
    await tf.setBackend("cpu");
  }
  await tf.ready();
  return tf.getBackend();
}

export async function useTrainingBackend(): Promise<string> {
  await tf.setBackend("cpu");
  await tf.ready();
  return tf.getBackend();
}
