/** The flight-command CNN.
 *
 * Four conv+maxpool stages feeding two dense layers (C-P-C-P-C-P-C-P-F-F)
 * with filters (8, 16, 8, 32), kernel sizes (3, 3, 5, 7) and 32+32 dense
 * units, ReLU throughout, softmax head of 5, Adam at 0.001, L2 (0.005)
 * on every kernel, batch size 32. Sensor values and the one-hot previous
 * commands bypass the convolutions and join at the first dense layer.
 * At the standard 160x120 input with a two-command history this comes to
 * exactly 34,061 trainable parameters.
 *
 * Pooling is 2x2 with stride 2: that stride is what reproduces the
 * 34,061 figure (stride-1 pooling would leave far larger feature maps).
 */

import * as tf from "@tensorflow/tfjs";

export interface ModelConfig {
  width: number;
  height: number;
  prevK: number; // 0 disables the command-history input (ablation)
  filters: [number, number, number, number];
  kernels: [number, number, number, number];
  denseUnits: [number, number];
  l2: number;
  learningRate: number;
  batchSize: number;
  patience: number;
  seed: number;
}

export const SENSOR_INPUTS = 3;

export function defaultConfig(overrides: Partial<ModelConfig> = {}): ModelConfig {
  return {
    width: 160,
    height: 120,
    prevK: 2,
    filters: [8, 16, 8, 32],
    kernels: [3, 3, 5, 7],
    denseUnits: [32, 32],
    l2: 0.005,
    learningRate: 0.001,
    batchSize: 32,
    patience: 10,
    seed: 1,
    ...overrides,
  };
}

export function auxWidth(cfg: ModelConfig): number {
  return SENSOR_INPUTS + 5 * cfg.prevK;
}

export function buildModel(cfg: ModelConfig): tf.LayersModel {
  let seed = cfg.seed;
  const init = () => tf.initializers.glorotUniform({ seed: seed++ });
  const reg = () => (cfg.l2 > 0 ? tf.regularizers.l2({ l2: cfg.l2 }) : undefined);

  const image = tf.input({ shape: [cfg.height, cfg.width, 1], name: "image" });
  let x: tf.SymbolicTensor = image;
  for (let i = 0; i < 4; i++) {
    x = tf.layers
      .conv2d({
        filters: cfg.filters[i],
        kernelSize: cfg.kernels[i],
        strides: 1,
        padding: "valid",
        activation: "relu",
        kernelInitializer: init(),
        kernelRegularizer: reg(),
      })
      .apply(x) as tf.SymbolicTensor;
    x = tf.layers.maxPooling2d({ poolSize: 2, strides: 2 }).apply(x) as tf.SymbolicTensor;
  }
  x = tf.layers.flatten().apply(x) as tf.SymbolicTensor;

  const aux = tf.input({ shape: [auxWidth(cfg)], name: "aux" });
  let y = tf.layers.concatenate().apply([x, aux]) as tf.SymbolicTensor;
  for (const units of cfg.denseUnits) {
    y = tf.layers
      .dense({
        units,
        activation: "relu",
        kernelInitializer: init(),
        kernelRegularizer: reg(),
      })
      .apply(y) as tf.SymbolicTensor;
  }
  y = tf.layers
    .dense({ units: 5, activation: "softmax", kernelInitializer: init() })
    .apply(y) as tf.SymbolicTensor;

  return tf.model({ inputs: [image, aux], outputs: y });
}
