/** Sample-to-tensor conversion: pixels normalized to [0, 1], the sensor
 * triple kept as raw floats, previous commands one-hot encoded (the
 * 255 "none" padding encodes to zeros). */

import * as tf from "@tensorflow/tfjs";

import { oneHotPrev } from "./labels";
import { SENSOR_INPUTS } from "./model";
import { TdsSample } from "./tds";

export interface SampleTensors {
  image: tf.Tensor4D;
  aux: tf.Tensor2D;
  labels: Int32Array;
  oneHotLabels: tf.Tensor2D;
}

export function auxVector(sample: TdsSample, prevK: number): number[] {
  const out = [sample.heightM, sample.tofM, sample.cmdCount];
  for (let i = 0; i < prevK; i++) {
    out.push(...oneHotPrev(sample.prevCmds[i] ?? 255));
  }
  return out;
}

export function toTensors(
  samples: TdsSample[],
  width: number,
  height: number,
  prevK: number,
): SampleTensors {
  const n = samples.length;
  const pixels = new Float32Array(n * width * height);
  const auxW = SENSOR_INPUTS + 5 * prevK;
  const aux = new Float32Array(n * auxW);
  const labels = new Int32Array(n);
  samples.forEach((s, i) => {
    const base = i * width * height;
    for (let j = 0; j < s.pixels.length; j++) {
      pixels[base + j] = s.pixels[j] / 255;
    }
    aux.set(auxVector(s, prevK), i * auxW);
    labels[i] = s.label;
  });
  const image = tf.tensor4d(pixels, [n, height, width, 1]);
  const auxT = tf.tensor2d(aux, [n, auxW]);
  const oneHotLabels = tf.oneHot(tf.tensor1d(labels, "int32"), 5) as tf.Tensor2D;
  return { image, aux: auxT, labels, oneHotLabels };
}

export function disposeTensors(t: SampleTensors): void {
  t.image.dispose();
  t.aux.dispose();
  t.oneHotLabels.dispose();
}
