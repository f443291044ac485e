/** Policy server speaking the flight harness wire protocol.
 *
 * Line-delimited JSON over stdio or TCP:
 *   -> {"type":"hello","image_w":W,"image_h":H,"prev_k":K}
 *   <- {"type":"ready"}                       (or {"type":"error",...})
 *   -> {"type":"obs","flight_id":n,"step":n,"image":{...},"sensors":{...},"prev_cmds":[...]}
 *   <- {"type":"cmd","command":"takeoff|land|forward|cw|ccw"}
 *   -> {"type":"done","outcome":"..."}        (per flight; keeps serving)
 *
 * The reply is the argmax command for the observation; deterministic
 * given the weights. A handshake whose image size or history length does
 * not match the model is answered with a structured error and exit 1.
 */

import * as net from "net";
import * as readline from "readline";

import * as tf from "@tensorflow/tfjs";

import { oneHotPrev, commandName } from "./labels";
import { ModelConfig, SENSOR_INPUTS } from "./model";

interface ObsMessage {
  type: "obs";
  flight_id: number;
  step: number;
  image: { w: number; h: number; pixels_b64: string };
  sensors: { height_m: number; tof_m: number; cmd_count: number };
  prev_cmds: number[];
}

export class PolicySession {
  private ready = false;

  constructor(
    private readonly model: tf.LayersModel,
    private readonly config: ModelConfig,
  ) {}

  /** Returns the JSON reply for one request line, or null for "done". */
  async handleLine(line: string): Promise<string | null> {
    let msg: any;
    try {
      msg = JSON.parse(line);
    } catch {
      return JSON.stringify({ type: "error", error: "invalid JSON" });
    }
    if (msg.type === "hello") {
      if (msg.image_w !== this.config.width || msg.image_h !== this.config.height) {
        return JSON.stringify({
          type: "error",
          error: `model expects ${this.config.width}x${this.config.height} images, ` +
            `harness offers ${msg.image_w}x${msg.image_h}`,
        });
      }
      if (msg.prev_k < this.config.prevK) {
        return JSON.stringify({
          type: "error",
          error: `model needs ${this.config.prevK} previous commands, harness offers ${msg.prev_k}`,
        });
      }
      this.ready = true;
      return JSON.stringify({ type: "ready" });
    }
    if (msg.type === "done") return null;
    if (msg.type !== "obs") {
      return JSON.stringify({ type: "error", error: `unexpected message type ${msg.type}` });
    }
    if (!this.ready) {
      return JSON.stringify({ type: "error", error: "observation before handshake" });
    }
    const command = await this.predict(msg as ObsMessage);
    return JSON.stringify({ type: "cmd", command });
  }

  async predict(obs: ObsMessage): Promise<string> {
    const { width, height, prevK } = this.config;
    const raw = Buffer.from(obs.image.pixels_b64, "base64");
    if (raw.length !== width * height) {
      throw new Error(`image payload is ${raw.length} bytes, expected ${width * height}`);
    }
    const pixels = new Float32Array(raw.length);
    for (let i = 0; i < raw.length; i++) pixels[i] = raw[i] / 255;
    const aux = new Float32Array(SENSOR_INPUTS + 5 * prevK);
    aux[0] = obs.sensors.height_m;
    aux[1] = obs.sensors.tof_m;
    aux[2] = obs.sensors.cmd_count;
    for (let i = 0; i < prevK; i++) {
      aux.set(oneHotPrev(obs.prev_cmds[i] ?? 255), SENSOR_INPUTS + 5 * i);
    }
    const pred = tf.tidy(() => {
      const img = tf.tensor4d(pixels, [1, height, width, 1]);
      const auxT = tf.tensor2d(aux, [1, aux.length]);
      return (this.model.predict([img, auxT]) as tf.Tensor).argMax(-1);
    });
    const code = (await pred.data())[0];
    pred.dispose();
    return commandName(code);
  }
}

export async function serveStdio(model: tf.LayersModel, config: ModelConfig): Promise<void> {
  const session = new PolicySession(model, config);
  const rl = readline.createInterface({ input: process.stdin });
  for await (const line of rl) {
    if (!line.trim()) continue;
    const reply = await session.handleLine(line);
    if (reply === null) continue;
    process.stdout.write(reply + "\n");
    if (reply.includes('"error"')) process.exit(1);
  }
}

export function serveTcp(model: tf.LayersModel, config: ModelConfig, port: number): net.Server {
  // one flight connection at a time; parallel harnesses run multiple servers
  const server = net.createServer((socket) => {
    const session = new PolicySession(model, config);
    const rl = readline.createInterface({ input: socket });
    rl.on("line", (line) => {
      if (!line.trim()) return;
      void session.handleLine(line).then((reply) => {
        if (reply !== null) socket.write(reply + "\n");
      });
    });
    socket.on("error", () => socket.destroy());
  });
  server.listen(port);
  return server;
}
