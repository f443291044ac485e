/** TDS1 dataset reader.
 *
 * Little-endian layout. 20-byte header: magic "TDS1", version u16,
 * image width u16, image height u16, prev-command window u8, label count
 * u8, sample count u32, flight count u32. Per sample: flight id u32,
 * label u8, height f32, tof f32, command count f32, K previous-command
 * codes (u8, 255 = none, most recent first), then width*height grayscale
 * bytes. A JSONL fallback (one object per line, base64 pixels) exists for
 * debugging.
 */

import * as fs from "fs";

export interface TdsSample {
  flightId: number;
  label: number;
  heightM: number;
  tofM: number;
  cmdCount: number;
  prevCmds: number[];
  pixels: Uint8Array; // row-major, row 0 at the top
}

export interface TdsDataset {
  width: number;
  height: number;
  prevK: number;
  samples: TdsSample[];
}

const MAGIC = "TDS1";
const VERSION = 1;
const HEADER_SIZE = 20;
const SAMPLE_FIXED = 4 + 1 + 4 + 4 + 4;

export function parseTds(buf: Buffer): TdsDataset {
  if (buf.length < HEADER_SIZE) throw new Error("file shorter than TDS1 header");
  if (buf.toString("ascii", 0, 4) !== MAGIC) throw new Error("bad TDS1 magic");
  const version = buf.readUInt16LE(4);
  if (version !== VERSION) throw new Error(`unsupported TDS1 version ${version}`);
  const width = buf.readUInt16LE(6);
  const height = buf.readUInt16LE(8);
  const prevK = buf.readUInt8(10);
  const labelCount = buf.readUInt8(11);
  if (labelCount !== 5) throw new Error(`unexpected label count ${labelCount}`);
  const sampleCount = buf.readUInt32LE(12);
  const flightCount = buf.readUInt32LE(16);
  const pixLen = width * height;
  const record = SAMPLE_FIXED + prevK + pixLen;
  if (buf.length !== HEADER_SIZE + sampleCount * record) {
    throw new Error(
      `truncated TDS1 body: expected ${HEADER_SIZE + sampleCount * record} bytes, got ${buf.length}`,
    );
  }
  const samples: TdsSample[] = [];
  const flights = new Set<number>();
  let off = HEADER_SIZE;
  for (let i = 0; i < sampleCount; i++) {
    const flightId = buf.readUInt32LE(off);
    const label = buf.readUInt8(off + 4);
    const heightM = buf.readFloatLE(off + 5);
    const tofM = buf.readFloatLE(off + 9);
    const cmdCount = buf.readFloatLE(off + 13);
    off += SAMPLE_FIXED;
    const prevCmds = Array.from(buf.subarray(off, off + prevK));
    off += prevK;
    const pixels = new Uint8Array(buf.buffer, buf.byteOffset + off, pixLen);
    off += pixLen;
    flights.add(flightId);
    samples.push({ flightId, label, heightM, tofM, cmdCount, prevCmds, pixels });
  }
  if (flights.size !== flightCount) {
    throw new Error(`header flight count ${flightCount} != body ${flights.size}`);
  }
  return { width, height, prevK, samples };
}

export function readTds(path: string): TdsDataset {
  return parseTds(fs.readFileSync(path));
}

export function readJsonl(path: string): TdsDataset {
  const lines = fs.readFileSync(path, "utf-8").split("\n").filter((l) => l.trim());
  if (lines.length === 0) throw new Error("empty JSONL dataset");
  const samples: TdsSample[] = [];
  let width = 0;
  let height = 0;
  for (const line of lines) {
    const obj = JSON.parse(line);
    width = obj.image.w;
    height = obj.image.h;
    samples.push({
      flightId: obj.flight_id,
      label: obj.label,
      heightM: obj.height_m,
      tofM: obj.tof_m,
      cmdCount: obj.cmd_count,
      prevCmds: obj.prev_cmds,
      pixels: Uint8Array.from(Buffer.from(obj.image.pixels_b64, "base64")),
    });
  }
  return { width, height, prevK: samples[0].prevCmds.length, samples };
}

export function readDataset(path: string): TdsDataset {
  return path.endsWith(".jsonl") ? readJsonl(path) : readTds(path);
}
