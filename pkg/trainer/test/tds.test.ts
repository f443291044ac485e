import * as fs from "fs";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { parseTds, readDataset } from "../src/tds";

const SMALL_TDS = path.join(__dirname, ".fixtures", "small_160x120.tds");

describe("TDS1 reader", () => {
  it("parses a dataset produced by the simulator", () => {
    const ds = readDataset(SMALL_TDS);
    expect(ds.width).toBe(160);
    expect(ds.height).toBe(120);
    expect(ds.prevK).toBe(2);
    expect(ds.samples.length).toBe(24);
    // flights start with takeoff and the first sample has no history
    expect(ds.samples[0].label).toBe(0);
    expect(ds.samples[0].prevCmds).toEqual([255, 255]);
    expect(ds.samples[1].prevCmds[0]).toBe(ds.samples[0].label);
    for (const s of ds.samples) {
      expect(s.pixels.length).toBe(160 * 120);
      expect(s.label).toBeGreaterThanOrEqual(0);
      expect(s.label).toBeLessThan(5);
      expect(s.tofM).toBeGreaterThanOrEqual(s.heightM - 1e-9);
    }
  });

  it("rejects a flipped magic byte", () => {
    const buf = Buffer.from(fs.readFileSync(SMALL_TDS));
    buf[0] ^= 0xff;
    expect(() => parseTds(buf)).toThrow(/magic/);
  });

  it("rejects a truncated body", () => {
    const buf = fs.readFileSync(SMALL_TDS);
    expect(() => parseTds(buf.subarray(0, buf.length - 7))).toThrow(/truncated/);
  });

  it("rejects an unsupported version", () => {
    const buf = Buffer.from(fs.readFileSync(SMALL_TDS));
    buf.writeUInt16LE(9, 4);
    expect(() => parseTds(buf)).toThrow(/version/);
  });
});
