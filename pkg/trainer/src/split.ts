/** Seeded, flight-preserving dataset split.
 *
 * Samples captured during the same flight must land in the same
 * partition. Flights are shuffled with a seeded generator and assigned
 * greedily to the partition with the largest shortfall against its
 * target share, which matches each fraction to within one flight.
 */

import { TdsDataset, TdsSample } from "./tds";

const MASK = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;

/** SplitMix64; deterministic across platforms. */
export class Rng {
  private state: bigint;

  constructor(seed: number | bigint) {
    this.state = BigInt(seed) & MASK;
  }

  nextU64(): bigint {
    this.state = (this.state + GAMMA) & MASK;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK;
    return (z ^ (z >> 31n)) & MASK;
  }

  uniform(): number {
    return Number(this.nextU64() >> 11n) / 2 ** 53;
  }

  randint(n: number): number {
    return Math.min(Math.floor(this.uniform() * n), n - 1);
  }

  shuffle<T>(items: T[]): void {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.randint(i + 1);
      [items[i], items[j]] = [items[j], items[i]];
    }
  }
}

export function splitDataset(
  dataset: TdsDataset,
  fractions: number[],
  rng: Rng,
): TdsDataset[] {
  const sum = fractions.reduce((a, b) => a + b, 0);
  if (Math.abs(sum - 1.0) > 1e-9) throw new Error("fractions must sum to 1");
  const byFlight = new Map<number, Array<[number, TdsSample]>>();
  dataset.samples.forEach((s, i) => {
    const group = byFlight.get(s.flightId);
    if (group) group.push([i, s]);
    else byFlight.set(s.flightId, [[i, s]]);
  });
  const flights = [...byFlight.keys()];
  rng.shuffle(flights);
  const assigned: Array<Array<[number, TdsSample]>> = fractions.map(() => []);
  const counts = new Array(fractions.length).fill(0);
  let total = 0;
  for (const fid of flights) {
    const group = byFlight.get(fid)!;
    total += group.length;
    let best = 0;
    let bestDeficit = -Infinity;
    for (let i = 0; i < fractions.length; i++) {
      const deficit = fractions[i] * total - counts[i];
      if (deficit > bestDeficit) {
        bestDeficit = deficit;
        best = i;
      }
    }
    assigned[best].push(...group);
    counts[best] += group.length;
  }
  return assigned.map((part) => ({
    width: dataset.width,
    height: dataset.height,
    prevK: dataset.prevK,
    samples: part.sort((a, b) => a[0] - b[0]).map(([, s]) => s),
  }));
}
