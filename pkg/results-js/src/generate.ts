/**
 * Program generation: randomized single-qubit experiments written as
 * plain Jaqal source, since the language itself has no randomness.
 */

import { RandomStream } from "./prng.js";

/**
 * Emit a one-qubit program of nShots prepare / Rx(random angle) /
 * measure triples. Angles are uniform in [0, 2*pi) and rendered with
 * six decimals, so the text is stable for a fixed seed.
 */
export function generateRandomRxProgram(nShots: number, seed: number): string {
  if (!Number.isInteger(nShots) || nShots < 1) {
    throw new RangeError(`nShots must be a positive integer, got ${nShots}`);
  }
  if (!Number.isInteger(seed)) {
    throw new RangeError(`seed must be an integer, got ${seed}`);
  }
  const stream = new RandomStream(seed);
  const parts: string[] = ["register q[1]\n\n"];
  for (let i = 0; i < nShots; i++) {
    const angle = stream.nextDouble() * 2 * Math.PI;
    parts.push(`prepare_all\nRx q[0] ${angle.toFixed(6)}\nmeasure_all\n\n`);
  }
  return parts.join("");
}
