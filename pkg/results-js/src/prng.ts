/**
 * xoshiro256** seeded with SplitMix64, on 64-bit words via BigInt.
 * Deterministic across platforms; used only for program generation.
 */

const MASK64 = (1n << 64n) - 1n;

function splitmix64(state: bigint): [bigint, bigint] {
  state = (state + 0x9e3779b97f4a7c15n) & MASK64;
  let z = state;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return [state, (z ^ (z >> 31n)) & MASK64];
}

function rotl(value: bigint, shift: bigint): bigint {
  return ((value << shift) | (value >> (64n - shift))) & MASK64;
}

export class RandomStream {
  private s0: bigint;
  private s1: bigint;
  private s2: bigint;
  private s3: bigint;

  constructor(seed: number | bigint) {
    let state = BigInt(seed) & MASK64;
    [state, this.s0] = splitmix64(state);
    [state, this.s1] = splitmix64(state);
    [state, this.s2] = splitmix64(state);
    [, this.s3] = splitmix64(state);
  }

  nextWord(): bigint {
    const result = (rotl((this.s1 * 5n) & MASK64, 7n) * 9n) & MASK64;
    const t = (this.s1 << 17n) & MASK64;
    this.s2 ^= this.s0;
    this.s3 ^= this.s1;
    this.s1 ^= this.s2;
    this.s0 ^= this.s3;
    this.s2 ^= t;
    this.s3 = rotl(this.s3, 45n);
    return result;
  }

  /** Uniform double in [0, 1) from the top 53 bits of one word. */
  nextDouble(): number {
    return Number(this.nextWord() >> 11n) * 2 ** -53;
  }
}
