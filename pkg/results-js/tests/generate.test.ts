import { describe, expect, it } from "vitest";

import { generateRandomRxProgram } from "../src/generate.js";

const TRIPLE = /prepare_all\nRx q\[0\] (\d+\.\d{6})\nmeasure_all\n/g;

function angles(program: string): number[] {
  return [...program.matchAll(TRIPLE)].map((match) => Number(match[1]));
}

describe("generateRandomRxProgram", () => {
  it("emits the register header and one triple per shot", () => {
    const program = generateRandomRxProgram(100, 1);
    expect(program.startsWith("register q[1]\n\n")).toBe(true);
    expect(angles(program).length).toBe(100);
    expect((program.match(/prepare_all/g) ?? []).length).toBe(100);
    expect((program.match(/measure_all/g) ?? []).length).toBe(100);
  });

  it("emits exactly one triple for a single shot", () => {
    expect(angles(generateRandomRxProgram(1, 5)).length).toBe(1);
  });

  it("is deterministic for a fixed seed", () => {
    expect(generateRandomRxProgram(50, 123)).toBe(
      generateRandomRxProgram(50, 123),
    );
  });

  it("varies with the seed", () => {
    expect(generateRandomRxProgram(50, 1)).not.toBe(
      generateRandomRxProgram(50, 2),
    );
  });

  it("keeps every angle inside [0, 2*pi)", () => {
    for (const angle of angles(generateRandomRxProgram(500, 7))) {
      expect(angle).toBeGreaterThanOrEqual(0);
      expect(angle).toBeLessThan(2 * Math.PI);
    }
  });

  it("spreads angles over the whole range", () => {
    const sample = angles(generateRandomRxProgram(500, 11));
    expect(Math.min(...sample)).toBeLessThan(1);
    expect(Math.max(...sample)).toBeGreaterThan(5);
  });

  it("rejects bad shot counts and seeds", () => {
    expect(() => generateRandomRxProgram(0, 1)).toThrow(RangeError);
    expect(() => generateRandomRxProgram(2.5, 1)).toThrow(RangeError);
    expect(() => generateRandomRxProgram(10, 0.5)).toThrow(RangeError);
  });
});
