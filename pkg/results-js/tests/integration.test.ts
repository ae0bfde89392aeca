/**
 * Cross-package checks against the installed `jaqal` toolchain,
 * exercised only through its command line and file formats.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readdirSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it } from "vitest";

import { generateRandomRxProgram } from "../src/generate.js";
import { parseOutput } from "../src/output.js";

const CORPUS_DIR = fileURLToPath(
  new URL("../../tests/corpus/", import.meta.url),
);

const scratch = mkdtempSync(join(tmpdir(), "jaqal-results-"));

afterAll(() => {
  rmSync(scratch, { recursive: true, force: true });
});

function jaqal(args: string[]): { status: number; stdout: string } {
  try {
    const stdout = execFileSync(
      "python3",
      ["-m", "jaqal_toolchain.cli", ...args],
      { encoding: "utf8" },
    );
    return { status: 0, stdout };
  } catch (err) {
    const failure = err as { status?: number; stdout?: string };
    return { status: failure.status ?? -1, stdout: failure.stdout ?? "" };
  }
}

describe("round-trip with the simulator", () => {
  const corpusFiles = readdirSync(CORPUS_DIR).filter((name) =>
    name.endsWith(".jaqal"),
  );

  it("finds the corpus", () => {
    expect(corpusFiles.length).toBeGreaterThanOrEqual(4);
  });

  for (const name of corpusFiles) {
    it(`reproduces the in-memory records for ${name}`, () => {
      const { status, stdout } = jaqal([
        "run",
        join(CORPUS_DIR, name),
        "--seed",
        "7",
        "--format",
        "json",
      ]);
      expect(status).toBe(0);
      const payload = JSON.parse(stdout) as {
        register_size: number;
        records: number[][];
        output: string;
      };
      const table = parseOutput(payload.output);
      expect(table.shots).toEqual(payload.records);
      expect(table.nQubits).toBe(payload.register_size);
      const total = Object.values(table.counts).reduce((a, b) => a + b, 0);
      expect(total).toBe(payload.records.length);
    });
  }
});

describe("generated programs against the checker", () => {
  const cases: Array<[number, number]> = [
    [1, 0],
    [5, 42],
    [100, 123456789],
  ];

  for (const [nShots, seed] of cases) {
    it(`passes check for nShots=${nShots} seed=${seed}`, () => {
      const path = join(scratch, `rx_${nShots}_${seed}.jaqal`);
      writeFileSync(path, generateRandomRxProgram(nShots, seed));
      expect(jaqal(["check", path]).status).toBe(0);
    });
  }

  it("runs end to end and yields one line per shot", () => {
    const path = join(scratch, "rx_run.jaqal");
    writeFileSync(path, generateRandomRxProgram(25, 9));
    const { status, stdout } = jaqal(["run", path, "--seed", "3"]);
    expect(status).toBe(0);
    const table = parseOutput(stdout);
    expect(table.nQubits).toBe(1);
    expect(table.shots.length).toBe(25);
  });
});
