/**
 * Parser for measurement output files.
 *
 * An output file is ASCII text with Linux line endings: one line per
 * measurement, each line a bitstring whose length equals the register
 * size. Character i of a line is the outcome of qubit i.
 */

export type ResultsErrorCode = "RAGGED_LINES" | "ILLEGAL_CHARACTER";

export class ResultsError extends Error {
  readonly code: ResultsErrorCode;
  /** 1-based line number of the offending input line. */
  readonly line: number;

  constructor(code: ResultsErrorCode, line: number, message: string) {
    super(`${code} at line ${line}: ${message}`);
    this.name = "ResultsError";
    this.code = code;
    this.line = line;
  }
}

export interface ShotTable {
  /** Register size; 0 when the input is empty. */
  nQubits: number;
  /** One entry per measurement, in file order; entry i of a shot is qubit i. */
  shots: number[][];
  /** Occurrences per bitstring, keyed exactly as the lines appear. */
  counts: Record<string, number>;
}

export function parseOutput(data: string | Uint8Array): ShotTable {
  let text = typeof data === "string" ? data : new TextDecoder().decode(data);
  // A well-formed file ends with a newline; accept a missing final one.
  if (text.endsWith("\n")) {
    text = text.slice(0, -1);
  }
  if (text === "") {
    return { nQubits: 0, shots: [], counts: {} };
  }

  const lines = text.split("\n");
  const nQubits = lines[0].length;
  const shots: number[][] = [];
  const counts: Record<string, number> = {};

  lines.forEach((line, index) => {
    const lineNumber = index + 1;
    if (line.length === 0) {
      throw new ResultsError("RAGGED_LINES", lineNumber, "blank line");
    }
    for (let i = 0; i < line.length; i++) {
      const ch = line[i];
      if (ch !== "0" && ch !== "1") {
        throw new ResultsError(
          "ILLEGAL_CHARACTER",
          lineNumber,
          `expected '0' or '1', found ${JSON.stringify(ch)} at column ${i + 1}`,
        );
      }
    }
    if (line.length !== nQubits) {
      throw new ResultsError(
        "RAGGED_LINES",
        lineNumber,
        `expected ${nQubits} bits, found ${line.length}`,
      );
    }
    shots.push(Array.from(line, (ch) => (ch === "1" ? 1 : 0)));
    counts[line] = (counts[line] ?? 0) + 1;
  });

  return { nQubits, shots, counts };
}
