export { parseOutput, ResultsError } from "./output.js";
export type { ResultsErrorCode, ShotTable } from "./output.js";
export { generateRandomRxProgram } from "./generate.js";
export { RandomStream } from "./prng.js";
