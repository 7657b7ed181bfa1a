/**
 * Array-native bindings for the sigkernels command-line interface.
 *
 * Every function marshals plain number arrays into the CLI's file formats
 * (JSONL datasets in a temp directory), invokes one subcommand, and parses
 * the JSON/CSV/binary artifacts back. No numerics happen here, so results
 * are bit-identical to driving the CLI directly with the same configuration
 * and seed.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export type KernelFamily = "linear" | "rbf" | "exponential";
export type KernelMethod = "dp" | "pde";

export interface KernelOptions {
  family?: KernelFamily;
  bandwidth?: number;
  scale?: number;
  method?: KernelMethod;
  /** Truncation level for the dp method. */
  level?: number;
  /** Dyadic refinement order for the pde method. */
  dyadicOrder?: number;
  /** Robust normalization (dp only). */
  normalize?: boolean;
  normC?: number;
  normAlpha?: number;
  /** Per-degree weights; the first entry must be 1. */
  levelWeights?: number[];
  /** Preprocessing pipeline (applied as subsample, standardize, leadLag, addTime). */
  subsample?: number;
  standardize?: boolean;
  leadLag?: boolean;
  addTime?: number;
  workers?: number;
  seed?: number;
}

export interface TestOptions extends KernelOptions {
  permutations?: number;
  alpha?: number;
}

export type Matrix = number[][];

export interface KernelResult {
  value: number;
  /** Per-degree contributions; present for the dp method only. */
  levels?: number[];
}

export interface NystromResult {
  values: Matrix;
  landmarks: number[];
  rank: number;
}

export interface TestResult {
  mmd2: number;
  p_value: number;
  reject: boolean;
  alpha: number;
  permutations: number;
  seed: number;
  estimator: string;
}

/** Invalid arguments detected before the CLI is ever invoked. */
export class BindingError extends Error {}
/** The CLI rejected the configuration (exit code 2). */
export class ConfigError extends Error {}
/** The CLI rejected the data (exit code 3). */
export class DataError extends Error {}
/** A numerical guard tripped in the CLI (exit code 4). */
export class NumericalGuardError extends Error {}

const OPTION_KEYS: ReadonlySet<string> = new Set([
  "family",
  "bandwidth",
  "scale",
  "method",
  "level",
  "dyadicOrder",
  "normalize",
  "normC",
  "normAlpha",
  "levelWeights",
  "subsample",
  "standardize",
  "leadLag",
  "addTime",
  "workers",
  "seed",
]);

const FAMILIES: ReadonlySet<string> = new Set(["linear", "rbf", "exponential"]);
const METHODS: ReadonlySet<string> = new Set(["dp", "pde"]);

function checkFiniteNumber(name: string, v: unknown): number {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new BindingError(`${name} must be a finite number, got ${String(v)}`);
  }
  return v;
}

function checkInteger(name: string, v: unknown): number {
  const n = checkFiniteNumber(name, v);
  if (!Number.isInteger(n)) {
    throw new BindingError(`${name} must be an integer, got ${n}`);
  }
  return n;
}

function validateOptions(options: KernelOptions, extra: ReadonlySet<string> = new Set()): void {
  for (const key of Object.keys(options)) {
    if (!OPTION_KEYS.has(key) && !extra.has(key)) {
      throw new BindingError(`unknown option ${JSON.stringify(key)}`);
    }
  }
  if (options.family !== undefined && !FAMILIES.has(options.family)) {
    throw new BindingError(`family must be one of linear|rbf|exponential, got ${options.family}`);
  }
  if (options.method !== undefined && !METHODS.has(options.method)) {
    throw new BindingError(`method must be dp or pde, got ${options.method}`);
  }
  if (options.bandwidth !== undefined && !(checkFiniteNumber("bandwidth", options.bandwidth) > 0)) {
    throw new BindingError(`bandwidth must be > 0, got ${options.bandwidth}`);
  }
  if (options.scale !== undefined && !(checkFiniteNumber("scale", options.scale) > 0)) {
    throw new BindingError(`scale must be > 0, got ${options.scale}`);
  }
  if (options.level !== undefined && checkInteger("level", options.level) < 0) {
    throw new BindingError(`level must be >= 0, got ${options.level}`);
  }
  if (options.dyadicOrder !== undefined && checkInteger("dyadicOrder", options.dyadicOrder) < 0) {
    throw new BindingError(`dyadicOrder must be >= 0, got ${options.dyadicOrder}`);
  }
  if (options.normC !== undefined && !(checkFiniteNumber("normC", options.normC) >= 1)) {
    throw new BindingError(`normC must be >= 1, got ${options.normC}`);
  }
  if (options.normAlpha !== undefined && !(checkFiniteNumber("normAlpha", options.normAlpha) > 0)) {
    throw new BindingError(`normAlpha must be > 0, got ${options.normAlpha}`);
  }
  if (options.levelWeights !== undefined) {
    if (!Array.isArray(options.levelWeights) || options.levelWeights.length === 0) {
      throw new BindingError("levelWeights must be a non-empty number array");
    }
    options.levelWeights.forEach((w, i) => {
      if (checkFiniteNumber(`levelWeights[${i}]`, w) < 0) {
        throw new BindingError(`levelWeights[${i}] must be >= 0, got ${w}`);
      }
    });
    if (options.levelWeights[0] !== 1) {
      throw new BindingError("levelWeights[0] must be 1");
    }
  }
  if (options.subsample !== undefined && checkInteger("subsample", options.subsample) < 1) {
    throw new BindingError(`subsample must be >= 1, got ${options.subsample}`);
  }
  if (options.addTime !== undefined && !(checkFiniteNumber("addTime", options.addTime) > 0)) {
    throw new BindingError(`addTime must be > 0, got ${options.addTime}`);
  }
  if (options.workers !== undefined && checkInteger("workers", options.workers) < 1) {
    throw new BindingError(`workers must be >= 1, got ${options.workers}`);
  }
  if (options.seed !== undefined) {
    checkInteger("seed", options.seed);
  }
}

function validateSequence(name: string, seq: Matrix): number {
  if (!Array.isArray(seq) || seq.length === 0) {
    throw new BindingError(`${name} must be a non-empty 2-d array shaped (points, dim)`);
  }
  const first = seq[0];
  if (!Array.isArray(first) || first.length === 0) {
    throw new BindingError(`${name} rows must be non-empty coordinate arrays`);
  }
  const dim = first.length;
  seq.forEach((row, i) => {
    if (!Array.isArray(row) || row.length !== dim) {
      throw new BindingError(`${name} row ${i} has ${Array.isArray(row) ? row.length : "no"} coordinates, expected ${dim}`);
    }
    row.forEach((v, j) => checkFiniteNumber(`${name}[${i}][${j}]`, v));
  });
  return dim;
}

function validateSequenceList(name: string, seqs: Matrix[]): number {
  if (!Array.isArray(seqs) || seqs.length === 0) {
    throw new BindingError(`${name} must be a non-empty list of sequences`);
  }
  const dims = seqs.map((s, i) => validateSequence(`${name}[${i}]`, s));
  if (new Set(dims).size !== 1) {
    throw new BindingError(`${name} sequences have mixed dimensions: ${[...new Set(dims)].join(", ")}`);
  }
  return dims[0]!;
}

function optionFlags(options: KernelOptions): string[] {
  const flags: string[] = [];
  const push = (flag: string, v: unknown) => flags.push(flag, String(v));
  if (options.family !== undefined) push("--family", options.family);
  if (options.bandwidth !== undefined) push("--bandwidth", options.bandwidth);
  if (options.scale !== undefined) push("--scale", options.scale);
  if (options.method !== undefined) push("--method", options.method);
  if (options.level !== undefined) push("--level", options.level);
  if (options.dyadicOrder !== undefined) push("--dyadic-order", options.dyadicOrder);
  if (options.normalize !== undefined) flags.push(options.normalize ? "--normalize" : "--no-normalize");
  if (options.normC !== undefined) push("--norm-C", options.normC);
  if (options.normAlpha !== undefined) push("--norm-alpha", options.normAlpha);
  if (options.levelWeights !== undefined) push("--level-weights", options.levelWeights.join(","));
  if (options.subsample !== undefined) push("--subsample", options.subsample);
  if (options.standardize !== undefined) flags.push(options.standardize ? "--standardize" : "--no-standardize");
  if (options.leadLag !== undefined) flags.push(options.leadLag ? "--lead-lag" : "--no-lead-lag");
  if (options.addTime !== undefined) push("--add-time", options.addTime);
  if (options.workers !== undefined) push("--workers", options.workers);
  if (options.seed !== undefined) push("--seed", options.seed);
  return flags;
}

function cliCommand(): string[] {
  const override = process.env.SIGKERN_CLI;
  if (override && override.trim().length > 0) {
    return override.trim().split(/\s+/);
  }
  return ["sigkern"];
}

export function runCli(args: string[]): string {
  const [cmd, ...prefix] = cliCommand();
  const proc = spawnSync(cmd!, [...prefix, ...args], { encoding: "utf-8", maxBuffer: 1 << 28 });
  if (proc.error) {
    throw new Error(`failed to launch the sigkernels CLI (${cmd}): ${proc.error.message}`);
  }
  if (proc.status === 2) throw new ConfigError(proc.stderr.trim());
  if (proc.status === 3) throw new DataError(proc.stderr.trim());
  if (proc.status === 4) throw new NumericalGuardError(proc.stderr.trim());
  if (proc.status !== 0) {
    throw new Error(`sigkernels CLI failed with code ${proc.status}: ${proc.stderr}`);
  }
  return proc.stdout;
}

function writeDataset(dir: string, name: string, seqs: Matrix[]): string {
  const file = path.join(dir, name);
  const lines = seqs.map((points, i) => JSON.stringify({ id: `s${i}`, points }));
  fs.writeFileSync(file, lines.join("\n") + "\n", "utf-8");
  return file;
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "sigkern-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

const GRAM_MAGIC = "SIGGRAM1";

function readGramBinary(file: string): Matrix {
  const buf = fs.readFileSync(file);
  if (buf.length < 16 || buf.toString("latin1", 0, 8) !== GRAM_MAGIC) {
    throw new DataError(`${file}: not a gram binary`);
  }
  const n = Number(buf.readBigUInt64LE(8));
  if (buf.length !== 16 + 8 * n * n) {
    throw new DataError(`${file}: truncated gram binary`);
  }
  const values: Matrix = [];
  for (let i = 0; i < n; i++) {
    const row: number[] = [];
    for (let j = 0; j < n; j++) {
      row.push(buf.readDoubleLE(16 + 8 * (i * n + j)));
    }
    values.push(row);
  }
  return values;
}

function kernelReport(x: Matrix, y: Matrix, options: KernelOptions): { value: number; levels?: number[] } {
  validateOptions(options);
  const dx = validateSequence("x", x);
  const dy = validateSequence("y", y);
  if (dx !== dy) {
    throw new BindingError(`dimension mismatch: x has ${dx}, y has ${dy}`);
  }
  return withTempDir((dir) => {
    const report = path.join(dir, "report.json");
    runCli([
      "kernel",
      "--x",
      writeDataset(dir, "x.jsonl", [x]),
      "--y",
      writeDataset(dir, "y.jsonl", [y]),
      "--json",
      report,
      ...optionFlags(options),
    ]);
    const parsed = JSON.parse(fs.readFileSync(report, "utf-8"));
    return { value: parsed.value as number, levels: parsed.levels as number[] | undefined };
  });
}

/** Truncated signature kernel of two sequences shaped (points, dim). */
export function sigKernel(x: Matrix, y: Matrix, options: KernelOptions = {}): KernelResult {
  const report = kernelReport(x, y, options);
  return report.levels !== undefined ? { value: report.value, levels: report.levels } : { value: report.value };
}

/** Untruncated signature kernel via the PDE solver. */
export function sigKernelPde(x: Matrix, y: Matrix, options: KernelOptions = {}): number {
  if (options.method !== undefined && options.method !== "pde") {
    throw new BindingError("sigKernelPde always uses method pde");
  }
  return kernelReport(x, y, { ...options, method: "pde" }).value;
}

/** Robust (normalized) truncated signature kernel. */
export function robustSigKernel(x: Matrix, y: Matrix, options: KernelOptions = {}): number {
  if (options.normalize === false) {
    throw new BindingError("robustSigKernel always normalizes");
  }
  return kernelReport(x, y, { ...options, normalize: true }).value;
}

/** Symmetric Gram matrix over a list of sequences. */
export function gram(sequences: Matrix[], options: KernelOptions = {}): Matrix {
  validateOptions(options);
  validateSequenceList("sequences", sequences);
  return withTempDir((dir) => {
    const out = path.join(dir, "gram.bin");
    runCli([
      "gram",
      "--data",
      writeDataset(dir, "data.jsonl", sequences),
      "--out",
      out,
      ...optionFlags(options),
    ]);
    return readGramBinary(out);
  });
}

/** Nystrom approximation of the Gram matrix from `rank` random landmarks. */
export function nystrom(sequences: Matrix[], rank: number, options: KernelOptions = {}): NystromResult {
  validateOptions(options);
  validateSequenceList("sequences", sequences);
  const n = sequences.length;
  checkInteger("rank", rank);
  if (rank < 1 || rank > n) {
    throw new BindingError(`rank must be in [1, ${n}], got ${rank}`);
  }
  return withTempDir((dir) => {
    const out = path.join(dir, "gram.bin");
    const report = path.join(dir, "report.json");
    runCli([
      "gram",
      "--data",
      writeDataset(dir, "data.jsonl", sequences),
      "--out",
      out,
      "--nystrom-rank",
      String(rank),
      "--json",
      report,
      ...optionFlags(options),
    ]);
    const parsed = JSON.parse(fs.readFileSync(report, "utf-8"));
    return {
      values: readGramBinary(out),
      landmarks: parsed.nystrom.landmarks as number[],
      rank: parsed.nystrom.rank as number,
    };
  });
}

/** Two-sample permutation test between two samples of sequences. */
export function permutationTest(X: Matrix[], Y: Matrix[], options: TestOptions = {}): TestResult {
  const { permutations, alpha, ...kernelOptions } = options;
  validateOptions(kernelOptions);
  const dx = validateSequenceList("X", X);
  const dy = validateSequenceList("Y", Y);
  if (dx !== dy) {
    throw new BindingError(`dimension mismatch: X has ${dx}, Y has ${dy}`);
  }
  if (permutations !== undefined && checkInteger("permutations", permutations) < 1) {
    throw new BindingError(`permutations must be >= 1, got ${permutations}`);
  }
  if (alpha !== undefined && !(checkFiniteNumber("alpha", alpha) > 0 && alpha < 1)) {
    throw new BindingError(`alpha must be in (0, 1), got ${alpha}`);
  }
  return withTempDir((dir) => {
    const report = path.join(dir, "report.json");
    const args = [
      "test2",
      "--x",
      writeDataset(dir, "x.jsonl", X),
      "--y",
      writeDataset(dir, "y.jsonl", Y),
      "--json",
      report,
      ...optionFlags(kernelOptions),
    ];
    if (permutations !== undefined) args.push("--permutations", String(permutations));
    if (alpha !== undefined) args.push("--alpha", String(alpha));
    runCli(args);
    const parsed = JSON.parse(fs.readFileSync(report, "utf-8"));
    return parsed.result as TestResult;
  });
}
