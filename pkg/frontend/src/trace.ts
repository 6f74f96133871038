/**
 * Reader for simulator trace exports.
 *
 * A trace is a plain numeric CSV whose header follows the documented
 * naming: `t`, `y0`, then per follower i (1-based) `y{i}`, `e{i}`,
 * per-step series `z{i}{j}` / `a{i}{j}`, the input `u{i}`, and the
 * weight norms `wc{i}{j}`, `wa{i}{j}`, `th{i}{j}`, `dh{i}{j}`.  A JSON
 * sidecar (`trace.json` next to `trace.csv`) carries run metadata and
 * the settling-time summary.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";

export interface Trace {
  /** column name -> values, shared time grid */
  columns: Map<string, number[]>;
  nFollowers: number;
  nSteps: number;
}

export interface Sidecar {
  name?: string;
  summary?: {
    settling_threshold?: number;
    settling_times?: Array<number | string>;
  };
  [key: string]: unknown;
}

export class TraceFormatError extends Error {}

export class MissingColumnError extends TraceFormatError {
  constructor(missing: string[], available: string[]) {
    super(
      `trace is missing column(s) ${missing.join(", ")}; ` +
        `expected the simulator CSV schema ` +
        `(t, y0, y{i}, e{i}, z{i}{j}, a{i}{j}, u{i}, wc{i}{j}, wa{i}{j}, ` +
        `th{i}{j}, dh{i}{j}), got: ${available.join(", ")}`,
    );
  }
}

export function parseTraceCsv(text: string): Trace {
  const lines = text.split(/\r?\n/).filter((l) => l.trim() !== "");
  if (lines.length < 2) {
    throw new MissingColumnError(
      ["t", "y0"],
      lines.length ? lines[0].split(",") : [],
    );
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (let r = 1; r < lines.length; r++) {
    const cells = lines[r].split(",");
    if (cells.length !== header.length) {
      throw new TraceFormatError(
        `row ${r} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    for (let c = 0; c < header.length; c++) {
      const v = Number(cells[c]);
      if (Number.isNaN(v)) {
        throw new TraceFormatError(
          `row ${r}, column ${header[c]}: not a number: ${cells[c].trim()}`,
        );
      }
      columns.get(header[c])!.push(v);
    }
  }
  let nFollowers = 0;
  while (columns.has(`y${nFollowers + 1}`)) nFollowers++;
  let nSteps = 0;
  while (columns.has(`z1${nSteps + 1}`)) nSteps++;
  return { columns, nFollowers, nSteps };
}

export function loadTrace(path: string): Trace {
  return parseTraceCsv(readFileSync(path, "utf-8"));
}

/** Load the JSON sidecar written next to the CSV, if present. */
export function loadSidecar(csvPath: string): Sidecar | null {
  const sidecarPath = join(dirname(csvPath), "trace.json");
  try {
    return JSON.parse(readFileSync(sidecarPath, "utf-8")) as Sidecar;
  } catch {
    return null;
  }
}

/** Fetch columns by name, raising one aggregate error for absentees. */
export function requireColumns(trace: Trace, names: string[]): number[][] {
  const missing = names.filter((n) => !trace.columns.has(n));
  if (missing.length) {
    throw new MissingColumnError(missing, [...trace.columns.keys()]);
  }
  return names.map((n) => trace.columns.get(n)!);
}
