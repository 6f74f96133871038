import { describe, expect, it } from "vitest";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import {
  loadSidecar,
  loadTrace,
  MissingColumnError,
  parseTraceCsv,
  requireColumns,
  TraceFormatError,
} from "../src/trace.js";

const FIXTURE = join(
  dirname(fileURLToPath(import.meta.url)),
  "fixtures",
  "example1",
  "trace.csv",
);

const TINY =
  "t,y0,y1,y2,e1,e2,z11,z12,z21,z22\n" +
  "0,0,1,2,0.5,1,1,0,2,0\n" +
  "0.5,0.1,0.6,1.1,0.25,0.5,0.5,0,1,0\n" +
  "1,0.2,0.25,0.3,0.02,0.05,0.05,0,0.1,0\n";

describe("parseTraceCsv", () => {
  it("parses columns and counts followers and steps", () => {
    const trace = parseTraceCsv(TINY);
    expect(trace.nFollowers).toBe(2);
    expect(trace.nSteps).toBe(2);
    expect(trace.columns.get("t")).toEqual([0, 0.5, 1]);
    expect(trace.columns.get("y2")).toEqual([2, 1.1, 0.3]);
  });

  it("rejects an empty trace with a schema hint", () => {
    expect(() => parseTraceCsv("")).toThrow(MissingColumnError);
    expect(() => parseTraceCsv("t,y0\n")).toThrow(/expected the simulator/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseTraceCsv("t,y0\n0,1\n0.1\n")).toThrow(TraceFormatError);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseTraceCsv("t,y0\n0,oops\n")).toThrow(/not a number/);
  });
});

describe("requireColumns", () => {
  it("returns the requested columns in order", () => {
    const trace = parseTraceCsv(TINY);
    const [t, y1] = requireColumns(trace, ["t", "y1"]);
    expect(t).toEqual([0, 0.5, 1]);
    expect(y1).toEqual([1, 0.6, 0.25]);
  });

  it("names every missing column in one error", () => {
    const trace = parseTraceCsv(TINY);
    expect(() => requireColumns(trace, ["y9", "wc11"])).toThrow(
      /missing column\(s\) y9, wc11/,
    );
  });
});

describe("fixture round trip", () => {
  it("loads the generated example trace", () => {
    const trace = loadTrace(FIXTURE);
    expect(trace.nFollowers).toBe(4);
    expect(trace.nSteps).toBe(2);
    expect(trace.columns.get("t")![0]).toBe(0);
  });

  it("loads the sidecar next to the csv", () => {
    const sidecar = loadSidecar(FIXTURE);
    expect(sidecar?.summary?.settling_times).toHaveLength(4);
  });

  it("returns null for an absent sidecar", () => {
    expect(loadSidecar("/nonexistent/trace.csv")).toBeNull();
  });
});
