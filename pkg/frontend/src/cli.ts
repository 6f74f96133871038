#!/usr/bin/env node
/**
 * Render one figure kind from a simulator trace export.
 *
 *   ftconsensus-plots --trace out/trace.csv --kind outputs --out outputs.svg
 */

import { writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { buildFigure, FIGURE_KINDS, FigureKind } from "./figures.js";
import { renderSvg } from "./svg.js";
import { loadSidecar, loadTrace, TraceFormatError } from "./trace.js";

export function run(argv: string[]): number {
  const args = yargs(argv)
    .option("trace", {
      type: "string",
      demandOption: true,
      describe: "path to trace.csv",
    })
    .option("kind", {
      choices: FIGURE_KINDS,
      demandOption: true,
      describe: "figure kind",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("width", { type: "number", default: 760 })
    .option("height", { type: "number", default: 440 })
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    const trace = loadTrace(args.trace);
    const sidecar = loadSidecar(args.trace);
    const figure = buildFigure(args.kind as FigureKind, trace, sidecar);
    const svg = renderSvg(figure, { width: args.width, height: args.height });
    writeFileSync(args.out, svg);
    console.log(
      `wrote ${args.out} (${figure.series.length} series, kind ${args.kind})`,
    );
    return 0;
  } catch (err) {
    if (err instanceof TraceFormatError || err instanceof Error) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(hideBin(process.argv)));
}
