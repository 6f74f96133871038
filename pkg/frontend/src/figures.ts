/**
 * Figure assembly: turn a trace into named data series per figure kind.
 *
 * Kinds:
 *  - `outputs`: leader output overlaid with every follower output.
 *  - `tracking_error`: y_i - y_0 per follower.
 *  - `weight_norms`: critic and actor weight norms per follower and step.
 *  - `settling_summary`: per-follower settling time (from the JSON
 *    sidecar) as step series against the threshold band.
 */

import { MissingColumnError, requireColumns, Sidecar, Trace } from "./trace.js";

export const FIGURE_KINDS = [
  "outputs",
  "tracking_error",
  "weight_norms",
  "settling_summary",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Figure {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

function followerRange(trace: Trace): number[] {
  if (trace.nFollowers === 0) {
    throw new MissingColumnError(["y1"], [...trace.columns.keys()]);
  }
  return Array.from({ length: trace.nFollowers }, (_, i) => i + 1);
}

function outputsFigure(trace: Trace): Figure {
  const [t, y0] = requireColumns(trace, ["t", "y0"]);
  const series: Series[] = [{ label: "leader", x: t, y: y0 }];
  for (const i of followerRange(trace)) {
    const [yi] = requireColumns(trace, [`y${i}`]);
    series.push({ label: `follower ${i}`, x: t, y: yi });
  }
  return { title: "Outputs", xLabel: "t [s]", yLabel: "y", series };
}

function trackingErrorFigure(trace: Trace): Figure {
  const [t, y0] = requireColumns(trace, ["t", "y0"]);
  const series: Series[] = [];
  for (const i of followerRange(trace)) {
    const [yi] = requireColumns(trace, [`y${i}`]);
    series.push({
      label: `follower ${i}`,
      x: t,
      y: yi.map((v, r) => v - y0[r]),
    });
  }
  return {
    title: "Tracking error",
    xLabel: "t [s]",
    yLabel: "y_i - y_0",
    series,
  };
}

function weightNormsFigure(trace: Trace): Figure {
  const [t] = requireColumns(trace, ["t"]);
  if (trace.nSteps === 0) {
    throw new MissingColumnError(["z11"], [...trace.columns.keys()]);
  }
  const series: Series[] = [];
  for (const i of followerRange(trace)) {
    for (let j = 1; j <= trace.nSteps; j++) {
      const [wc, wa] = requireColumns(trace, [`wc${i}${j}`, `wa${i}${j}`]);
      series.push({ label: `critic ${i},${j}`, x: t, y: wc });
      series.push({ label: `actor ${i},${j}`, x: t, y: wa });
    }
  }
  return {
    title: "Critic and actor weight norms",
    xLabel: "t [s]",
    yLabel: "norm",
    series,
  };
}

function settlingSummaryFigure(trace: Trace, sidecar: Sidecar | null): Figure {
  const times = sidecar?.summary?.settling_times;
  if (!times) {
    throw new Error(
      "settling_summary needs the trace.json sidecar with summary.settling_times",
    );
  }
  const horizonCol = requireColumns(trace, ["t"])[0];
  const horizon = horizonCol[horizonCol.length - 1];
  const agents = times.map((_, i) => i + 1);
  return {
    title: "Settling time per follower",
    xLabel: "follower",
    yLabel: "settling time [s]",
    series: [
      {
        label: "settling time",
        x: agents,
        // a run that never settles is drawn at the horizon
        y: times.map((v) => (typeof v === "number" ? v : horizon)),
      },
    ],
  };
}

export function buildFigure(
  kind: FigureKind,
  trace: Trace,
  sidecar: Sidecar | null = null,
): Figure {
  switch (kind) {
    case "outputs":
      return outputsFigure(trace);
    case "tracking_error":
      return trackingErrorFigure(trace);
    case "weight_norms":
      return weightNormsFigure(trace);
    case "settling_summary":
      return settlingSummaryFigure(trace, sidecar);
    default: {
      const exhaustive: never = kind;
      throw new Error(`unknown figure kind ${String(exhaustive)}`);
    }
  }
}
