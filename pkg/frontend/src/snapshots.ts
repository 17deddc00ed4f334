/**
 * Solution snapshots: one panel per state component, each input file
 * drawn as one stair curve per panel. The files are stair-stepped by
 * the writer, so plain polylines reproduce the piecewise-constant
 * profiles exactly.
 */
import { SchemaError, Snapshot } from "./schema.js";
import {
  DEFAULT_FRAME,
  Frame,
  LegendEntry,
  document as svgDocument,
  legend,
  makeAxes,
  padDomain,
  polyline,
} from "./svg.js";

/** Line colors cycled over the input files. */
export const SERIES_COLORS = [
  "#2471a3",
  "#c0392b",
  "#1e8449",
  "#b7950b",
  "#7d3c98",
  "#148f77",
  "#a04000",
  "#5d6d7e",
];

export interface LabeledSnapshot {
  label: string;
  file: string;
  snapshot: Snapshot;
}

/** Render snapshot CSVs (all with the same components) to SVG text. */
export function renderSnapshots(
  inputs: LabeledSnapshot[],
  frameOverrides: Partial<Frame> = {},
): string {
  if (inputs.length === 0) {
    const frame: Frame = {
      ...DEFAULT_FRAME,
      title: "solution snapshots",
      ...frameOverrides,
    };
    const axes = makeAxes(frame, [0, 1], [0, 1]);
    return svgDocument(frame, [
      ...axes.body,
      ...legend(frame, [], "(no input files)"),
    ]);
  }

  const components = inputs[0].snapshot.components;
  for (const input of inputs) {
    if (input.snapshot.components.join(",") !== components.join(",")) {
      throw new SchemaError(
        input.file,
        1,
        `components (${input.snapshot.components.join(",")}) differ ` +
          `from the first file's (${components.join(",")})`,
      );
    }
  }

  const panel: Frame = {
    ...DEFAULT_FRAME,
    height: 340,
    ...frameOverrides,
  };
  const xsAll = inputs.flatMap((input) => input.snapshot.x);
  const xDomain = padDomain(Math.min(...xsAll), Math.max(...xsAll), 0.02);

  const body: string[] = [];
  for (let c = 0; c < components.length; c++) {
    const valsAll = inputs.flatMap((input) => input.snapshot.values[c]);
    const yDomain = padDomain(Math.min(...valsAll), Math.max(...valsAll));
    const frame: Frame = {
      ...panel,
      title: c === 0 ? panel.title || "solution snapshots" : "",
      xLabel: c === components.length - 1 ? "x" : "",
      yLabel: components[c],
    };
    const axes = makeAxes(frame, xDomain, yDomain);
    const panelBody = [...axes.body];
    inputs.forEach((input, i) => {
      const points = input.snapshot.x.map(
        (x, k) =>
          [axes.x(x), axes.y(input.snapshot.values[c][k])] as [number, number],
      );
      panelBody.push(
        polyline(points, SERIES_COLORS[i % SERIES_COLORS.length], 1.6),
      );
    });
    if (c === 0) {
      const entries: LegendEntry[] = inputs.map((input, i) => ({
        label: input.label,
        color: SERIES_COLORS[i % SERIES_COLORS.length],
      }));
      panelBody.push(...legend(frame, entries));
    }
    body.push(`<g transform="translate(0 ${c * panel.height})">`);
    body.push(...panelBody);
    body.push("</g>");
  }

  const total: Frame = {
    ...panel,
    height: panel.height * components.length,
  };
  return svgDocument(total, body);
}
