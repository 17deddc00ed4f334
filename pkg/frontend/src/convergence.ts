/**
 * Mesh-refinement study curve on log-log axes: successive-mesh L1
 * distance against h, with markers on the measured rungs and a dashed
 * first-order guide anchored at the coarsest measured point.
 */
import { SchemaError, StudyRow } from "./schema.js";
import {
  DEFAULT_FRAME,
  Frame,
  LegendEntry,
  document as svgDocument,
  el,
  legend,
  makeAxes,
  polyline,
} from "./svg.js";

const CURVE_COLOR = "#2471a3";
const GUIDE_COLOR = "#9b9b9b";

/** Render a study table to SVG text (log-log). */
export function renderConvergence(
  rows: StudyRow[],
  file: string,
  frameOverrides: Partial<Frame> = {},
): string {
  // the coarsest rung has no predecessor, hence no distance
  const measured = rows.filter((r) => Number.isFinite(r.distance));
  if (measured.length < 2) {
    throw new SchemaError(
      file,
      1,
      `need at least 2 rows with finite distances, found ${measured.length}`,
    );
  }
  for (const r of measured) {
    if (!(r.h > 0) || !(r.distance > 0)) {
      throw new SchemaError(
        file,
        1 + rows.indexOf(r) + 1,
        "log-log axes need positive h and distance",
      );
    }
  }

  const frame: Frame = {
    ...DEFAULT_FRAME,
    title: "mesh refinement study",
    xLabel: "h",
    yLabel: "L1 distance to previous mesh",
    ...frameOverrides,
  };
  const hs = measured.map((r) => r.h);
  const ds = measured.map((r) => r.distance);
  const pad = (lo: number, hi: number): [number, number] => [
    lo / 1.25,
    hi * 1.25,
  ];
  const axes = makeAxes(frame, pad(Math.min(...hs), Math.max(...hs)),
    pad(Math.min(...ds), Math.max(...ds)), { xLog: true, yLog: true });
  const body = [...axes.body];

  const sorted = [...measured].sort((a, b) => b.h - a.h);
  const points = sorted.map(
    (r) => [axes.x(r.h), axes.y(r.distance)] as [number, number],
  );
  body.push(polyline(points, CURVE_COLOR, 2.0));
  for (const [px, py] of points) {
    body.push(
      el("circle", {
        cx: px, cy: py, r: 3.5, fill: CURVE_COLOR, class: "rung",
      }),
    );
  }

  // first-order guide: distance proportional to h through the first point
  const anchor = sorted[0];
  const hEnd = sorted[sorted.length - 1].h;
  const guide: Array<[number, number]> = [
    [axes.x(anchor.h), axes.y(anchor.distance)],
    [axes.x(hEnd), axes.y((anchor.distance * hEnd) / anchor.h)],
  ];
  body.push(polyline(guide, GUIDE_COLOR, 1.2, "5 4"));

  const entries: LegendEntry[] = [
    { label: "successive-mesh L1 distance", color: CURVE_COLOR },
    { label: "O(h) guide", color: GUIDE_COLOR, dash: "5 4" },
  ];
  body.push(...legend(frame, entries));
  return svgDocument(frame, body);
}
