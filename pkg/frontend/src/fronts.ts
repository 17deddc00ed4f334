/**
 * x-t front diagram: every logged segment is one straight line whose
 * slope is the front's propagation speed, color-coded by front kind;
 * standing junction waves show as dashed vertical lines and interaction
 * points as dots.
 */
import type { FrontLog, SegmentRecord } from "./schema.js";
import {
  DEFAULT_FRAME,
  Frame,
  LegendEntry,
  document as svgDocument,
  el,
  legend,
  makeAxes,
  padDomain,
} from "./svg.js";

export interface KindStyle {
  color: string;
  width: number;
  dash?: string;
}

/** Drawing style per front kind; unknown kinds fall back to black. */
export const KIND_STYLES: Record<string, KindStyle> = {
  "shock-or-contact": { color: "#c0392b", width: 1.8 },
  "rarefaction-wavelet": { color: "#2471a3", width: 1.4 },
  "non-physical": { color: "#9b9b9b", width: 1.0 },
  "zero-wave": { color: "#1e8449", width: 2.2, dash: "6 4" },
};

const FALLBACK_STYLE: KindStyle = { color: "#111111", width: 1.4 };

export function kindStyle(kind: string): KindStyle {
  return KIND_STYLES[kind] ?? FALLBACK_STYLE;
}

function drawable(s: SegmentRecord): boolean {
  return s.t1 > s.t0;
}

/** Render a front log to SVG text. */
export function renderFronts(
  log: FrontLog,
  frameOverrides: Partial<Frame> = {},
): string {
  const frame: Frame = {
    ...DEFAULT_FRAME,
    xLabel: "x",
    yLabel: "t",
    title: "wave fronts",
    ...frameOverrides,
  };
  const segments = log.segments;
  const xsAll = segments.flatMap((s) => [s.x0, s.x1]);
  const tsAll = segments.flatMap((s) => [s.t0, s.t1]);
  const xDomain =
    xsAll.length > 0
      ? padDomain(Math.min(...xsAll), Math.max(...xsAll))
      : ([0, 1] as [number, number]);
  const tDomain =
    tsAll.length > 0
      ? ([Math.min(0, ...tsAll), Math.max(...tsAll)] as [number, number])
      : ([0, 1] as [number, number]);

  const axes = makeAxes(frame, xDomain, tDomain);
  const body = [...axes.body];

  const kindsPresent: string[] = [];
  for (const s of segments) {
    if (!kindsPresent.includes(s.kind)) kindsPresent.push(s.kind);
  }

  for (const s of segments) {
    if (!drawable(s)) continue;
    const style = kindStyle(s.kind);
    const attrs: Record<string, string | number> = {
      x1: axes.x(s.x0),
      y1: axes.y(s.t0),
      x2: axes.x(s.x1),
      y2: axes.y(s.t1),
      stroke: style.color,
      "stroke-width": String(style.width),
      class: `front front--${s.kind}`,
    };
    if (style.dash) attrs["stroke-dasharray"] = style.dash;
    body.push(el("line", attrs));
  }

  for (const ev of log.events) {
    body.push(
      el("circle", {
        cx: axes.x(ev.position),
        cy: axes.y(ev.time),
        r: 2.2,
        fill: "#333333",
        class: "interaction",
      }),
    );
  }

  const entries: LegendEntry[] = kindsPresent.map((kind) => {
    const style = kindStyle(kind);
    return { label: kind, color: style.color, dash: style.dash };
  });
  body.push(...legend(frame, entries, "(empty log: nothing to draw)"));
  return svgDocument(frame, body);
}
