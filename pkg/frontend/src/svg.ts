/**
 * Minimal deterministic SVG plotting: linear/log scales with nice ticks,
 * framed axes, polylines, and a legend. Coordinates are written with a
 * fixed number of decimals, so rendering the same inputs twice yields
 * byte-identical files and tests can read exact geometry back.
 */

/** Decimal places written for screen coordinates (plot resolution). */
export const COORD_DECIMALS = 2;

export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  const s = v.toFixed(COORD_DECIMALS);
  return s === "-0.00" ? "0.00" : s;
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(
  name: string,
  attrs: Record<string, string | number>,
  children: string[] = [],
  text?: string,
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : escapeXml(v)}"`)
    .join(" ");
  const open = parts.length > 0 ? `<${name} ${parts}` : `<${name}`;
  if (children.length === 0 && text === undefined) return `${open}/>`;
  const body = text !== undefined ? escapeXml(text) : children.join("");
  return `${open}>${body}</${name}>`;
}

export interface Scale {
  (v: number): number;
  invert(px: number): number;
  ticks(): number[];
  readonly domain: [number, number];
  readonly range: [number, number];
  readonly log: boolean;
}

function niceLinearTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count) ?? 10 * mag;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const eLo = Math.ceil(Math.log10(lo) - 1e-12);
  const eHi = Math.floor(Math.log10(hi) + 1e-12);
  for (let e = eLo; e <= eHi; e++) ticks.push(Math.pow(10, e));
  if (ticks.length >= 2) return ticks;
  // less than a decade: fall back to 1-2-5 mantissa steps
  for (const e of [eLo - 1, eLo]) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, e);
      if (v >= lo && v <= hi) ticks.push(v);
    }
  }
  return [...new Set(ticks)].sort((a, b) => a - b);
}

export function makeScale(
  domain: [number, number],
  range: [number, number],
  log = false,
): Scale {
  let [d0, d1] = domain;
  if (log && (d0 <= 0 || d1 <= 0)) {
    throw new Error("log scale needs a positive domain");
  }
  if (d0 === d1) {
    // degenerate domain: widen symmetrically so the value sits centered
    const pad = log ? d0 * 0.5 : Math.abs(d0) * 0.5 + 1;
    d0 = log ? d0 - pad / 2 : d0 - pad;
    d1 = log ? d1 + pad : d1 + pad;
  }
  const t = (v: number) => (log ? Math.log(v) : v);
  const tInv = (v: number) => (log ? Math.exp(v) : v);
  const k = (range[1] - range[0]) / (t(d1) - t(d0));
  const scale = ((v: number) => range[0] + k * (t(v) - t(d0))) as Scale;
  Object.defineProperties(scale, {
    domain: { value: [d0, d1] as [number, number] },
    range: { value: range },
    log: { value: log },
  });
  scale.invert = (px: number) => tInv(t(d0) + (px - range[0]) / k);
  scale.ticks = () => (log ? logTicks(d0, d1) : niceLinearTicks(d0, d1));
  return scale;
}

export function padDomain(
  lo: number,
  hi: number,
  frac = 0.05,
): [number, number] {
  if (!(hi > lo)) return [lo, hi];
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

function tickLabel(v: number, log: boolean): string {
  if (v === 0) return "0";
  const e = Math.log10(Math.abs(v));
  if (log || e >= 5 || e < -3) return v.toExponential(0);
  const digits = Math.max(0, 2 - Math.floor(e));
  return v.toFixed(Math.min(6, digits));
}

export interface Frame {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  title: string;
  xLabel: string;
  yLabel: string;
}

export const DEFAULT_FRAME: Frame = {
  width: 860,
  height: 560,
  margin: { top: 48, right: 24, bottom: 56, left: 72 },
  title: "",
  xLabel: "",
  yLabel: "",
};

export interface Axes {
  x: Scale;
  y: Scale;
  body: string[];
}

/** Scales mapping the data window onto the frame's plot area, with the
 * frame, grid, ticks, and labels already rendered into `body`. */
export function makeAxes(
  frame: Frame,
  xDomain: [number, number],
  yDomain: [number, number],
  opts: { xLog?: boolean; yLog?: boolean } = {},
): Axes {
  const { margin, width, height } = frame;
  const x = makeScale(xDomain, [margin.left, width - margin.right], !!opts.xLog);
  // SVG y grows downward; flip so larger data values sit higher
  const y = makeScale(yDomain, [height - margin.bottom, margin.top], !!opts.yLog);
  const body: string[] = [];
  const x0 = margin.left;
  const x1 = width - margin.right;
  const y0 = height - margin.bottom;
  const y1 = margin.top;

  for (const v of x.ticks()) {
    const px = x(v);
    body.push(
      el("line", {
        x1: px, y1: y0, x2: px, y2: y1,
        stroke: "#dddddd", "stroke-width": "1",
      }),
      el("text", {
        x: px, y: y0 + 18, "text-anchor": "middle",
        "font-size": "12", fill: "#333333",
      }, [], tickLabel(v, x.log)),
    );
  }
  for (const v of y.ticks()) {
    const py = y(v);
    body.push(
      el("line", {
        x1: x0, y1: py, x2: x1, y2: py,
        stroke: "#dddddd", "stroke-width": "1",
      }),
      el("text", {
        x: x0 - 8, y: py + 4, "text-anchor": "end",
        "font-size": "12", fill: "#333333",
      }, [], tickLabel(v, y.log)),
    );
  }
  body.push(
    el("rect", {
      x: x0, y: y1, width: x1 - x0, height: y0 - y1,
      fill: "none", stroke: "#333333", "stroke-width": "1",
    }),
  );
  if (frame.title) {
    body.push(
      el("text", {
        x: (x0 + x1) / 2, y: y1 - 16, "text-anchor": "middle",
        "font-size": "16", fill: "#111111",
      }, [], frame.title),
    );
  }
  if (frame.xLabel) {
    body.push(
      el("text", {
        x: (x0 + x1) / 2, y: y0 + 40, "text-anchor": "middle",
        "font-size": "13", fill: "#111111",
      }, [], frame.xLabel),
    );
  }
  if (frame.yLabel) {
    const cx = x0 - 52;
    const cy = (y0 + y1) / 2;
    body.push(
      `<text x="${fmt(cx)}" y="${fmt(cy)}" text-anchor="middle" ` +
        `font-size="13" fill="#111111" ` +
        `transform="rotate(-90 ${fmt(cx)} ${fmt(cy)})">` +
        `${escapeXml(frame.yLabel)}</text>`,
    );
  }
  return { x, y, body };
}

export interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
}

/** Color-keyed legend in the top-right corner of the plot area. */
export function legend(
  frame: Frame,
  entries: LegendEntry[],
  emptyNote = "(nothing to draw)",
): string[] {
  const out: string[] = [];
  const x = frame.width - frame.margin.right - 190;
  let y = frame.margin.top + 14;
  if (entries.length === 0) {
    out.push(
      el("text", {
        x, y, "font-size": "12", fill: "#666666",
      }, [], emptyNote),
    );
    return out;
  }
  for (const entry of entries) {
    const attrs: Record<string, string | number> = {
      x1: x, y1: y - 4, x2: x + 28, y2: y - 4,
      stroke: entry.color, "stroke-width": "2.5",
    };
    if (entry.dash) attrs["stroke-dasharray"] = entry.dash;
    out.push(
      el("line", attrs),
      el("text", {
        x: x + 36, y, "font-size": "12", fill: "#111111",
      }, [], entry.label),
    );
    y += 18;
  }
  return out;
}

export function polyline(
  points: Array<[number, number]>,
  color: string,
  width = 1.8,
  dash?: string,
): string {
  const attrs: Record<string, string | number> = {
    points: points.map(([px, py]) => `${fmt(px)},${fmt(py)}`).join(" "),
    fill: "none",
    stroke: color,
    "stroke-width": String(width),
  };
  if (dash) attrs["stroke-dasharray"] = dash;
  return `<polyline ${Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(" ")}/>`;
}

export function document(frame: Frame, body: string[]): string {
  return (
    `<?xml version="1.0" encoding="UTF-8"?>\n` +
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" ` +
    `height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">\n` +
    el("rect", {
      x: 0, y: 0, width: frame.width, height: frame.height, fill: "#ffffff",
    }) +
    "\n" +
    body.join("\n") +
    "\n</svg>\n"
  );
}
