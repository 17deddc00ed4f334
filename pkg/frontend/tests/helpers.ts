/**
 * Test-side SVG readers. Rendered coordinates carry a fixed number of
 * decimals and axis tick labels state their data values, so tests can
 * rebuild the pixel-to-data mapping from the image alone and verify
 * geometry without touching the renderer's internals.
 */

export interface TextEl {
  attrs: Record<string, string>;
  text: string;
}

export function parseAttrs(raw: string): Record<string, string> {
  const attrs: Record<string, string> = {};
  for (const m of raw.matchAll(/([\w:-]+)="([^"]*)"/g)) {
    attrs[m[1]] = m[2];
  }
  return attrs;
}

/** All self-closing elements of one tag name, in document order. */
export function selfClosed(svg: string, name: string): Record<string, string>[] {
  const re = new RegExp(`<${name}([^>]*)/>`, "g");
  return [...svg.matchAll(re)].map((m) => parseAttrs(m[1]));
}

/** All <text> elements with their (unescaped) content. */
export function textElements(svg: string): TextEl[] {
  const out: TextEl[] = [];
  for (const m of svg.matchAll(/<text([^>]*)>([^<]*)<\/text>/g)) {
    out.push({
      attrs: parseAttrs(m[1]),
      text: m[2]
        .replace(/&lt;/g, "<")
        .replace(/&gt;/g, ">")
        .replace(/&quot;/g, '"')
        .replace(/&amp;/g, "&"),
    });
  }
  return out;
}

/** Front-diagram segment lines (class="front front--<kind>"). */
export function frontLines(
  svg: string,
): Array<{ kind: string; x1: number; y1: number; x2: number; y2: number }> {
  return selfClosed(svg, "line")
    .filter((a) => (a.class ?? "").startsWith("front "))
    .map((a) => ({
      kind: a.class.replace("front front--", ""),
      x1: Number(a.x1),
      y1: Number(a.y1),
      x2: Number(a.x2),
      y2: Number(a.y2),
    }));
}

/** Legend labels in display order (legend text is ink-black, size 12). */
export function legendLabels(svg: string): string[] {
  return textElements(svg)
    .filter((t) => t.attrs["font-size"] === "12" && t.attrs.fill === "#111111")
    .map((t) => t.text);
}

export interface AxisMap {
  /** Pixel coordinate back to the data value. */
  toData(px: number): number;
  /** Pixels per data unit (per decade when the axis is logarithmic). */
  k: number;
  log: boolean;
}

function buildAxis(pairs: Array<{ v: number; px: number }>, log: boolean): AxisMap {
  if (pairs.length < 2) {
    throw new Error(`need at least two axis ticks, found ${pairs.length}`);
  }
  const t = (v: number) => (log ? Math.log10(v) : v);
  const a = pairs[0];
  const b = pairs[pairs.length - 1];
  const k = (b.px - a.px) / (t(b.v) - t(a.v));
  return {
    k,
    log,
    toData: (px: number) => {
      const u = t(a.v) + (px - a.px) / k;
      return log ? Math.pow(10, u) : u;
    },
  };
}

/**
 * Rebuild both axis mappings from the tick labels of a single-panel SVG.
 * Tick labels are grey size-12 text: x ticks are anchored "middle" at
 * the tick's pixel column, y ticks anchored "end" 4px below the row.
 */
export function axisMaps(
  svg: string,
  opts: { xLog?: boolean; yLog?: boolean } = {},
): { x: AxisMap; y: AxisMap } {
  const ticks = textElements(svg).filter(
    (t) => t.attrs["font-size"] === "12" && t.attrs.fill === "#333333",
  );
  const xPairs = ticks
    .filter((t) => t.attrs["text-anchor"] === "middle")
    .map((t) => ({ v: Number(t.text), px: Number(t.attrs.x) }));
  const yPairs = ticks
    .filter((t) => t.attrs["text-anchor"] === "end")
    .map((t) => ({ v: Number(t.text), px: Number(t.attrs.y) - 4 }));
  return {
    x: buildAxis(xPairs, !!opts.xLog),
    y: buildAxis(yPairs, !!opts.yLog),
  };
}

/**
 * Worst-case slope error for a rendered segment: endpoint coordinates
 * are quantized to 0.01px, so a segment spanning dtData in time cannot
 * pin its slope tighter than this.
 */
export function slopeTolerance(
  speed: number,
  dtData: number,
  kx: number,
  kt: number,
): number {
  const quantum = 0.02; // two rounded endpoints plus axis-reconstruction slack
  return (
    (quantum * (1 / Math.abs(kx) + Math.abs(speed) / Math.abs(kt))) / dtData +
    1e-6 * (1 + Math.abs(speed))
  );
}
