import { readFileSync } from "node:fs";
import { basename, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { SchemaError, parseSnapshotCsv } from "../dist/schema.js";
import { renderSnapshots } from "../dist/snapshots.js";
import { axisMaps, legendLabels, textElements } from "./helpers.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const FILES = ["snapshot_000.csv", "snapshot_005.csv", "snapshot_010.csv"];

function loadFixtures() {
  return FILES.map((name) => {
    const file = join(FIXTURES, name);
    return { label: basename(name, ".csv"), file, snapshot: parseSnapshotCsv(file) };
  });
}

/** Body of each per-component panel group, in order. */
function panelBlocks(svg: string): string[] {
  const chunks = svg.split(/<g transform="translate\(0 [\d.-]+\)">/).slice(1);
  return chunks.map((chunk) => chunk.slice(0, chunk.indexOf("</g>")));
}

function polylinePoints(block: string): Array<Array<[number, number]>> {
  return [...block.matchAll(/<polyline points="([^"]*)"/g)].map((m) =>
    m[1]
      .split(" ")
      .map((pair) => pair.split(",").map(Number) as [number, number]),
  );
}

describe("snapshot panels", () => {
  it("draws one panel per component with one curve per file", () => {
    const inputs = loadFixtures();
    const svg = renderSnapshots(inputs);
    const panels = panelBlocks(svg);
    expect(panels).toHaveLength(2); // rho and q

    for (const panel of panels) {
      const curves = polylinePoints(panel);
      expect(curves).toHaveLength(FILES.length);
      // stair-stepped writer: every CSV row becomes one vertex
      curves.forEach((points, i) => {
        expect(points).toHaveLength(inputs[i].snapshot.x.length);
      });
    }

    // component name labels the y axis of its panel
    const labels = textElements(svg).map((t) => t.text);
    expect(labels).toContain("rho");
    expect(labels).toContain("q");
    // legend sits on the first panel only and names the inputs
    expect(legendLabels(svg)).toEqual(inputs.map((input) => input.label));
    // x axis label only on the bottom panel
    expect(labels.filter((t) => t === "x")).toHaveLength(1);
  });

  it("round-trips curve vertices back to the data values", () => {
    const inputs = loadFixtures();
    const svg = renderSnapshots(inputs);
    const panels = panelBlocks(svg);

    panels.forEach((panel, c) => {
      const maps = axisMaps(panel);
      const curves = polylinePoints(panel);
      curves.forEach((points, i) => {
        const snap = inputs[i].snapshot;
        for (const k of [0, Math.floor(points.length / 2), points.length - 1]) {
          const [px, py] = points[k];
          expect(maps.x.toData(px)).toBeCloseTo(snap.x[k], 1);
          expect(maps.y.toData(py)).toBeCloseTo(snap.values[c][k], 2);
        }
      });
    });
  });

  it("is byte-identical across repeated renders", () => {
    const inputs = loadFixtures();
    expect(renderSnapshots(inputs)).toBe(renderSnapshots(inputs));
  });

  it("rejects inputs whose components differ, naming the file", () => {
    const inputs = [
      loadFixtures()[0],
      {
        label: "other",
        file: "other.csv",
        snapshot: parseSnapshotCsv("other.csv", "x,density\n0,1\n1,1\n"),
      },
    ];
    let caught: unknown;
    try {
      renderSnapshots(inputs);
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(SchemaError);
    const err = caught as SchemaError;
    expect(err.file).toBe("other.csv");
    expect(err.line).toBe(1);
    expect(err.message).toContain("density");
  });

  it("notes the absence of inputs instead of failing", () => {
    const svg = renderSnapshots([]);
    expect(svg).toContain("(no input files)");
    expect(svg).toContain("</svg>");
  });
});
