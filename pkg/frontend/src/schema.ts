/**
 * Readers for the solver's emitted file formats. Each parser validates
 * the documented schema and reports the offending line on mismatch, so
 * a bad file fails loudly instead of producing an empty plot.
 *
 * Formats:
 *  - front log: JSON lines; records tagged "event" (one interaction) or
 *    "segment" (one straight x-t piece per front between interactions);
 *  - snapshot CSV: header "x,<component names>", stair-stepped rows;
 *  - functional series CSV: header "time,V,Q,Upsilon";
 *  - study CSV: header
 *    "h,epsilon,distance,tv_max,upsilon_final,junction_defect_max".
 */
import { readFileSync } from "node:fs";

/** Schema violation carrying the file and 1-based line number. */
export class SchemaError extends Error {
  constructor(
    readonly file: string,
    readonly line: number,
    detail: string,
  ) {
    super(`${file}:${line}: ${detail}`);
    this.name = "SchemaError";
  }
}

export interface FrontRef {
  kind: string;
  size: number;
}

/** One interaction: fronts in, fronts out, functionals after. */
export interface EventRecord {
  time: number;
  position: number;
  incoming: FrontRef[];
  outgoing: FrontRef[];
  V: number;
  Q: number;
  Upsilon: number;
}

/** One straight x-t piece of a front; slope (x1-x0)/(t1-t0) = speed. */
export interface SegmentRecord {
  id: number;
  kind: string;
  family: number | null;
  size: number;
  speed: number;
  t0: number;
  x0: number;
  t1: number;
  x1: number;
}

export interface FrontLog {
  events: EventRecord[];
  segments: SegmentRecord[];
}

export interface Snapshot {
  /** Column names after "x". */
  components: string[];
  x: number[];
  /** values[c][i] belongs to components[c] at x[i]. */
  values: number[][];
}

export interface FunctionalRow {
  time: number;
  V: number;
  Q: number;
  Upsilon: number;
}

export interface StudyRow {
  h: number;
  epsilon: number;
  distance: number;
  tv_max: number;
  upsilon_final: number;
  junction_defect_max: number;
}

function requireNumber(
  obj: Record<string, unknown>,
  key: string,
  file: string,
  line: number,
  nullable = false,
): number | null {
  const v = obj[key];
  if (nullable && (v === null || v === undefined)) return null;
  if (typeof v !== "number" || Number.isNaN(v)) {
    throw new SchemaError(file, line, `field "${key}" must be a number`);
  }
  return v;
}

function requireFrontRefs(
  obj: Record<string, unknown>,
  key: string,
  file: string,
  line: number,
): FrontRef[] {
  const v = obj[key];
  if (!Array.isArray(v)) {
    throw new SchemaError(file, line, `field "${key}" must be an array`);
  }
  return v.map((entry) => {
    if (
      typeof entry !== "object" ||
      entry === null ||
      typeof (entry as Record<string, unknown>).kind !== "string" ||
      typeof (entry as Record<string, unknown>).size !== "number"
    ) {
      throw new SchemaError(
        file,
        line,
        `entries of "${key}" need string "kind" and numeric "size"`,
      );
    }
    const e = entry as { kind: string; size: number };
    return { kind: e.kind, size: e.size };
  });
}

/** Parse the JSON-lines front log into event and segment records. */
export function parseFrontLog(file: string, text?: string): FrontLog {
  const raw = text ?? readFileSync(file, "utf8");
  const events: EventRecord[] = [];
  const segments: SegmentRecord[] = [];
  const lines = raw.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const lineNo = i + 1;
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line) as Record<string, unknown>;
    } catch {
      throw new SchemaError(file, lineNo, "not valid JSON");
    }
    if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
      throw new SchemaError(file, lineNo, "record must be a JSON object");
    }
    const tag = obj.record;
    if (tag === "event") {
      events.push({
        time: requireNumber(obj, "time", file, lineNo)!,
        position: requireNumber(obj, "position", file, lineNo)!,
        incoming: requireFrontRefs(obj, "incoming", file, lineNo),
        outgoing: requireFrontRefs(obj, "outgoing", file, lineNo),
        V: requireNumber(obj, "V", file, lineNo)!,
        Q: requireNumber(obj, "Q", file, lineNo)!,
        Upsilon: requireNumber(obj, "Upsilon", file, lineNo)!,
      });
    } else if (tag === "segment") {
      if (typeof obj.kind !== "string") {
        throw new SchemaError(file, lineNo, `field "kind" must be a string`);
      }
      segments.push({
        id: requireNumber(obj, "id", file, lineNo)!,
        kind: obj.kind,
        family: requireNumber(obj, "family", file, lineNo, true),
        size: requireNumber(obj, "size", file, lineNo)!,
        speed: requireNumber(obj, "speed", file, lineNo)!,
        t0: requireNumber(obj, "t0", file, lineNo)!,
        x0: requireNumber(obj, "x0", file, lineNo)!,
        t1: requireNumber(obj, "t1", file, lineNo)!,
        x1: requireNumber(obj, "x1", file, lineNo)!,
      });
    } else {
      throw new SchemaError(
        file,
        lineNo,
        `unknown record tag ${JSON.stringify(tag)}`,
      );
    }
  }
  return { events, segments };
}

function splitCsvLine(line: string): string[] {
  return line.split(",").map((cell) => cell.trim());
}

function parseCell(
  cell: string,
  file: string,
  line: number,
): number {
  if (cell === "nan") return NaN;
  if (cell === "inf") return Infinity;
  if (cell === "-inf") return -Infinity;
  const v = Number(cell);
  if (cell === "" || Number.isNaN(v)) {
    throw new SchemaError(file, line, `not a number: ${JSON.stringify(cell)}`);
  }
  return v;
}

/** Parse one stair-stepped snapshot CSV (header "x,<components>"). */
export function parseSnapshotCsv(file: string, text?: string): Snapshot {
  const raw = text ?? readFileSync(file, "utf8");
  const lines = raw.split("\n");
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new SchemaError(file, 1, "missing header");
  }
  const header = splitCsvLine(lines[0]);
  if (header[0] !== "x" || header.length < 2) {
    throw new SchemaError(file, 1, `header must be "x,<components>"`);
  }
  const components = header.slice(1);
  const x: number[] = [];
  const values: number[][] = components.map(() => []);
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const cells = splitCsvLine(line);
    if (cells.length !== header.length) {
      throw new SchemaError(
        file,
        i + 1,
        `expected ${header.length} columns, found ${cells.length}`,
      );
    }
    x.push(parseCell(cells[0], file, i + 1));
    for (let c = 0; c < components.length; c++) {
      values[c].push(parseCell(cells[c + 1], file, i + 1));
    }
  }
  return { components, x, values };
}

function parseFixedColumnCsv(
  file: string,
  text: string | undefined,
  columns: string[],
): number[][] {
  const raw = text ?? readFileSync(file, "utf8");
  const lines = raw.split("\n");
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new SchemaError(file, 1, "missing header");
  }
  const header = splitCsvLine(lines[0]);
  if (header.join(",") !== columns.join(",")) {
    throw new SchemaError(
      file,
      1,
      `expected header "${columns.join(",")}", found "${header.join(",")}"`,
    );
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const cells = splitCsvLine(line);
    if (cells.length !== columns.length) {
      throw new SchemaError(
        file,
        i + 1,
        `expected ${columns.length} columns, found ${cells.length}`,
      );
    }
    rows.push(cells.map((cell) => parseCell(cell, file, i + 1)));
  }
  return rows;
}

/** Parse the functional series CSV ("time,V,Q,Upsilon"). */
export function parseFunctionalsCsv(
  file: string,
  text?: string,
): FunctionalRow[] {
  return parseFixedColumnCsv(file, text, ["time", "V", "Q", "Upsilon"]).map(
    ([time, V, Q, Upsilon]) => ({ time, V, Q, Upsilon }),
  );
}

const STUDY_COLUMNS = [
  "h",
  "epsilon",
  "distance",
  "tv_max",
  "upsilon_final",
  "junction_defect_max",
];

/** Parse the mesh-ladder study CSV. */
export function parseStudyCsv(file: string, text?: string): StudyRow[] {
  return parseFixedColumnCsv(file, text, STUDY_COLUMNS).map(
    ([h, epsilon, distance, tv_max, upsilon_final, junction_defect_max]) => ({
      h,
      epsilon,
      distance,
      tv_max,
      upsilon_final,
      junction_defect_max,
    }),
  );
}
