/**
 * Shared command-line plumbing for the plot scripts: positional input
 * path(s) followed by the output image path (.svg), plus style flags.
 */
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { SchemaError } from "./schema.js";
import type { Frame } from "./svg.js";

export interface CliInvocation {
  inputs: string[];
  output: string;
  frame: Partial<Frame>;
}

export function parseCli(
  argv: string[],
  usage: string,
  minInputs: number,
  maxInputs: number,
): CliInvocation {
  const { values, positionals } = parseArgs({
    args: argv,
    options: {
      title: { type: "string" },
      width: { type: "string" },
      height: { type: "string" },
      help: { type: "boolean", short: "h" },
    },
    allowPositionals: true,
  });
  if (values.help) {
    process.stdout.write(usage + "\n");
    process.exit(0);
  }
  if (positionals.length < minInputs + 1) {
    throw new Error(`too few arguments\n${usage}`);
  }
  if (positionals.length > maxInputs + 1) {
    throw new Error(`too many arguments\n${usage}`);
  }
  const output = positionals[positionals.length - 1];
  if (!output.endsWith(".svg")) {
    throw new Error(
      `output image path must end with .svg, got ${JSON.stringify(output)}`,
    );
  }
  const frame: Partial<Frame> = {};
  if (values.title !== undefined) frame.title = values.title;
  if (values.width !== undefined) {
    frame.width = parsePositiveInt(values.width, "--width");
  }
  if (values.height !== undefined) {
    frame.height = parsePositiveInt(values.height, "--height");
  }
  return { inputs: positionals.slice(0, -1), output, frame };
}

function parsePositiveInt(text: string, flag: string): number {
  const v = Number(text);
  if (!Number.isInteger(v) || v <= 0) {
    throw new Error(`${flag} must be a positive integer, got ${text}`);
  }
  return v;
}

export function writeImage(path: string, svgText: string): void {
  writeFileSync(path, svgText, "utf8");
}

/** Run a plot entry point; schema errors exit 2, other failures 1. */
export function runMain(fn: () => void): void {
  try {
    fn();
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      process.exitCode = 2;
    } else {
      const msg = err instanceof Error ? err.message : String(err);
      process.stderr.write(`error: ${msg}\n`);
      process.exitCode = 1;
    }
  }
}
