#!/usr/bin/env node
/** Draw the mesh-refinement study curve (log-log) from a study CSV. */
import { renderConvergence } from "./convergence.js";
import { parseCli, runMain, writeImage } from "./cli.js";
import { parseStudyCsv } from "./schema.js";

const USAGE =
  "usage: plot-convergence <study.csv> <out.svg> " +
  "[--title T] [--width W] [--height H]";

runMain(() => {
  const cli = parseCli(process.argv.slice(2), USAGE, 1, 1);
  const rows = parseStudyCsv(cli.inputs[0]);
  writeImage(cli.output, renderConvergence(rows, cli.inputs[0], cli.frame));
});
