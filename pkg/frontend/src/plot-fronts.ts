#!/usr/bin/env node
/** Draw the x-t front diagram from a run's front log. */
import { parseCli, runMain, writeImage } from "./cli.js";
import { renderFronts } from "./fronts.js";
import { parseFrontLog } from "./schema.js";

const USAGE =
  "usage: plot-fronts <fronts.jsonl> <out.svg> " +
  "[--title T] [--width W] [--height H]";

runMain(() => {
  const cli = parseCli(process.argv.slice(2), USAGE, 1, 1);
  const log = parseFrontLog(cli.inputs[0]);
  writeImage(cli.output, renderFronts(log, cli.frame));
});
