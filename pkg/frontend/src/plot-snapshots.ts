#!/usr/bin/env node
/** Draw solution snapshots (one panel per component) from stair CSVs. */
import { basename } from "node:path";
import { parseCli, runMain, writeImage } from "./cli.js";
import { parseSnapshotCsv } from "./schema.js";
import { LabeledSnapshot, renderSnapshots } from "./snapshots.js";

const USAGE =
  "usage: plot-snapshots <snapshot.csv> [more.csv ...] <out.svg> " +
  "[--title T] [--width W] [--height H]";

runMain(() => {
  const cli = parseCli(process.argv.slice(2), USAGE, 1, 64);
  const inputs: LabeledSnapshot[] = cli.inputs.map((file) => ({
    file,
    label: basename(file),
    snapshot: parseSnapshotCsv(file),
  }));
  writeImage(cli.output, renderSnapshots(inputs, cli.frame));
});
