"""Command-line interface.

Subcommands:

* ``simulate``      — run one scenario, write snapshots, front log,
                      functional series, and a run summary;
* ``riemann``       — solve a single (possibly junction) Riemann problem
                      and print/write the wave table;
* ``converge``      — run a mesh ladder, aggregate the per-rung summaries
                      into a study report with successive L1 distances;
* ``check-table-a`` — print the cross-section coupling derivative
                      comparison as CSV;
* ``oracle``        — run the finite-volume reference scheme on a
                      scenario's data and write the cell profile.

Common flags: ``--config PATH``, ``--out DIR``, ``--seed N``, ``--force``.
The environment variable ``PIPETRACK_LOG_LEVEL`` selects log verbosity.
Exit codes: 0 success, 2 configuration error, 3 variation-budget
violation, 4 solver failure, 5 interaction-cap overflow.
"""

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import output
from .coupling import section_derivative_comparison
from .errors import ConfigError, PipetrackError
from .riemann import solve_generalized_riemann, solve_riemann
from .scenarios import (
    Scenario,
    load_config,
    validate_riemann_config,
)
from .verify import (
    curvature_drag_source,
    fv_oracle,
    l1_profile_distance,
    measure_source,
    section_flow_source,
)

log = logging.getLogger("pipetrack")


def _load_scenario(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        if not isinstance(cfg, dict):
            raise ConfigError("configuration root must be an object")
        cfg["seed"] = args.seed
    return Scenario(cfg)


def _write_run_artifacts(directory, scenario, tracker, trajectory,
                         wall_time, window, extra=None):
    names = scenario.model.component_names
    output.write_snapshot_series(directory, names, trajectory, window)
    output.write_functionals_csv(
        os.path.join(directory, output.FUNCTIONALS_NAME),
        trajectory.functionals)
    output.write_front_log(os.path.join(directory, output.FRONT_LOG_NAME),
                           trajectory.events, trajectory.segments)
    info = {"scenario": scenario.name, "seed": scenario.seed,
            "epsilon": float(tracker.epsilon),
            "horizon": scenario.horizon,
            "window": [float(window[0]), float(window[1])]}
    if extra:
        info.update(extra)
    summary = output.run_summary(tracker, wall_time, extra=info)
    output.write_summary(os.path.join(directory, output.SUMMARY_NAME),
                         summary)
    return summary


def cmd_simulate(args):
    scenario = _load_scenario(args)
    tracker = scenario.build()
    directory = output.ensure_run_directory(args.out, args.force)
    log.info("simulate %s -> %s", scenario.name, directory)
    t0 = time.perf_counter()
    trajectory = tracker.run(scenario.horizon,
                             snapshot_times=scenario.snapshot_times)
    wall = time.perf_counter() - t0
    window = scenario.window()
    extra = {}
    if scenario.geometry is not None:
        extra["h"] = scenario.h
    summary = _write_run_artifacts(directory, scenario, tracker, trajectory,
                                   wall, window, extra)
    log.info("events=%d tv_max=%.6g upsilon_monotone=%s",
             summary["events"], summary["tv_max"],
             summary["upsilon_monotone"])
    return 0


def _wave_rows(model, decomposition):
    rows = []
    for w in decomposition.waves:
        rows.append({
            "family": int(w.family), "kind": w.kind,
            "size": float(w.size),
            "speed_lo": float(w.speed_lo), "speed_hi": float(w.speed_hi),
            "left": [float(v) for v in w.left_state],
            "right": [float(v) for v in w.right_state],
        })
    if decomposition.junction:
        w_lo, w_hi = decomposition.transfer_pair
        rows.append({
            "family": 0, "kind": "zero-wave",
            "size": float(decomposition.zero_wave_size),
            "speed_lo": 0.0, "speed_hi": 0.0,
            "left": [float(v) for v in w_lo],
            "right": [float(v) for v in w_hi],
        })
    rows.sort(key=lambda r: (r["speed_lo"], r["speed_hi"], r["family"]))
    return rows


def _wave_table_csv(model, rows):
    names = model.component_names
    header = (["family", "kind", "size", "speed_lo", "speed_hi"]
              + ["%s_left" % n for n in names]
              + ["%s_right" % n for n in names])
    lines = [",".join(header)]
    for r in rows:
        cells = [str(r["family"]), r["kind"], output.format_float(r["size"]),
                 output.format_float(r["speed_lo"]),
                 output.format_float(r["speed_hi"])]
        cells += [output.format_float(v) for v in r["left"]]
        cells += [output.format_float(v) for v in r["right"]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_riemann(args):
    cfg = validate_riemann_config(load_config(args.config))
    from .scenarios import build_condition, build_model
    model = build_model(cfg["model"])
    condition = build_condition(cfg["condition"], model)
    rie = cfg["riemann"]
    u_left = np.asarray(rie["left"], dtype=float)
    u_right = np.asarray(rie["right"], dtype=float)
    if "z_minus" in rie:
        dec = solve_generalized_riemann(
            model, condition, np.asarray(rie["z_plus"], dtype=float),
            np.asarray(rie["z_minus"], dtype=float), u_left, u_right)
    else:
        dec = solve_riemann(model, u_left, u_right)
    rows = _wave_rows(model, dec)
    text = _wave_table_csv(model, rows)
    sys.stdout.write(text)
    if args.out:
        directory = output.ensure_run_directory(args.out, args.force)
        with open(os.path.join(directory, "waves.csv"), "w",
                  encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        doc = {"waves": rows, "residual": float(dec.residual),
               "junction_defect": float(dec.junction_defect)}
        output.write_summary(os.path.join(directory, "waves.json"), doc)
    return 0


def _oracle_source(scenario):
    kind = scenario.config["condition"]["kind"]
    if kind == "none" or scenario.geometry is None:
        return None
    if kind == "kink":
        return curvature_drag_source(scenario.geometry,
                                     scenario.config["condition"]["alpha"])
    if kind == "section":
        return section_flow_source(scenario.geometry)
    return measure_source(scenario.geometry, scenario.condition,
                          state_independent=True)


def cmd_oracle(args):
    scenario = _load_scenario(args)
    spec = scenario.config.get("oracle") or {"cells": 2000, "cfl": 0.45}
    window = scenario.window()
    datum = scenario.datum()
    source = _oracle_source(scenario)
    directory = output.ensure_run_directory(args.out, args.force)
    log.info("oracle %s cells=%d -> %s", scenario.name, spec["cells"],
             directory)
    t0 = time.perf_counter()
    result = fv_oracle(scenario.model, datum, window=window,
                       cells=int(spec["cells"]), horizon=scenario.horizon,
                       source=source, cfl=float(spec["cfl"]))
    wall = time.perf_counter() - t0
    names = scenario.model.component_names
    path = os.path.join(directory, "oracle.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x," + ",".join(names) + "\n")
        for x, state in zip(result["x"], result["states"]):
            fh.write(output.format_float(x) + ","
                     + ",".join(output.format_float(v) for v in state)
                     + "\n")
    summary = {"scenario": scenario.name, "cells": int(spec["cells"]),
               "cfl": float(spec["cfl"]), "steps": int(result["steps"]),
               "dx": float(result["dx"]), "time": float(result["time"]),
               "window": [float(window[0]), float(window[1])],
               "wall_time": float(wall)}
    output.write_summary(os.path.join(directory, output.SUMMARY_NAME),
                         summary)
    return 0


def cmd_converge(args):
    scenario = _load_scenario(args)
    h_list = scenario.h_list
    if len(h_list) < 2:
        raise ConfigError("converge needs numerics.h_list with >= 2 meshes")
    ratio_bound = float(scenario.config.get("study", {})
                        .get("ratio_bound", 0.25))
    directory = output.ensure_run_directory(args.out, args.force)
    window = scenario.window(h_list[0])
    log.info("converge %s over h=%s -> %s", scenario.name, h_list,
             directory)

    rung_dirs = []
    finals = []
    for i, h in enumerate(h_list):
        rung = os.path.join(directory, "rung_%03d" % i)
        output.ensure_run_directory(rung, True)
        tracker = scenario.build(h)
        t0 = time.perf_counter()
        trajectory = tracker.run(scenario.horizon,
                                 snapshot_times=scenario.snapshot_times)
        wall = time.perf_counter() - t0
        _write_run_artifacts(rung, scenario, tracker, trajectory, wall,
                             window, {"h": float(h)})
        positions, states = tracker.profile(scenario.horizon)
        finals.append((positions, states))
        rung_dirs.append(rung)
        log.info("rung h=%g: events=%d", h, tracker.events_resolved)

    # aggregate the emitted summaries back into the study table
    rows = []
    for i, rung in enumerate(rung_dirs):
        summary = output.read_summary(os.path.join(rung,
                                                   output.SUMMARY_NAME))
        if i == 0:
            distance = float("nan")
        else:
            distance = l1_profile_distance(*finals[i - 1], *finals[i],
                                           window)
        rows.append({
            "h": float(h_list[i]), "epsilon": float(summary["epsilon"]),
            "distance": distance, "tv_max": float(summary["tv_max"]),
            "upsilon_final": float(summary["upsilon_final"]),
            "junction_defect_max": float(summary["junction_defect_max"]),
            "upsilon_monotone": bool(summary["upsilon_monotone"]),
        })
    output.write_study_csv(os.path.join(directory, output.STUDY_NAME), rows)
    dists = [r["distance"] for r in rows[1:]]
    monotone = all(b <= a for a, b in zip(dists, dists[1:]))
    last_over_first = (dists[-1] / dists[0]
                       if len(dists) >= 2 and dists[0] > 0.0 else 1.0)
    study_summary = {
        "scenario": scenario.name,
        "reference": "successive",
        "h_list": [float(h) for h in h_list],
        "window": [float(window[0]), float(window[1])],
        "horizon": scenario.horizon,
        "distances_monotone": monotone,
        "last_over_first": float(last_over_first),
        "ratio_bound": ratio_bound,
        "passed": bool(monotone and last_over_first <= ratio_bound),
        "upsilon_monotone_all": all(r["upsilon_monotone"] for r in rows),
        "rungs": [os.path.basename(r) for r in rung_dirs],
    }
    output.write_summary(os.path.join(directory,
                                      output.STUDY_SUMMARY_NAME),
                         study_summary)
    if not study_summary["distances_monotone"]:
        log.warning("successive distances are not monotone: %s", dists)
    return 0


def cmd_check_table_a(args):
    from .models import IsentropicModel
    rows = section_derivative_comparison(IsentropicModel())
    header = ("variant,rho,q,area,closed_form,finite_difference,"
              "abs_error")
    lines = [header]
    for r in rows:
        lines.append(",".join([
            r["variant"], output.format_float(r["rho"]),
            output.format_float(r["q"]), output.format_float(r["area"]),
            output.format_float(r["closed_form"]),
            output.format_float(r["finite_difference"]),
            output.format_float(r["abs_error"])]))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        directory = output.ensure_run_directory(args.out, args.force)
        with open(os.path.join(directory, "table_a.csv"), "w",
                  encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pipetrack",
        description="Wave-front tracking for balance laws in pipes "
                    "with kinks and section changes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, needs_config=True, needs_out=True):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=True,
                           help="scenario configuration (JSON)")
        p.add_argument("--out", required=needs_out,
                       help="artifact directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured seed")
        p.add_argument("--force", action="store_true",
                       help="allow writing into a non-empty directory")
        p.set_defaults(func=func)
        return p

    add("simulate", cmd_simulate)
    add("riemann", cmd_riemann, needs_out=False)
    add("converge", cmd_converge)
    add("check-table-a", cmd_check_table_a, needs_config=False,
        needs_out=False)
    add("oracle", cmd_oracle)
    return parser


def main(argv=None):
    level = os.environ.get("PIPETRACK_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipetrackError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
