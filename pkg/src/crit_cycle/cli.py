"""Command-line entry point: ``crit-cycle run|validate|list-experiments``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor

from . import __version__, _backend
from . import config as cfgmod
from .errors import CapacityError, DomainError, IntegrityError
from .experiments import RUNNERS
from .io import canonical_hash, write_csv, write_json

log = logging.getLogger("crit_cycle")

EXIT_OK, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2
NUMERICAL_ERRORS = (DomainError, IntegrityError, CapacityError, ArithmeticError,
                    ValueError, RuntimeError, MemoryError)


def _run_point(cfg, index, point):
    runner = RUNNERS[cfg.experiment][0]
    t0 = time.perf_counter()
    try:
        res = runner(cfg, point)
        return index, "ok", res, None, time.perf_counter() - t0
    except NUMERICAL_ERRORS as exc:
        msg = f"{type(exc).__name__}: {exc}"
        log.debug("point %d failed\n%s", index, traceback.format_exc())
        return index, "failed", None, msg, time.perf_counter() - t0


def default_jobs():
    env = os.environ.get("CRIT_CYCLE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer CRIT_CYCLE_JOBS=%r", env)
    return 1


def run(cfg, jobs=1):
    """Execute every sweep point, write results and the manifest; returns the manifest."""
    t_start = time.perf_counter()
    points = list(cfg.points())
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(points))) as pool:
            futs = [pool.submit(_run_point, cfg, i, p) for i, p in enumerate(points)]
            outcomes = [f.result() for f in futs]
    else:
        outcomes = [_run_point(cfg, i, p) for i, p in enumerate(points)]
    outcomes.sort(key=lambda o: o[0])

    header = RUNNERS[cfg.experiment][1]
    rows, status = [], []
    for (i, state, res, msg, wall), point in zip(outcomes, points):
        entry = {"index": i, "point": point, "status": state, "wall_time_s": wall}
        if state == "ok":
            rows.extend(res.rows)
            files = []
            for name, (fh, frows) in sorted(res.files.items()):
                write_csv(os.path.join(cfg.out_dir, name), fh, frows)
                files.append(name)
            entry["files"] = files
        else:
            entry["error"] = msg
        status.append(entry)
    summary = f"{cfg.experiment}.csv"
    write_csv(os.path.join(cfg.out_dir, summary), header, rows)

    manifest = {
        "experiment": cfg.experiment,
        "config_hash": canonical_hash(cfg.raw),
        "config": cfg.raw,
        "code_version": __version__,
        "backend": _backend.backend_name(),
        "jobs": jobs,
        "summary_file": summary,
        "wall_time_s": time.perf_counter() - t_start,
        "points": status,
        "n_failed": sum(s["status"] != "ok" for s in status),
    }
    write_json(os.path.join(cfg.out_dir, "manifest.json"), manifest)
    return manifest


def _print_diagnostics(diag, stream):
    for e in diag.errors:
        print(f"error: {e}", file=stream)
    for w in diag.warnings:
        print(f"warning: {w}", file=stream)


def _load_raw(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise cfgmod.ConfigError([f"{path}: {exc}"]) from exc


def cmd_validate(args):
    try:
        raw = _load_raw(args.config)
    except cfgmod.ConfigError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_INVALID
    diag = cfgmod.validate(raw)
    _print_diagnostics(diag, sys.stderr)
    if diag.ok:
        print(f"ok: {args.config} ({raw['experiment']})")
        return EXIT_OK
    return EXIT_INVALID


def cmd_run(args):
    try:
        raw = _load_raw(args.config)
    except cfgmod.ConfigError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_INVALID
    diag = cfgmod.validate(raw)
    _print_diagnostics(diag, sys.stderr)
    if not diag.ok:
        return EXIT_INVALID
    cfg = cfgmod.parse(raw, args.out)
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
        if not os.access(cfg.out_dir, os.W_OK):
            raise PermissionError(cfg.out_dir)
    except OSError as exc:
        print(f"error: output directory not writable: {exc}", file=sys.stderr)
        return EXIT_INVALID
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    manifest = run(cfg, jobs)
    n, bad = len(manifest["points"]), manifest["n_failed"]
    print(f"{cfg.experiment}: {n - bad}/{n} points ok -> {cfg.out_dir}")
    for s in manifest["points"]:
        if s["status"] != "ok":
            print(f"failed point {s['point']}: {s['error']}", file=sys.stderr)
    return EXIT_PARTIAL if bad else EXIT_OK


def cmd_list(args):
    width = max(map(len, cfgmod.EXPERIMENTS))
    for name, desc in cfgmod.EXPERIMENTS.items():
        print(f"{name:<{width}}  {desc}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="crit-cycle",
                                 description="Critical-point cyclic squeezing experiments.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $CRIT_CYCLE_JOBS or 1)")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("validate", help="check a config without running it")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("list-experiments", help="list experiment kinds")
    p.set_defaults(func=cmd_list)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
