"""Command-line front end.

    massosc [--config PATH] [--out PATH] [--threads N] [--format csv|json]
            [--precision D] [--dump-config] SUBCOMMAND [overrides]

Exit codes: 0 success, 1 config error, 2 numerical non-convergence or oracle
mismatch, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import config as cfgmod
from .config import RunConfig
from .core import ConfigError, SpaceTimePoint, validate
from .oracle import oracle_probability
from .probability import NotConvergedError, prob_matched_narrow
from .profile import ProfileSpec, profile_value
from .sweep import SweepError, sweep_grid, sweep_slice

log = logging.getLogger("massosc")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class OutputError(OSError):
    pass


# -- writers ------------------------------------------------------------------

def fmt(value: float, precision: int) -> str:
    return format(float(value) + 0.0, f".{precision}g")  # + 0.0 folds -0 into 0


def render_csv(columns: Sequence[str], rows: Sequence[Sequence[float]], precision: int) -> str:
    lines = [",".join(columns)]
    lines += [",".join(fmt(v, precision) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def render_json(columns, rows, precision, meta=None) -> str:
    doc = {"columns": list(columns),
           "rows": [[float(fmt(v, precision)) for v in row] for row in rows]}
    if meta is not None:
        doc["meta"] = meta
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def emit_table(cfg: RunConfig, columns, rows, meta=None) -> None:
    out = cfg.output
    if out.format == "json":
        write_text(out.path, render_json(columns, rows, out.precision, meta))
        return
    write_text(out.path, render_csv(columns, rows, out.precision))
    if meta is not None and out.path not in (None, "-"):
        write_text(out.path + ".json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


# -- commands -----------------------------------------------------------------

def cmd_profile(cfg: RunConfig) -> int:
    p = cfg.profile
    spec = ProfileSpec(p.m0_sq, p.delta, p.W)
    m2 = np.linspace(p.m2_min, p.m2_max, p.n_m2) if p.n_m2 > 1 else np.array([p.m2_min])
    k1 = np.linspace(p.k1_min, p.k1_max, p.n_k1) if p.n_k1 > 1 else np.array([p.k1_min])
    M, K = np.meshgrid(m2, k1, indexing="ij")
    V = profile_value(spec, M, K)
    rows = np.column_stack([M.ravel(), K.ravel(), np.ravel(V)])
    emit_table(cfg, ["m2", "k1", "value"], rows)
    return EXIT_OK


def _sweep_meta(cfg: RunConfig, result) -> dict:
    return {"config_sha256": cfg.digest(),
            "detector_type": cfg.detector_type,
            "max_location": {"s": result.max_location[0], "X": result.max_location[1]},
            "max_raw": float(result.raw.max()) if result.raw.size else 0.0,
            "quadrature": result.quad.to_dict()}


def cmd_sweep(cfg: RunConfig, threads: int = 1) -> int:
    kernel = "well" if cfg.detector_type == "well" else cfg.kernel
    result = sweep_grid(cfg.request(), cfg.grid, kernel=kernel, threads=threads)
    S, X = np.meshgrid(cfg.grid.s_values, cfg.grid.x_values, indexing="ij")
    rows = np.column_stack([S.ravel(), X.ravel(), result.raw.ravel(), result.norm.ravel()])
    emit_table(cfg, ["s", "X", "prob_raw", "prob_norm"], rows, _sweep_meta(cfg, result))
    return EXIT_OK


def cmd_slice(cfg: RunConfig, threads: int = 1) -> int:
    sl = cfg.slice
    xs = np.linspace(sl.x_min, sl.x_max, sl.nx) if sl.nx > 1 else np.array([sl.x_min])
    table = sweep_slice(cfg.request(), sl.s, xs, sl.mD_list, kernel=cfg.kernel, threads=threads)
    cols = list(table)
    rows = np.column_stack([table[c] for c in cols]) if xs.size else np.zeros((0, len(cols)))
    emit_table(cfg, cols, rows)
    return EXIT_OK


def oracle_report(cfg: RunConfig, kernel: Optional[Callable] = None) -> dict:
    """Oracle / kernel ratios on the configured (s, X) panel."""
    kernel = kernel or prob_matched_narrow
    req = cfg.request()
    emit, det = req.emit, req.detect.profile
    pts = []
    for s, X in cfg.oracle.points:
        k = kernel(req.at(s, X), strict=True).raw
        o = oracle_probability(req.spectrum, emit, det, SpaceTimePoint(s, X), n_k=cfg.oracle.n_k)
        pts.append({"s": s, "X": X, "kernel": k, "oracle": o})
    if all(p["kernel"] == 0 and p["oracle"] == 0 for p in pts):
        return {"status": "all-zero, vacuously consistent", "ok": True, "points": pts}
    if any((p["kernel"] == 0) != (p["oracle"] == 0) for p in pts):
        return {"status": "mismatch: zero pattern differs", "ok": False, "points": pts}
    nz = [p for p in pts if p["kernel"] != 0]
    ref = nz[0]["oracle"] / nz[0]["kernel"]
    for p in nz:
        p["ratio"] = p["oracle"] / p["kernel"]
        p["relative_ratio"] = p["ratio"] / ref
    worst = max(abs(p["relative_ratio"] - 1) for p in nz)
    ok = worst <= cfg.oracle.tolerance
    return {"status": "consistent" if ok else "mismatch", "ok": ok, "worst_deviation": worst,
            "tolerance": cfg.oracle.tolerance, "points": pts}


def cmd_oracle_check(cfg: RunConfig, kernel: Optional[Callable] = None) -> int:
    if cfg.detector_type != "matched":
        raise ConfigError("oracle-check needs detector_type = matched")
    report = oracle_report(cfg, kernel)
    write_text(cfg.output.path, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report["ok"] else EXIT_NUMERIC


def cmd_validate(cfg: RunConfig) -> int:
    diags = validate(cfg.physical)
    for d in diags:
        print(f"{d.severity}: {d.message}")
    if not diags:
        print("ok")
    return EXIT_CONFIG if any(d.severity == "error" for d in diags) else EXIT_OK


# -- argument handling ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="massosc", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--threads", type=int, default=1, help="sweep parallelism cap")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--precision", type=int, help="significant digits, 6..17")
    ap.add_argument("--dump-config", action="store_true", help="print resolved config and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    def physics_flags(p):
        p.add_argument("--m0-index", type=int, choices=(1, 2, 3))
        p.add_argument("--mD-index", type=int, choices=(1, 2, 3))
        p.add_argument("--convention", choices=("literal", "quadratic"))
        p.add_argument("--kernel", choices=("narrow", "exact"))

    sub.add_parser("profile", help="dump the emission profile lattice")
    for name in ("sweep", "well-sweep"):
        p = sub.add_parser(name, help="probability over an (s, X) lattice")
        physics_flags(p)
        p.add_argument("--grid", nargs=6, metavar=("SMIN", "SMAX", "NS", "XMIN", "XMAX", "NX"))
    p = sub.add_parser("slice", help="probability along X at fixed s per detected mass")
    physics_flags(p)
    p.add_argument("--s", type=float)
    p.add_argument("--mD-list", help="comma-separated mass indices, e.g. 1,3")
    p = sub.add_parser("oracle-check", help="compare kernel with the projection-chain oracle")
    physics_flags(p)
    p = sub.add_parser("validate", help="check the physical configuration")
    physics_flags(p)
    return ap


def resolve(args) -> RunConfig:
    cfg = cfgmod.load(args.config) if args.config else RunConfig()
    cfg = cfgmod.override(cfg, "output", path=args.out, format=args.format, precision=args.precision)
    cfg = cfgmod.override(cfg, "physical", m0_index=getattr(args, "m0_index", None),
                          mD_index=getattr(args, "mD_index", None),
                          mass_convention=getattr(args, "convention", None))
    if getattr(args, "kernel", None):
        cfg = replace(cfg, kernel=args.kernel)
    if args.command == "well-sweep":
        cfg = replace(cfg, detector_type="well")
    if getattr(args, "grid", None):
        s0, s1, ns, x0, x1, nx = args.grid
        cfg = cfgmod.override(cfg, "grid", s_min=float(s0), s_max=float(s1), ns=int(ns),
                              x_min=float(x0), x_max=float(x1), nx=int(nx))
    mD_list = getattr(args, "mD_list", None)
    cfg = cfgmod.override(cfg, "slice", s=getattr(args, "s", None),
                          mD_list=[int(j) for j in mD_list.split(",")] if mD_list else None)
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None and not args.dump_config:
        parser.error("a subcommand is required")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        if args.dump_config:
            print(cfg.to_json())
            return EXIT_OK
        if args.command == "validate":
            return cmd_validate(cfg)
        cfg.check()
        for d in validate(cfg.physical):
            log.warning("%s", d.message)
        if args.command == "profile":
            return cmd_profile(cfg)
        if args.command in ("sweep", "well-sweep"):
            return cmd_sweep(cfg, threads=args.threads)
        if args.command == "slice":
            return cmd_slice(cfg, threads=args.threads)
        if args.command == "oracle-check":
            return cmd_oracle_check(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OutputError, FileNotFoundError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, (NotConvergedError, FloatingPointError)):
            return EXIT_NUMERIC
        raise
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
