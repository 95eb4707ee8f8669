"""Command-line front end: threshold analysis, region tracing, boosting
optimization, capacity curves, Monte Carlo simulation, and figure-data
bundles.

Every run writes CSV artifacts plus a JSON-lines result record keyed by a
hash of the run configuration; re-running an identical configuration
reuses the cached artifacts.  Flags override values loaded with
``--config``; ``SCSHAPE_OUTDIR`` overrides the default output directory.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, protograph
from .montecarlo import WindowConfig, lift, write_alist
from .montecarlo.harness import StopRule, sweep_ber_cer
from .pexit import (
    BoundaryRangeError,
    Schedule,
    comparison_table,
    min_gamma2_on_boundary,
    optimize_lambda,
    threshold_for_lambda,
    uniform_threshold,
)
from .shaping import (
    ShapingParams,
    db_to_linear,
    linear_to_db,
    rate_limit_snr,
    shaped_capacity,
    snr_split,
    two_level_profile,
)

SUBCOMMANDS = ("threshold", "region", "lambda-sweep", "compare", "capacity", "simulate", "figures")

# Flags that steer execution but not results; excluded from the config hash.
RUNTIME_KEYS = {"out_dir", "jobs", "config", "no_cache", "save_config"}


@dataclass
class RunConfig:
    """One subcommand invocation: parameters, output policy, parallelism."""

    command: str
    params: dict
    out_dir: Path
    jobs: int = 1
    use_cache: bool = True

    def hashable(self) -> dict:
        clean = {k: v for k, v in sorted(self.params.items()) if k not in RUNTIME_KEYS}
        return {"command": self.command, "params": clean, "version": __version__}

    def config_hash(self) -> str:
        blob = json.dumps(self.hashable(), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_ini(self, path: Path) -> None:
        cp = configparser.ConfigParser()
        cp["run"] = {"command": self.command}
        cp[self.command] = {
            k: _ini_dump(v) for k, v in sorted(self.params.items()) if v is not None
        }
        with open(path, "w") as fh:
            cp.write(fh)

    @staticmethod
    def read_ini(path: Path) -> tuple[str | None, dict]:
        cp = configparser.ConfigParser()
        cp.read(path)
        command = cp["run"].get("command") if cp.has_section("run") else None
        params = {}
        if command and cp.has_section(command):
            params = dict(cp[command])
        return command, params


def _ini_dump(value) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def _float_list(text: str) -> list[float]:
    return [float(x) for x in str(text).replace(",", " ").split()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in str(text).replace(",", " ").split()]


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


class RecordStore:
    """Append-only JSON-lines result records with config-hash caching."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.path = out_dir / "records.jsonl"

    def lookup(self, config_hash: str) -> dict | None:
        if not self.path.exists():
            return None
        with open(self.path) as fh:
            for line in fh:
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue
                if rec.get("config_hash") == config_hash and rec.get("version") == __version__:
                    if all(Path(p).exists() for p in rec.get("artifacts", {}).values()):
                        return rec
        return None

    def append(self, record: dict) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps(record, sort_keys=True, default=str) + "\n")


def _schedule_from(params: dict) -> Schedule:
    if params.get("schedule", "flooding") == "windowed":
        return Schedule.windowed(
            window_positions=int(params.get("window_positions", 8)),
            local_iterations=int(params.get("local_iterations", 50)),
            slide_positions=int(params.get("slide_positions", 1)),
            passes=int(params.get("passes", 2)),
        )
    return Schedule.flooding()


def _build_matrix(kind: str, dv: int, n_types: int):
    if kind == "uncoupled":
        matrix = protograph.build_uncoupled(dv)
        ek = protograph.kind_of(kind, dv, 2)
    elif kind == "terminated":
        matrix = protograph.build_terminated(dv, n_types)
        ek = protograph.kind_of(kind, dv, n_types)
    elif kind == "tailbiting":
        matrix = protograph.build_tailbiting(dv, n_types)
        ek = protograph.kind_of(kind, dv, n_types)
    else:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    report = protograph.validate(matrix, ek)
    if not report.passed:
        raise RuntimeError(f"constructed matrix failed validation:\n{report}")
    return matrix


def _lambda_grid_from(params: dict, n_types: int) -> list[float]:
    if params.get("lambdas"):
        return _float_list(params["lambdas"])
    if params.get("positions"):
        return [2 * p / n_types for p in _int_list(params["positions"])]
    from .pexit.thresholds import default_lambda_grid

    return default_lambda_grid(n_types)


# ---------------------------------------------------------------- handlers


def _cmd_threshold(cfg: RunConfig, tag: str) -> dict:
    p = cfg.params
    matrix = _build_matrix(p["kind"], int(p["dv"]), int(p["n"]))
    schedule = _schedule_from(p)
    lam = float(p["lam"])
    kwargs = dict(
        tol_db=float(p["tol"]),
        epsilon=float(p["eps"]),
        max_iters=int(p["max_iters"]),
    )
    if lam == 0.0:
        result = uniform_threshold(matrix, schedule, **kwargs)
    else:
        result = threshold_for_lambda(
            matrix, lam, schedule, jobs=cfg.jobs,
            grid_db=float(p["grid_db"]),
            boost_offset=int(p.get("boost_rotate", 0)),
            **kwargs,
        )
    if p.get("save_matrix"):
        base = Path(p["save_matrix"])
        base.with_suffix(".txt").write_text(matrix.to_text())
        base.with_suffix(".json").write_text(matrix.to_json())
    out = cfg.out_dir / f"threshold-{tag}.json"
    out.write_text(json.dumps(result.to_dict(), indent=2))
    print(
        f"{p['kind']} (dv={p['dv']}, N={p['n']}, lambda={lam}): "
        f"threshold {result.gamma_star_db:.4f} dB  "
        f"(gamma1 {result.gamma1_db:.4f} dB, gamma2 {result.gamma2_db:.4f} dB, "
        f"phi {result.phi_star:.3f})"
    )
    return {"threshold_json": str(out)}


def _cmd_region(cfg: RunConfig, tag: str) -> dict:
    p = cfg.params
    matrix = _build_matrix("tailbiting", int(p["dv"]), int(p["n"]))
    schedule = _schedule_from(p)
    lam = float(p["lam"])
    tol = float(p["tol"])
    if p.get("gamma1_start") is None:
        blk = uniform_threshold(matrix, schedule, tol_db=tol).gamma_star_db
        start, stop = blk + 0.1, blk + 4.0
    else:
        start, stop = float(p["gamma1_start"]), float(p["gamma1_stop"])
    step = float(p["gamma1_step"])
    rows = []
    hint = None
    for g1 in np.arange(start, stop + 0.5 * step, step):
        try:
            g2 = min_gamma2_on_boundary(
                matrix, lam, float(g1), schedule, tol_db=tol, hint_db=hint,
                epsilon=float(p["eps"]), max_iters=int(p["max_iters"]),
            )
        except BoundaryRangeError:
            continue
        rows.append((float(g1), g2))
        hint = g2 + 2.0 * tol
    out = cfg.out_dir / f"region-{tag}.csv"
    _write_csv(out, ["gamma1_db", "gamma2_db"], [(f"{a:.6f}", f"{b:.6f}") for a, b in rows])
    print(f"boundary: {len(rows)} points -> {out}")
    return {"region_csv": str(out)}


def _cmd_lambda_sweep(cfg: RunConfig, tag: str) -> dict:
    p = cfg.params
    matrix = _build_matrix("tailbiting", int(p["dv"]), int(p["n"]))
    schedule = _schedule_from(p)
    grid = _lambda_grid_from(p, matrix.n_vars)
    sweep = optimize_lambda(
        matrix, grid, schedule, jobs=cfg.jobs,
        tol_db=float(p["tol"]), epsilon=float(p["eps"]), max_iters=int(p["max_iters"]),
    )
    csv_path = cfg.out_dir / f"lambda-sweep-{tag}.csv"
    _write_csv(
        csv_path,
        ["lambda", "gamma_lambda_db", "phi_star"],
        [(f"{r.lambda_star:.10g}", f"{r.gamma_star_db:.6f}", f"{r.phi_star:.6f}") for r in sweep.curve],
    )
    json_path = cfg.out_dir / f"lambda-sweep-{tag}.json"
    json_path.write_text(json.dumps(sweep.to_dict(), indent=2))
    best = sweep.best
    print(
        f"optimal lambda = {best.lambda_star:.6g} "
        f"(threshold {best.gamma_star_db:.4f} dB, phi {best.phi_star:.3f})"
    )
    return {"sweep_csv": str(csv_path), "sweep_json": str(json_path)}


def _cmd_compare(cfg: RunConfig, tag: str) -> dict:
    p = cfg.params
    dv_list = _int_list(p["dv"])
    n_list = _int_list(p["n"])
    lambda_grid = _float_list(p["lambdas"]) if p.get("lambdas") else None
    rows = comparison_table(
        dv_list, n_list, _schedule_from(p), lambda_grid=lambda_grid, jobs=cfg.jobs,
        map_proxy_n=int(p["map_proxy_n"]), tol_db=float(p["tol"]),
        epsilon=float(p["eps"]), max_iters=int(p["max_iters"]),
    )
    csv_path = cfg.out_dir / f"compare-{tag}.csv"
    header = [
        "dv", "N", "gamma_block_db", "gamma_ter_db", "gamma_bp_db",
        "gamma_map_db", "lambda_star", "phi_star", "delta_ter_db", "delta_bp_db",
    ]
    _write_csv(csv_path, header, [
        (r.dv, r.n_types, f"{r.gamma_block_db:.5f}", f"{r.gamma_ter_db:.5f}",
         f"{r.gamma_bp_db:.5f}", f"{r.gamma_map_db:.5f}", f"{r.lambda_star:.10g}",
         f"{r.phi_star:.4f}", f"{r.delta_ter_db:.5f}", f"{r.delta_bp_db:.5f}")
        for r in rows
    ])
    txt_path = cfg.out_dir / f"compare-{tag}.txt"
    lines = [
        f"{'(dv,dc)':>8} {'N':>5} {'block':>9} {'term':>9} {'shaped':>9} {'map':>9} {'lam*':>8} {'phi*':>6}"
    ]
    for r in rows:
        lines.append(
            f"({r.dv},{2 * r.dv:d})".rjust(8)
            + f"{r.n_types:>6} {r.gamma_block_db:>9.4f} {r.gamma_ter_db:>9.4f}"
            + f" {r.gamma_bp_db:>9.4f} {r.gamma_map_db:>9.4f} {r.lambda_star:>8.5g} {r.phi_star:>6.3f}"
        )
    txt_path.write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return {"compare_csv": str(csv_path), "compare_txt": str(txt_path)}


def _cmd_capacity(cfg: RunConfig, tag: str) -> dict:
    p = cfg.params
    phi = float(p["phi"])
    rate = float(p["rate"])
    lambdas = _float_list(p["lambdas"]) if p.get("lambdas") else [float(p.get("lam", 0.0))]
    rows = []
    for lam in lambdas:
        params = ShapingParams(phi=phi, lam=lam)
        if p.get("gamma_db") is not None:
            g = float(db_to_linear(float(p["gamma_db"])))
        else:
            g = rate_limit_snr(rate, params)
        pt = snr_split(g, params)
        cap = shaped_capacity(g, params, rate)
        rows.append((lam, phi, pt.gamma_avg_db, pt.gamma1_db, pt.gamma2_db, cap))
    out = cfg.out_dir / f"capacity-{tag}.csv"
    _write_csv(
        out,
        ["lambda", "phi", "gamma_avg_db", "gamma1_db", "gamma2_db", "capacity"],
        [tuple(f"{x:.8g}" for x in row) for row in rows],
    )
    for lam, _, g_db, g1, g2, cap in rows:
        print(
            f"lambda={lam:.6g} phi={phi:.4g}: gamma_avg {g_db:.4f} dB "
            f"(gamma1 {g1:.4f}, gamma2 {g2:.4f}), capacity {cap:.6f}"
        )
    return {"capacity_csv": str(out)}


def _cmd_simulate(cfg: RunConfig, tag: str) -> dict:
    p = cfg.params
    matrix = _build_matrix("tailbiting", int(p["dv"]), int(p["n"]))
    code = lift(matrix, int(p["q"]), seed=int(p["seed"]))
    params = ShapingParams(phi=float(p["phi"]), lam=float(p["lam"]))
    profile = two_level_profile(params, matrix.n_vars)
    window = WindowConfig(
        span_vn_columns=int(p["window_span"]),
        slide_vn_columns=int(p["window_slide"]),
        local_iterations=int(p["local_iters"]),
        passes=int(p["passes"]),
        llr_clip=float(p["llr_clip"]),
        early_exit=not bool(p.get("no_early_exit")),
    )
    stop = StopRule(
        min_frame_errors=int(p["min_frame_errors"]),
        max_frames=int(float(p["max_frames"])),
        frames_per_task=int(p["frames_per_task"]),
    )
    grid = np.arange(float(p["snr_start"]), float(p["snr_stop"]) + 1e-9, float(p["snr_step"]))
    results = sweep_ber_cer(
        code, profile, grid.tolist(), window=window, stop=stop,
        seed=int(p["seed"]), jobs=cfg.jobs,
    )
    out = cfg.out_dir / f"simulate-{tag}.csv"
    _write_csv(
        out,
        ["gamma_avg_db", "frames", "bit_errors", "frame_errors", "ber", "cer", "ci95"],
        [
            (f"{r.gamma_avg_db:.4f}", r.frames, r.bit_errors, r.frame_errors,
             f"{r.ber:.8g}", f"{r.cer:.8g}", f"{r.ci95:.8g}")
            for r in results
        ],
    )
    if p.get("alist_out"):
        write_alist(code, p["alist_out"])
    for r in results:
        print(
            f"SNR {r.gamma_avg_db:.2f} dB: CER {r.cer:.4g} (BER {r.ber:.4g}, "
            f"{r.frame_errors}/{r.frames} frames, {r.runtime_s:.0f}s)"
        )
    return {"simulate_csv": str(out)}


def _cmd_figures(cfg: RunConfig, tag: str) -> dict:
    p = cfg.params
    which = p["which"]
    artifacts: dict[str, str] = {}
    schedule = _schedule_from(p)
    dv, n = int(p["dv"]), int(p["n"])
    if which == "fig1":
        matrix = _build_matrix("tailbiting", dv, n)
        lam = float(p["lam"])
        res = threshold_for_lambda(
            matrix, lam, schedule, jobs=cfg.jobs, tol_db=float(p["tol"]),
            epsilon=float(p["eps"]), max_iters=int(p["max_iters"]),
        )
        bpath = cfg.out_dir / f"fig1-boundary-{tag}.csv"
        _write_csv(bpath, ["gamma1_db", "gamma2_db"],
                   [(f"{a:.6f}", f"{b:.6f}") for a, b in res.boundary_points])
        gstar = float(db_to_linear(res.gamma_star_db))
        g1s = np.array([a for a, _ in res.boundary_points])
        tangent = [
            (g1, float(linear_to_db((gstar - lam * db_to_linear(g1)) / (1.0 - lam))))
            for g1 in g1s
            if gstar - lam * db_to_linear(g1) > 0
        ]
        tpath = cfg.out_dir / f"fig1-tangent-{tag}.csv"
        _write_csv(tpath, ["gamma1_db", "gamma2_db"],
                   [(f"{a:.6f}", f"{b:.6f}") for a, b in tangent])
        artifacts = {"boundary_csv": str(bpath), "tangent_csv": str(tpath)}
        print(f"fig1: optimum {res.gamma_star_db:.4f} dB at "
              f"({res.gamma1_db:.3f}, {res.gamma2_db:.3f}) dB")
    elif which == "fig2":
        matrix = _build_matrix("tailbiting", dv, n)
        grid = _lambda_grid_from(p, matrix.n_vars)
        sweep = optimize_lambda(matrix, grid, schedule, jobs=cfg.jobs,
                                tol_db=float(p["tol"]), epsilon=float(p["eps"]),
                                max_iters=int(p["max_iters"]))
        spath = cfg.out_dir / f"fig2-threshold-{tag}.csv"
        _write_csv(spath, ["lambda", "gamma_lambda_db", "phi_star"],
                   [(f"{r.lambda_star:.10g}", f"{r.gamma_star_db:.6f}", f"{r.phi_star:.6f}")
                    for r in sweep.curve])
        limits = [
            (r.lambda_star,
             float(linear_to_db(rate_limit_snr(0.5, ShapingParams(max(r.phi_star, 1.0), r.lambda_star)))))
            for r in sweep.curve
        ]
        lpath = cfg.out_dir / f"fig2-ratelimit-{tag}.csv"
        _write_csv(lpath, ["lambda", "gamma_limit_db"],
                   [(f"{a:.10g}", f"{b:.6f}") for a, b in limits])
        artifacts = {"threshold_csv": str(spath), "ratelimit_csv": str(lpath)}
        print(f"fig2: optimal lambda {sweep.best.lambda_star:.6g}, "
              f"threshold {sweep.best.gamma_star_db:.4f} dB")
    elif which == "fig3":
        paper_scale = p.get("profile") == "paper"
        q = 512 if paper_scale else int(p["q"])
        matrix = _build_matrix("tailbiting", dv, n)
        code = lift(matrix, q, seed=int(p["seed"]))
        window = WindowConfig(
            span_vn_columns=int(p["window_span"]),
            slide_vn_columns=int(p["window_slide"]),
            local_iterations=int(p["local_iters"]),
            passes=int(p["passes"]),
        )
        stop = StopRule(
            min_frame_errors=int(p["min_frame_errors"]),
            max_frames=int(float(p["max_frames"])),
        )
        for name, sp in (
            ("shaped", ShapingParams(float(p["phi"]), float(p["lam"]))),
            ("uniform", ShapingParams(1.0, 0.0)),
        ):
            profile = two_level_profile(sp, matrix.n_vars)
            lo, hi = (
                (float(p["snr_start"]), float(p["snr_stop"]))
                if name == "shaped"
                else (float(p["snr_start"]) + 1.0, float(p["snr_stop"]) + 1.0)
            )
            grid = np.arange(lo, hi + 1e-9, float(p["snr_step"]))
            results = sweep_ber_cer(code, profile, grid.tolist(), window=window,
                                    stop=stop, seed=int(p["seed"]), jobs=cfg.jobs)
            path = cfg.out_dir / f"fig3-{name}-{tag}.csv"
            _write_csv(
                path,
                ["gamma_avg_db", "frames", "bit_errors", "frame_errors", "ber", "cer", "ci95"],
                [(f"{r.gamma_avg_db:.4f}", r.frames, r.bit_errors, r.frame_errors,
                  f"{r.ber:.8g}", f"{r.cer:.8g}", f"{r.ci95:.8g}") for r in results],
            )
            artifacts[f"{name}_csv"] = str(path)
            for r in results:
                print(f"fig3 {name} @{r.gamma_avg_db:.2f} dB: CER {r.cer:.4g}")
    else:
        raise ValueError(f"unknown figure {which!r}")
    return artifacts


HANDLERS = {
    "threshold": _cmd_threshold,
    "region": _cmd_region,
    "lambda-sweep": _cmd_lambda_sweep,
    "compare": _cmd_compare,
    "capacity": _cmd_capacity,
    "simulate": _cmd_simulate,
    "figures": _cmd_figures,
}


def _add_common(sp, with_schedule=True):
    sp.add_argument("--tol", type=float, default=0.005, help="bisection tolerance in dB")
    sp.add_argument("--eps", type=float, default=1e-6, help="EXIT convergence epsilon")
    sp.add_argument("--max-iters", type=int, default=50_000, help="EXIT iteration cap")
    if with_schedule:
        sp.add_argument("--schedule", choices=("flooding", "windowed"), default="flooding")
        sp.add_argument("--window-positions", type=int, default=8)
        sp.add_argument("--local-iterations", type=int, default=50)
        sp.add_argument("--slide-positions", type=int, default=1)
        sp.add_argument("--passes", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="scshape",
        description="Energy-shaped tailbiting SC-LDPC analysis and simulation",
    )
    ap.add_argument("--version", action="version", version=f"scshape {__version__}")
    ap.add_argument("--out-dir", default=None,
                    help="artifact directory (default: $SCSHAPE_OUTDIR or ./scshape-out)")
    ap.add_argument("--jobs", type=int, default=max(os.cpu_count() or 1, 1),
                    help="parallel workers for sweeps")
    ap.add_argument("--config", default=None, help="INI config file; flags override it")
    ap.add_argument("--no-cache", action="store_true", help="recompute even if cached")
    ap.add_argument("--save-config", default=None, help="write the resolved config to this path")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("threshold", help="decoding threshold of one ensemble")
    sp.add_argument("--dv", type=int, default=5)
    sp.add_argument("--N", dest="n", type=int, default=128, help="VN-type count")
    sp.add_argument("--kind", choices=protograph.EnsembleKind.TAGS, default="tailbiting")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.0,
                    help="normalized boosting length (0 = uniform energy)")
    sp.add_argument("--grid-db", type=float, default=0.1, help="gamma1 grid spacing")
    sp.add_argument("--boost-rotate", type=int, default=0,
                    help="rotate the boosted segment by this many positions")
    sp.add_argument("--save-matrix", default=None, help="write the base matrix (.txt/.json)")
    _add_common(sp)

    sp = sub.add_parser("region", help="achievable-region boundary (CSV)")
    sp.add_argument("--dv", type=int, default=5)
    sp.add_argument("--N", dest="n", type=int, default=128)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--gamma1-start", type=float, default=None)
    sp.add_argument("--gamma1-stop", type=float, default=None)
    sp.add_argument("--gamma1-step", type=float, default=0.1)
    _add_common(sp)

    sp = sub.add_parser("lambda-sweep", help="threshold vs boosting length")
    sp.add_argument("--dv", type=int, default=5)
    sp.add_argument("--N", dest="n", type=int, default=128)
    sp.add_argument("--lambdas", default=None, help="comma-separated boosting lengths")
    sp.add_argument("--positions", default=None,
                    help="comma-separated boosted-position counts (alternative to --lambdas)")
    _add_common(sp)

    sp = sub.add_parser("compare", help="ensemble threshold comparison table")
    sp.add_argument("--dv", default="5", help="comma-separated VN degrees")
    sp.add_argument("--N", dest="n", default="128", help="comma-separated VN-type counts")
    sp.add_argument("--lambdas", default=None)
    sp.add_argument("--map-proxy-n", type=int, default=2048,
                    help="terminated VN-type count for the MAP estimate")
    _add_common(sp)

    sp = sub.add_parser("capacity", help="shaped bi-AWGN capacity / rate limits")
    sp.add_argument("--phi", type=float, default=1.0)
    sp.add_argument("--rate", type=float, default=0.5)
    sp.add_argument("--lambdas", default=None)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.0)
    sp.add_argument("--gamma-db", type=float, default=None,
                    help="evaluate capacity here instead of solving for the rate limit")

    sp = sub.add_parser("simulate", help="windowed-BP Monte Carlo BER/CER")
    sp.add_argument("--dv", type=int, default=5)
    sp.add_argument("--N", dest="n", type=int, default=128)
    sp.add_argument("--Q", dest="q", type=int, default=64, help="lifting factor")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.125)
    sp.add_argument("--phi", type=float, default=1.85)
    sp.add_argument("--snr-start", type=float, default=1.4)
    sp.add_argument("--snr-stop", type=float, default=2.2)
    sp.add_argument("--snr-step", type=float, default=0.2)
    sp.add_argument("--min-frame-errors", type=int, default=100)
    sp.add_argument("--max-frames", type=float, default=1e6)
    sp.add_argument("--frames-per-task", type=int, default=64)
    sp.add_argument("--window-span", type=int, default=32,
                    help="window span in VN columns")
    sp.add_argument("--window-slide", type=int, default=2)
    sp.add_argument("--local-iters", type=int, default=50)
    sp.add_argument("--passes", type=int, default=2)
    sp.add_argument("--llr-clip", type=float, default=30.0)
    sp.add_argument("--no-early-exit", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--alist-out", default=None, help="export H in alist format")

    sp = sub.add_parser("figures", help="CSV bundles behind the reference figures")
    sp.add_argument("which", choices=("fig1", "fig2", "fig3"))
    sp.add_argument("--dv", type=int, default=5)
    sp.add_argument("--N", dest="n", type=int, default=128)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.125)
    sp.add_argument("--phi", type=float, default=1.85)
    sp.add_argument("--lambdas", default=None)
    sp.add_argument("--positions", default=None)
    sp.add_argument("--profile", choices=("desk", "paper"), default="desk")
    sp.add_argument("--Q", dest="q", type=int, default=64)
    sp.add_argument("--snr-start", type=float, default=1.4)
    sp.add_argument("--snr-stop", type=float, default=2.2)
    sp.add_argument("--snr-step", type=float, default=0.2)
    sp.add_argument("--min-frame-errors", type=int, default=100)
    sp.add_argument("--max-frames", type=float, default=1e6)
    sp.add_argument("--window-span", type=int, default=32)
    sp.add_argument("--window-slide", type=int, default=2)
    sp.add_argument("--local-iters", type=int, default=50)
    sp.add_argument("--passes", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)
    return ap


def _namespace_params(args: argparse.Namespace) -> dict:
    skip = {"command", "out_dir", "jobs", "config", "no_cache", "save_config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)

    # A config file supplies defaults; explicit flags still win.
    pre, _ = parser.parse_known_args(argv)
    if getattr(pre, "config", None):
        command, params = RunConfig.read_ini(Path(pre.config))
        if command and command not in argv:
            argv = [command] + argv
        file_args = []
        for k, v in params.items():
            flag = "--" + k.replace("_", "-")
            file_args += [flag, v] if v not in ("True", "False") else ([flag] if v == "True" else [])
        marker = argv.index(command) + 1 if command in argv else 1
        argv = argv[:marker] + file_args + argv[marker:]

    args = parser.parse_args(argv)
    out_dir = Path(
        args.out_dir or os.environ.get("SCSHAPE_OUTDIR") or "scshape-out"
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = RunConfig(
        command=args.command,
        params=_namespace_params(args),
        out_dir=out_dir,
        jobs=args.jobs,
        use_cache=not args.no_cache,
    )
    if args.save_config:
        cfg.to_ini(Path(args.save_config))

    store = RecordStore(out_dir)
    chash = cfg.config_hash()
    if cfg.use_cache:
        rec = store.lookup(chash)
        if rec is not None:
            print(f"cached ({chash[:8]}):")
            for name, path in rec.get("artifacts", {}).items():
                print(f"  {name}: {path}")
            return 0

    t0 = time.perf_counter()
    try:
        artifacts = HANDLERS[args.command](cfg, chash[:8])
    except (ValueError, RuntimeError, BoundaryRangeError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1
    store.append(
        {
            "config_hash": chash,
            "version": __version__,
            "command": cfg.command,
            "params": {k: str(v) for k, v in sorted(cfg.params.items()) if v is not None},
            "artifacts": artifacts,
            "timing": {"wall_s": round(time.perf_counter() - t0, 3)},
        }
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
