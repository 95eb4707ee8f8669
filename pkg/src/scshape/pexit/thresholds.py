"""Threshold searches: achievable-region boundaries, boosting optimization,
MAP estimates, and the ensemble comparison table.

All searches bisect on the dB axis.  Boundary and grid sweeps are
embarrassingly parallel; workers share nothing and results are collected
in submission order, so outcomes do not depend on completion order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..protograph import BaseMatrix, build_terminated, build_tailbiting, build_uncoupled
from ..shaping import ShapingParams, db_to_linear, linear_to_db, rate_limit_snr
from .engine import (
    DEFAULT_EPSILON,
    DEFAULT_MAX_ITERS,
    Schedule,
    converges,
    snr_vector_from_pair,
)

__all__ = [
    "BoundaryRangeError",
    "ThresholdResult",
    "LambdaSweepResult",
    "ComparisonRow",
    "uniform_threshold",
    "min_gamma2_on_boundary",
    "threshold_for_lambda",
    "optimize_lambda",
    "estimate_map_threshold",
    "comparison_table",
]

DEFAULT_TOL_DB = 0.005
DEFAULT_GAMMA2_FLOOR_DB = -12.0
GRID_STEP_DB = 0.1


class BoundaryRangeError(RuntimeError):
    """The requested boundary point lies outside the searchable range."""


@dataclass
class ThresholdResult:
    """Decoding threshold with its achieving operating point."""

    gamma_star_db: float
    lambda_star: float
    phi_star: float
    gamma1_db: float
    gamma2_db: float
    iterations_used: int
    boundary_points: list[tuple[float, float]] = field(default_factory=list)
    schedule: str = "flooding"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LambdaSweepResult:
    best: ThresholdResult
    curve: list[ThresholdResult]

    def to_dict(self) -> dict:
        return {"best": self.best.to_dict(), "curve": [r.to_dict() for r in self.curve]}


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _converges_pair(matrix, gamma1_db, gamma2_db, lam, schedule, epsilon, max_iters,
                    boost_offset=0):
    gam = snr_vector_from_pair(
        float(db_to_linear(gamma1_db)), float(db_to_linear(gamma2_db)),
        lam, matrix.n_vars, boost_offset,
    )
    return converges(matrix, gam, schedule=schedule, epsilon=epsilon, max_iters=max_iters)


def uniform_threshold(
    matrix: BaseMatrix,
    schedule: Schedule | None = None,
    tol_db: float = DEFAULT_TOL_DB,
    lo_db: float = -2.0,
    hi_db: float = 8.0,
    epsilon: float = DEFAULT_EPSILON,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> ThresholdResult:
    """BP threshold under uniform energy: bisect gamma_avg to ``tol_db``."""
    schedule = schedule or Schedule.flooding()

    def run(g_db):
        gam = np.full(matrix.n_vars, float(db_to_linear(g_db)))
        return converges(matrix, gam, schedule=schedule, epsilon=epsilon, max_iters=max_iters)

    if run(lo_db).converged:
        raise ValueError(f"lower bracket {lo_db} dB already converges")
    hi_res = run(hi_db)
    if not hi_res.converged:
        raise ValueError(f"upper bracket {hi_db} dB does not converge")
    lo, hi = lo_db, hi_db
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        res = run(mid)
        if res.converged:
            hi, hi_res = mid, res
        else:
            lo = mid
    return ThresholdResult(
        gamma_star_db=hi,
        lambda_star=0.0,
        phi_star=1.0,
        gamma1_db=hi,
        gamma2_db=hi,
        iterations_used=hi_res.iterations,
        boundary_points=[(hi, hi)],
        schedule=schedule.kind,
    )


def min_gamma2_on_boundary(
    matrix: BaseMatrix,
    lam: float,
    gamma1_db: float,
    schedule: Schedule | None = None,
    tol_db: float = DEFAULT_TOL_DB,
    floor_db: float = DEFAULT_GAMMA2_FLOOR_DB,
    hint_db: float | None = None,
    epsilon: float = DEFAULT_EPSILON,
    max_iters: int = DEFAULT_MAX_ITERS,
    boost_offset: int = 0,
) -> float:
    """Smallest gamma2 (dB) that converges with ``gamma1_db`` held fixed.

    One point of the achievable-region boundary.  Raises
    BoundaryRangeError when even gamma2 = gamma1 fails (gamma1 below the
    uncoupled-threshold region) or when the search floor still converges.
    ``hint_db`` is a known-or-nearby boundary value from a smaller gamma1;
    since the boundary is non-increasing in gamma1 it brackets the search.
    """
    schedule = schedule or Schedule.flooding()

    def ok(g2_db):
        return _converges_pair(matrix, gamma1_db, g2_db, lam, schedule, epsilon,
                               max_iters, boost_offset).converged

    hi = gamma1_db
    lo = floor_db
    if hint_db is not None and floor_db < hint_db < gamma1_db and ok(hint_db):
        hi = hint_db
        probe_lo = hint_db - 1.0
        if probe_lo > floor_db:
            if ok(probe_lo):
                hi = probe_lo
            else:
                lo = probe_lo
    elif not ok(gamma1_db):
        raise BoundaryRangeError(
            f"(gamma1, gamma2) = ({gamma1_db:.4g}, {gamma1_db:.4g}) dB does not converge; "
            "boundary outside range"
        )
    if lo == floor_db and ok(floor_db):
        raise BoundaryRangeError(
            f"gamma2 = {floor_db} dB floor still converges at gamma1 = {gamma1_db:.4g} dB"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _objective_db(lam: float, gamma1_db: float, gamma2_db: float) -> float:
    avg = lam * float(db_to_linear(gamma1_db)) + (1.0 - lam) * float(db_to_linear(gamma2_db))
    return float(linear_to_db(avg))


class _BoundaryWorker:
    """Picklable (gamma1, hint) -> boundary-point evaluator for pool workers."""

    def __init__(self, matrix, lam, schedule, tol_db, floor_db, epsilon, max_iters,
                 boost_offset=0):
        self.matrix = matrix
        self.lam = lam
        self.schedule = schedule
        self.tol_db = tol_db
        self.floor_db = floor_db
        self.epsilon = epsilon
        self.max_iters = max_iters
        self.boost_offset = boost_offset

    def __call__(self, point):
        gamma1_db, hint_db = point
        try:
            g2 = min_gamma2_on_boundary(
                self.matrix, self.lam, gamma1_db, self.schedule,
                tol_db=self.tol_db, floor_db=self.floor_db, hint_db=hint_db,
                epsilon=self.epsilon, max_iters=self.max_iters,
                boost_offset=self.boost_offset,
            )
        except BoundaryRangeError:
            return gamma1_db, None
        return gamma1_db, g2


def threshold_for_lambda(
    matrix: BaseMatrix,
    lam: float,
    schedule: Schedule | None = None,
    tol_db: float = DEFAULT_TOL_DB,
    grid_db: float = GRID_STEP_DB,
    gamma1_lo_db: float | None = None,
    gamma1_hi_db: float | None = None,
    floor_db: float = DEFAULT_GAMMA2_FLOOR_DB,
    epsilon: float = DEFAULT_EPSILON,
    max_iters: int = DEFAULT_MAX_ITERS,
    jobs: int = 1,
    block_threshold_db: float | None = None,
    rise_stop_db: float = 0.3,
    rise_stop_points: int = 4,
    boost_offset: int = 0,
) -> ThresholdResult:
    """Shaped threshold at fixed lam: minimize the average SNR over the
    achievable-region boundary.

    The boundary is traced on an ascending gamma1 grid of ``grid_db``
    spacing (stopping once the objective has risen ``rise_stop_db`` above
    the running best for ``rise_stop_points`` consecutive points) and the
    minimizer is refined by golden-section on gamma1.  Grid chunks of
    ``jobs`` points run in parallel; boundary values from completed
    points bracket later bisections.
    """
    schedule = schedule or Schedule.flooding()
    if lam in (0.0, 1.0):
        res = uniform_threshold(matrix, schedule, tol_db=tol_db,
                                epsilon=epsilon, max_iters=max_iters)
        res.lambda_star = lam
        return res
    ell = lam * matrix.n_vars
    if abs(ell - round(ell)) > 1e-9:
        raise ValueError(f"lam = {lam} is not admissible on {matrix.n_vars} VN types")

    if block_threshold_db is None:
        block_threshold_db = uniform_threshold(
            matrix, schedule, tol_db=tol_db, epsilon=epsilon, max_iters=max_iters
        ).gamma_star_db
    lo = block_threshold_db + grid_db if gamma1_lo_db is None else gamma1_lo_db
    hi = block_threshold_db + 6.0 if gamma1_hi_db is None else gamma1_hi_db

    worker = _BoundaryWorker(matrix, lam, schedule, tol_db, floor_db, epsilon, max_iters,
                             boost_offset)
    chunk = max(jobs, 1)
    refined: dict[float, float | None] = {}
    boundary: list[tuple[float, float]] = []
    best_obj = math.inf
    rise_count = 0
    hint = None
    g1 = lo
    while g1 <= hi + 0.5 * grid_db and rise_count < rise_stop_points:
        batch = [g1 + i * grid_db for i in range(chunk) if g1 + i * grid_db <= hi + 0.5 * grid_db]
        if not batch:
            break
        results = _parallel_map(worker, [(g, hint) for g in batch], jobs)
        for g, g2 in results:
            refined[g] = g2
            if g2 is None:
                continue
            boundary.append((g, g2))
            hint = g2 + 2.0 * tol_db
            obj = _objective_db(lam, g, g2)
            if obj < best_obj:
                best_obj = obj
                rise_count = 0
            elif obj > best_obj + rise_stop_db:
                rise_count += 1
        g1 = batch[-1] + grid_db
    if not boundary:
        raise BoundaryRangeError(f"no achievable boundary point found for lam = {lam}")

    objs = [_objective_db(lam, g1_, g2_) for g1_, g2_ in boundary]
    k = int(np.argmin(objs))

    # Golden-section refinement of gamma1 around the grid minimizer; each
    # probe re-bisects gamma2 with the flanking boundary values as hints.
    a = boundary[max(k - 1, 0)][0]
    b = boundary[min(k + 1, len(boundary) - 1)][0]
    probe_hint = boundary[max(k - 1, 0)][1] + 2.0 * tol_db

    def probe(g1_db: float) -> float:
        if g1_db in refined:
            g2 = refined[g1_db]
            return _objective_db(lam, g1_db, g2) if g2 is not None else math.inf
        try:
            g2 = min_gamma2_on_boundary(
                matrix, lam, g1_db, schedule, tol_db=tol_db, floor_db=floor_db,
                hint_db=probe_hint, epsilon=epsilon, max_iters=max_iters,
                boost_offset=boost_offset,
            )
        except BoundaryRangeError:
            refined[g1_db] = None
            return math.inf
        refined[g1_db] = g2
        return _objective_db(lam, g1_db, g2)

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = probe(x1), probe(x2)
    while b - a > tol_db:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = probe(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = probe(x2)

    candidates = [(g1_, g2_) for g1_, g2_ in refined.items() if g2_ is not None]
    best_g1, best_g2 = min(candidates, key=lambda p: _objective_db(lam, p[0], p[1]))
    best_obj = _objective_db(lam, best_g1, best_g2)
    phi = float(db_to_linear(best_g1) / db_to_linear(best_g2))
    final = _converges_pair(matrix, best_g1, best_g2, lam, schedule, epsilon,
                            max_iters, boost_offset)
    return ThresholdResult(
        gamma_star_db=best_obj,
        lambda_star=lam,
        phi_star=phi,
        gamma1_db=best_g1,
        gamma2_db=best_g2,
        iterations_used=final.iterations,
        boundary_points=sorted(candidates),
        schedule=schedule.kind,
    )


def optimize_lambda(
    matrix: BaseMatrix,
    lambda_grid,
    schedule: Schedule | None = None,
    jobs: int = 1,
    **kwargs,
) -> LambdaSweepResult:
    """Minimize the shaped threshold over a grid of boosting lengths."""
    lams = list(lambda_grid)
    if not lams:
        raise ValueError("lambda grid must be non-empty")
    schedule = schedule or Schedule.flooding()
    block = None
    if any(l not in (0.0, 1.0) for l in lams):
        block = uniform_threshold(matrix, schedule,
                                  tol_db=kwargs.get("tol_db", DEFAULT_TOL_DB),
                                  epsilon=kwargs.get("epsilon", DEFAULT_EPSILON),
                                  max_iters=kwargs.get("max_iters", DEFAULT_MAX_ITERS))
    curve = [
        threshold_for_lambda(matrix, lam, schedule, jobs=jobs,
                             block_threshold_db=block.gamma_star_db if block else None,
                             **kwargs)
        for lam in lams
    ]
    best = min(curve, key=lambda r: r.gamma_star_db)
    return LambdaSweepResult(best=best, curve=curve)


def estimate_map_threshold(
    dv: int,
    n_large: int = 2048,
    schedule: Schedule | None = None,
    tol_db: float = DEFAULT_TOL_DB,
    epsilon: float = DEFAULT_EPSILON,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> float:
    """MAP-threshold estimate of the uncoupled (dv, 2dv) ensemble.

    Threshold saturation: the flooding threshold of the terminated
    ensemble at large N is returned as the MAP estimate.
    """
    matrix = build_terminated(dv, n_large)
    res = uniform_threshold(matrix, schedule, tol_db=tol_db,
                            epsilon=epsilon, max_iters=max_iters)
    return res.gamma_star_db


@dataclass
class ComparisonRow:
    dv: int
    n_types: int
    gamma_block_db: float
    gamma_ter_db: float
    gamma_bp_db: float
    gamma_map_db: float
    lambda_star: float
    phi_star: float
    delta_ter_db: float
    delta_bp_db: float
    rate_ter: float

    def to_dict(self) -> dict:
        return asdict(self)


def default_lambda_grid(n_types: int, boosted_positions=(4, 6, 8, 10, 12, 16)) -> list[float]:
    """Boost lengths in whole spatial positions, as fractions of N."""
    n_pos = n_types // 2
    return [2 * p / n_types for p in boosted_positions if p < n_pos]


def comparison_table(
    dv_list,
    n_list,
    schedule: Schedule | None = None,
    lambda_grid=None,
    jobs: int = 1,
    map_proxy_n: int = 2048,
    tol_db: float = DEFAULT_TOL_DB,
    epsilon: float = DEFAULT_EPSILON,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> list[ComparisonRow]:
    """Threshold comparison across ensembles: uncoupled / terminated /
    shaped tailbiting / MAP estimate, with gaps to the shaped capacity limit.

    Eb/N0 conversions use each ensemble's actual design rate, so the
    terminated columns carry the termination rate loss.
    """
    schedule = schedule or Schedule.flooding()
    rows = []
    for dv in dv_list:
        gamma_map = estimate_map_threshold(dv, map_proxy_n, schedule,
                                           tol_db=tol_db, epsilon=epsilon,
                                           max_iters=max_iters)
        block = uniform_threshold(build_uncoupled(dv), schedule, tol_db=tol_db,
                                  epsilon=epsilon, max_iters=max_iters)
        for n_types in n_list:
            ter = build_terminated(dv, n_types)
            gamma_ter = uniform_threshold(ter, schedule, tol_db=tol_db,
                                          epsilon=epsilon, max_iters=max_iters).gamma_star_db
            tb = build_tailbiting(dv, n_types)
            grid = lambda_grid or default_lambda_grid(n_types)
            sweep = optimize_lambda(tb, grid, schedule, jobs=jobs, tol_db=tol_db,
                                    epsilon=epsilon, max_iters=max_iters)
            best = sweep.best
            limit_ter = float(linear_to_db(rate_limit_snr(ter.rate, ShapingParams(1.0, 0.0))))
            limit_bp = float(linear_to_db(rate_limit_snr(
                tb.rate, ShapingParams(best.phi_star, best.lambda_star))))
            rows.append(ComparisonRow(
                dv=dv,
                n_types=n_types,
                gamma_block_db=block.gamma_star_db,
                gamma_ter_db=gamma_ter,
                gamma_bp_db=best.gamma_star_db,
                gamma_map_db=gamma_map,
                lambda_star=best.lambda_star,
                phi_star=best.phi_star,
                delta_ter_db=gamma_ter - limit_ter,
                delta_bp_db=best.gamma_star_db - limit_bp,
                rate_ter=ter.rate,
            ))
    return rows
