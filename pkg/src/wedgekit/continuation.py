"""Certified power-series continuation.

A Taylor table at a real base point is summed at an offset z; the wedge
regulator governing the base certifies convergence through its asymptotic
root r(z) < 1, and the truncation tail is estimated by the larger of an
analytic geometric envelope r^(K+1)/(1-r) * max|term| and an empirical
geometric fit to the trailing quarter of the observed term magnitudes.
Path continuation re-expands greedily along the segment toward a target,
stepping to 0.8 of the certified reach each time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StuckError
from .geometry import as_point, inscribe_wedge, Wedge
from .pick_oracles import PickOracle, TaylorTable, taylor_table
from .regulators import (
    Parallelogram,
    RegionSample,
    WedgeRegulator,
    asymptotic_root,
    parallelogram_region,
)

_STEP_FRACTION = 0.8
_FINAL_ROOT = 0.5
_MIN_PROGRESS = 1e-6


@dataclass(frozen=True)
class ContinuationResult:
    """Value of the continuation series at a target point.

    ``certified`` requires both asymptotic_root < 1 at the offset and a tail
    estimate below the requested tolerance; ``steps`` lists every expansion
    point used, ending at the final base."""

    target: np.ndarray
    value: complex
    order: int
    tail_bound: float
    certified: bool
    tolerance: float
    steps: tuple
    root: float

    def __post_init__(self):
        if self.certified and not (self.tail_bound < self.tolerance):
            raise ValueError("certified results need tail_bound < tolerance")
        if len(self.steps) < 1:
            raise ValueError("steps must record at least the first base point")

    def to_json(self) -> dict:
        return {
            "target": np.asarray(self.target).tolist(),
            "value": {"re": float(np.real(self.value)),
                      "im": float(np.imag(self.value))},
            "order": self.order,
            "tail_bound": self.tail_bound,
            "certified": self.certified,
            "tolerance": self.tolerance,
            "root": self.root,
            "steps": [np.asarray(s).tolist() for s in self.steps],
        }


def _tail_estimate(terms: np.ndarray, root: float) -> float:
    """max of the analytic geometric envelope at ratio ``root`` and a
    log-linear fit to the trailing quarter of the nonzero term magnitudes."""
    mags = np.abs(terms)
    K = mags.size - 1
    if root >= 1.0:
        return math.inf
    analytic = root ** (K + 1) / (1.0 - root) * float(mags.max())
    q = max(2, K // 4)
    tail_idx = np.arange(1, K + 1)[-q:]
    tail_mags = mags[tail_idx]
    nz = tail_mags > 0.0
    if np.count_nonzero(nz) == 0:
        return analytic if float(mags[1:].max(initial=0.0)) > 0.0 else 0.0
    if np.count_nonzero(nz) == 1:
        empirical = float(tail_mags[nz][0])
    else:
        ks = tail_idx[nz].astype(float)
        logs = np.log(tail_mags[nz])
        slope, intercept = np.polyfit(ks, logs, 1)
        ratio = math.exp(slope)
        if ratio >= 1.0:
            return math.inf
        last = math.exp(intercept + slope * K)
        empirical = last * ratio / (1.0 - ratio)
    return max(analytic, empirical)


def continue_eval(table: TaylorTable, z_offset, tol: float,
                  regulator: WedgeRegulator) -> ContinuationResult:
    """Sum the table's series at a complex offset with a certified tail.

    The governing wedge regulator supplies the asymptotic root at the
    offset; root >= 1 or a tail estimate at or above ``tol`` leaves the
    result uncertified (the partial sum is still returned).
    """
    if table.order < 2:
        raise ValueError("continuation needs a table of order >= 2")
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    z = np.asarray(z_offset, dtype=complex).ravel()
    terms = table.term_values(z)
    value = complex(np.sum(terms))
    root = asymptotic_root(regulator, z)
    if not np.any(z != 0.0):
        tail = 0.0
    else:
        tail = _tail_estimate(terms, root)
    certified = (root < 1.0) and (tail < tol)
    target = table.base + z.real if np.all(z.imag == 0.0) else table.base + z
    return ContinuationResult(
        target=np.asarray(target), value=value, order=table.order,
        tail_bound=tail, certified=certified, tolerance=tol,
        steps=(np.array(table.base),), root=root)


def continue_path(oracle: PickOracle, start, target, reg_params=(0.5, 2.0),
                  tol: float = 1e-6, max_steps: int = 200,
                  order: int = 24) -> ContinuationResult:
    """Greedy re-expansion from ``start`` toward ``target``.

    At each expansion point a wedge is inscribed into the oracle's real
    domain, a Taylor table built, and the walk advances 0.8 of the certified
    reach along the remaining segment; the final evaluation happens once the
    remaining offset has asymptotic root <= 0.5.  Steps below 1e-6 of the
    full segment raise StuckError carrying the partial trace.
    """
    start = as_point(start, oracle.dim)
    target = as_point(target, oracle.dim)
    m1, m2 = reg_params
    seg_len = float(np.linalg.norm(target - start))
    p = start.copy()
    steps = [p.copy()]
    for _ in range(max_steps):
        wedge = inscribe_wedge(oracle.domain, p, m1, m2)
        reg = WedgeRegulator(wedge)
        table = taylor_table(oracle, p, order)
        d = target - p
        if not np.any(d != 0.0):
            res = continue_eval(table, np.zeros(oracle.dim), tol, reg)
            return _with_steps(res, steps)
        root_d = asymptotic_root(reg, d.astype(complex))
        if root_d <= _FINAL_ROOT:
            res = continue_eval(table, d.astype(complex), tol, reg)
            return _with_steps(res, steps, final_target=target)
        theta = min(_STEP_FRACTION / root_d, 0.95)
        step_vec = theta * d
        if float(np.linalg.norm(step_vec)) < _MIN_PROGRESS * seg_len:
            raise StuckError(
                f"{oracle.name}: step shrank below 1e-6 of the segment at "
                f"{p.tolist()}", steps=steps)
        p = p + step_vec
        steps.append(p.copy())
    raise StuckError(f"{oracle.name}: exceeded {max_steps} steps", steps=steps)


def _with_steps(res: ContinuationResult, steps, final_target=None) -> ContinuationResult:
    target = res.target if final_target is None else np.asarray(final_target)
    return ContinuationResult(
        target=target, value=res.value, order=res.order,
        tail_bound=res.tail_bound, certified=res.certified,
        tolerance=res.tolerance, steps=tuple(np.array(s) for s in steps),
        root=res.root)


def series_region_scan(table: TaylorTable, reg: WedgeRegulator,
                       grid: float, window=None,
                       cauchy_tol: float = 1e-8) -> RegionSample:
    """Rasterize real offsets around the base: certified membership
    (asymptotic_root < 1) against empirical convergence of the partial sums
    (Cauchy gap |S_K - S_{K/2}| within ``cauchy_tol``).

    Extras: ``root``, ``empirical`` and ``agree`` (certified implies
    empirically convergent) per grid point.
    """
    if table.dim != 2 or reg.dim != 2:
        raise ValueError("series_region_scan is 2-D only")
    if grid <= 0.0:
        raise ValueError("grid must be positive")
    region = parallelogram_region(reg)
    if window is None:
        lo, hi = region.scaled(1.15).bounding_box()
        lo = lo - region.center
        hi = hi - region.center
    else:
        lo = as_point(window[0], 2)
        hi = as_point(window[1], 2)
    xs = np.arange(math.ceil(lo[0] / grid), math.floor(hi[0] / grid) + 1) * grid
    ys = np.arange(math.ceil(lo[1] / grid), math.floor(hi[1] / grid) + 1) * grid
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    offsets = np.stack([X.ravel(), Y.ravel()], axis=1)

    sup = np.maximum(np.abs(offsets[:, 0]),
                     np.abs(offsets[:, 1] - reg.sum_slopes * offsets[:, 0])
                     / reg.diff_slopes)
    delta = reg.wedge.half_width
    roots = np.zeros(len(offsets)) if math.isinf(delta) else \
        (sup / delta) * (1.0 + math.sqrt(2.0))
    certified = roots < 1.0

    terms = table.term_values_many(offsets.astype(complex))
    sums = np.cumsum(terms, axis=0)
    K = table.order
    gap = np.abs(sums[K] - sums[K // 2])
    empirical = gap <= cauchy_tol
    agree = ~certified | empirical
    margin = 1.0 - roots
    margin[~certified & (margin > 0.0)] = 0.0  # root exactly 1 sits outside
    return RegionSample(
        points=offsets + reg.wedge.base, member=certified, margin=margin,
        extras={"root": roots, "empirical": empirical, "agree": agree,
                "cauchy_gap": gap},
        grid_shape=(xs.size, ys.size))
