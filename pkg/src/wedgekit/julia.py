"""Verification harnesses for the derivative inequalities of Pick oracles.

The point inequality compares |h'(p)[x]| against ||x||_inf * h'(p)[1] for a
positive direction x (1 denotes the all-ones direction); the line version
extends it to order k with the factor k!, and the set version replaces
||x||_inf by the wedge regulator bound at a complex offset.  All checks are
theorems for genuine Pick functions, so a failed row indicates a numerical
or construction bug, which is exactly what the harness is for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import as_point, as_positive_direction
from .pick_oracles import (
    DiscreteMeasure,
    LinearOracle,
    TypeIOracle,
    TypeIRep,
    directional_derivatives,
    geom2_oracle,
    taylor_table,
)
from .regulators import WedgeRegulator, wedge_regulator_bound_2d, wedge_regulator_bound_nd

REL_SLACK = 1e-9


@dataclass(frozen=True)
class JuliaRow:
    order: int
    lhs: float
    rhs: float
    slack: float
    holds: bool
    scale: float | None = None  # set for per-scale envelope rows


@dataclass(frozen=True)
class JuliaReport:
    oracle_id: str
    kind: str
    base: np.ndarray
    direction: np.ndarray
    rows: tuple
    verdict: bool
    assessment: str | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict != all(r.holds for r in self.rows):
            raise ValueError("verdict must be the conjunction of the row flags")

    def to_json(self) -> dict:
        return {
            "oracle": self.oracle_id,
            "kind": self.kind,
            "base": np.asarray(self.base).tolist(),
            "direction": np.asarray(self.direction).tolist(),
            "rows": [
                {"order": r.order, "lhs": r.lhs, "rhs": r.rhs,
                 "slack": r.slack, "holds": r.holds,
                 **({"scale": r.scale} if r.scale is not None else {})}
                for r in self.rows
            ],
            "verdict": self.verdict,
            **({"assessment": self.assessment} if self.assessment else {}),
            **({"notes": self.notes} if self.notes else {}),
        }


def _row(order: int, lhs: float, rhs: float, scale: float | None = None) -> JuliaRow:
    slack = rhs - lhs
    holds = lhs <= rhs + REL_SLACK * (1.0 + abs(rhs))
    return JuliaRow(order, lhs, rhs, slack, holds, scale)


def _ones_derivative(oracle, p) -> float:
    return float(directional_derivatives(oracle, p, np.ones(oracle.dim), 1)[0])


def check_julia_point(oracle, p, x) -> JuliaReport:
    """|h'(p)[x]| <= ||x||_inf * h'(p)[1] for x in the open positive cone."""
    p = as_point(p, oracle.dim)
    x = as_positive_direction(x, oracle.dim)
    lhs = abs(float(directional_derivatives(oracle, p, x, 1)[0]))
    rhs = float(np.max(np.abs(x))) * _ones_derivative(oracle, p)
    row = _row(1, lhs, rhs)
    return JuliaReport(oracle.name, "point", p, x, (row,), row.holds)


def check_julia_line(oracle, p, x, K: int) -> JuliaReport:
    """|h^(k)(p)[x]| <= k! ||x||_inf h'(p)[1] for k = 1..K.

    Requires the closed segment [p - x, p + x] inside the oracle's real
    domain (a positive-slope segment centered at p).
    """
    p = as_point(p, oracle.dim)
    x = as_positive_direction(x, oracle.dim)
    if not oracle.domain.segment_inside(p, x, 1.0):
        raise DomainError(f"{oracle.name}: segment p +- x exits the real domain")
    derivs = directional_derivatives(oracle, p, x, K)
    d_ones = _ones_derivative(oracle, p)
    xnorm = float(np.max(np.abs(x)))
    rows = tuple(_row(k, abs(float(derivs[k - 1])),
                      math.factorial(k) * xnorm * d_ones)
                 for k in range(1, K + 1))
    return JuliaReport(oracle.name, "line", p, x, rows,
                       all(r.holds for r in rows))


def check_julia_set(oracle, reg: WedgeRegulator, z, K: int) -> JuliaReport:
    """|h^(k)(p)[z]| <= k! * q_k(p)[z] * h'(p)[1] at a complex offset z,
    with q_k replaced by its wedge interpolation upper bound."""
    p = reg.wedge.base
    for off in reg.wedge.check_directions():
        if not oracle.domain.contains(p + reg.wedge.half_width * off):
            raise DomainError(f"{oracle.name}: wedge exits the real domain")
    z = np.asarray(z, dtype=complex).ravel()
    table = taylor_table(oracle, p, K)
    d_ones = _ones_derivative(oracle, p)
    bound = wedge_regulator_bound_2d if reg.dim == 2 else wedge_regulator_bound_nd
    rows = []
    for k in range(1, K + 1):
        lhs = abs(table.form(k)(z)) * math.factorial(k)
        rhs = math.factorial(k) * bound(reg, k, z) * d_ones
        rows.append(_row(k, lhs, rhs))
    rows = tuple(rows)
    return JuliaReport(oracle.name, "set", p, z, rows,
                       all(r.holds for r in rows))


def liouville_check(oracle, base, x, scales, K: int) -> JuliaReport:
    """Probe whether higher derivatives sit under the shrinking envelope
    k! ||x||_inf f'(base)[1] / s^(k-1).

    The assessment is "linear-consistent" only when the domain is unbounded
    along x (both rays), every listed scale is admissible, and every order
    k >= 2 stays below the envelope at every scale; a bounded domain yields
    "inconclusive" since the envelope cannot be driven to zero.
    """
    base = as_point(base, oracle.dim)
    x = as_positive_direction(x, oracle.dim)
    scales = sorted(float(s) for s in scales)
    if not scales or scales[0] <= 0.0:
        raise ValueError("scales must be positive")
    reach = oracle.domain.reach(base, x)
    admissible = [s for s in scales if oracle.domain.segment_inside(base, x, s)]
    if K < 2:
        raise ValueError("the envelope test needs K >= 2")
    derivs = directional_derivatives(oracle, base, x, K)
    d_ones = _ones_derivative(oracle, base)
    xnorm = float(np.max(np.abs(x)))
    rows = []
    for k in range(2, K + 1):
        for s in admissible:
            env = math.factorial(k) * xnorm * d_ones / s ** (k - 1)
            rows.append(_row(k, abs(float(derivs[k - 1])), env, scale=s))
    rows = tuple(rows)
    verdict = all(r.holds for r in rows)
    unbounded = math.isinf(reach) and len(admissible) == len(scales)
    assessment = "linear-consistent" if (verdict and unbounded) else "inconclusive"
    notes = {"reach": reach, "admissible_scales": admissible,
             "requested_scales": scales}
    return JuliaReport(oracle.name, "liouville", base, x, rows, verdict,
                       assessment=assessment, notes=notes)


# --------------------------------------------------------------------------
# built-in verification corpus

def build_corpus(rng=None, n_measures: int = 20, n_type1: int = 20,
                 n_linear: int = 4) -> list:
    """Oracles for the inequality sweeps: measure transforms lifted to two
    variables through z_Y, random Type-I representations, geom2, and a
    family of linear functionals."""
    rng = np.random.default_rng(1234) if rng is None else rng
    corpus = []
    for i in range(n_measures):
        m = int(rng.integers(1, 6))
        mu = DiscreteMeasure(rng.uniform(-3.0, 3.0, size=m),
                             rng.uniform(0.1, 2.0, size=m))
        y = float(rng.uniform(0.0, 1.0))
        corpus.append(TypeIOracle.from_measure_lift(
            mu, y, name=f"measure_lift_{i}(y={y:.3f})", rng=rng))
    for i in range(n_type1):
        d = int(rng.integers(1, 6))
        G = rng.normal(size=(d, d))
        A = (G + G.T) / 2.0
        Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        Y = Q @ np.diag(rng.uniform(0.0, 1.0, size=d)) @ Q.T
        Y = (Y + Y.T) / 2.0
        Y = np.clip(Y, None, None)
        alpha = rng.normal(size=d)
        corpus.append(TypeIOracle(TypeIRep(A, Y, alpha),
                                  name=f"type1_{i}", rng=rng))
    corpus.append(geom2_oracle(rng=rng))
    for i in range(n_linear):
        n = 2
        corpus.append(LinearOracle(rng.uniform(0.0, 3.0, size=n), rng=rng))
    return corpus


def random_admissible_pair(oracle, rng) -> tuple[np.ndarray, np.ndarray]:
    """A real base point p interior to the oracle's domain and a positive
    direction x with the segment p +- x strictly inside (margin 2x)."""
    for _ in range(500):
        p = rng.uniform(-2.0, 2.0, size=oracle.dim)
        if not oracle.domain.is_interior(p):
            continue
        x = rng.uniform(0.2, 2.0, size=oracle.dim)
        r = oracle.radius_along(p, x)
        if r <= 0.0:
            continue
        if not math.isinf(r):
            x = x * (r / 2.0)
        if oracle.domain.segment_inside(p, x, 1.0):
            return p, x
    raise DomainError(f"{oracle.name}: failed to sample an admissible pair")
