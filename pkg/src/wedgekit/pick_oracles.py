"""Constructible Pick functions with exact evaluation rules.

Four oracle families map the upper polyhalf-plane into the closed upper
half-plane and are real analytic on a declared real domain:

* measure transforms  h(z) = sum w_i / (t_i - z)  of a finite positive
  discrete measure (one variable);
* Type-I representations  h(z) = <(A - z_Y)^{-1} alpha, alpha>  with
  finite self-adjoint A, a contraction 0 <= Y <= 1, and
  z_Y = Y z1 + (1-Y) z2  (two variables);
* two named rationals, z1/(1 - z1 z2) and -2/(z1 + z2);
* nonnegative linear functionals.

Each oracle knows the analyticity radius of its one-variable restrictions,
which drives high-order directional derivatives by Cauchy-integral
quadrature on a circle (trapezoid rule, evaluated as an inverse FFT) and
the recovery of full homogeneous Taylor forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .chebyshev import chebyshev_nodes
from .errors import (
    AccuracyError,
    DimensionError,
    DomainError,
    NotAnalyticError,
    PoleError,
    SamplingError,
    SupportError,
    WedgekitError,
)
from .geometry import as_direction, as_point

_PICK_CHECK_SAMPLES = 200
_PICK_TOL = 1e-12
_DERIV_REL_TOL = 1e-6
_FIT_REL_TOL = 1e-7
_DIRECTION_SHIFT = 1.25   # direction fan (1, shift + cheb node): positive cone
_DIRECTIONS_MAX_ORDER = 20


# --------------------------------------------------------------------------
# representations

@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite positive measure sum w_i * delta(t_i)."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_1d(np.asarray(self.atoms, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if atoms.ndim != 1 or atoms.shape != weights.shape or atoms.size < 1:
            raise ValueError("atoms and weights must be equal-length 1-D arrays")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms must be finite")
        if not np.all(weights > 0.0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        atoms.flags.writeable = False
        weights.flags.writeable = False

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def to_json(self) -> dict:
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, obj) -> "DiscreteMeasure":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(np.asarray(obj["atoms"], dtype=float),
                   np.asarray(obj["weights"], dtype=float))


def eval_measure_transform(mu: DiscreteMeasure, z):
    """sum_i w_i / (t_i - z); maps the upper half-plane into itself."""
    z = np.asarray(z, dtype=complex)
    den = mu.atoms - z[..., None]
    if np.any(den == 0.0):
        raise PoleError("evaluation exactly on a measure atom")
    out = np.sum(mu.weights / den, axis=-1)
    return complex(out) if out.ndim == 0 else out


def moment_coefficients(mu: DiscreteMeasure, K: int) -> np.ndarray:
    """Coefficients a_1..a_K with a_{n+1} = sum_i w_i t_i^n.

    Requires support inside [-1, 1]; then |a_k| <= a_1 = total mass holds
    termwise since |t_i| <= 1.
    """
    if K < 1:
        raise ValueError("K must be a positive integer")
    if np.any(np.abs(mu.atoms) > 1.0):
        raise SupportError("measure support must lie inside [-1, 1]")
    powers = mu.atoms[None, :] ** np.arange(K)[:, None]
    return powers @ mu.weights


@dataclass(frozen=True)
class TypeIRep:
    """Finite-dimensional (A, Y, alpha): A self-adjoint, 0 <= Y <= 1."""

    A: np.ndarray
    Y: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A))
        Y = np.atleast_2d(np.asarray(self.Y))
        alpha = np.atleast_1d(np.asarray(self.alpha))
        if not np.iscomplexobj(A):
            A = A.astype(float)
        if not np.iscomplexobj(Y):
            Y = Y.astype(float)
        d = A.shape[0]
        if A.shape != (d, d) or Y.shape != (d, d) or alpha.shape != (d,):
            raise ValueError("A, Y must be d x d and alpha length d")
        tol = 1e-10
        if np.max(np.abs(A - A.conj().T)) > tol * (1.0 + np.max(np.abs(A))):
            raise ValueError("A must be self-adjoint (within 1e-10)")
        if np.max(np.abs(Y - Y.conj().T)) > tol * (1.0 + np.max(np.abs(Y))):
            raise ValueError("Y must be self-adjoint (within 1e-10)")
        evs = la.eigvalsh(Y)
        if evs.min() < -tol or evs.max() > 1.0 + tol:
            raise ValueError("Y must have spectrum inside [0, 1] (within 1e-10)")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "alpha", alpha)
        for arr in (A, Y, alpha):
            arr.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def to_json(self) -> dict:
        def enc(m):
            m = np.asarray(m)
            if np.iscomplexobj(m):
                raise ValueError("JSON schema carries real matrices only")
            return m.tolist()
        return {"A": enc(self.A), "Y": enc(self.Y), "alpha": enc(self.alpha)}

    @classmethod
    def from_json(cls, obj) -> "TypeIRep":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(np.asarray(obj["A"], dtype=float),
                   np.asarray(obj["Y"], dtype=float),
                   np.asarray(obj["alpha"], dtype=float))


def eval_type1(rep: TypeIRep, z):
    """<(A - z_Y)^{-1} alpha, alpha> with z_Y = Y z1 + (1-Y) z2.

    Accepts a single 2-vector or an (..., 2) array; the linear solves are
    batched.  Exactly singular pencils raise PoleError.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != 2:
        raise DimensionError("Type-I oracles take 2-vectors")
    d = rep.dim
    eye = np.eye(d)
    z1 = z[..., 0][..., None, None]
    z2 = z[..., 1][..., None, None]
    M = rep.A - (rep.Y * z1 + (eye - rep.Y) * z2)
    rhs = np.broadcast_to(rep.alpha.astype(complex), z.shape[:-1] + (d,))
    try:
        u = np.linalg.solve(M, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise PoleError(f"singular pencil A - z_Y: {exc}") from exc
    out = np.sum(u * np.conj(rep.alpha), axis=-1)
    return complex(out) if out.ndim == 0 else out


def _pencil_eigs(B: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Finite generalized eigenvalues of (B, X): s with det(B - s X) = 0."""
    w = la.eig(B, X, right=False)
    return w[np.isfinite(w)]


# --------------------------------------------------------------------------
# real-analytic domains attached to oracles

@dataclass(frozen=True)
class AllSpace:
    dim: int

    def contains(self, p) -> bool:
        as_point(p, self.dim)
        return True

    def is_interior(self, p) -> bool:
        return self.contains(p)

    def reach(self, p, x) -> float:
        as_point(p, self.dim)
        as_direction(x, self.dim)
        return math.inf

    def segment_inside(self, p, x, s: float) -> bool:
        return self.contains(p)


@dataclass(frozen=True)
class HalfPlaneSum:
    """{z in R^2 : z1 + z2 > offset}."""

    offset: float = 0.0
    dim: int = 2

    def contains(self, p) -> bool:
        p = as_point(p, 2)
        return p[0] + p[1] > self.offset

    def is_interior(self, p) -> bool:
        return self.contains(p)

    def reach(self, p, x) -> float:
        p = as_point(p, 2)
        x = as_direction(x, 2)
        if not self.contains(p):
            return 0.0
        d = x[0] + x[1]
        if d == 0.0:
            return math.inf
        return (p[0] + p[1] - self.offset) / abs(d)

    def segment_inside(self, p, x, s: float) -> bool:
        return self.contains(p) and s < self.reach(p, x)


@dataclass(frozen=True)
class HyperbolaCap:
    """{z in R^2 : z1 * z2 < 1}."""

    dim: int = 2

    def contains(self, p) -> bool:
        p = as_point(p, 2)
        return p[0] * p[1] < 1.0

    def is_interior(self, p) -> bool:
        return self.contains(p)

    def _crossings(self, p, x) -> np.ndarray:
        # real s with (p1 + s x1)(p2 + s x2) = 1
        a = x[0] * x[1]
        b = p[0] * x[1] + p[1] * x[0]
        c = p[0] * p[1] - 1.0
        if a == 0.0:
            if b == 0.0:
                return np.empty(0)
            return np.array([-c / b])
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return np.empty(0)
        r = math.sqrt(disc)
        return np.array([(-b - r) / (2 * a), (-b + r) / (2 * a)])

    def reach(self, p, x) -> float:
        p = as_point(p, 2)
        x = as_direction(x, 2)
        if not self.contains(p):
            return 0.0
        roots = self._crossings(p, x)
        pos = roots[roots > 0.0]
        neg = -roots[roots < 0.0]
        exit_pos = float(pos.min()) if pos.size else math.inf
        exit_neg = float(neg.min()) if neg.size else math.inf
        return min(exit_pos, exit_neg)

    def segment_inside(self, p, x, s: float) -> bool:
        return self.contains(p) and s < self.reach(p, x)


@dataclass(frozen=True)
class PuncturedReals:
    """The real line minus the measure atoms."""

    atoms: np.ndarray
    dim: int = 1

    def contains(self, p) -> bool:
        p = as_point(p, 1)
        return bool(np.all(self.atoms != p[0]))

    def is_interior(self, p) -> bool:
        return self.contains(p)

    def reach(self, p, x) -> float:
        p = as_point(p, 1)
        x = as_direction(x, 1)
        if not self.contains(p):
            return 0.0
        ts = (self.atoms - p[0]) / x[0]
        pos = ts[ts > 0.0]
        neg = -ts[ts < 0.0]
        exit_pos = float(pos.min()) if pos.size else math.inf
        exit_neg = float(neg.min()) if neg.size else math.inf
        return min(exit_pos, exit_neg)

    def segment_inside(self, p, x, s: float) -> bool:
        return self.contains(p) and s < self.reach(p, x)


@dataclass(frozen=True)
class PencilDomain:
    """{real z in R^2 : A - z_Y invertible}."""

    rep: TypeIRep
    dim: int = 2

    def _shifted(self, p) -> np.ndarray:
        eye = np.eye(self.rep.dim)
        return self.rep.A - (self.rep.Y * p[0] + (eye - self.rep.Y) * p[1])

    def contains(self, p) -> bool:
        p = as_point(p, 2)
        B = self._shifted(p)
        tol = 1e-12 * (1.0 + float(np.max(np.abs(self.rep.A))))
        return float(np.min(np.abs(la.eigvalsh(B)))) > tol

    def is_interior(self, p) -> bool:
        return self.contains(p)

    def _direction_matrix(self, x) -> np.ndarray:
        eye = np.eye(self.rep.dim)
        return self.rep.Y * x[0] + (eye - self.rep.Y) * x[1]

    def reach(self, p, x) -> float:
        p = as_point(p, 2)
        x = as_direction(x, 2)
        if not self.contains(p):
            return 0.0
        eigs = _pencil_eigs(self._shifted(p), self._direction_matrix(x))
        real = eigs[np.abs(eigs.imag) <= 1e-9 * (1.0 + np.abs(eigs))].real
        pos = real[real > 0.0]
        neg = -real[real < 0.0]
        exit_pos = float(pos.min()) if pos.size else math.inf
        exit_neg = float(neg.min()) if neg.size else math.inf
        return min(exit_pos, exit_neg)

    def segment_inside(self, p, x, s: float) -> bool:
        return self.contains(p) and s < self.reach(p, x)


# --------------------------------------------------------------------------
# oracles

class PickOracle:
    """Evaluatable analytic map of the upper polyhalf-plane into its closure,
    real valued on a declared real domain.

    Subclasses implement ``eval_many`` on (N, n) complex arrays plus the
    analyticity-radius rules.  Construction samples the upper polyhalf-plane
    and rejects anything whose imaginary part dips below -1e-12.
    """

    dim: int
    kind: str
    name: str
    domain: object

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if z.shape == (self.dim,):
            return complex(self.eval_many(z[None, :])[0])
        if z.shape[-1] != self.dim:
            raise DimensionError(f"oracle {self.name} takes {self.dim}-vectors")
        flat = z.reshape(-1, self.dim)
        return self.eval_many(flat).reshape(z.shape[:-1])

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def radius_along(self, p, x) -> float:
        """Distance from 0 to the nearest complex singularity of
        s -> oracle(p + s*x)."""
        raise NotImplementedError

    def polydisk_radii(self, p):
        """A radius rho such that the oracle is analytic on the closed
        polydisk of radius rho about real p, or None when no closed-form
        rule exists."""
        return None

    def _verify_pick(self, rng=None, samples: int = _PICK_CHECK_SAMPLES,
                     tol: float = _PICK_TOL) -> None:
        rng = np.random.default_rng(20250811) if rng is None else rng
        re = rng.uniform(-3.0, 3.0, size=(samples, self.dim))
        im = rng.uniform(1e-3, 2.5, size=(samples, self.dim))
        vals = self.eval_many(re + 1j * im)
        worst = float(vals.imag.min())
        if worst < -tol:
            raise WedgekitError(
                f"{self.name}: Pick property violated on the sampled "
                f"polyhalf-plane (min Im = {worst:.3e})")


class MeasureOracle(PickOracle):
    """One-variable Cauchy transform of a discrete measure."""

    def __init__(self, measure: DiscreteMeasure, name: str = "measure", rng=None):
        self.measure = measure
        self.dim = 1
        self.kind = "measure-transform"
        self.name = name
        self.domain = PuncturedReals(measure.atoms)
        self._verify_pick(rng)

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        return eval_measure_transform(self.measure, z[:, 0])

    def radius_along(self, p, x) -> float:
        p = as_point(p, 1)
        x = as_direction(x, 1)
        return float(np.min(np.abs(self.measure.atoms - p[0]))) / abs(x[0])


class TypeIOracle(PickOracle):
    """Two-variable oracle from a finite Type-I representation."""

    def __init__(self, rep: TypeIRep, name: str = "type1", rng=None):
        self.rep = rep
        self.dim = 2
        self.kind = "type-I"
        self.name = name
        self.domain = PencilDomain(rep)
        self._verify_pick(rng)

    @classmethod
    def from_measure_lift(cls, measure: DiscreteMeasure, y: float,
                          name: str | None = None, rng=None) -> "TypeIOracle":
        """Lift a 1-D measure transform to two variables through the scalar
        mix z_y = y z1 + (1-y) z2: A = diag(atoms), Y = y*I, alpha = sqrt(w)."""
        if not (0.0 <= y <= 1.0):
            raise ValueError("mixing parameter y must lie in [0, 1]")
        d = measure.atoms.size
        rep = TypeIRep(np.diag(measure.atoms), y * np.eye(d),
                       np.sqrt(measure.weights))
        return cls(rep, name=name or f"measure_lift(y={y:g})", rng=rng)

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        return eval_type1(self.rep, z)

    def radius_along(self, p, x) -> float:
        p = as_point(p, 2)
        x = as_direction(x, 2)
        B = self.domain._shifted(p)
        X = self.domain._direction_matrix(x)
        eigs = _pencil_eigs(B, X)
        if eigs.size == 0:
            return math.inf
        return float(np.min(np.abs(eigs)))

    def polydisk_radii(self, p):
        p = as_point(p, 2)
        B = self.domain._shifted(p)
        # ||s Y + t (1-Y)|| <= max(|s|, |t|) since Y and 1-Y commute and are
        # contractions, so the pencil stays invertible on the polydisk of
        # radius sigma_min(B).
        rho = float(np.min(np.abs(la.eigvalsh(B))))
        return (rho, rho)


class RationalOracle(PickOracle):
    """Closed-form rational oracle; the two named instances are
    z1/(1 - z1 z2) and -2/(z1 + z2)."""

    def __init__(self, name: str, func, domain, radius_rule, polydisk_rule,
                 rng=None):
        self.dim = 2
        self.kind = "named-rational"
        self.name = name
        self._func = func
        self.domain = domain
        self._radius_rule = radius_rule
        self._polydisk_rule = polydisk_rule
        self._verify_pick(rng)

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        return self._func(z)

    def radius_along(self, p, x) -> float:
        return self._radius_rule(as_point(p, 2), as_direction(x, 2))

    def polydisk_radii(self, p):
        return self._polydisk_rule(as_point(p, 2))


class LinearOracle(PickOracle):
    """h(z) = c . z with nonnegative coefficients; entire."""

    def __init__(self, coeffs, rng=None):
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("coefficients must form a 1-D vector")
        if np.any(coeffs < 0.0):
            raise ValueError("linear oracle coefficients must be >= 0")
        self.coeffs = coeffs
        self.dim = coeffs.size
        self.kind = "linear"
        self.name = "linear(" + ",".join(f"{c:g}" for c in coeffs) + ")"
        self.domain = AllSpace(self.dim)
        self._verify_pick(rng)

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        return z @ self.coeffs.astype(complex)

    def radius_along(self, p, x) -> float:
        as_point(p, self.dim)
        as_direction(x, self.dim)
        return math.inf

    def polydisk_radii(self, p):
        as_point(p, self.dim)
        return (1.0, 1.0)


def _geom2_eval(z: np.ndarray) -> np.ndarray:
    den = 1.0 - z[:, 0] * z[:, 1]
    if np.any(den == 0.0):
        raise PoleError("geom2 is singular on z1*z2 = 1")
    return z[:, 0] / den


def _geom2_radius(p: np.ndarray, x: np.ndarray) -> float:
    # complex s with (p1 + s x1)(p2 + s x2) = 1
    a = x[0] * x[1]
    b = p[0] * x[1] + p[1] * x[0]
    c = p[0] * p[1] - 1.0
    if a == 0.0:
        return math.inf if b == 0.0 else abs(c / b)
    roots = np.roots([a, b, c])
    return float(np.min(np.abs(roots)))


def _geom2_polydisk(p: np.ndarray):
    # |p1 t + p2 s + s t| < |1 - p1 p2| keeps the product away from 1
    gap = abs(1.0 - p[0] * p[1])
    if gap == 0.0:
        return (0.0, 0.0)
    b = abs(p[0]) + abs(p[1])
    rho = 0.5 * (-b + math.sqrt(b * b + 4.0 * gap))
    return (rho, rho)


def _nrm_eval(z: np.ndarray) -> np.ndarray:
    den = z[:, 0] + z[:, 1]
    if np.any(den == 0.0):
        raise PoleError("oracle is singular on z1 + z2 = 0")
    return -2.0 / den


def _nrm_radius(p: np.ndarray, x: np.ndarray) -> float:
    d = x[0] + x[1]
    if d == 0.0:
        return math.inf
    return abs(p[0] + p[1]) / abs(d)


def _nrm_polydisk(p: np.ndarray):
    rho = 0.5 * abs(p[0] + p[1])
    return (rho, rho)


def geom2_oracle(rng=None) -> RationalOracle:
    return RationalOracle("geom2", _geom2_eval, HyperbolaCap(),
                          _geom2_radius, _geom2_polydisk, rng=rng)


def neg_reciprocal_mean_oracle(rng=None) -> RationalOracle:
    return RationalOracle("neg_reciprocal_mean", _nrm_eval, HalfPlaneSum(),
                          _nrm_radius, _nrm_polydisk, rng=rng)


def named_oracle(name: str, rng=None) -> PickOracle:
    """Oracle lookup: geom2 | neg_reciprocal_mean | linear:c1,c2,... |
    measure:file.json | type1:file.json."""
    head, _, tail = name.partition(":")
    head = head.strip()
    if head == "geom2":
        return geom2_oracle(rng)
    if head == "neg_reciprocal_mean":
        return neg_reciprocal_mean_oracle(rng)
    if head == "linear":
        if not tail:
            raise ValueError("linear oracle needs coefficients, e.g. linear:2,3")
        coeffs = [float(v) for v in tail.split(",")]
        return LinearOracle(coeffs, rng=rng)
    if head == "measure":
        if not tail:
            raise ValueError("measure oracle needs a JSON file path")
        with open(tail, encoding="utf-8") as f:
            mu = DiscreteMeasure.from_json(json.load(f))
        return MeasureOracle(mu, name=f"measure:{tail}", rng=rng)
    if head == "type1":
        if not tail:
            raise ValueError("type1 oracle needs a JSON file path")
        with open(tail, encoding="utf-8") as f:
            rep = TypeIRep.from_json(json.load(f))
        return TypeIOracle(rep, name=f"type1:{tail}", rng=rng)
    raise ValueError(f"unknown oracle name {name!r}")


# --------------------------------------------------------------------------
# high-order directional derivatives

def _cauchy_derivatives(oracle: PickOracle, p: np.ndarray, x: np.ndarray,
                        K: int, rho: float, npts: int) -> np.ndarray:
    s = rho * np.exp(2j * np.pi * np.arange(npts) / npts)
    Z = p[None, :] + s[:, None] * x[None, :]
    vals = oracle.eval_many(Z)
    coeffs = np.fft.ifft(vals)
    k = np.arange(1, K + 1)
    fact = np.array([math.factorial(j) for j in k], dtype=float)
    return fact * coeffs[1:K + 1] / rho ** k


def directional_derivatives(oracle: PickOracle, p, x, K: int,
                            rel_tol: float = _DERIV_REL_TOL) -> np.ndarray:
    """g^(k)(0) for k = 1..K where g(s) = oracle(p + s*x).

    Cauchy-integral quadrature on the circle of radius half the analyticity
    radius along x, trapezoid rule at max(64, 4K) points; the run is
    repeated at twice the point count and a relative disagreement beyond
    ``rel_tol`` raises AccuracyError.
    """
    if K < 1:
        raise ValueError("K must be a positive integer")
    p = as_point(p, oracle.dim)
    x = as_direction(x, oracle.dim)
    if not oracle.domain.contains(p):
        raise DomainError(f"{oracle.name}: point is outside the real domain")
    radius = oracle.radius_along(p, x)
    if radius <= 0.0:
        raise NotAnalyticError(f"{oracle.name}: zero analyticity radius")
    rho = 1.0 if math.isinf(radius) else 0.5 * radius
    npts = max(64, 4 * K)
    d1 = _cauchy_derivatives(oracle, p, x, K, rho, npts)
    d2 = _cauchy_derivatives(oracle, p, x, K, rho, 2 * npts)
    mismatch = np.abs(d1 - d2) + np.abs(d2.imag)
    rel = mismatch / (1.0 + np.abs(d2))
    if float(rel.max()) > rel_tol:
        raise AccuracyError(
            f"{oracle.name}: quadrature disagreement {float(rel.max()):.3e} "
            f"between {npts} and {2 * npts} points")
    return d2.real


# --------------------------------------------------------------------------
# Taylor tables

@dataclass(frozen=True)
class HomogeneousForm:
    """Real homogeneous polynomial sum_m coeffs[m] * prod_i z_i^exps[m, i]."""

    degree: int
    exponents: np.ndarray   # (m, n) int
    coeffs: np.ndarray      # (m,) float

    def __post_init__(self):
        exponents = np.atleast_2d(np.asarray(self.exponents, dtype=np.int64))
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if exponents.shape[0] != coeffs.size:
            raise ValueError("one coefficient per monomial required")
        if np.any(exponents.sum(axis=1) != self.degree):
            raise ValueError("monomials must be homogeneous of the stated degree")
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "coeffs", coeffs)
        exponents.flags.writeable = False
        coeffs.flags.writeable = False

    def eval_many(self, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=complex)
        mono = np.prod(Z[:, None, :] ** self.exponents[None, :, :], axis=2)
        return mono @ self.coeffs.astype(complex)

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex).reshape(1, -1)
        return complex(self.eval_many(z)[0])


@dataclass(frozen=True)
class TaylorTable:
    """Taylor data at a real base point: value plus the normalized
    homogeneous forms h^(k)(p)[.]/k! for k = 1..order."""

    base: np.ndarray
    order: int
    base_value: float
    forms: tuple

    def __post_init__(self):
        base = as_point(self.base)
        object.__setattr__(self, "base", base)
        base.flags.writeable = False
        if len(self.forms) != self.order:
            raise ValueError("need exactly one form per degree 1..order")
        for k, f in enumerate(self.forms, start=1):
            if f.degree != k:
                raise ValueError("forms must be ordered by degree")

    @property
    def dim(self) -> int:
        return self.base.size

    def form(self, k: int) -> HomogeneousForm:
        return self.forms[k - 1]

    def term_values(self, offset) -> np.ndarray:
        """Series terms [h(p), T_1(z), ..., T_K(z)] at a complex offset z."""
        z = np.asarray(offset, dtype=complex).reshape(1, -1)
        out = np.empty(self.order + 1, dtype=complex)
        out[0] = self.base_value
        for k, f in enumerate(self.forms, start=1):
            out[k] = f.eval_many(z)[0]
        return out

    def term_values_many(self, Z: np.ndarray) -> np.ndarray:
        """(order+1, N) series terms for an (N, dim) array of offsets."""
        Z = np.asarray(Z, dtype=complex)
        out = np.empty((self.order + 1, Z.shape[0]), dtype=complex)
        out[0] = self.base_value
        for k, f in enumerate(self.forms, start=1):
            out[k] = f.eval_many(Z)
        return out

    def partial_sum(self, offset, upto: int | None = None) -> complex:
        terms = self.term_values(offset)
        stop = self.order if upto is None else upto
        return complex(np.sum(terms[:stop + 1]))

    def derivative(self, k: int, x) -> float:
        """h^(k)(p)[x] for a real direction."""
        return math.factorial(k) * float(self.form(k)(x).real)


def _shifted_to_standard(coef: np.ndarray, c: float) -> np.ndarray:
    """Rewrite sum_i coef[i] (y - c)^i in powers of y (increasing order)."""
    std = np.zeros(1)
    for a in coef[::-1]:
        std = np.polynomial.polynomial.polymul(std, np.array([-c, 1.0]))
        if std.size == 0:
            std = np.zeros(1)
        std[0] += a
    out = np.zeros(coef.size)
    out[:std.size] = std[:coef.size]
    return out


def _table_1d(oracle, p, K) -> tuple:
    derivs = directional_derivatives(oracle, p, np.ones(1), K)
    forms = []
    for k in range(1, K + 1):
        coeff = derivs[k - 1] / math.factorial(k)
        forms.append(HomogeneousForm(k, np.array([[k]]), np.array([coeff])))
    return tuple(forms)


def _table_directions_2d(oracle, p, K) -> tuple:
    ys = _DIRECTION_SHIFT + chebyshev_nodes(K).nodes if K >= 1 else None
    derivs = np.empty((K + 1, K))
    for j, y in enumerate(ys):
        derivs[j] = directional_derivatives(oracle, p, np.array([1.0, y]), K)
    basis = np.vander(ys - _DIRECTION_SHIFT, N=K + 1, increasing=True)
    forms = []
    for k in range(1, K + 1):
        F = derivs[:, k - 1] / math.factorial(k)
        A = basis[:, :k + 1]
        coef, _, rank, _ = np.linalg.lstsq(A, F, rcond=None)
        if rank < k + 1:
            raise SamplingError(f"rank-deficient direction fit at degree {k}")
        resid = np.linalg.norm(A @ coef - F)
        if resid > _FIT_REL_TOL * max(np.linalg.norm(F), 1e-30) + 1e-12:
            raise AccuracyError(
                f"direction fit residual {resid:.3e} too large at degree {k}")
        std = _shifted_to_standard(coef, _DIRECTION_SHIFT)
        exps = np.array([[k - m, m] for m in range(k + 1)])
        forms.append(HomogeneousForm(k, exps, std))
    return tuple(forms)


def _table_directions_3d(oracle, p, K) -> tuple:
    nodes = _DIRECTION_SHIFT + chebyshev_nodes(K).nodes
    dirs = [(y, v) for y in nodes for v in nodes]
    derivs = np.empty((len(dirs), K))
    for j, (y, v) in enumerate(dirs):
        derivs[j] = directional_derivatives(oracle, p, np.array([1.0, y, v]), K)
    ys = np.array([d[0] for d in dirs]) - _DIRECTION_SHIFT
    vs = np.array([d[1] for d in dirs]) - _DIRECTION_SHIFT
    forms = []
    for k in range(1, K + 1):
        F = derivs[:, k - 1] / math.factorial(k)
        pairs = [(i, j) for i in range(k + 1) for j in range(k + 1 - i)]
        A = np.stack([ys ** i * vs ** j for i, j in pairs], axis=1)
        coef, _, rank, _ = np.linalg.lstsq(A, F, rcond=None)
        if rank < len(pairs):
            raise SamplingError(f"rank-deficient direction fit at degree {k}")
        resid = np.linalg.norm(A @ coef - F)
        if resid > _FIT_REL_TOL * max(np.linalg.norm(F), 1e-30) + 1e-12:
            raise AccuracyError(
                f"direction fit residual {resid:.3e} too large at degree {k}")
        shifted = np.zeros((k + 1, k + 1))
        for (i, j), a in zip(pairs, coef):
            shifted[i, j] = a
        T = _shift_matrix(k + 1, _DIRECTION_SHIFT)
        std = T @ shifted @ T.T
        exps, coeffs = [], []
        for i in range(k + 1):
            for j in range(k + 1 - i):
                exps.append([k - i - j, i, j])
                coeffs.append(std[i, j])
        forms.append(HomogeneousForm(k, np.array(exps), np.array(coeffs)))
    return tuple(forms)


def _shift_matrix(size: int, c: float) -> np.ndarray:
    """T with (y-c)^i = sum_m T[m, i] y^m."""
    T = np.zeros((size, size))
    for i in range(size):
        T[:i + 1, i] = [math.comb(i, m) * (-c) ** (i - m) for m in range(i + 1)]
    return T


def _torus_coefficients(oracle, p, rho1, rho2, npts) -> np.ndarray:
    w = np.exp(2j * np.pi * np.arange(npts) / npts)
    S = rho1 * w
    T = rho2 * w
    Z = np.empty((npts, npts, 2), dtype=complex)
    Z[..., 0] = p[0] + S[:, None]
    Z[..., 1] = p[1] + T[None, :]
    vals = oracle.eval_many(Z.reshape(-1, 2)).reshape(npts, npts)
    C = np.fft.ifft2(vals)
    return C


def _table_bidisk_2d(oracle, p, K, rel_tol=_DERIV_REL_TOL) -> tuple:
    radii = oracle.polydisk_radii(p)
    if radii is None:
        raise AccuracyError(
            f"{oracle.name}: no polydisk radius rule; use the direction "
            f"sampler (order <= {_DIRECTIONS_MAX_ORDER})")
    rho1, rho2 = 0.6 * radii[0], 0.6 * radii[1]
    if min(rho1, rho2) <= 0.0:
        raise NotAnalyticError(f"{oracle.name}: zero polydisk radius")
    npts = max(64, 4 * K)
    C1 = _torus_coefficients(oracle, p, rho1, rho2, npts)
    C2 = _torus_coefficients(oracle, p, rho1, rho2, 2 * npts)
    a = np.arange(K + 1)
    scale = np.outer(rho1 ** a, rho2 ** a)
    c1 = C1[:K + 1, :K + 1] / scale
    c2 = C2[:K + 1, :K + 1] / scale
    rel = (np.abs(c1 - c2) + np.abs(c2.imag)) / (1.0 + np.abs(c2))
    mask = (a[:, None] + a[None, :]) <= K
    if float(rel[mask].max()) > rel_tol:
        raise AccuracyError(
            f"{oracle.name}: torus quadrature disagreement "
            f"{float(rel[mask].max()):.3e}")
    coeffs = c2.real
    forms = []
    for k in range(1, K + 1):
        exps = np.array([[k - m, m] for m in range(k + 1)])
        vals = np.array([coeffs[k - m, m] for m in range(k + 1)])
        forms.append(HomogeneousForm(k, exps, vals))
    return tuple(forms)


def taylor_table(oracle: PickOracle, p, K: int, method: str = "auto") -> TaylorTable:
    """Recover the homogeneous Taylor forms of the oracle at a real point.

    ``method``:
      * "directions": sample directional derivatives along a positive fan
        (1, shift + chebyshev node, ...) and solve the shifted-power
        Vandermonde system per degree.  Reliable up to order ~20; beyond
        that float64 extrapolation conditioning destroys the coefficients.
      * "bidisk" (2-D only): tensor Cauchy quadrature on a torus inside a
        certified joint polydisk; stable at high order.
      * "auto": directions for K <= 20, else bidisk.
    """
    if K < 1:
        raise ValueError("K must be a positive integer")
    p = as_point(p, oracle.dim)
    if oracle.dim > 3:
        raise DimensionError("full Taylor tables are capped at dimension 3")
    if not oracle.domain.is_interior(p):
        raise DomainError(f"{oracle.name}: base point is not interior")
    if method == "auto":
        method = "directions" if (K <= _DIRECTIONS_MAX_ORDER or oracle.dim != 2) \
            else "bidisk"
    if method == "directions":
        if K > _DIRECTIONS_MAX_ORDER and oracle.dim > 1:
            raise AccuracyError(
                f"direction sampling is unreliable beyond order "
                f"{_DIRECTIONS_MAX_ORDER}; use method='bidisk'")
        if oracle.dim == 1:
            forms = _table_1d(oracle, p, K)
        elif oracle.dim == 2:
            forms = _table_directions_2d(oracle, p, K)
        else:
            forms = _table_directions_3d(oracle, p, K)
    elif method == "bidisk":
        if oracle.dim != 2:
            raise DimensionError("bidisk recovery is 2-D only")
        forms = _table_bidisk_2d(oracle, p, K)
    else:
        raise ValueError(f"unknown method {method!r}")
    base_value = float(np.real(oracle(p.astype(complex))))
    table = TaylorTable(p, K, base_value, forms)
    _cross_validate_table(oracle, table)
    return table


def _cross_validate_table(oracle: PickOracle, table: TaylorTable,
                          orders: int = 6, rel_tol: float = 1e-6) -> None:
    """Check recovered forms against an independent directional run."""
    kmax = min(orders, table.order)
    ones = np.ones(table.dim)
    direct = directional_derivatives(oracle, table.base, ones, kmax)
    for k in range(1, kmax + 1):
        recon = table.derivative(k, ones)
        if abs(recon - direct[k - 1]) > rel_tol * (1.0 + abs(direct[k - 1])):
            raise AccuracyError(
                f"{oracle.name}: form of degree {k} disagrees with the "
                f"directional oracle ({recon:.6e} vs {direct[k - 1]:.6e})")
