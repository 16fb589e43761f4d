"""Chebyshev nodes, Vandermonde inverse norms, and interpolation growth bounds.

The degree-k Vandermonde at the k+1 first-kind Chebyshev points admits the
closed-form norm estimate

    ||V^{-1}||_inf <= (3^(3/4)/4) * [(1+sqrt2)^m + (1-sqrt2)^m]

indexed by the node count m = k+1.  Indexing by the degree k fails already
at k = 1, where the exact norm is sqrt(2) > 1.1397; ``growth_index`` pins
the node-count convention used throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import ConditioningError

_GAUTSCHI_C = 3.0 ** 0.75 / 4.0
_SQRT2 = math.sqrt(2.0)
_COND_LIMIT = 1e15


@dataclass(frozen=True)
class NodeSet:
    """The k+1 first-kind Chebyshev points cos((2i+1)pi/(2k+2)), decreasing."""

    degree: int
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        nodes.flags.writeable = False
        k = self.degree
        if k < 0 or nodes.size != k + 1:
            raise ValueError("NodeSet needs degree k >= 0 and k+1 nodes")
        i = np.arange(k + 1)
        ref = np.cos((2 * i + 1) * np.pi / (2 * k + 2))
        if not np.allclose(nodes, ref, atol=1e-14, rtol=0.0):
            raise ValueError("nodes are not the first-kind Chebyshev points")
        if np.any(np.diff(nodes) >= 0.0):
            raise ValueError("nodes must be strictly decreasing")


def chebyshev_nodes(k: int) -> NodeSet:
    """First-kind Chebyshev points of degree k (k+1 of them)."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    i = np.arange(k + 1)
    return NodeSet(k, np.cos((2 * i + 1) * np.pi / (2 * k + 2)))


@dataclass(frozen=True)
class VandermondeMatrix:
    """Entries (i, j) = node_i ** j for a Chebyshev node set."""

    nodeset: NodeSet
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", entries)
        entries.flags.writeable = False
        m = self.nodeset.degree + 1
        if entries.shape != (m, m):
            raise ValueError("entry matrix shape does not match node count")


def vandermonde_matrix(nodeset: NodeSet) -> VandermondeMatrix:
    V = np.vander(nodeset.nodes, increasing=True)
    return VandermondeMatrix(nodeset, V)


def _inverse_inf_norm(V: np.ndarray) -> tuple[float, float]:
    """(inf-norm of V^{-1}, inf-condition estimate) with one refinement pass."""
    lu, piv = la.lu_factor(V)
    eye = np.eye(V.shape[0])
    X = la.lu_solve((lu, piv), eye)
    X += la.lu_solve((lu, piv), eye - V @ X)
    inv_norm = float(np.max(np.sum(np.abs(X), axis=1)))
    cond = inv_norm * float(np.max(np.sum(np.abs(V), axis=1)))
    return inv_norm, cond


def vandermonde_inverse_inf_norm(k: int) -> float:
    """||V^{-1}||_inf for the degree-k Chebyshev Vandermonde.

    Solved column-by-column with partial pivoting plus one iterative
    refinement pass.  Raises ConditioningError when the inf-norm condition
    estimate exceeds the float64 envelope, reporting the largest degree that
    still solves reliably.
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    V = vandermonde_matrix(chebyshev_nodes(k)).entries
    inv_norm, cond = _inverse_inf_norm(V)
    if not math.isfinite(cond) or cond > _COND_LIMIT:
        raise ConditioningError(
            f"Chebyshev Vandermonde of degree {k} has condition estimate "
            f"{cond:.3e}, beyond the float64 envelope; largest reliable "
            f"degree is {_largest_reliable_degree(k)}",
            largest_reliable=_largest_reliable_degree(k),
        )
    return inv_norm


def _largest_reliable_degree(k_failed: int) -> int:
    lo, hi = 0, k_failed
    while hi - lo > 1:
        mid = (lo + hi) // 2
        V = vandermonde_matrix(chebyshev_nodes(mid)).entries
        _, cond = _inverse_inf_norm(V)
        if math.isfinite(cond) and cond <= _COND_LIMIT:
            lo = mid
        else:
            hi = mid
    return lo


def gautschi_bound(m: int) -> float:
    """(3^(3/4)/4) * [(1+sqrt2)^m + (1-sqrt2)^m]."""
    if m < 0:
        raise ValueError("index must be nonnegative")
    return _GAUTSCHI_C * ((1.0 + _SQRT2) ** m + (1.0 - _SQRT2) ** m)


def growth_index(k: int) -> int:
    """Exponent fed to gautschi_bound for a degree-k problem: the node count."""
    return k + 1


def interpolation_growth_bound(k: int, z: complex, M: float) -> float:
    """Upper bound on |p(z)| over degree-k polynomials with |p| <= M on [-1,1].

    From p(z) = <(z^i), V^{-1} p(x_i)>: M * (k+1) * max(1, |z|^k) times the
    inverse-norm estimate at the node count k+1.
    """
    if M <= 0.0:
        raise ValueError("M must be positive")
    return M * (k + 1) * max(1.0, abs(z) ** k) * gautschi_bound(growth_index(k))


def vandermonde_sweep(max_degree: int) -> list[dict]:
    """Rows for the CLI sweep: norms against degree- and node-indexed bounds."""
    rows = []
    for k in range(max_degree + 1):
        norm = vandermonde_inverse_inf_norm(k)
        bk = gautschi_bound(k)
        bk1 = gautschi_bound(k + 1)
        rows.append({
            "degree": k,
            "inverse_inf_norm": norm,
            "bound_k": bk,
            "bound_k_plus_1": bk1,
            "holds_k": norm <= bk + 1e-9,
            "holds_k_plus_1": norm <= bk1 + 1e-9,
        })
    return rows
