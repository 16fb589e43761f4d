"""Wedge and box-union geometry.

A wedge is the union of two pyramids with a common apex ``p``: the convex
hulls of ``p`` with ``p + d*M`` and with ``p - d*M``, where ``M`` collects
the vertex directions ``(1, m_2, ..., m_n)`` whose trailing entries each
take one of two positive slopes.  The primitives here are membership,
directional reach (the first-exit time of the two rays ``p +- s*x``), and
the largest wedge inscribable in a domain at a point.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWedgeError, DimensionError, DomainError


def as_point(coords, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float vector, optionally of fixed dimension."""
    arr = np.atleast_1d(np.asarray(coords, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"expected a 1-D coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {arr.size}")
    return arr


def as_direction(coords, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite nonzero direction vector."""
    arr = as_point(coords, dim)
    if not np.any(arr != 0.0):
        raise ValueError("direction vector must be nonzero")
    return arr


def as_positive_direction(coords, dim: int | None = None) -> np.ndarray:
    """Coerce to a direction in the open positive cone (every entry > 0)."""
    arr = as_direction(coords, dim)
    if not np.all(arr > 0.0):
        raise ValueError("direction must have every coordinate > 0")
    return arr


@dataclass(frozen=True)
class Wedge:
    """Two-sided pyramid with apex ``base``, extent ``half_width``, slopes in
    ``[slope_lo, slope_hi]``.  ``half_width`` may be ``math.inf`` for the
    unbounded sentinel produced by inscribing into an unbounded domain."""

    base: np.ndarray
    half_width: float
    slope_lo: float
    slope_hi: float

    def __post_init__(self):
        base = as_point(self.base)
        object.__setattr__(self, "base", base)
        base.flags.writeable = False
        if base.size < 2:
            raise DimensionError("wedges require dimension >= 2")
        if not (0.0 < self.slope_lo < self.slope_hi):
            raise ValueError("slopes must satisfy 0 < slope_lo < slope_hi")
        if not (self.half_width > 0.0):
            raise ValueError("half_width must be positive")

    @property
    def dim(self) -> int:
        return self.base.size

    def vertex_directions(self) -> np.ndarray:
        """The 2^(n-1) vertex directions (1, m_2, ..., m_n), unit half-width."""
        tails = itertools.product((self.slope_lo, self.slope_hi), repeat=self.dim - 1)
        return np.array([(1.0, *t) for t in tails])

    def check_directions(self) -> np.ndarray:
        """Unit-half-width offsets probing both pyramids: vertices, apex-vertex
        midpoints, and base-edge midpoints (edges join vertices differing in a
        single slope entry)."""
        dirs = self.vertex_directions()
        rows = [dirs, dirs / 2.0]
        mids = []
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                if np.count_nonzero(dirs[i] != dirs[j]) == 1:
                    mids.append((dirs[i] + dirs[j]) / 2.0)
        if mids:
            rows.append(np.array(mids))
        one_sided = np.vstack(rows)
        return np.vstack([one_sided, -one_sided])

    def contains(self, q) -> bool:
        return wedge_contains(self, q)

    def to_json(self) -> dict:
        return {
            "base": self.base.tolist(),
            "delta": self.half_width,
            "m1": self.slope_lo,
            "m2": self.slope_hi,
        }

    @classmethod
    def from_json(cls, obj) -> "Wedge":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(np.asarray(obj["base"], dtype=float), float(obj["delta"]),
                   float(obj["m1"]), float(obj["m2"]))


def _pyramid_contains(w: Wedge, q: np.ndarray, sign: float) -> bool:
    """Membership in a single pyramid Hull{base, base + sign*delta*M}."""
    v = sign * (q - w.base)
    if not np.any(v != 0.0):
        return True
    v1 = v[0]
    if v1 <= 0.0 or v1 > w.half_width:
        return False
    ratios = v[1:] / v1
    return bool(np.all(ratios >= w.slope_lo) and np.all(ratios <= w.slope_hi))


def wedge_contains(w: Wedge, q) -> bool:
    """True iff ``q`` lies in the wedge.

    Writing ``v = +-(q - base)`` with ``v[0] >= 0``, membership is ``v = 0``
    or ``0 < v[0] <= half_width`` with every ratio ``v[i]/v[0]`` inside
    ``[slope_lo, slope_hi]``; the vertex directions all share first
    coordinate 1, so the hull cross-section is exactly the slope box.
    """
    q = as_point(q, w.dim)
    return _pyramid_contains(w, q, +1.0) or _pyramid_contains(w, q, -1.0)


@dataclass(frozen=True)
class BoxUnionDomain:
    """Finite union of axis-aligned closed boxes, all of one dimension."""

    lows: np.ndarray   # (m, n)
    highs: np.ndarray  # (m, n)

    def __post_init__(self):
        lows = np.atleast_2d(np.asarray(self.lows, dtype=float))
        highs = np.atleast_2d(np.asarray(self.highs, dtype=float))
        if lows.shape != highs.shape or lows.shape[0] < 1:
            raise ValueError("lows and highs must be non-empty arrays of equal shape")
        if not (np.all(np.isfinite(lows)) and np.all(np.isfinite(highs))):
            raise ValueError("box corners must be finite")
        if not np.all(lows < highs):
            raise ValueError("each box needs lo < hi componentwise")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)
        lows.flags.writeable = False
        highs.flags.writeable = False

    @classmethod
    def from_boxes(cls, boxes) -> "BoxUnionDomain":
        lows = [as_point(lo) for lo, _ in boxes]
        highs = [as_point(hi) for _, hi in boxes]
        return cls(np.array(lows), np.array(highs))

    @property
    def dim(self) -> int:
        return self.lows.shape[1]

    def contains(self, q) -> bool:
        q = as_point(q, self.dim)
        return bool(np.any(np.all((self.lows <= q) & (q <= self.highs), axis=1)))

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (N, n) array of points."""
        pts = np.asarray(pts, dtype=float)
        inside = (self.lows[None, :, :] <= pts[:, None, :]) & \
                 (pts[:, None, :] <= self.highs[None, :, :])
        return np.any(np.all(inside, axis=2), axis=1)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lows.min(axis=0), self.highs.max(axis=0)

    def is_interior(self, q) -> bool:
        """Exact-up-to-epsilon interior test: all 2^n quadrant probes at half
        the smallest positive gap to any box face coordinate must be members."""
        q = as_point(q, self.dim)
        if not self.contains(q):
            return False
        coords = np.concatenate([self.lows, self.highs], axis=0)
        gaps = np.abs(coords - q)
        positive = gaps[gaps > 0.0]
        eps = 0.5 * positive.min() if positive.size else 1.0
        eps = min(eps, 1e-6 * (1.0 + float(np.abs(q).max())))
        for signs in itertools.product((-1.0, 1.0), repeat=self.dim):
            if not self.contains(q + eps * np.asarray(signs)):
                return False
        return True

    def ray_exit(self, p, x) -> float:
        """First-exit time: sup{s >= 0 : p + t*x in the union for all t <= s}.

        Computed exactly by slab intersection: each box meets the ray in a
        parameter interval; merge the intervals and take the right endpoint
        of the merged interval containing 0.  Returns 0 when the ray starts
        outside (or leaves immediately at p).
        """
        p = as_point(p, self.dim)
        x = as_direction(x, self.dim)
        intervals = _ray_box_intervals(self.lows, self.highs, p, x)
        if not intervals:
            return 0.0
        scale = 1e-12 * (1.0 + float(np.abs(p).max()))
        intervals.sort()
        merged: list[list[float]] = []
        for lo, hi in intervals:
            if merged and lo <= merged[-1][1] + scale:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        for lo, hi in merged:
            if lo <= scale and hi >= -scale:
                return max(hi, 0.0)
        return 0.0

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "boxes": [{"lo": lo.tolist(), "hi": hi.tolist()}
                      for lo, hi in zip(self.lows, self.highs)],
        }

    @classmethod
    def from_json(cls, obj) -> "BoxUnionDomain":
        if isinstance(obj, str):
            obj = json.loads(obj)
        boxes = [(b["lo"], b["hi"]) for b in obj["boxes"]]
        dom = cls.from_boxes(boxes)
        if "dim" in obj and int(obj["dim"]) != dom.dim:
            raise DimensionError("declared dim does not match box dimension")
        return dom


def _ray_box_intervals(lows, highs, p, x) -> list[tuple[float, float]]:
    """Parameter intervals of {s : p + s*x inside box}, one per meeting box."""
    out: list[tuple[float, float]] = []
    for lo, hi in zip(lows, highs):
        smin, smax = -math.inf, math.inf
        ok = True
        for d in range(p.size):
            if x[d] == 0.0:
                if not (lo[d] <= p[d] <= hi[d]):
                    ok = False
                    break
                continue
            a = (lo[d] - p[d]) / x[d]
            b = (hi[d] - p[d]) / x[d]
            if a > b:
                a, b = b, a
            smin = max(smin, a)
            smax = min(smax, b)
        if ok and smin <= smax:
            out.append((smin, smax))
    return out


def _wedge_bbox_exit(w: Wedge, p: np.ndarray, x: np.ndarray) -> float:
    reach = np.full(w.dim, w.slope_hi)
    reach[0] = 1.0
    lo = w.base - w.half_width * reach
    hi = w.base + w.half_width * reach
    smax = math.inf
    for d in range(w.dim):
        if x[d] == 0.0:
            continue
        a = (lo[d] - p[d]) / x[d]
        b = (hi[d] - p[d]) / x[d]
        smax = min(smax, max(a, b))
    return smax


def _one_sided_reach_wedge(w: Wedge, p: np.ndarray, x: np.ndarray) -> float:
    """First-exit time of p + s*x from the wedge, s >= 0, for general p.

    The ray's inside set within each convex pyramid is an interval, so a
    per-pyramid bisection is valid; the union interval containing 0 ends at
    the larger of the two exits.
    """
    best = 0.0
    for sign in (+1.0, -1.0):
        if not _pyramid_contains(w, p, sign):
            continue
        hi = _wedge_bbox_exit(w, p, x) + 1.0
        if _pyramid_contains(w, p + hi * x, sign):
            return math.inf  # cannot happen for finite half_width
        lo = 0.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _pyramid_contains(w, p + mid * x, sign):
                lo = mid
            else:
                hi = mid
        best = max(best, lo)
    return best


def directional_reach(domain, p, x) -> float:
    """min over the two rays p +- s*x of the first-exit time from ``domain``.

    Wedges at their own base use the closed form delta/|x_1| (zero when the
    slope ratios fall outside [m1, m2]); box unions use exact slab-interval
    arithmetic; any other domain object must expose ``reach(p, x)``.
    Returns ``math.inf`` when both rays stay inside forever.
    """
    x = as_direction(x)
    if isinstance(domain, Wedge):
        p = as_point(p, domain.dim)
        x = as_direction(x, domain.dim)
        if np.array_equal(p, domain.base):
            x1 = x[0]
            if x1 == 0.0:
                return 0.0
            ratios = x[1:] / x1
            if np.any(ratios < domain.slope_lo) or np.any(ratios > domain.slope_hi):
                return 0.0
            return domain.half_width / abs(x1)
        return min(_one_sided_reach_wedge(domain, p, x),
                   _one_sided_reach_wedge(domain, p, -x))
    if isinstance(domain, BoxUnionDomain):
        p = as_point(p, domain.dim)
        x = as_direction(x, domain.dim)
        return min(domain.ray_exit(p, x), domain.ray_exit(p, -x))
    if hasattr(domain, "reach"):
        return domain.reach(p, x)
    raise TypeError(f"no reach rule for domain type {type(domain).__name__}")


def inscribe_wedge(domain, p, m1: float, m2: float,
                   rel_tol: float = 1e-9, max_delta: float = 2.0 ** 40) -> Wedge:
    """Largest wedge at ``p`` with slopes (m1, m2) sitting inside ``domain``.

    Containment is checked on the wedge vertices and edge midpoints of both
    pyramids; the half-width supremum is bracketed by doubling and refined by
    bisection to relative tolerance ``rel_tol`` (the inner value is returned,
    so the result is always contained).  Domains that keep containing the
    probe points past ``max_delta`` yield the infinite-half-width sentinel.
    """
    if not (0.0 < m1 < m2):
        raise ValueError("inscribe_wedge requires 0 < m1 < m2")
    if hasattr(domain, "is_interior"):
        interior = domain.is_interior(p)
    else:
        interior = domain.contains(p)
    if not interior:
        raise DomainError("base point is not interior to the domain")
    p = as_point(p, getattr(domain, "dim", None))
    probe = Wedge(p, 1.0, m1, m2)
    offsets = probe.check_directions()

    def fits(delta: float) -> bool:
        return all(domain.contains(p + delta * o) for o in offsets)

    delta = 1.0
    shrink = 0
    while not fits(delta):
        delta /= 2.0
        shrink += 1
        if shrink > 200:
            raise DegenerateWedgeError("no positive wedge width fits at this point")
    lo = delta
    while fits(lo * 2.0):
        lo *= 2.0
        if lo > max_delta:
            return Wedge(p, math.inf, m1, m2)
    hi = lo * 2.0
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if fits(mid):
            lo = mid
        else:
            hi = mid
    return Wedge(p, lo, m1, m2)
