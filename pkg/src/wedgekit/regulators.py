"""Homogeneous regulator bounds for wedges and the iterated regulated set.

For a 2-D wedge of half-width delta and slopes (m1, m2), the degree-k
regulator is bounded by

    (1/delta^k) * (k+1) * max(|z1|, |z2 - (m1+m2) z1| / (m2-m1))^k * G(k+1)

with G the Chebyshev-Vandermonde inverse-norm estimate (node-count indexed,
see chebyshev.growth_index).  The k-th root of the bound converges to the
asymptotic root (1+sqrt2)/delta * max(...); the sublevel set root < 1 is a
sheared parallelogram, and iterating "inscribe a wedge, adjoin its
parallelogram" over a raster produces an inner approximation of the full
regulated enlargement of a planar domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .chebyshev import gautschi_bound, growth_index
from .errors import DimensionError, DomainError
from .geometry import BoxUnionDomain, Wedge, as_point

_ROOT_FACTOR = 1.0 + math.sqrt(2.0)

#: Slope pairs swept (and unioned) when the caller does not fix (m1, m2).
DEFAULT_SLOPE_PAIRS = ((0.5, 2.0), (0.25, 4.0))


@dataclass(frozen=True)
class WedgeRegulator:
    """A wedge plus the derived slope constants used by every bound."""

    wedge: Wedge

    @property
    def sum_slopes(self) -> float:
        return self.wedge.slope_lo + self.wedge.slope_hi

    @property
    def diff_slopes(self) -> float:
        return self.wedge.slope_hi - self.wedge.slope_lo

    @property
    def dim(self) -> int:
        return self.wedge.dim


def _sheared_sup(reg: WedgeRegulator, z) -> float:
    """max(|z1|, max_i |z_i - (m1+m2) z1| / (m2-m1)) over trailing coords."""
    z = np.asarray(z, dtype=complex).ravel()
    if z.size != reg.dim:
        raise DimensionError(f"expected a {reg.dim}-vector, got size {z.size}")
    sheared = np.abs(z[1:] - reg.sum_slopes * z[0]) / reg.diff_slopes
    return max(abs(z[0]), float(sheared.max()))


def wedge_regulator_bound_2d(reg: WedgeRegulator, k: int, z) -> float:
    """Degree-k regulator upper bound for a 2-D wedge at complex offset z."""
    if reg.dim != 2:
        raise DimensionError("wedge_regulator_bound_2d needs a 2-D wedge")
    if k < 1:
        raise ValueError("order k must be >= 1")
    sup = _sheared_sup(reg, z)
    if math.isinf(reg.wedge.half_width):
        return 0.0
    return (k + 1) * (sup / reg.wedge.half_width) ** k * gautschi_bound(growth_index(k))


def wedge_regulator_bound_nd(reg: WedgeRegulator, k: int, z) -> float:
    """Tensor-product analogue in n >= 2 variables; reduces to the 2-D bound."""
    if reg.dim < 2:
        raise DimensionError("regulator bounds need dimension >= 2")
    if k < 1:
        raise ValueError("order k must be >= 1")
    sup = _sheared_sup(reg, z)
    if math.isinf(reg.wedge.half_width):
        return 0.0
    n1 = reg.dim - 1
    return ((k + 1) ** n1 * (sup / reg.wedge.half_width) ** k
            * gautschi_bound(growth_index(k)) ** n1)


def asymptotic_root(reg: WedgeRegulator, z) -> float:
    """Limit of the k-th root of the regulator bound as k grows.

    Membership in the estimated convergence region is asymptotic_root < 1.
    """
    sup = _sheared_sup(reg, z)
    if math.isinf(reg.wedge.half_width):
        return 0.0
    return (sup / reg.wedge.half_width) * _ROOT_FACTOR ** (reg.dim - 1)


@dataclass(frozen=True)
class Parallelogram:
    """Sheared box {q : |u| <= half_u, |(q2-c2) - shear*u| <= half_w},
    u = q1 - c1.  This is exactly the region asymptotic_root <= 1."""

    center: np.ndarray
    half_u: float
    half_w: float
    shear: float

    def __post_init__(self):
        center = as_point(self.center, 2)
        object.__setattr__(self, "center", center)
        center.flags.writeable = False

    def contains(self, q) -> bool:
        q = as_point(q, 2)
        u = q[0] - self.center[0]
        w = (q[1] - self.center[1]) - self.shear * u
        return abs(u) <= self.half_u and abs(w) <= self.half_w

    def scaled(self, factor: float) -> "Parallelogram":
        return Parallelogram(self.center, self.half_u * factor,
                             self.half_w * factor, self.shear)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        du = self.half_u
        dv = abs(self.shear) * self.half_u + self.half_w
        lo = self.center - np.array([du, dv])
        hi = self.center + np.array([du, dv])
        return lo, hi


def parallelogram_region(reg: WedgeRegulator) -> Parallelogram:
    """Certified neighborhood of the wedge base: half-width delta/(1+sqrt2)
    along z1 and (m2-m1)*delta/(1+sqrt2) in the sheared coordinate."""
    if reg.dim != 2:
        raise DimensionError("parallelogram_region needs a 2-D wedge")
    h = reg.wedge.half_width / _ROOT_FACTOR
    return Parallelogram(reg.wedge.base, h, reg.diff_slopes * h, reg.sum_slopes)


@dataclass
class RegionSample:
    """Rasterized region: per point a membership flag and a signed margin
    (positive exactly for members)."""

    points: np.ndarray                  # (N, dim)
    member: np.ndarray                  # (N,) bool
    margin: np.ndarray                  # (N,) float
    extras: dict = field(default_factory=dict)
    iterations: int | None = None
    grid_shape: tuple[int, int] | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.member = np.asarray(self.member, dtype=bool)
        self.margin = np.asarray(self.margin, dtype=float)
        n = self.points.shape[0]
        if self.member.shape != (n,) or self.margin.shape != (n,):
            raise ValueError("points, member, margin must share their length")
        if not np.all((self.margin > 0.0) == self.member):
            raise ValueError("margin sign must agree with membership")

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        for p, m, g in zip(self.points, self.member, self.margin):
            yield p, bool(m), float(g)

    def member_fraction(self, lo=None, hi=None) -> float:
        """Fraction of sample points inside [lo, hi] that are members."""
        sel = np.ones(len(self), dtype=bool)
        if lo is not None:
            sel &= np.all(self.points >= np.asarray(lo, dtype=float), axis=1)
        if hi is not None:
            sel &= np.all(self.points <= np.asarray(hi, dtype=float), axis=1)
        if not sel.any():
            return 0.0
        return float(np.count_nonzero(self.member & sel)) / float(np.count_nonzero(sel))


@dataclass
class RegulatedRegionSample(RegionSample):
    """Iteration output: adds per-point first reached iteration and the
    per-iteration wedge certificates needed to audit membership."""

    first_iteration: np.ndarray | None = None
    certificates: list = field(default_factory=list, repr=False)
    lattice: tuple | None = None        # (ix0, iy0, step, nx, ny)

    def trace(self, point) -> list[tuple[np.ndarray, int]]:
        """Chain of (point, iteration) certificates back to the input domain.

        Each hop moves from a member cell to the source cell whose
        parallelogram covered it at the iteration it first became a member.
        """
        if self.lattice is None or self.first_iteration is None:
            raise ValueError("no lattice data attached to this sample")
        ix0, iy0, step, nx, ny = self.lattice
        point = as_point(point, 2)
        i = int(round(point[0] / step)) - ix0
        j = int(round(point[1] / step)) - iy0
        if not (0 <= i < nx and 0 <= j < ny):
            raise DomainError("point is outside the rasterized window")
        first = self.first_iteration.reshape(nx, ny)
        if first[i, j] < 0:
            raise DomainError("point is not a member of the regulated set")
        chain = [(np.array([(ix0 + i) * step, (iy0 + j) * step]), int(first[i, j]))]
        while first[i, j] > 0:
            it = int(first[i, j])
            hop = _find_covering_source(self.certificates[it - 1], i, j)
            if hop is None:
                raise DomainError("no covering certificate found; trace broken")
            i, j = hop
            chain.append((np.array([(ix0 + i) * step, (iy0 + j) * step]),
                          int(first[i, j])))
        return chain


def _find_covering_source(iter_certs: list, i: int, j: int):
    for cert in iter_certs:
        di = i - cert["ix"]
        dj = j - cert["iy"]
        shear = cert["m1"] + cert["m2"]
        cw = cert["m2"] - cert["m1"]
        ok = (np.abs(di) <= np.floor(cert["h"])) & \
             (np.abs(dj - shear * di) <= cw * cert["h"] + 1e-9)
        hits = np.nonzero(ok)[0]
        if hits.size:
            s = int(hits[0])
            return int(cert["ix"][s]), int(cert["iy"][s])
    return None


def _interior_mask(member: np.ndarray) -> np.ndarray:
    return ndimage.binary_erosion(member, structure=np.ones((3, 3), dtype=bool),
                                  border_value=0)


def _member_lookup(member: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    nx, ny = member.shape
    ok = (i >= 0) & (i < nx) & (j >= 0) & (j < ny)
    ic = np.clip(i, 0, nx - 1)
    jc = np.clip(j, 0, ny - 1)
    return member[ic, jc] & ok


def _fits_on_raster(member, pi, pj, delta_cells, offsets) -> np.ndarray:
    out = np.ones(pi.shape, dtype=bool)
    for ox, oy in offsets:
        di = np.rint(delta_cells * ox).astype(np.int64)
        dj = np.rint(delta_cells * oy).astype(np.int64)
        out &= _member_lookup(member, pi + di, pj + dj)
    return out


def _raster_inscribe(member, interior, m1, m2,
                     max_doublings: int = 15, n_bisect: int = 12):
    """Per interior cell, the largest wedge half-width (in cell units) whose
    vertex/midpoint probes all land on member cells."""
    pi, pj = np.nonzero(interior)
    if pi.size == 0:
        return pi, pj, np.zeros(0)
    offsets = Wedge(np.zeros(2), 1.0, m1, m2).check_directions()
    fits1 = _fits_on_raster(member, pi, pj, np.ones(pi.size), offsets)
    pi, pj = pi[fits1], pj[fits1]
    if pi.size == 0:
        return pi, pj, np.zeros(0)
    lo = np.ones(pi.size)
    cur = np.ones(pi.size)
    hi = np.zeros(pi.size)
    active = np.ones(pi.size, dtype=bool)
    for _ in range(max_doublings):
        if not active.any():
            break
        trial = np.where(active, cur * 2.0, 1.0)
        f = _fits_on_raster(member, pi, pj, trial, offsets)
        grew = active & f
        died = active & ~f
        lo[grew] = trial[grew]
        cur[grew] = trial[grew]
        hi[died] = trial[died]
        active = grew
    hi[active] = cur[active] * 2.0  # doubling cap; grid bounds make this safe
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        f = _fits_on_raster(member, pi, pj, mid, offsets)
        lo = np.where(f, mid, lo)
        hi = np.where(f, hi, mid)
    return pi, pj, lo


def _mark_parallelograms(shape, pi, pj, h_cells, m1, m2) -> np.ndarray:
    """Union of the sources' parallelograms on the raster.

    In the sheared coordinate t = y - (m1+m2)x each parallelogram is an
    axis-aligned rectangle, so per column it covers one contiguous row range;
    ranges are accumulated with a difference array (order independent) and
    rounded inward so every marked cell center genuinely lies inside."""
    nx, ny = shape
    shear = m1 + m2
    cw = m2 - m1
    B = np.floor(h_cells).astype(np.int64)
    counts = 2 * B + 1
    total = int(counts.sum())
    src = np.repeat(np.arange(pi.size), counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    di = np.arange(total, dtype=np.int64) - starts[src] - B[src]
    cols = pi[src] + di
    ycent = pj[src] + shear * di
    halfh = cw * h_cells[src]
    jlo = np.ceil(ycent - halfh - 1e-9).astype(np.int64)
    jhi = np.floor(ycent + halfh + 1e-9).astype(np.int64)
    valid = (cols >= 0) & (cols < nx)
    jlo = np.maximum(jlo, 0)
    jhi = np.minimum(jhi, ny - 1)
    valid &= jlo <= jhi
    diff = np.zeros((nx, ny + 1), dtype=np.int32)
    np.add.at(diff, (cols[valid], jlo[valid]), 1)
    np.add.at(diff, (cols[valid], jhi[valid] + 1), -1)
    return np.cumsum(diff, axis=1)[:, :ny] > 0


def _resolve_slope_pairs(m1, m2):
    if (m1 is None) != (m2 is None):
        raise ValueError("give both of m1, m2 or neither")
    pairs = ((float(m1), float(m2)),) if m1 is not None else DEFAULT_SLOPE_PAIRS
    for a, b in pairs:
        if not (0.0 < a < b):
            raise ValueError("slopes must satisfy 0 < m1 < m2")
    return pairs


def regulated_set_iterate(domain: BoxUnionDomain, m1=None, m2=None,
                          grid_step: float = 1e-2, max_iters: int = 25,
                          window=None) -> RegulatedRegionSample:
    """Inner approximation of the regulated enlargement of a planar domain.

    Rasterizes the domain on an origin-aligned lattice, then repeats until a
    fixed point or ``max_iters``: inscribe a wedge at every interior cell and
    adjoin its certified parallelogram.  With ``m1``/``m2`` omitted the
    DEFAULT_SLOPE_PAIRS sweep is unioned inside each iteration.  The result
    always contains the rasterized input and is monotone in the iterations;
    growth is clipped to ``window`` (default: domain bounding box padded by
    half its largest extent).
    """
    if domain.dim != 2:
        raise DimensionError("regulated_set_iterate is 2-D only")
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    pairs = _resolve_slope_pairs(m1, m2)
    if window is None:
        lo, hi = domain.bounding_box()
        pad = 0.5 * float((hi - lo).max())
        window = (lo - pad, hi + pad)
    wlo = as_point(window[0], 2)
    whi = as_point(window[1], 2)
    ix0 = math.ceil(wlo[0] / grid_step)
    ix1 = math.floor(whi[0] / grid_step)
    iy0 = math.ceil(wlo[1] / grid_step)
    iy1 = math.floor(whi[1] / grid_step)
    nx, ny = ix1 - ix0 + 1, iy1 - iy0 + 1
    if nx < 1 or ny < 1:
        raise DomainError("window is smaller than one grid cell")
    xs = grid_step * np.arange(ix0, ix1 + 1)
    ys = grid_step * np.arange(iy0, iy1 + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    member = domain.contains_many(pts).reshape(nx, ny)
    if not member.any():
        raise DomainError("domain has empty interior on this grid")
    first_iter = np.where(member, 0, -1).astype(np.int32)

    certificates: list[list[dict]] = []
    iterations = 0
    for it in range(1, max_iters + 1):
        iterations = it
        interior = _interior_mask(member)
        new_member = member.copy()
        iter_certs: list[dict] = []
        for a, b in pairs:
            pi, pj, delta_cells = _raster_inscribe(member, interior, a, b)
            if pi.size == 0:
                continue
            h_cells = delta_cells / _ROOT_FACTOR
            useful = h_cells >= 1.0
            pi, pj, h_cells = pi[useful], pj[useful], h_cells[useful]
            if pi.size == 0:
                continue
            covered = _mark_parallelograms((nx, ny), pi, pj, h_cells, a, b)
            iter_certs.append({"m1": a, "m2": b, "ix": pi, "iy": pj, "h": h_cells})
            new_member |= covered
        certificates.append(iter_certs)
        added = new_member & ~member
        if not added.any():
            break
        member = new_member
        first_iter[added] = it

    member_flat = member.ravel()
    first_flat = first_iter.ravel()
    margin = np.where(member_flat, 1.0 / (1.0 + np.maximum(first_flat, 0)), -1.0)
    return RegulatedRegionSample(
        points=pts, member=member_flat, margin=margin,
        extras={}, iterations=iterations, grid_shape=(nx, ny),
        first_iteration=first_flat, certificates=certificates,
        lattice=(ix0, iy0, grid_step, nx, ny),
    )
