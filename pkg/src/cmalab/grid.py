"""Uniform grids on boxes in C^n = R^(2n), Wirtinger finite differences,
and discrete L^p / W^{2,p} norms.

A point of C^n is stored as 2n reals (x1, y1, ..., xn, yn) with
z_k = x_k + i y_k, so real axis 2k holds x_{k+1} and axis 2k+1 holds
y_{k+1}.  All derivatives are second-order central differences; mixed
derivatives use the 4-point cross stencil.  Norms are midpoint sums
(node value times cell volume) over the non-excluded nodes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    BoundaryNode,
    GridTooLarge,
    NonFiniteSample,
)
from .hermitian import HermitianForm

__all__ = [
    "GridDomain",
    "GridField",
    "sample",
    "complex_hessian_fd",
    "complex_hessian_fd_raw",
    "complex_laplacian_fd",
    "lp_norm",
    "w2p_seminorm",
]

DEFAULT_MAX_NODES = 10_000_000


def as_point(coords) -> np.ndarray:
    p = np.asarray(coords, dtype=float).ravel()
    if p.size < 2 or p.size % 2 != 0:
        raise ValueError("a point of C^n needs an even number (>= 2) of real coordinates")
    return p


@dataclass(frozen=True)
class GridDomain:
    """Box around `center` with per-axis half widths and node counts.

    `excluded_tube_radius` removes a tube around the singular set
    {z over singular_axes = 0} from all norm integrals; `ball_radius`,
    when set, additionally excludes the exterior of the ball around the
    center (ball-shaped domains on a box grid).
    """

    center: np.ndarray
    half_widths: np.ndarray
    points_per_axis: tuple
    excluded_tube_radius: float = 0.0
    singular_axes: tuple = None
    ball_radius: float = None
    max_nodes: int = DEFAULT_MAX_NODES

    def __post_init__(self):
        center = as_point(self.center)
        hw = np.asarray(self.half_widths, dtype=float).ravel()
        if hw.size == 1:
            hw = np.full(center.size, hw[0])
        pts = tuple(int(p) for p in np.atleast_1d(self.points_per_axis))
        if len(pts) == 1:
            pts = pts * center.size
        if hw.size != center.size or len(pts) != center.size:
            raise ValueError("center, half_widths and points_per_axis must agree")
        if np.any(hw <= 0):
            raise ValueError("half widths must be positive")
        if any(p < 3 for p in pts):
            raise ValueError("need at least 3 points per axis")
        if self.excluded_tube_radius < 0:
            raise ValueError("excluded_tube_radius must be nonnegative")
        if self.excluded_tube_radius >= float(np.min(hw)):
            raise ValueError("excluded_tube_radius must be below the smallest half width")
        total = math.prod(pts)
        if total > self.max_nodes:
            raise GridTooLarge(f"{total} nodes exceed the cap of {self.max_nodes}")
        sing = self.singular_axes
        if sing is None:
            sing = (center.size - 2, center.size - 1)
        sing = tuple(int(a) for a in sing)
        center.setflags(write=False)
        hw.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "half_widths", hw)
        object.__setattr__(self, "points_per_axis", pts)
        object.__setattr__(self, "singular_axes", sing)

    @property
    def n(self) -> int:
        """Complex dimension."""
        return self.center.size // 2

    @property
    def shape(self) -> tuple:
        return self.points_per_axis

    @property
    def num_nodes(self) -> int:
        return math.prod(self.points_per_axis)

    @property
    def spacings(self) -> np.ndarray:
        return 2.0 * self.half_widths / (np.array(self.points_per_axis) - 1.0)

    def axis_coords(self, axis: int) -> np.ndarray:
        lo = self.center[axis] - self.half_widths[axis]
        hi = self.center[axis] + self.half_widths[axis]
        return np.linspace(lo, hi, self.points_per_axis[axis])

    def node_coords_flat(self) -> np.ndarray:
        """All node coordinates, shape (num_nodes, 2n), row-major axis order."""
        grids = np.meshgrid(*[self.axis_coords(a) for a in range(self.center.size)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def excluded_mask(self) -> np.ndarray:
        """Boolean array over the grid, True where a node is excluded from norms."""
        mask = np.zeros(self.shape, dtype=bool)
        if self.excluded_tube_radius > 0:
            r2 = np.zeros(self.shape)
            for a in self.singular_axes:
                coords = self.axis_coords(a)
                sl = [None] * len(self.shape)
                sl[a] = slice(None)
                r2 = r2 + (coords[tuple(sl)]) ** 2
            mask |= r2 < self.excluded_tube_radius**2
        if self.ball_radius is not None:
            r2 = np.zeros(self.shape)
            for a in range(self.center.size):
                coords = self.axis_coords(a) - self.center[a]
                sl = [None] * len(self.shape)
                sl[a] = slice(None)
                r2 = r2 + (coords[tuple(sl)]) ** 2
            mask |= r2 > self.ball_radius**2
        return mask

    def interior_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        for a in range(len(self.shape)):
            sl = [slice(None)] * len(self.shape)
            sl[a] = 0
            mask[tuple(sl)] = False
            sl[a] = -1
            mask[tuple(sl)] = False
        return mask


@dataclass(frozen=True)
class GridField:
    """Real samples over a GridDomain; `valid` flags usable nodes (None = all)."""

    domain: GridDomain
    values: np.ndarray = field(repr=False)
    valid: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(self.domain.shape)
        object.__setattr__(self, "values", v)
        if self.valid is not None:
            object.__setattr__(self, "valid", np.asarray(self.valid, dtype=bool).reshape(self.domain.shape))
        bad = ~np.isfinite(v)
        if self.valid is not None:
            bad &= self.valid
        if np.any(bad):
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise NonFiniteSample(idx, float(v[idx]))


def sample(domain: GridDomain, f) -> GridField:
    """Evaluate f on every node.  f may accept an (M, 2n) coordinate array
    (vectorized fast path) or a single point.  Non-finite values are only
    tolerated inside the excluded tube, where nodes are flagged invalid.
    """
    coords = domain.node_coords_flat()
    try:
        vals = np.asarray(f(coords), dtype=float)
        if vals.shape != (coords.shape[0],):
            raise TypeError
    except (TypeError, ValueError, IndexError):
        vals = np.array([float(f(coords[i])) for i in range(coords.shape[0])])
    vals = vals.reshape(domain.shape)
    finite = np.isfinite(vals)
    if not np.all(finite):
        excluded = domain.excluded_mask()
        offending = ~finite & ~excluded
        if np.any(offending):
            idx = tuple(int(i) for i in np.argwhere(offending)[0])
            raise NonFiniteSample(idx, float(vals[idx]))
        valid = finite.copy()
        vals = np.where(finite, vals, 0.0)
        return GridField(domain, vals, valid)
    return GridField(domain, vals)


# ---------------------------------------------------------------------------
# stencils

def _second_diff_at(values, idx, axis, h):
    up = list(idx)
    dn = list(idx)
    up[axis] += 1
    dn[axis] -= 1
    return (values[tuple(up)] - 2.0 * values[tuple(idx)] + values[tuple(dn)]) / (h * h)


def _cross_diff_at(values, idx, ax1, ax2, h1, h2):
    pp = list(idx); pp[ax1] += 1; pp[ax2] += 1
    pm = list(idx); pm[ax1] += 1; pm[ax2] -= 1
    mp = list(idx); mp[ax1] -= 1; mp[ax2] += 1
    mm = list(idx); mm[ax1] -= 1; mm[ax2] -= 1
    return (values[tuple(pp)] - values[tuple(pm)] - values[tuple(mp)] + values[tuple(mm)]) / (4.0 * h1 * h2)


def real_hessian_fd(u: GridField, at) -> np.ndarray:
    """Full (2n x 2n) real second-derivative matrix at an interior node."""
    idx = tuple(int(i) for i in at)
    shape = u.domain.shape
    if any(i < 1 or i > shape[a] - 2 for a, i in enumerate(idx)):
        raise BoundaryNode(f"node {idx} too close to the boundary")
    h = u.domain.spacings
    m = len(shape)
    H = np.empty((m, m))
    for a in range(m):
        H[a, a] = _second_diff_at(u.values, idx, a, h[a])
        for b in range(a + 1, m):
            H[a, b] = H[b, a] = _cross_diff_at(u.values, idx, a, b, h[a], h[b])
    return H


def wirtinger_from_real_hessian(H: np.ndarray) -> np.ndarray:
    """Complex Hessian (u_{i jbar}) from a real 2n x 2n second-derivative matrix.

    Entry (i, j) = 1/4 [ (H_{x_i x_j} + H_{y_i y_j}) + i (H_{x_i y_j} - H_{y_i x_j}) ].
    """
    n = H.shape[0] // 2
    xi = np.arange(n) * 2
    yi = xi + 1
    re = H[np.ix_(xi, xi)] + H[np.ix_(yi, yi)]
    im = H[np.ix_(xi, yi)] - H[np.ix_(yi, xi)]
    return 0.25 * (re + 1j * im)


def complex_hessian_fd_raw(u: GridField, at) -> np.ndarray:
    """Unsymmetrized FD complex Hessian at an interior node."""
    return wirtinger_from_real_hessian(real_hessian_fd(u, at))


def complex_hessian_fd(u: GridField, at) -> HermitianForm:
    """FD complex Hessian at an interior node, as a HermitianForm."""
    return HermitianForm(complex_hessian_fd_raw(u, at))


def complex_laplacian_fd(u: GridField) -> GridField:
    """Complex Laplacian sum_k u_{k kbar} = 1/4 of the real 2n-dim FD Laplacian.

    Boundary-ring values are not available and are flagged invalid.
    """
    vals = u.values
    shape = u.domain.shape
    h = u.domain.spacings
    out = np.full(shape, np.nan)
    core = tuple(slice(1, -1) for _ in shape)
    acc = np.zeros(tuple(s - 2 for s in shape))
    for a in range(len(shape)):
        up = tuple(slice(2, None) if b == a else slice(1, -1) for b in range(len(shape)))
        dn = tuple(slice(0, -2) if b == a else slice(1, -1) for b in range(len(shape)))
        acc += (vals[up] - 2.0 * vals[core] + vals[dn]) / (h[a] * h[a])
    out[core] = 0.25 * acc
    valid = np.zeros(shape, dtype=bool)
    valid[core] = True
    if u.valid is not None:
        valid &= u.valid
    out[~valid] = np.nan
    return GridField(u.domain, np.where(valid, out, 0.0), valid)


# ---------------------------------------------------------------------------
# norms

def _usable_mask(f: GridField) -> np.ndarray:
    mask = ~f.domain.excluded_mask()
    if f.valid is not None:
        mask &= f.valid
    return mask


def lp_norm(f: GridField, p: float) -> float:
    """(sum |f|^p * cell volume)^{1/p} over valid, non-excluded nodes."""
    if p <= 0:
        raise ValueError("p must be positive")
    mask = _usable_mask(f)
    cell = float(np.prod(f.domain.spacings))
    total = float(np.sum(np.abs(f.values[mask]) ** p)) * cell
    return total ** (1.0 / p)


def second_derivative_magnitude(u: GridField) -> GridField:
    """Pointwise Frobenius magnitude of the full real FD second-derivative
    matrix, on interior nodes (off-diagonal pairs counted twice)."""
    vals = u.values
    shape = u.domain.shape
    h = u.domain.spacings
    m = len(shape)
    core = tuple(slice(1, -1) for _ in shape)
    acc = np.zeros(tuple(s - 2 for s in shape))

    def shifted(offsets):
        return vals[tuple(slice(1 + o, (s - 1) + o) for o, s in zip(offsets, shape))]

    zero = [0] * m
    for a in range(m):
        o = zero.copy(); o[a] = 1
        up = shifted(o)
        o[a] = -1
        dn = shifted(o)
        d2 = (up - 2.0 * vals[core] + dn) / (h[a] * h[a])
        acc += d2 * d2
        for b in range(a + 1, m):
            o = zero.copy(); o[a] = 1; o[b] = 1
            pp = shifted(o)
            o[b] = -1
            pm = shifted(o)
            o[a] = -1; o[b] = 1
            mp = shifted(o)
            o[b] = -1
            mm = shifted(o)
            d2 = (pp - pm - mp + mm) / (4.0 * h[a] * h[b])
            acc += 2.0 * d2 * d2
    out = np.zeros(shape)
    out[core] = np.sqrt(acc)
    valid = np.zeros(shape, dtype=bool)
    valid[core] = True
    if u.valid is not None:
        valid &= u.valid
    return GridField(u.domain, out, valid)


def w2p_seminorm(u: GridField, p: float) -> float:
    """L^p norm of the full second-order central-difference array (interior)."""
    if p <= 0:
        raise ValueError("p must be positive")
    if any(s < 5 for s in u.domain.shape):
        raise ValueError("w2p_seminorm needs at least 5 points per axis")
    return lp_norm(second_derivative_magnitude(u), p)


# ---------------------------------------------------------------------------
# import/export

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def field_to_csv(f: GridField) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["points_per_axis"] + [str(s) for s in f.domain.shape])
    w.writerow(["spacings"] + [_fmt(x) for x in f.domain.spacings])
    w.writerow(["center"] + [_fmt(x) for x in f.domain.center])
    w.writerow(["half_widths"] + [_fmt(x) for x in f.domain.half_widths])
    w.writerow(["excluded_tube_radius", _fmt(f.domain.excluded_tube_radius)])
    w.writerow(["value"])
    for v in f.values.ravel():
        w.writerow([_fmt(v)])
    return buf.getvalue()


def field_from_csv(text: str) -> GridField:
    rows = list(csv.reader(io.StringIO(text)))
    hdr = {r[0]: r[1:] for r in rows[:5]}
    pts = tuple(int(s) for s in hdr["points_per_axis"])
    center = [float(s) for s in hdr["center"]]
    hw = [float(s) for s in hdr["half_widths"]]
    tube = float(hdr["excluded_tube_radius"][0])
    dom = GridDomain(center, hw, pts, excluded_tube_radius=tube)
    vals = np.array([float(r[0]) for r in rows[6:]])
    return GridField(dom, vals.reshape(pts))


def domain_to_dict(d: GridDomain) -> dict:
    out = {
        "center": [float(x) for x in d.center],
        "half_widths": [float(x) for x in d.half_widths],
        "points_per_axis": list(d.points_per_axis),
        "excluded_tube_radius": d.excluded_tube_radius,
        "singular_axes": list(d.singular_axes),
    }
    if d.ball_radius is not None:
        out["ball_radius"] = d.ball_radius
    if d.max_nodes != DEFAULT_MAX_NODES:
        out["max_nodes"] = d.max_nodes
    return out


def domain_from_dict(obj: dict) -> GridDomain:
    return GridDomain(
        obj["center"],
        obj["half_widths"],
        tuple(obj["points_per_axis"]),
        excluded_tube_radius=obj.get("excluded_tube_radius", 0.0),
        singular_axes=tuple(obj["singular_axes"]) if "singular_axes" in obj else None,
        ball_radius=obj.get("ball_radius"),
        max_nodes=obj.get("max_nodes", DEFAULT_MAX_NODES),
    )


def field_to_json(f: GridField) -> str:
    obj = {
        "domain": domain_to_dict(f.domain),
        "values": [_fmt(v) for v in f.values.ravel()],
    }
    return json.dumps(obj, indent=1)


def field_from_json(text: str) -> GridField:
    obj = json.loads(text)
    dom = domain_from_dict(obj["domain"])
    vals = np.array([float(s) for s in obj["values"]]).reshape(dom.shape)
    return GridField(dom, vals)


def refine(domain: GridDomain, factor: int = 2) -> GridDomain:
    """Halve spacings: N -> factor*(N-1)+1 per axis; tube radius follows 2h."""
    pts = tuple(factor * (p - 1) + 1 for p in domain.points_per_axis)
    new = replace(domain, points_per_axis=pts)
    if domain.excluded_tube_radius > 0:
        h = float(np.max(new.spacings[list(new.singular_axes)]))
        new = replace(new, excluded_tube_radius=2.0 * h)
    return new
