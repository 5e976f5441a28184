"""Viscosity-solution tests at the singular slice {w = 0}.

The operator is G(X) = 1 - det(X) for PSD X and +infinity otherwise.
Test functions are quadratic jets; touching is certified by dense
sampling in a ball with a fixed margin.  The limit functions u0 of the
pogorelov families grow like a cone |w|^alpha transversally to the
slice, which defeats every C^2 jet from above; the search below looks
for the corresponding witness along the w-plane through the base point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BasePointOffSingularSet
from .families import SolutionFamily, eval_value
from .grid import as_point
from .hermitian import HermitianForm, herm_det, psd_report

__all__ = ["QuadraticJet", "g_operator", "complex_hessian_of_jet",
           "check_touch_below", "search_touch_above"]

TOUCH_MARGIN = 1e-10
PSD_TOL = 1e-12


def g_operator(X: HermitianForm, tol: float = PSD_TOL):
    """1 - det(X) on PSD matrices, +infinity otherwise."""
    rep = psd_report(X, tol)
    if not rep["is_psd"]:
        return math.inf
    return 1.0 - herm_det(X)


@dataclass(frozen=True)
class QuadraticJet:
    """q(x) = const + grad . (x - base) + 1/2 (x - base)^T hess (x - base)."""

    base: np.ndarray
    const: float
    grad: np.ndarray = field(repr=False)
    hess: np.ndarray = field(repr=False)

    def __post_init__(self):
        base = as_point(self.base)
        g = np.asarray(self.grad, dtype=float).ravel()
        H = np.asarray(self.hess, dtype=float)
        if g.size != base.size or H.shape != (base.size, base.size):
            raise ValueError("gradient/Hessian dimensions must match the base point")
        H = 0.5 * (H + H.T)
        if not (np.isfinite(self.const) and np.all(np.isfinite(g)) and np.all(np.isfinite(H))):
            raise ValueError("jet data must be finite")
        for arr in (base, g, H):
            arr.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "grad", g)
        object.__setattr__(self, "hess", H)

    def __call__(self, pts):
        dx = np.asarray(pts, dtype=float) - self.base
        quad = 0.5 * np.einsum("...a,ab,...b->...", dx, self.hess, dx)
        return self.const + dx @ self.grad + quad


def complex_hessian_of_jet(q: QuadraticJet) -> HermitianForm:
    """Exact Wirtinger combination of the jet's real Hessian (no FD)."""
    H = q.hess
    n = H.shape[0] // 2
    xi = np.arange(n) * 2
    yi = xi + 1
    re = H[np.ix_(xi, xi)] + H[np.ix_(yi, yi)]
    im = H[np.ix_(xi, yi)] - H[np.ix_(yi, xi)]
    return HermitianForm(0.25 * (re + 1j * im))


def _limit_family(u: SolutionFamily) -> SolutionFamily:
    if u.kind not in ("pogorelov2", "pogorelov_n"):
        raise ValueError("viscosity checks target the pogorelov limit functions")
    if u.eps != 0.0:
        raise ValueError("viscosity checks apply to the eps = 0 limit")
    return u


def _check_base(u: SolutionFamily, p0: np.ndarray) -> None:
    if p0.size != 2 * u.dim:
        raise ValueError("base point dimension mismatch")
    if math.hypot(p0[-2], p0[-1]) > 1e-12:
        raise BasePointOffSingularSet(
            "base point must lie on {w = 0}; away from it the function is "
            "smooth and the classical check applies")


def _ball_points(p0: np.ndarray, radius: float, samples: int, rng) -> np.ndarray:
    dim = p0.size
    x = rng.normal(size=(samples, dim))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    r = radius * rng.uniform(0.0, 1.0, size=(samples, 1)) ** (1.0 / dim)
    return p0 + x * r


def check_touch_below(u: SolutionFamily, q: QuadraticJet, radius: float,
                      samples: int = 10_000, seed: int = 0) -> dict:
    """Lower-jet test: if q touches u0 from below near the base point then
    G of the jet's complex Hessian must be nonnegative."""
    u = _limit_family(u)
    p0 = as_point(q.base)
    _check_base(u, p0)
    if abs(q(p0) - eval_value(u, p0)) > 1e-12:
        raise ValueError("jet must match the function value at the base point")
    rng = np.random.default_rng(seed)
    pts = _ball_points(p0, radius, samples, rng)
    gap = eval_value(u, pts) - q(pts)
    touches = bool(np.min(gap) >= -TOUCH_MARGIN)
    g_value = g_operator(complex_hessian_of_jet(q))
    verdict = bool(g_value >= -TOUCH_MARGIN) if touches else None
    return {"touches": touches, "g_value": g_value, "verdict": verdict}


def _w_axis_scan(u: SolutionFamily, p0: np.ndarray, radius: float,
                 angles: int = 32, depths: int = 60) -> np.ndarray:
    """Points along the w-plane through p0, log-spaced radii down to ~1e-14."""
    theta = np.linspace(0.0, 2.0 * math.pi, angles, endpoint=False)
    rr = radius * np.exp(np.linspace(0.0, math.log(1e-14), depths))
    pts = np.tile(p0, (angles * depths, 1))
    rmat, tmat = np.meshgrid(rr, theta)
    pts[:, -2] = (rmat * np.cos(tmat)).ravel()
    pts[:, -1] = (rmat * np.sin(tmat)).ravel()
    return pts


def search_touch_above(u: SolutionFamily, p0, radius: float,
                       attempts: int = 1000, seed: int = 0,
                       samples: int = 2000) -> dict:
    """Try random upper jets; each must lose to the cone along the w-plane.

    Returns found = True only if some attempted jet both dominates u0 on
    the sampled ball minus the base point and admits no witness sample
    with q < u0 - 1e-12 near the w-plane (which would contradict C^2).
    """
    u = _limit_family(u)
    p0 = as_point(p0)
    _check_base(u, p0)
    rng = np.random.default_rng(seed)
    value = eval_value(u, p0)
    dim = p0.size
    scan = _w_axis_scan(u, p0, radius)
    scan_u = eval_value(u, scan)
    ball = _ball_points(p0, radius, samples, rng)
    ball_u = eval_value(u, ball)
    found = False
    best_violation = 0.0
    witnesses = 0
    for _ in range(attempts):
        scale = 10.0 ** rng.uniform(-1.0, 6.0)
        g = rng.normal(size=dim) * 10.0 ** rng.uniform(-2.0, 1.0)
        H = rng.normal(size=(dim, dim)) * scale
        q = QuadraticJet(p0, value, g, H + H.T)
        margin = scan_u - q(scan)  # > 0 where the cone beats the jet
        witness = float(np.max(margin))
        if witness > 1e-12:
            witnesses += 1
            best_violation = max(best_violation, witness)
            continue
        # no witness on the scan: only counts as touching if it dominates
        # u0 on the sampled ball away from the base point
        if np.all(q(ball) - ball_u >= -1e-12):
            found = True
    return {
        "found": found,
        "best_violation": best_violation,
        "attempts": attempts,
        "witnesses": witnesses,
    }
