"""Three-tangle of GHZ/W mixtures along the symmetry axis of their Bloch sphere.

The axis coordinate x is measured from the plane of the three finite roots,
increasing away from the W pole; the sphere centre sits at x_O. For
rho(p) = p GHZ + (1 - p) W the Bloch height is 2p - 1, so x = 2p - 1 + x_O.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .geometry import RootProfile, root_profile
from .measures import TANGLE
from .quantum import DensityMatrix, Rank2Spectral, ghz, w_state

X_O = 6 / (3 + 4 * 2 ** (1 / 3)) - 1
DEFAULT_GRID = 2000


def ghzw_basis(p: float = 0.5) -> Rank2Spectral:
    """phi0 = GHZ (north pole), phi1 = W (south pole, omega = infinity)."""
    return Rank2Spectral(ghz(3), w_state(3), float(p), float(1 - p))


def ghzw_build(p: float):
    if not 0 <= p <= 1:
        raise ValueError("mixing probability must lie in [0, 1]")
    basis = ghzw_basis(p)
    rho = DensityMatrix.from_matrix(basis.reconstruct())
    return rho, basis, root_profile(TANGLE, basis)


def x_of_p(p, x_o: float = X_O):
    return 2 * np.asarray(p) - 1 + x_o


def p_of_x(x, x_o: float = X_O):
    return (np.asarray(x) + 1 - x_o) / 2


def _domain(x, x_o):
    u = np.asarray(x, dtype=float) - x_o
    if np.any(np.abs(u) > 1 + 1e-12):
        raise ValueError(f"x must lie in [{x_o - 1}, {x_o + 1}]")
    return np.clip(u, -1, 1)


def ghzw_flat_f(x, x_o: float = X_O):
    """Distance product of the flat triangle decomposition through axis point x."""
    u = _domain(x, x_o)
    root = np.sqrt(np.maximum((x_o**2 - 1) * (u**2 - 1), 0.0))
    return 2 * np.sqrt(u + 1) * np.sqrt(np.maximum(1 + x_o * u - root, 0.0)) * (root + 2 * x_o * u + 2)


def ghzw_flat_f_triangles(x, x_o: float = X_O):
    """Same product written through plane distance, pole distance and circumradii."""
    u = _domain(x, x_o)
    h = np.abs(np.asarray(x, dtype=float))
    pole = u + 1
    r_psi = np.sqrt(np.maximum(1 - u**2, 0.0))
    r_z = math.sqrt(1 - x_o**2)
    return (
        np.sqrt(h**2 + (r_psi - r_z) ** 2)
        * np.sqrt(pole**2 + r_psi**2)
        * (h**2 + r_psi**2 + r_z**2 + r_z * r_psi)
    )


def ghzw_normalization(profile: Optional[RootProfile] = None) -> float:
    if profile is None:
        profile = ghzw_build(0.5)[2]
    return profile.normalization_N


def convexity_breakpoint(x_o: float = X_O, samples: int = 4000) -> float:
    """First x > 0 where the second difference of f turns negative (bisection refined)."""
    hi_end = x_o + 1
    step = 1e-4

    def second(x):
        return float(ghzw_flat_f(x - step, x_o) - 2 * ghzw_flat_f(x, x_o) + ghzw_flat_f(x + step, x_o))

    xs = np.linspace(0.01, hi_end - 0.01, samples)
    vals = [second(x) for x in xs]
    for i in range(samples - 1):
        if vals[i] > 0 >= vals[i + 1]:
            lo, hi = xs[i], xs[i + 1]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if second(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
    return hi_end


def _lower_hull(xs: np.ndarray, ys: np.ndarray) -> list:
    hull: list = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


class AxisEnvelope:
    """Lower convex envelope of N f(x) on the axis, with f clamped to zero for x <= 0.

    Computed on a grid, then the bridge to the far pole is tightened by solving
    the tangency condition, so the envelope equals N f exactly where the flat
    decomposition is optimal.
    """

    def __init__(self, N: float, x_o: float = X_O, grid: int = DEFAULT_GRID):
        self.N, self.x_o = N, x_o
        lo, hi = x_o - 1, x_o + 1
        xs = np.linspace(lo, hi, grid)
        ys = self.flat(xs)
        hull = _lower_hull(xs, ys)
        self.knots_x = xs[hull]
        self.knots_y = ys[hull]
        self.tangent_x = None
        if len(hull) >= 2 and hull[-1] - hull[-2] > 1:
            self.tangent_x = self._tangent(xs[hull[-2] - 1], xs[min(hull[-2] + 1, grid - 1)], hi)

    def flat(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, self.N * ghzw_flat_f(x, self.x_o), 0.0)

    def _slope(self, x, eps=1e-7):
        return float(self.flat(x + eps) - self.flat(x - eps)) / (2 * eps)

    def _tangent(self, lo, hi, end):
        g_end = float(self.flat(end))

        def cond(x):
            return float(self.flat(x)) + self._slope(x) * (end - x) - g_end

        lo = max(lo, 1e-9)
        if cond(lo) * cond(hi) > 0:
            return 0.5 * (lo + hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if cond(lo) * cond(mid) <= 0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def __call__(self, x) -> float:
        x = float(x)
        if x <= 0:
            return 0.0
        end = self.x_o + 1
        if self.tangent_x is not None and x >= self.tangent_x:
            g_t = float(self.flat(self.tangent_x))
            g_end = float(self.flat(end))
            return g_t + (g_end - g_t) * (x - self.tangent_x) / (end - self.tangent_x)
        k = int(np.searchsorted(self.knots_x, x))
        k = min(max(k, 1), len(self.knots_x) - 1)
        x0, x1 = self.knots_x[k - 1], self.knots_x[k]
        y0, y1 = self.knots_y[k - 1], self.knots_y[k]
        chord = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        # f itself where it is convex (it lies below its chords there), the chord on bridges
        return min(float(self.flat(x)), float(chord))


_ENVELOPES: dict = {}


def axis_envelope(N: Optional[float] = None, x_o: float = X_O, grid: int = DEFAULT_GRID) -> AxisEnvelope:
    if N is None:
        N = ghzw_normalization()
    key = (round(N, 14), round(x_o, 14), grid)
    if key not in _ENVELOPES:
        _ENVELOPES[key] = AxisEnvelope(N, x_o, grid)
    return _ENVELOPES[key]


def ghzw_tangle_on_axis(x: float, grid: int = DEFAULT_GRID, N: Optional[float] = None, x_o: float = X_O) -> float:
    _domain(x, x_o)
    return axis_envelope(N, x_o, grid)(x)


def hull_tangent_point(grid: int = DEFAULT_GRID, N: Optional[float] = None, x_o: float = X_O) -> float:
    return axis_envelope(N, x_o, grid).tangent_x
