"""Sphere parametrizations, deterministic sample grids and interpolation.

Everything in the package lives in dimension 2 or 3.  Directions are
parametrized by one angle ``theta`` (n=2) or by a (polar, azimuth) pair
``(lat, lon)`` with lat in [0, pi] and lon in [0, 2pi) (n=3).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

TWO_PI = 2.0 * math.pi
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...


# ---------------------------------------------------------------------------
# direction parametrizations

def circle_grid(m: int) -> np.ndarray:
    """Uniform angle grid on [0, 2pi), ``m`` nodes."""
    return np.arange(m) * (TWO_PI / m)


def circle_point(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def circle_points(thetas: np.ndarray) -> np.ndarray:
    return np.column_stack([np.cos(thetas), np.sin(thetas)])


def angle_of(y) -> float:
    return math.atan2(y[1], y[0]) % TWO_PI


def sphere_point(lat: float, lon: float) -> np.ndarray:
    s = math.sin(lat)
    return np.array([s * math.cos(lon), s * math.sin(lon), math.cos(lat)])


def sphere_points(lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    s = np.sin(lats)
    return np.column_stack([s * np.cos(lons), s * np.sin(lons), np.cos(lats)])


def angles_of(y):
    """(lat, lon) of a nonzero 3-vector; lon in [0, 2pi)."""
    r = math.sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])
    lat = math.acos(max(-1.0, min(1.0, y[2] / r)))
    lon = math.atan2(y[1], y[0]) % TWO_PI
    return lat, lon


def fibonacci_sphere(m: int) -> np.ndarray:
    """Deterministic quasi-uniform unit vectors on S^2 (golden spiral)."""
    k = np.arange(m)
    z = 1.0 - (2.0 * k + 1.0) / m
    lon = (k * TWO_PI * GOLDEN) % TWO_PI
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([s * np.cos(lon), s * np.sin(lon), z])


def unit_sphere_samples(dim: int, m: int) -> np.ndarray:
    """Deterministic quasi-uniform sample of the Euclidean unit sphere."""
    if dim == 2:
        return circle_points(circle_grid(m))
    if dim == 3:
        return fibonacci_sphere(m)
    raise ValueError(f"dimension {dim} not supported (need 2 or 3)")


# ---------------------------------------------------------------------------
# 1-D minimization helpers

def golden_min(f, a: float, b: float, tol: float = 1e-11):
    """Golden-section minimum of ``f`` on [a, b]; returns (x, f(x))."""
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def newton_refine_min(f, x: float, h: float, iters: int = 3, lo=None, hi=None):
    """A few Newton steps on f' (central differences) to sharpen a minimum.

    Value-based searches stop at ~sqrt(eps) position accuracy; the
    derivative-based polish pushes the stationary point to ~1e-11.
    """
    for _ in range(iters):
        fp = (f(x + h) - f(x - h)) / (2.0 * h)
        fpp = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
        if fpp <= 0.0 or not math.isfinite(fpp):
            break
        step = fp / fpp
        if not math.isfinite(step):
            break
        xn = x - step
        if lo is not None:
            xn = max(lo, min(hi, xn))
        if abs(xn - x) < 1e-13:
            x = xn
            break
        x = xn
    return x


# ---------------------------------------------------------------------------
# periodic cubic interpolation on the circle

class PeriodicCubic:
    """Periodic cubic interpolant of values on a uniform angle grid.

    Coefficients are extracted once from a periodic cubic spline; scalar
    evaluation is then a table lookup plus a Horner step, fast enough for
    inner loops.
    """

    __slots__ = ("m", "step", "offset", "grid", "values", "_c", "_flat")

    def __init__(self, values, offset: float = 0.0):
        values = np.asarray(values, dtype=float)
        m = values.shape[0]
        if m < 8:
            raise ValueError("need at least 8 nodes on the circle")
        self.m = m
        self.step = TWO_PI / m
        self.offset = float(offset)
        self.grid = self.offset + np.arange(m) * self.step
        self.values = values
        x = np.arange(m + 1) * self.step
        v = np.concatenate([values, values[:1]])
        sp = CubicSpline(x, v, bc_type="periodic")
        self._c = np.ascontiguousarray(sp.c)  # (4, m), local coordinate t - x[j]
        self._flat = [tuple(self._c[:, j]) for j in range(m)]

    def _local(self, theta: float):
        t = (theta - self.offset) % TWO_PI
        j = int(t / self.step)
        if j >= self.m:
            j = self.m - 1
        return j, t - j * self.step

    def at(self, theta: float) -> float:
        j, u = self._local(theta)
        c3, c2, c1, c0 = self._flat[j]
        return ((c3 * u + c2) * u + c1) * u + c0

    def deriv_at(self, theta: float) -> float:
        j, u = self._local(theta)
        c3, c2, c1, _ = self._flat[j]
        return (3.0 * c3 * u + 2.0 * c2) * u + c1

    def second_deriv_at(self, theta: float) -> float:
        j, u = self._local(theta)
        c3, c2, _, _ = self._flat[j]
        return 6.0 * c3 * u + 2.0 * c2

    def __call__(self, thetas):
        thetas = np.asarray(thetas, dtype=float)
        t = (thetas - self.offset) % TWO_PI
        j = np.minimum((t / self.step).astype(int), self.m - 1)
        u = t - j * self.step
        c = self._c
        return ((c[0, j] * u + c[1, j]) * u + c[2, j]) * u + c[3, j]

    def extremum(self, kind: str = "min", tol: float = 1e-11):
        """Polished extremum over the circle; returns (theta, value)."""
        sign = 1.0 if kind == "min" else -1.0
        vals = sign * self.values
        j = int(np.argmin(vals))
        theta0 = self.grid[j]
        f = (lambda t: self.at(t)) if kind == "min" else (lambda t: -self.at(t))
        a, b = theta0 - self.step, theta0 + self.step
        x, fx = golden_min(f, a, b, tol)
        x = newton_refine_min(f, x, 1e-6, lo=a, hi=b)
        fx = f(x)
        return x % TWO_PI, (fx if kind == "min" else -fx)


# ---------------------------------------------------------------------------
# latitude-longitude tables on S^2

class LatLongTable:
    """Bicubic interpolant of values on a latitude-longitude grid.

    Longitude is wrapped periodically; the pole rows hold a single value
    each (the table is built from data that is constant on them).
    """

    __slots__ = ("n_lat", "n_lon", "lats", "lons", "values", "_sp")

    PAD = 3

    def __init__(self, values, lats=None):
        values = np.asarray(values, dtype=float)
        n_lat, n_lon = values.shape
        if n_lat < 5 or n_lon < 8:
            raise ValueError("latitude-longitude grid too coarse")
        self.n_lat, self.n_lon = n_lat, n_lon
        self.lats = np.linspace(0.0, math.pi, n_lat) if lats is None else np.asarray(lats)
        self.lons = circle_grid(n_lon)
        self.values = values
        p = self.PAD
        lon_ext = np.concatenate([self.lons[-p:] - TWO_PI, self.lons, self.lons[:p] + TWO_PI])
        v_ext = np.concatenate([values[:, -p:], values, values[:, :p]], axis=1)
        self._sp = RectBivariateSpline(self.lats, lon_ext, v_ext, kx=3, ky=3, s=0)

    def at(self, lat: float, lon: float) -> float:
        lat = min(max(lat, 0.0), math.pi)
        return float(self._sp(lat, lon % TWO_PI, grid=False))

    def partials_at(self, lat: float, lon: float):
        lat = min(max(lat, 0.0), math.pi)
        lon = lon % TWO_PI
        d_lat = float(self._sp(lat, lon, dx=1, grid=False))
        d_lon = float(self._sp(lat, lon, dy=1, grid=False))
        return d_lat, d_lon

    def __call__(self, lats, lons):
        lats = np.clip(np.asarray(lats, dtype=float), 0.0, math.pi)
        lons = np.asarray(lons, dtype=float) % TWO_PI
        return self._sp(lats, lons, grid=False)

    def extremum(self, kind: str = "min"):
        """Polished extremum over the sphere; returns ((lat, lon), value)."""
        sign = 1.0 if kind == "min" else -1.0
        flat = int(np.argmin(sign * self.values))
        i, j = divmod(flat, self.n_lon)
        lat0, lon0 = self.lats[i], self.lons[j]
        f = lambda p: sign * self.at(p[0], p[1])
        p, fp = refine_on_sphere(f, (lat0, lon0),
                                 max(self.lats[1] - self.lats[0], self.lons[1]))
        return p, sign * fp


def refine_on_sphere(f, p0, radius, tol: float = 1e-11, rounds: int = 60):
    """Local minimization of ``f(lat, lon)`` by shrinking quadratic fits.

    Safeguarded pattern search: fit a paraboloid on a 3x3 stencil, clamp the
    step to the stencil radius, shrink.  Robust for the merely-Lipschitz
    objectives that arise from C0 norms.
    """
    lat, lon = p0
    h = radius
    fbest = f((lat, lon))
    for _ in range(rounds):
        if h < tol:
            break
        pts = []
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                pts.append((lat + di * h, lon + dj * h))
        vals = [f(p) for p in pts]
        k = int(np.argmin(vals))
        if vals[k] < fbest:
            lat, lon = pts[k]
            fbest = vals[k]
            if k == 4:
                h *= 0.5
        else:
            h *= 0.5
    return (lat, lon), fbest
