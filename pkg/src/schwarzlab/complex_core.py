"""Shared numerical machinery.

Contour quadrature, argument-principle counting, Newton identities,
Sylvester discriminants and predictor-corrector continuation of polynomial
roots along paths.  Also hosts the holomorphic-function container
:class:`AnalyticModel` used by every other module, plus a few planar
geometry helpers (winding numbers, local inversion of a conformal map).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial import cKDTree

from .errors import (
    ContourZeroError,
    DomainError,
    NearBranchPointError,
    QuadratureError,
    ResolutionError,
)
from .tolerances import DEFAULTS

ComplexFn = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Analytic models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticModel:
    """A holomorphic function with a declared disk of analyticity.

    ``kind`` is ``"series"`` (coefficients of a power series about
    ``center``) or ``"black-box"`` (a vectorised evaluator).  Series models
    refuse evaluation outside the open disk, or outside the closed disk when
    ``closed`` is set.  Black-box models trust their evaluator; the disk is
    advisory and used for derivative step sizes.
    """

    kind: str
    center: complex
    radius: float
    coefficients: np.ndarray | None = None
    evaluator: ComplexFn | None = None
    derivative_evaluator: ComplexFn | None = None
    closed: bool = False
    name: str = ""

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("radius must be positive")
        if self.kind == "series":
            if self.coefficients is None:
                raise ValueError("series model needs coefficients")
            c = np.asarray(self.coefficients, dtype=complex)
            if c.ndim != 1 or c.size == 0:
                raise ValueError("coefficients must be a non-empty 1-d list")
            if not np.all(np.isfinite(c)):
                raise ValueError("series coefficients must be finite")
            object.__setattr__(self, "coefficients", c)
        elif self.kind == "black-box":
            if self.evaluator is None:
                raise ValueError("black-box model needs an evaluator")
        else:
            raise ValueError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "center", complex(self.center))

    # constructors -------------------------------------------------------
    @classmethod
    def series(cls, coefficients, center=0.0, radius=np.inf, closed=False, name=""):
        radius = float(radius) if np.isfinite(radius) else 1e300
        return cls("series", center, radius, coefficients=coefficients, closed=closed, name=name)

    @classmethod
    def black_box(cls, evaluator, center=0.0, radius=1.0, derivative=None, name=""):
        return cls(
            "black-box",
            center,
            float(radius),
            evaluator=evaluator,
            derivative_evaluator=derivative,
            name=name,
        )

    @classmethod
    def polynomial(cls, coefficients, name=""):
        return cls.series(coefficients, 0.0, np.inf, name=name)

    # evaluation ---------------------------------------------------------
    @property
    def truncation_order(self) -> int:
        if self.kind == "series":
            return len(self.coefficients) - 1
        return 0

    def __call__(self, z):
        scalar = np.isscalar(z)
        zz = np.asarray(z, dtype=complex)
        if self.kind == "series":
            d = np.abs(zz - self.center)
            bad = d > self.radius * (1 + 1e-12) if self.closed else d >= self.radius
            if np.any(bad):
                first = zz.reshape(-1)[np.argmax(bad.reshape(-1))]
                raise DomainError(
                    f"series model {self.name or ''} evaluated at {complex(first)} "
                    f"outside |z-{self.center}| < {self.radius}"
                )
            out = npoly.polyval(zz - self.center, self.coefficients)
        else:
            out = np.asarray(self.evaluator(zz), dtype=complex)
            if out.shape != zz.shape:
                out = np.broadcast_to(out, zz.shape).copy()
        return complex(out) if scalar else out

    def derivative(self) -> "AnalyticModel":
        if self.kind == "series":
            c = self.coefficients
            dc = npoly.polyder(c) if c.size > 1 else np.zeros(1, complex)
            return AnalyticModel.series(dc, self.center, self.radius, self.closed, self.name + "'")
        if self.derivative_evaluator is not None:
            return AnalyticModel.black_box(
                self.derivative_evaluator, self.center, self.radius, name=self.name + "'"
            )
        h = 1e-4 * min(self.radius, 1.0)
        f = self.evaluator
        return AnalyticModel.black_box(
            lambda z: cauchy_derivative(f, z, h), self.center, self.radius, name=self.name + "'"
        )


def cauchy_derivative(f: ComplexFn, z, h: float, n: int = 8) -> np.ndarray:
    """First derivative from ``n`` samples on a circle of radius ``h``.

    Exact for polynomials of degree < n + 1; error O(h^n) otherwise.
    """
    zz = np.asarray(z, dtype=complex)
    w = np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.asarray(f(zz[..., None] + h * w), dtype=complex)
    return np.sum(vals * np.conj(w), axis=-1) / (n * h)


def compose(outer: AnalyticModel, inner: AnalyticModel, center=None, radius=None, name="") -> AnalyticModel:
    """Black-box model of ``outer(inner(z))`` with chain-rule derivative."""
    do, di = outer.derivative(), inner.derivative()
    return AnalyticModel.black_box(
        lambda z: outer(inner(z)),
        inner.center if center is None else center,
        inner.radius if radius is None else radius,
        derivative=lambda z: do(inner(z)) * di(z),
        name=name,
    )


# ---------------------------------------------------------------------------
# Circles and quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Circle:
    """Counterclockwise circle sampled at equispaced angles."""

    center: complex
    radius: float
    n: int = DEFAULTS.quad_samples

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("circle radius must be positive")
        if self.n < 16:
            raise ValueError("circle needs at least 16 samples")
        object.__setattr__(self, "center", complex(self.center))

    def points(self) -> np.ndarray:
        return self.center + self.radius * np.exp(2j * np.pi * np.arange(self.n) / self.n)

    def doubled(self) -> "Circle":
        return Circle(self.center, self.radius, 2 * self.n)


def _sample(f: ComplexFn, z: np.ndarray, label: str) -> np.ndarray:
    vals = np.asarray(f(z), dtype=complex)
    if vals.shape != z.shape:
        vals = np.broadcast_to(vals, z.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise QuadratureError(f"{label}: non-finite value at sample {i} (z={z[i]})")
    return vals


def contour_integrate(f: ComplexFn, c: Circle) -> complex:
    """Trapezoidal approximation of (1/2 pi i) times the contour integral."""
    z = c.points()
    vals = _sample(f, z, "contour_integrate")
    return complex(np.mean(vals * (z - c.center)))


def _log_derivative_moments(f, df, c: Circle, powers: Sequence[int], tol=DEFAULTS):
    z = c.points()
    fz = _sample(f, z, "count_zeros(f)")
    scale = max(1.0, float(np.max(np.abs(fz))))
    m = float(np.min(np.abs(fz)))
    if m <= tol.contour_zero * scale:
        i = int(np.argmin(np.abs(fz)))
        raise ContourZeroError(f"|f| = {m:.3e} on the contour near z={z[i]}")
    ratio = _sample(df, z, "count_zeros(df)") / fz * (z - c.center)
    return [complex(np.mean(ratio * z**p)) for p in powers]


def count_zeros(f: ComplexFn, df: ComplexFn, c: Circle, tol=DEFAULTS) -> int:
    """Number of zeros of ``f`` inside ``c`` by the argument principle.

    The sample count is doubled until the value is within
    ``tol.integrality`` of an integer or ``tol.quad_max_samples`` is hit.
    """
    circ = c
    while True:
        (v,) = _log_derivative_moments(f, df, circ, [0], tol)
        k = round(v.real)
        if abs(v - k) <= tol.integrality:
            return int(k)
        if circ.n * 2 > tol.quad_max_samples:
            raise ResolutionError(f"argument principle gave {v:.4f} with {circ.n} samples")
        circ = circ.doubled()


def power_sums(f: ComplexFn, df: ComplexFn, c: Circle, m_max: int, tol=DEFAULTS) -> list[complex]:
    """Power sums s_m = sum of w_j**m over the zeros inside ``c``, m = 1..m_max."""
    count_zeros(f, df, c, tol)  # raises on an unclean count
    return _log_derivative_moments(f, df, c, range(1, m_max + 1), tol)


# ---------------------------------------------------------------------------
# Monic polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonicPoly:
    """w**k + a_{k-1} w**(k-1) + ... + a_0; ``coefficients`` = (a_0, ..., a_{k-1})."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if c.ndim != 1 or c.size < 1:
            raise ValueError("a monic polynomial needs degree >= 1")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size

    def full(self) -> np.ndarray:
        """Coefficients in ascending order including the leading 1."""
        return np.append(self.coefficients, 1.0 + 0j)

    def __call__(self, w):
        if isinstance(w, (complex, float, int, np.number)):
            # scalar Horner: continuation calls this once per Newton step
            acc = 1.0 + 0j
            for a in self.coefficients[::-1].tolist():
                acc = acc * w + a
            return acc
        return npoly.polyval(w, self.full())

    def derivative_at(self, w):
        if isinstance(w, (complex, float, int, np.number)):
            c = self.coefficients.tolist()
            k = len(c)
            acc = complex(k)
            for j in range(k - 1, 0, -1):
                acc = acc * w + j * c[j]
            return acc
        return npoly.polyval(w, npoly.polyder(self.full()))

    def roots(self) -> np.ndarray:
        if self.degree == 1:
            return np.array([-self.coefficients[0]])
        return np.roots(self.full()[::-1])

    @classmethod
    def from_roots(cls, roots) -> "MonicPoly":
        full = npoly.polyfromroots(np.asarray(roots, dtype=complex))
        return cls(full[:-1] / full[-1])


def newton_to_monic(s: Sequence[complex], k: int) -> MonicPoly:
    """Monic degree-k polynomial whose roots have power sums s_1..s_k."""
    s = np.asarray(s, dtype=complex)
    if s.size < k:
        raise ValueError("need at least k power sums")
    e = np.zeros(k + 1, dtype=complex)
    e[0] = 1.0
    for m in range(1, k + 1):
        acc = 0j
        for i in range(1, m + 1):
            acc += (-1) ** (i - 1) * e[m - i] * s[i - 1]
        e[m] = acc / m
    # a_{k-j} = (-1)^j e_j
    a = np.empty(k, dtype=complex)
    for j in range(1, k + 1):
        a[k - j] = (-1) ** j * e[j]
    return MonicPoly(a)


def sylvester_matrix(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Sylvester matrix of two polynomials given highest-degree-first."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    M = np.zeros((size, size), dtype=complex)
    for i in range(n):
        M[i, i : i + m + 1] = p
    for i in range(m):
        M[n + i, i : i + n + 1] = q
    return M


def resultant(p: np.ndarray, q: np.ndarray) -> complex:
    if len(p) - 1 + len(q) - 1 == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(sylvester_matrix(p, q)))


def discriminant(p: MonicPoly) -> complex:
    """disc(p) = (-1)^{k(k-1)/2} Res(p, p') for monic p."""
    k = p.degree
    full = p.full()[::-1]
    der = np.polyder(full)
    return (-1) ** (k * (k - 1) // 2) * resultant(full, der)


# ---------------------------------------------------------------------------
# Paths and continuation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    """Polygonal path through ``waypoints``; ``max_step`` caps continuation steps."""

    waypoints: np.ndarray
    max_step: float | None = None
    closed: bool = False

    def __post_init__(self):
        w = np.asarray(self.waypoints, dtype=complex).reshape(-1)
        if w.size < 2:
            raise ValueError("a path needs at least two waypoints")
        if np.any(np.abs(np.diff(w)) == 0):
            raise ValueError("consecutive waypoints must be distinct")
        if self.closed and w[0] != w[-1]:
            raise ValueError("closed path must end at its first waypoint")
        if self.max_step is not None and not (self.max_step > 0):
            raise ValueError("max_step must be positive")
        object.__setattr__(self, "waypoints", w)

    @classmethod
    def segment(cls, a, b, max_step=None) -> "Path":
        return cls(np.array([a, b], dtype=complex), max_step)

    @classmethod
    def circle(cls, center, radius, n=64, start_angle=0.0, turns=1) -> "Path":
        t = start_angle + 2 * np.pi * turns * np.arange(n * turns + 1) / n
        pts = center + radius * np.exp(1j * t)
        pts[-1] = pts[0]
        return cls(pts, closed=True)

    @property
    def start(self) -> complex:
        return complex(self.waypoints[0])

    @property
    def end(self) -> complex:
        return complex(self.waypoints[-1])

    def concat(self, other: "Path") -> "Path":
        if abs(self.end - other.start) > 1e-14:
            raise ValueError("paths are not composable")
        w = np.concatenate([self.waypoints, other.waypoints[1:]])
        steps = [s for s in (self.max_step, other.max_step) if s is not None]
        return Path(w, min(steps) if steps else None, closed=bool(w[0] == w[-1]))

    def reversed(self) -> "Path":
        return Path(self.waypoints[::-1], self.max_step, self.closed)

    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.waypoints))))


PencilFn = Callable[[complex], MonicPoly]


def _dw_dz(P: PencilFn, z: complex, w: complex, p: MonicPoly) -> complex:
    hz = 1e-7 * (1.0 + abs(z))
    pz = (P(z + hz)(w) - P(z - hz)(w)) / (2 * hz)
    pw = p.derivative_at(w)
    if pw == 0:
        return 0j
    return -pz / pw


def _separation(p: MonicPoly, w: complex) -> float:
    if p.degree == 1:
        return np.inf
    if p.degree == 2:
        a0, a1 = p.coefficients
        other = -a1 - w
        return float(abs(other - w))
    r = p.roots()
    d = np.sort(np.abs(r - w))
    return float(d[1])


def continue_root(
    P: PencilFn,
    start: tuple[complex, complex],
    path: Path,
    tol=DEFAULTS,
    return_trace: bool = False,
):
    """Analytically continue a root of ``P(z)`` along ``path``.

    ``P`` maps z to the monic slice ``P(z, .)``.  Tangent predictor, Newton
    corrector in w (at most ``tol.newton_max_iter`` iterations), step halving
    on failure or on a suspected sheet jump.  Raises
    :class:`NearBranchPointError` when the step drops below
    ``tol.step_floor`` or two roots come closer than ``tol.branch_separation``.
    """
    z, w = complex(start[0]), complex(start[1])
    if abs(path.start - z) > 1e-12 * (1 + abs(z)):
        raise ValueError("path must start at the start point")
    p = P(z)
    scale = 1.0 + float(np.max(np.abs(p.full())))
    if abs(p(w)) > 1e-8 * scale * (1 + abs(w)) ** p.degree:
        raise ValueError(f"start value is not a root: |P(z0,w0)| = {abs(p(w)):.3e}")
    sep = _separation(p, w)
    trace = [(z, w)]
    wp = path.waypoints
    for a, b in zip(wp[:-1], wp[1:]):
        a, b = complex(a), complex(b)
        seg = abs(b - a)
        h_init = seg / 16
        if path.max_step is not None:
            h_init = min(h_init, path.max_step)
        h = h_init
        s = 0.0
        while s < seg * (1 - 1e-15):
            step = min(h, seg - s)
            z1 = a + (b - a) * ((s + step) / seg) if s + step < seg else b
            w_pred = w + _dw_dz(P, z, w, p) * (z1 - z)
            p1 = P(z1)
            w1 = w_pred
            ok = False
            for _ in range(tol.newton_max_iter):
                d = p1.derivative_at(w1)
                if d == 0 or not np.isfinite(d):
                    break
                dw = p1(w1) / d
                w1 = w1 - dw
                if abs(dw) <= tol.newton_tol * (1 + abs(w1)):
                    ok = True
                    break
            if ok:
                sep1 = _separation(p1, w1)
                if sep1 < tol.branch_separation:
                    raise NearBranchPointError(
                        f"branches within {sep1:.2e} near z={z1}", location=z1
                    )
                if abs(w1 - w_pred) > 0.3 * min(sep, sep1) or abs(w1 - w) > 0.5 * min(sep, sep1):
                    ok = False
            if not ok:
                h = step / 2
                if h < tol.step_floor:
                    raise NearBranchPointError(
                        f"continuation step fell below {tol.step_floor} near z={z}", location=z
                    )
                continue
            z, w, p, sep = z1, w1, p1, sep1
            s += step
            trace.append((z, w))
            h = min(2 * step, seg)
    if return_trace:
        return w, np.array(trace)
    return w


# ---------------------------------------------------------------------------
# Planar geometry helpers
# ---------------------------------------------------------------------------


def winding_numbers(polygon: np.ndarray, points: np.ndarray, chunk: int = 2_000_000) -> np.ndarray:
    """Winding number of the closed polygon around each point.

    The polygon is closed implicitly (last vertex joins the first).
    """
    poly = np.asarray(polygon, dtype=complex).reshape(-1)
    if poly[0] != poly[-1]:
        poly = np.append(poly, poly[0])
    pts = np.asarray(points, dtype=complex).reshape(-1)
    out = np.empty(pts.size)
    per = max(1, chunk // poly.size)
    for i in range(0, pts.size, per):
        p = pts[i : i + per, None]
        d = poly[None, :] - p
        ang = np.angle(d[:, 1:] / d[:, :-1])
        out[i : i + per] = np.sum(ang, axis=1) / (2 * np.pi)
    return out


def distance_to_polyline(polyline: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to a polyline (open)."""
    import shapely

    line = shapely.LineString(np.c_[polyline.real, polyline.imag])
    pts = np.asarray(points, dtype=complex).reshape(-1)
    geoms = shapely.points(np.c_[pts.real, pts.imag])
    return shapely.distance(geoms, line)


@dataclass
class LocalInverse:
    """Invert an analytic map near known (preimage, image) pairs.

    Newton iteration on ``forward(x) = z`` seeded from the preimage whose
    image is nearest to ``z``.  ``accept`` optionally restricts admissible
    preimages (e.g. the closed upper half-disk).
    """

    forward: AnalyticModel
    seeds_pre: np.ndarray
    seeds_img: np.ndarray | None = None
    accept: Callable[[np.ndarray], np.ndarray] | None = None
    max_iter: int = 60
    _tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        self.seeds_pre = np.asarray(self.seeds_pre, dtype=complex).reshape(-1)
        if self.seeds_img is None:
            self.seeds_img = self.forward(self.seeds_pre)
        self.seeds_img = np.asarray(self.seeds_img, dtype=complex).reshape(-1)
        self._tree = cKDTree(np.c_[self.seeds_img.real, self.seeds_img.imag])
        self._dfwd = self.forward.derivative()

    def __call__(self, z):
        scalar = np.isscalar(z)
        zz = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1)
        k = min(6, self.seeds_pre.size)
        _, idx = self._tree.query(np.c_[zz.real, zz.imag], k=k)
        idx = idx.reshape(zz.size, k)
        out = np.full(zz.size, np.nan + 0j)
        todo = np.ones(zz.size, bool)
        for j in range(k):
            if not np.any(todo):
                break
            sel = np.nonzero(todo)[0]
            x = self._newton(self.seeds_pre[idx[sel, j]], zz[sel])
            good = np.isfinite(x)
            good &= np.abs(self.forward(np.where(good, x, 0)) - zz[sel]) <= 1e-11 * (1 + np.abs(zz[sel]))
            if self.accept is not None:
                good &= self.accept(np.where(good, x, 0))
            out[sel[good]] = x[good]
            todo[sel[good]] = False
        if np.any(todo):
            i = int(np.nonzero(todo)[0][0])
            raise DomainError(f"local inversion failed at z={zz[i]}")
        out = out.reshape(np.shape(z)) if not scalar else out[0]
        return complex(out) if scalar else out

    def _newton(self, x0, z):
        x = x0.copy()
        f = self.forward
        df = self._dfwd
        # damped homotopy from the seed image to the target for robustness
        z0 = f(x)
        for lam in (0.25, 0.5, 0.75, 1.0):
            target = z0 + lam * (z - z0)
            for _ in range(self.max_iter):
                r = f(x) - target
                d = df(x)
                with np.errstate(all="ignore"):
                    dx = r / d
                dx = np.where(np.isfinite(dx), dx, 0)
                x = x - dx
                if np.all(np.abs(dx) <= 1e-15 * (1 + np.abs(x))):
                    break
        with np.errstate(all="ignore"):
            res = np.abs(f(x) - z)
        return np.where(np.isfinite(res), x, np.nan)
