"""Positive harmonic pairs vanishing on an arc and the induced Schwarz functions.

Harmonic functions on the upper half-disk are finite sums
u(z) = sum c_n Im(z^n).  Each term vanishes on the real diameter and is
odd under conjugation, so the odd reflection u* is the same formula on the
whole disk and the normal derivative on the diameter is exact:
u*_y(x, 0) = sum n c_n x^(n-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import numpy.polynomial.chebyshev as cheb
import numpy.polynomial.polynomial as npoly

from .complex_core import AnalyticModel, LocalInverse
from .errors import (
    CriticalPointError,
    DomainError,
    FactorizationError,
    PreconditionError,
    SingularRatioError,
)
from .schwarz import (
    BoundaryArc,
    ClassificationReport,
    OmegaSampling,
    SchwarzCandidate,
    build_cusp_domain,
    local_radii,
    phi_tests,
)
from .tolerances import DEFAULTS, Tolerances


@dataclass(frozen=True)
class HalfDiskHarmonic:
    """u(z) = sum_{n>=1} c_n Im(z^n); ``coefficients[0]`` is c_1."""

    coefficients: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.coefficients)
        if not 1 <= len(c) <= 64:
            raise ValueError("between 1 and 64 coefficients are supported")
        object.__setattr__(self, "coefficients", c)

    @property
    def N(self) -> int:
        return len(self.coefficients)

    def analytic(self, z):
        """F(z) = sum c_n z^n, so u = Im F."""
        return npoly.polyval(np.asarray(z, dtype=complex), np.r_[0.0, self.coefficients])

    def __call__(self, z):
        out = np.imag(self.analytic(z))
        return float(out) if np.isscalar(z) else out

    def y_derivative_on_axis(self, x):
        """u_y(x, 0) = Re F'(x) = sum n c_n x^(n-1)."""
        d = npoly.polyder(np.r_[0.0, self.coefficients])
        return npoly.polyval(np.asarray(x, dtype=float), d)

    def min_on_half_disk(self, n_r: int = 200, n_t: int = 100) -> float:
        r = (np.arange(n_r) + 0.5) / n_r
        t = np.pi * (np.arange(n_t) + 0.5) / n_t
        R, Tt = np.meshgrid(r, t)
        return float(np.min(self(R * np.exp(1j * Tt))))

    def require_positive(self):
        m = self.min_on_half_disk()
        if not m > 0:
            raise PreconditionError(f"harmonic function is not positive on the upper half-disk (min {m:.3e})")

    def scaled(self, lam: float) -> "HalfDiskHarmonic":
        return HalfDiskHarmonic(tuple(lam * c for c in self.coefficients))

    def to_json(self) -> dict:
        return {"format_version": 1, "coefficients": list(self.coefficients)}

    @classmethod
    def from_json(cls, d: dict) -> "HalfDiskHarmonic":
        if d.get("format_version") != 1:
            raise ValueError("unsupported harmonic format_version")
        return cls(tuple(d["coefficients"]))


def reflect_odd(u: HalfDiskHarmonic) -> Callable:
    """u*(z) = u(z) for Im z > 0, 0 on the diameter, -u(conj z) below."""

    def ustar(z):
        zz = np.asarray(z, dtype=complex)
        out = np.where(zz.imag > 0, u(zz), -u(np.conj(zz)))
        out = np.where(zz.imag == 0, 0.0, out)
        return float(out) if np.isscalar(z) else out

    return ustar


def vertical_limit(f: Callable, x0: float, h: float = 1e-3) -> float:
    """lim_{y->0+} f(x0 + i y) by Richardson from y = h, 2h, 4h (error O(h^3))."""
    f1, f2, f4 = (float(f(complex(x0, k * h))) for k in (1, 2, 4))
    return (8 * f1 - 6 * f2 + f4) / 3


@dataclass
class HarnackReport:
    x0: float
    c_low: float
    c_high: float
    passed: bool
    single_constant: bool
    normal_derivative: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def harnack_check(v: HalfDiskHarmonic, x0: float = 0.0, ygrid=None) -> HarnackReport:
    """Constants in c y/(2-y) <= v(x0, y) <= c (2-y)/y on the grid.

    c_low is the largest constant for the lower bound and c_high the
    smallest for the upper one.  ``single_constant`` says one c serves both.
    """
    if not -1 < x0 < 1:
        raise PreconditionError("x0 must lie inside the diameter")
    v.require_positive()
    y = np.linspace(0, 1, 1002)[1:-1] if ygrid is None else np.asarray(ygrid, dtype=float)
    if np.any((y <= 0) | (y >= 1)):
        raise ValueError("y-grid must lie in (0, 1)")
    vals = v(x0 + 1j * y)
    c_low = float(np.min(vals * (2 - y) / y))
    c_high = float(np.max(vals * y / (2 - y)))
    slope = vertical_limit(lambda z: v(z) / z.imag, x0)
    passed = c_low > 0 and np.isfinite(c_high) and slope > 0
    return HarnackReport(x0, c_low, c_high, bool(passed), bool(c_high <= c_low), slope)


@dataclass
class RatioModel:
    """h = u*_y / v*_y on an interval and its polynomial extension r."""

    interval: tuple
    xs: np.ndarray
    h: np.ndarray
    coefficients: np.ndarray
    residual: float
    proportional: bool
    relative_variance: float

    def __call__(self, z):
        out = npoly.polyval(np.asarray(z, dtype=complex), self.coefficients)
        return complex(out) if np.isscalar(z) else out

    def derivative(self, z):
        return npoly.polyval(np.asarray(z, dtype=complex), npoly.polyder(self.coefficients))

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "coefficients": [float(c) for c in self.coefficients],
            "residual": self.residual,
            "proportional": self.proportional,
            "relative_variance": self.relative_variance,
        }


def normal_derivative_ratio(u: HalfDiskHarmonic, v: HalfDiskHarmonic, interval=(-0.5, 0.5), n: int = 64,
                            tol: Tolerances = DEFAULTS) -> RatioModel:
    """h(x) = u_y(x, 0)/v_y(x, 0) at Chebyshev points, fitted by a real polynomial.

    The fit degree grows until held-out midpoints are matched to the fit
    tolerance.  A nearly constant h is flagged as a proportional pair.
    """
    u.require_positive()
    v.require_positive()
    a, b = interval
    k = np.arange(n)
    xs = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * (k + 0.5) / n)[::-1]
    mids = 0.5 * (xs[1:] + xs[:-1])

    def h_at(x):
        vy = v.y_derivative_on_axis(x)
        if np.any(np.abs(vy) < tol.singular_ratio):
            bad = x[np.argmin(np.abs(vy))]
            raise SingularRatioError(f"v_y vanishes near x = {bad:.6g}")
        return u.y_derivative_on_axis(x) / vy

    h = h_at(xs)
    hm = h_at(mids)
    t = (2 * xs - (a + b)) / (b - a)
    tm = (2 * mids - (a + b)) / (b - a)
    res, cc = np.inf, None
    for deg in range(0, min(n - 1, 40)):
        cc = cheb.chebfit(t, h, deg)
        res = float(np.max(np.abs(cheb.chebval(tm, cc) - hm)))
        if res <= tol.ratio_fit_residual:
            break
    # back to the power basis in x
    p_t = cheb.cheb2poly(cc)
    shift = np.array([-(a + b) / (b - a), 2 / (b - a)])
    coeffs = np.zeros(1)
    term = np.ones(1)
    for c in p_t:
        coeffs = npoly.polyadd(coeffs, c * term)
        term = npoly.polymul(term, shift)
    var = float(np.var(h) / max(np.mean(h) ** 2, 1e-300))
    return RatioModel((a, b), xs, h, np.real(coeffs), res, var < tol.h_variance, var)


def analytic_sqrt_factor(r: RatioModel) -> AnalyticModel:
    """a = exp(log(r)/2) with the principal logarithm; a > 0 at the midpoint."""
    a, b = r.interval
    x = np.linspace(a, b, 2001)
    vals = np.real(r(x))
    if np.min(vals) <= 0:
        raise FactorizationError(f"r is not positive on the interval (min {np.min(vals):.3e})")

    def ev(z):
        return np.exp(0.5 * np.log(np.asarray(r(z), dtype=complex)))

    def dev(z):
        return 0.5 * ev(z) * r.derivative(z) / np.asarray(r(z), dtype=complex)

    return AnalyticModel.black_box(ev, 0.5 * (a + b), 0.5 * (b - a), derivative=dev, name="a")


def build_R(r: RatioModel, inverse: Callable | None, arc: BoundaryArc, A: AnalyticModel | None = None):
    """R = r o phi^{-1}; returns ``(R, residual)`` with the arc residual |R - |A|^2|.

    ``inverse`` is phi^{-1}; ``None`` means phi is the identity.
    """
    inv = (lambda z: np.asarray(z, dtype=complex)) if inverse is None else inverse

    def R_eval(z):
        try:
            return r(inv(z))
        except DomainError as e:
            raise DomainError(f"inversion failed while evaluating R: {e}")

    R = AnalyticModel.black_box(R_eval, complex(np.mean(arc.samples)), 10 * arc.diameter(), name="R")
    residual = None
    if A is not None:
        residual = float(np.max(np.abs(R(arc.samples) - np.abs(A(arc.samples)) ** 2)))
    return R, residual


def _inverse_of(A: AnalyticModel, arc: BoundaryArc, omega: OmegaSampling | None) -> LocalInverse:
    pre = arc.samples if omega is None else np.concatenate([arc.samples, omega.points])
    return LocalInverse(A, pre)


def uv_schwarz(R: AnalyticModel, A: AnalyticModel, arc: BoundaryArc, omega: OmegaSampling | None = None):
    """S(z) = R(A^{-1}(z))/z on A(Omega); returns ``(candidate, image arc)``."""
    z0 = arc.base_point
    dA = A.derivative()
    scale = 1 + abs(A(z0))
    if abs(dA(z0)) < 1e-10 * scale:
        raise CriticalPointError(f"A'(zeta0) = 0 at zeta0 = {z0}: excluded point")
    img = np.asarray(A(arc.samples), dtype=complex)
    pts = img if omega is None else np.concatenate([img, A(omega.points)])
    if np.min(np.abs(pts)) < 1e-12 * scale:
        raise DomainError("0 lies in the closure of A(Omega)")
    inv = _inverse_of(A, arc, omega)

    def S(z):
        z = np.asarray(z, dtype=complex)
        return R(inv(z)) / z

    model = AnalyticModel.black_box(S, complex(np.mean(img)), 10 * float(np.ptp(np.abs(img)) + 1), name="uv-schwarz")
    image_arc = BoundaryArc(img, base_index=arc.base_index, orientation=arc.orientation, closed=arc.closed)
    return SchwarzCandidate(model), image_arc


def derivative_growth(A: Callable, arc: BoundaryArc, frac: float = 0.3, min_points: int = 8) -> dict:
    """Log-log slope of |A(zeta) - A(zeta0)| / |zeta - zeta0| against distance.

    About 0 when A is analytic with A'(zeta0) != 0, about 1 at a critical
    point, and negative when A' blows up at zeta0.
    """
    s = arc.samples
    z0 = arc.base_point
    d = np.abs(s - z0)
    pick = (d > 0) & (d < frac * arc.diameter())
    if np.sum(pick) < min_points:
        return {"slope": 0.0, "points": int(np.sum(pick))}
    zs = s[pick]
    q = np.abs(np.asarray(A(zs)) - A(z0)) / d[pick]
    ok = q > 0
    slope = float(np.polyfit(np.log(d[pick][ok]), np.log(q[ok]), 1)[0])
    return {"slope": slope, "points": int(np.sum(ok)), "quotient_near": float(q[np.argmin(d[pick])])}


def uv_classify(R: AnalyticModel, A: AnalyticModel, arc: BoundaryArc, omega: OmegaSampling | None = None,
                tol: Tolerances = DEFAULTS) -> ClassificationReport:
    """Regular/cusp verdict at the arc's base point from Psi1 and Psi2 = sqrt(Psi1).

    Psi1(z) = (A(z) - A(zeta0)) (R(z)/A(z) - conj A(zeta0)).  Points where
    A fails to be locally invertible (A' = 0 or A' unbounded) are reported
    as excluded and never classified.
    """
    arc = arc.left_oriented()
    z0 = arc.base_point
    A0 = complex(A(z0))
    growth = derivative_growth(A, arc)
    base = dict(base_point=z0, residual=float("nan"))
    if growth["slope"] < -0.25:
        return ClassificationReport("excluded", notes=[
            "A' is unbounded at the base point: A is not analytic across the arc there, "
            "so the Psi criterion does not apply", f"difference-quotient slope {growth['slope']:.3f}"],
            exceptional_points=[z0], **base)
    if growth["slope"] > 0.5:
        return ClassificationReport("excluded", notes=["A'(zeta0) = 0: excluded point",
                                                       f"difference-quotient slope {growth['slope']:.3f}"],
                                    exceptional_points=[z0], **base)
    cand, img = uv_schwarz(R, A, arc, omega)
    from .schwarz import schwarz_verify

    residual = schwarz_verify(cand, img)

    def Psi1(z):
        z = np.asarray(z, dtype=complex)
        Az = A(z)
        return (Az - A0) * (R(z) / Az - np.conj(A0))

    radii = local_radii(arc, tol.n_radii, min_run=tol.min_run_samples)
    if not radii:
        return ClassificationReport("inconclusive", residual, base_point=z0,
                                    notes=["no clean local region around the base point"])
    per = []
    ev = None
    for lr in radii:
        ev = phi_tests(Psi1, lr, z0, tol)
        per.append({"delta": lr.delta, "psi1": ev.phi1.univalent, "psi2": ev.phi2.univalent,
                    "iv_prime": ev.iv_prime, "identity_residual": ev.identity_residual})
    psi1 = {"univalent": ev.phi1.univalent, **ev.phi1.witness}
    psi2 = {"univalent": ev.phi2.univalent, **ev.phi2.witness}
    ident = max(p["identity_residual"] for p in per)
    if ev.phi1.univalent:
        label, note = "1", "regular: Psi1 univalent"
    elif ev.phi2.univalent and ev.iv_prime["holds"]:
        label, note = "2c", "cusp: Psi2 univalent, Psi1 not"
    else:
        label, note = "inconclusive", "neither Psi certificate fired"
    return ClassificationReport(label, residual, phi1=psi1, phi2=psi2, notes=[note], base_point=z0, radii=per,
                                cusp_verdict=ev.iv_prime if label == "2c" else None, identity_residual=ident)


@dataclass
class UVExample:
    U: Callable
    V: Callable
    A: AnalyticModel
    R: AnalyticModel
    arc: BoundaryArc
    omega: OmegaSampling
    ratio: RatioModel
    a: AnalyticModel
    ratio_residual: float
    R_residual: float
    positivity_min: float
    domain: object = field(repr=False, default=None)


def uv_cusp_example(T: AnalyticModel, u: HalfDiskHarmonic, v: HalfDiskHarmonic, eta: float = 0.25,
                    tol: Tolerances = DEFAULTS) -> UVExample:
    """Transplant a harmonic pair to the cusp domain T(upper half-disk).

    U = u o T^{-1}, V = v o T^{-1}, A = a o T^{-1} where |a|^2 = u_y/v_y on
    the diameter.  The ratio residual compares lim U/V, taken along
    T(x + i y) as y -> 0 by Richardson extrapolation, with |A|^2 on the arc.
    """
    dom = build_cusp_domain(T, eta, tol=tol)
    ratio = normal_derivative_ratio(u, v, (-eta, eta), tol=tol)
    a = analytic_sqrt_factor(ratio)
    inv = dom.inverse

    def U(z):
        return u(inv(z))

    def V(z):
        return v(inv(z))

    A = AnalyticModel.black_box(lambda z: a(inv(z)), 0.0, abs(T(eta)), name="A")
    R, R_res = build_R(ratio, inv, dom.arc, A)
    x = dom.arc.params
    interior = (np.abs(x) > 0) & (np.abs(x) < eta * (1 - 1e-9))
    xs = x[interior]
    h = 1e-3 * eta
    lim = np.empty(xs.size)
    for i, x0 in enumerate(xs):
        hh = min(h, 0.2 * (eta - abs(x0)))
        lim[i] = vertical_limit(lambda w: U(T(w)) / V(T(w)), float(x0), hh)
    A_arc = np.abs(A(dom.arc.samples[interior])) ** 2
    ratio_residual = float(np.max(np.abs(lim - A_arc)))
    pos = float(min(np.min(U(dom.omega.points)), np.min(V(dom.omega.points))))
    return UVExample(U, V, A, R, dom.arc, dom.omega, ratio, a, ratio_residual, R_res, pos, dom)
