"""Inner and outer functions, model spaces and the aggregate construction.

Inner functions are finite Blaschke products times singular factors with
finitely many atoms.  Boundary traces live on equispaced unit-circle grids
(:class:`CircleFunction`).  Membership in K_theta = H^2 ∩ theta conj(H_0^2)
is decided spectrally; because theta oscillates like exp(-i a cot(t/2)) near
an atom, the spectra are taken after multiplying by powers of
(1 - z/zeta_j), which kills the aliasing without changing the answer
(see :func:`ktheta_membership`).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .complex_core import AnalyticModel, cauchy_derivative
from .errors import DomainError, PreconditionError
from .schwarz import BoundaryPiece, Region, UnivalenceResult, certify_from_values, _refined_boundary
from .tolerances import DEFAULTS, Tolerances


class SingularityError(DomainError):
    """Evaluation requested at an atom of the singular measure."""


# ---------------------------------------------------------------------------
# Inner functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InnerFunctionSpec:
    """Blaschke zeros (with multiplicities) and atoms (position, mass)."""

    zeros: tuple = ()
    atoms: tuple = ()

    def __post_init__(self):
        zs = tuple((complex(z), int(m)) for z, m in self.zeros)
        at = tuple((complex(c), float(a)) for c, a in self.atoms)
        for z, m in zs:
            if not abs(z) < 1:
                raise ValueError(f"Blaschke zero {z} is not inside the unit disk")
            if m < 1:
                raise ValueError("multiplicities must be positive")
        for c, a in at:
            if abs(abs(c) - 1) > 1e-12:
                raise ValueError(f"atom {c} is not on the unit circle")
            if not a > 0:
                raise ValueError("atom masses must be positive")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "atoms", at)

    @classmethod
    def single_atom(cls, mass: float = 1.0, at: complex = 1.0) -> "InnerFunctionSpec":
        return cls((), ((at, mass),))

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "atoms": [[c.real, c.imag, a] for c, a in self.atoms],
            "zeros": [[z.real, z.imag, m] for z, m in self.zeros],
        }

    @classmethod
    def from_json(cls, d: dict) -> "InnerFunctionSpec":
        if d.get("format_version") != 1:
            raise ValueError("unsupported inner-spec format_version")
        atoms = tuple((complex(x, y), m) for x, y, m in d.get("atoms", []))
        zeros = tuple((complex(x, y), int(m)) for x, y, m in d.get("zeros", []))
        return cls(zeros, atoms)


def eval_inner(spec: InnerFunctionSpec, z):
    """theta(z) = prod Blaschke factors * exp(-sum a_j (zeta_j + z)/(zeta_j - z)).

    The formula is used verbatim off the unit disk as well, which gives the
    meromorphic continuation needed by pseudo-continuation checks.
    """
    scalar = np.isscalar(z)
    zz = np.asarray(z, dtype=complex)
    out = np.ones(zz.shape, dtype=complex)
    for a, m in spec.zeros:
        if a == 0:
            fac = zz
        else:
            fac = (abs(a) / a) * (a - zz) / (1 - np.conj(a) * zz)
        out = out * fac**m
    expo = np.zeros(zz.shape, dtype=complex)
    for c, mass in spec.atoms:
        d = c - zz
        if np.any(d == 0):
            raise SingularityError(f"inner function evaluated at the atom {c}")
        expo = expo - mass * (c + zz) / d
    out = out * np.exp(expo)
    return complex(out) if scalar else out


def inner_model(spec: InnerFunctionSpec) -> AnalyticModel:
    return AnalyticModel.black_box(lambda z: eval_inner(spec, z), 0.0, 1.0, name="theta")


def tilde(f: Callable) -> Callable:
    """f~(z) = conj(f(1/conj z))."""

    def g(z):
        zz = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = 1.0 / np.conj(zz)
        out = np.conj(np.asarray(f(w), dtype=complex))
        return complex(out) if np.isscalar(z) else out

    return g


# ---------------------------------------------------------------------------
# Boundary traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CircleFunction:
    """Samples f(e^{i t_k}) at t_k = 2 pi (k + offset)/N, N a power of two.

    A half-step ``offset`` keeps samples off atoms at angle 0.
    """

    values: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        n = v.size
        if n < 2 or n & (n - 1):
            raise ValueError("sample count must be a power of two")
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.size

    @staticmethod
    def angles(N: int, offset: float = 0.0) -> np.ndarray:
        return 2 * np.pi * (np.arange(N) + offset) / N

    @property
    def t(self) -> np.ndarray:
        return self.angles(self.N, self.offset)

    @property
    def z(self) -> np.ndarray:
        return np.exp(1j * self.t)

    @classmethod
    def from_function(cls, f: Callable, N: int = DEFAULTS.spectral_samples, offset: float = 0.5):
        z = np.exp(1j * cls.angles(N, offset))
        return cls(np.asarray(f(z), dtype=complex), offset)

    def frequencies(self) -> np.ndarray:
        return np.rint(np.fft.fftfreq(self.N) * self.N).astype(int)

    def coefficients(self) -> np.ndarray:
        """Fourier coefficients in FFT order (see :meth:`frequencies`)."""
        n = self.frequencies()
        return np.fft.fft(self.values) / self.N * np.exp(-2j * np.pi * n * self.offset / self.N)

    @classmethod
    def from_coefficients(cls, c: np.ndarray, offset: float = 0.0) -> "CircleFunction":
        N = c.size
        n = np.rint(np.fft.fftfreq(N) * N).astype(int)
        return cls(np.fft.ifft(c * np.exp(2j * np.pi * n * offset / N)) * N, offset)

    def roundtrip_error(self) -> float:
        back = self.from_coefficients(self.coefficients(), self.offset).values
        return float(np.max(np.abs(back - self.values)))

    def __mul__(self, other):
        if isinstance(other, CircleFunction):
            self._check(other)
            return CircleFunction(self.values * other.values, self.offset)
        return CircleFunction(self.values * other, self.offset)

    __rmul__ = __mul__

    def conj(self) -> "CircleFunction":
        return CircleFunction(np.conj(self.values), self.offset)

    def _check(self, other: "CircleFunction"):
        if other.N != self.N or other.offset != self.offset:
            raise ValueError("traces live on different grids")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "re", "im"])
        for t, v in zip(self.t, self.values):
            w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CircleFunction":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0][:1] == ["t"]:
            rows = rows[1:]
        t = np.array([float(r[0]) for r in rows])
        v = np.array([complex(float(r[1]), float(r[2])) for r in rows])
        N = t.size
        offset = float(np.round(t[0] * N / (2 * np.pi), 12))
        return cls(v, offset)


# ---------------------------------------------------------------------------
# Outer functions and factorization
# ---------------------------------------------------------------------------


def outer_from_modulus(mod: CircleFunction) -> AnalyticModel:
    """Outer function with boundary modulus ``mod``.

    log|outer| has Fourier coefficients L_n of log(mod); the analytic
    logarithm is L_0 + 2 sum_{n>=1} L_n z^n.
    """
    m = np.real(mod.values)
    if np.any(m <= 0) or np.any(np.abs(np.imag(mod.values)) > 1e-12 * np.max(np.abs(m))):
        raise PreconditionError("modulus samples must be positive reals")
    L = CircleFunction(np.log(m), mod.offset).coefficients()
    n = np.rint(np.fft.fftfreq(mod.N) * mod.N).astype(int)
    pos = np.zeros(mod.N // 2, dtype=complex)
    pos[0] = L[0].real
    for k in range(1, mod.N // 2):
        pos[k] = 2 * L[n == k][0]
    log_series = AnalyticModel.series(pos, 0.0, 1.0, closed=True, name="log-outer")

    def ev(z):
        return np.exp(log_series(z))

    def dev(z):
        return ev(z) * log_series.derivative()(z)

    model = AnalyticModel.black_box(ev, 0.0, 1.0, derivative=dev, name="outer")
    return model


@dataclass
class Factorization:
    inner_trace: CircleFunction
    outer: AnalyticModel
    unimodularity: float


def inner_outer_factorize(F: Callable, N: int = DEFAULTS.spectral_samples, offset: float = 0.5,
                          floor: float = 1e-12) -> Factorization:
    """F = inner * outer on the circle; the outer part comes from |F|."""
    tr = CircleFunction.from_function(F, N, offset)
    mod = np.abs(tr.values)
    if np.mean(mod <= floor) > 0.5:
        raise PreconditionError("boundary modulus vanishes on most of the circle")
    floored = mod <= floor
    mod = np.maximum(mod, floor)
    outer = outer_from_modulus(CircleFunction(mod, offset))
    inner = tr.values / outer(tr.z)
    uni = np.abs(np.abs(inner[~floored]) - 1)
    return Factorization(CircleFunction(inner, offset), outer, float(np.max(uni)) if uni.size else 0.0)


# ---------------------------------------------------------------------------
# Model-space membership
# ---------------------------------------------------------------------------


def atom_weight(spec: InnerFunctionSpec, power: int) -> Callable:
    """H_w(z) = prod_j (1 - z/zeta_j)**power over the atoms."""

    def H(z):
        zz = np.asarray(z, dtype=complex)
        out = np.ones(zz.shape, dtype=complex)
        for c, _ in spec.atoms:
            out = out * (1 - zz / c) ** power
        return out

    return H


@dataclass
class MembershipResult:
    member: bool
    leak: float
    negative_leak: float
    weight_power: int
    weighted_spectrum: np.ndarray = field(repr=False)
    frequencies: np.ndarray = field(repr=False)

    def coefficient(self, n: int) -> complex:
        """Coefficient at frequency n of conj(H_w) conj(theta) phi.

        For phi with conj(theta) phi vanishing at frequencies > n this equals
        the plain Fourier coefficient, because H_w(0) = 1.
        """
        return complex(self.weighted_spectrum[self.frequencies == n][0])


def ktheta_membership(phi: CircleFunction, spec: InnerFunctionSpec, tol: Tolerances = DEFAULTS,
                      weight_power: int | None = None) -> MembershipResult:
    """Decide phi ∈ K_theta = H^2 ∩ theta conj(H_0^2) from its boundary trace.

    Two spectral leaks are measured: the share of the l2 mass of
    conj(H_w) conj(theta) phi at frequencies >= 0, and the share of H_w phi
    at negative frequencies.  H_w = prod (1 - z/zeta_j)^m is outer and
    vanishes at the atoms; multiplying by conj(H_w) maps conj(H_0^2) into
    itself and the converse holds because H_w is outer, so the weighted
    test decides the same membership while taming the unresolvable
    oscillation of theta at the atoms.
    """
    m = tol.spectral_weight_power if weight_power is None else weight_power
    if not spec.atoms:
        m = 0
    z = phi.z
    H = atom_weight(spec, m)(z)
    th = eval_inner(spec, z)
    g = CircleFunction(np.conj(H) * np.conj(th) * phi.values, phi.offset)
    c = g.coefficients()
    n = g.frequencies()
    total = float(np.sum(np.abs(c) ** 2))
    leak = float(np.sum(np.abs(c[n >= 0]) ** 2) / total) if total > 0 else 0.0
    h = CircleFunction(H * phi.values, phi.offset).coefficients()
    htot = float(np.sum(np.abs(h) ** 2))
    neg = float(np.sum(np.abs(h[n < 0]) ** 2) / htot) if htot > 0 else 0.0
    member = leak <= tol.leak and neg <= tol.leak
    return MembershipResult(bool(member), leak, neg, m, c, n)


def nonnegative_leak(F: CircleFunction, spec: InnerFunctionSpec, tol: Tolerances = DEFAULTS) -> float:
    """Share of weighted mass of F at negative frequencies (F should be in H^2)."""
    H = atom_weight(spec, tol.spectral_weight_power if spec.atoms else 0)(F.z)
    c = CircleFunction(H * F.values, F.offset).coefficients()
    n = np.rint(np.fft.fftfreq(F.N) * F.N).astype(int)
    tot = float(np.sum(np.abs(c) ** 2))
    return float(np.sum(np.abs(c[n < 0]) ** 2) / tot) if tot else 0.0


# ---------------------------------------------------------------------------
# The aggregate construction
# ---------------------------------------------------------------------------


def reproducing_kernel(spec: InnerFunctionSpec, lam: complex) -> AnalyticModel:
    """k_lam(z) = (1 - conj(theta(lam)) theta(z)) / (1 - conj(lam) z).

    Defined on the plane minus the atoms; this is also its analytic
    continuation G across the circle away from the atoms.
    """
    lam = complex(lam)
    c = np.conj(eval_inner(spec, lam))

    def k(z):
        zz = np.asarray(z, dtype=complex)
        return (1 - c * eval_inner(spec, zz)) / (1 - np.conj(lam) * zz)

    return AnalyticModel.black_box(k, 0.0, 1.0, name="kernel")


def scaled(f: AnalyticModel, s: complex) -> AnalyticModel:
    dv = f.derivative()
    return AnalyticModel.black_box(lambda z: s * f(z), f.center, f.radius,
                                   derivative=lambda z: s * dv(z), name=f.name)


def phi_aggregate(G: AnalyticModel, alpha: complex, spec: InnerFunctionSpec) -> AnalyticModel:
    """phi(z) = (G(z) - G(alpha)) / (z - alpha), with phi(alpha) = G'(alpha)."""
    alpha = complex(alpha)
    if abs(alpha) <= 1:
        raise DomainError("alpha must lie outside the closed unit disk")
    if abs(eval_inner(spec, 1 / np.conj(alpha))) == 0:
        raise PreconditionError("theta vanishes at 1/conj(alpha)")
    Ga = G(alpha)
    dGa = complex(cauchy_derivative(G, alpha, 1e-3 * (abs(alpha) - 1)))

    def phi(z):
        zz = np.asarray(z, dtype=complex)
        at = zz == alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (G(zz) - Ga) / (zz - alpha)
        return np.where(at, dGa, out)

    dG = G.derivative()

    def dphi(z):
        zz = np.asarray(z, dtype=complex)
        return (dG(zz) * (zz - alpha) - (G(zz) - Ga)) / (zz - alpha) ** 2

    return AnalyticModel.black_box(phi, 0.0, 1.0, derivative=dphi, name="phi")


def atom_graded_angles(spec: InnerFunctionSpec, N: int, floor: float, window: float = 0.05,
                       phase_step: float = 0.5) -> np.ndarray:
    """Circle angles: N uniform samples plus, near every atom, a graded
    set resolving the phase of theta to ``phase_step`` radians per step down
    to angular distance ``floor``."""
    base = 2 * np.pi * (np.arange(N) + 0.5) / N
    extra = []
    for c, mass in spec.atoms:
        ta = float(np.angle(c))
        tau = [floor]
        while tau[-1] < window:
            # phase velocity of theta at distance tau is about 2 mass / tau^2
            tau.append(tau[-1] + phase_step * tau[-1] ** 2 / (2 * mass))
        tau = np.array(tau)
        extra.append(ta + tau)
        extra.append(ta - tau)
        base = base[np.abs(np.angle(np.exp(1j * (base - ta)))) > window]
    t = np.concatenate([base] + extra)
    t = np.mod(t, 2 * np.pi)
    return np.unique(t)


def disk_univalence(phi: Callable, spec: InnerFunctionSpec, tol: Tolerances = DEFAULTS,
                    N: int | None = None, floor: float | None = None,
                    witness_search: bool = True) -> UnivalenceResult:
    """Closed-disk univalence certificate resolved down to ``floor`` near atoms."""
    N = tol.spectral_samples if N is None else N
    floor = tol.atom_resolution_floor if floor is None else floor
    t = atom_graded_angles(spec, N, floor)
    t = np.append(t, t[0] + 2 * np.pi)
    piece = BoundaryPiece(lambda s: np.exp(1j * np.asarray(s)), t)
    rr, aa = np.meshgrid([0.0, 0.3, 0.6, 0.85], 2 * np.pi * np.arange(8) / 8)
    interior = np.unique((rr * np.exp(1j * aa)).reshape(-1))
    reg = Region([piece], interior)
    cap = max(tol.max_boundary_vertices, 2 * t.size)
    zb, fb = _refined_boundary(phi, reg, tol.refine_fraction, cap)
    res = certify_from_values(zb, fb, interior, np.asarray(phi(interior), dtype=complex), "closed", tol,
                              witness_search)
    res.witness["resolution_floor"] = floor
    return res


def choose_alpha(G: AnalyticModel, spec: InnerFunctionSpec, tol: Tolerances = DEFAULTS,
                 grid: int | None = None):
    """Scan alpha on a uniform grid in (1, 2), from 2 downwards; return the
    first alpha whose aggregate passes the univalence certificate.

    Scanning from the well-conditioned end picks the smallest |G(alpha)|
    that works.
    """
    grid = tol.alpha_grid if grid is None else grid
    alphas = 1 + np.arange(grid, 0, -1) / (grid + 1)
    tried = []
    for a in alphas:
        phi = phi_aggregate(G, a, spec)
        res = disk_univalence(phi, spec, tol, witness_search=False)
        tried.append((float(a), bool(res.univalent)))
        if res.univalent:
            return float(a), phi, res, tried
    return None, None, None, tried


# ---------------------------------------------------------------------------
# Multipliers and the boundary identity
# ---------------------------------------------------------------------------


def shirokov_multiplier(spec: InnerFunctionSpec, N: int = 3) -> AnalyticModel:
    """H(z) = prod_j (1 - z/zeta_j)**N; vanishes at the atoms, zero-free in the disk."""
    if spec.zeros:
        raise PreconditionError("the multiplier is built for purely atomic singular data")
    if not spec.atoms:
        raise PreconditionError("no atoms given")
    if N < 3:
        raise ValueError("N must be at least 3")
    coeffs = np.array([1.0 + 0j])
    for c, _ in spec.atoms:
        coeffs = np.convolve(coeffs, np.polynomial.polynomial.polypow([1, -1 / c], N))
    return AnalyticModel.polynomial(coeffs, name="H")


def lipschitz_quotient(values: np.ndarray, t: np.ndarray) -> float:
    """max |f(t_{k+1}) - f(t_k)| / |t_{k+1} - t_k| around the circle."""
    tt = np.append(t, t[0] + 2 * np.pi)
    vv = np.append(values, values[0])
    return float(np.max(np.abs(np.diff(vv)) / np.diff(tt)))


def multiplier_lipschitz(spec: InnerFunctionSpec, H: AnalyticModel, n: int = 4096) -> dict:
    """Lipschitz quotients of H and H*theta on grids of n and 2n points."""
    out = {}
    for m in (n, 2 * n):
        t = CircleFunction.angles(m, 0.5)
        z = np.exp(1j * t)
        h = H(z)
        out[m] = {"H": lipschitz_quotient(h, t), "H_theta": lipschitz_quotient(h * eval_inner(spec, z), t)}
    out["ratio"] = out[2 * n]["H_theta"] / out[n]["H_theta"]
    return out


def nevanlinna_certificate(f1: CircleFunction, f2: CircleFunction, phi: CircleFunction,
                           mask: np.ndarray | None = None) -> float:
    """max over the grid of |F1 - conj(phi) F2| (optionally restricted by ``mask``)."""
    f1._check(f2)
    f1._check(phi)
    r = np.abs(f1.values - np.conj(phi.values) * f2.values)
    if mask is not None:
        r = r[mask]
    return float(np.max(r)) if r.size else 0.0


def atom_mask(spec: InnerFunctionSpec, t: np.ndarray, width: float) -> np.ndarray:
    """True away from the angular windows of total width ``width`` around atoms."""
    keep = np.ones(t.size, bool)
    for c, _ in spec.atoms:
        d = np.abs(np.angle(np.exp(1j * (t - np.angle(c)))))
        keep &= d > width / 2
    return keep


def radial_limit(f: Callable, z: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Boundary values f(z) for |z| = 1 from radii 1 - k eps, k = 1, 2, 4."""
    f1 = np.asarray(f((1 - eps) * z), dtype=complex)
    f2 = np.asarray(f((1 - 2 * eps) * z), dtype=complex)
    f4 = np.asarray(f((1 - 4 * eps) * z), dtype=complex)
    return (8 * f1 - 6 * f2 + f4) / 3


def pseudo_continuation_F(phi: Callable, spec: InnerFunctionSpec) -> Callable:
    """F(z) = theta(z) conj(phi(1/conj z)) inside the disk.

    On the circle its boundary values should equal theta conj(phi); this is
    the analytic function F of the identity (H theta) conj(phi) = H F.
    """

    def F(z):
        zz = np.asarray(z, dtype=complex)
        return eval_inner(spec, zz) * np.conj(phi(1 / np.conj(zz)))

    return F


@dataclass
class AggregateReport:
    alpha: float
    scale: float
    phi: AnalyticModel
    membership: MembershipResult
    univalence: UnivalenceResult
    identity_residual: float
    nevanlinna_residual: float
    alpha_scan: list
    F_leak: float
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .schwarz import _jsonable

        return _jsonable({
            "alpha": self.alpha,
            "normalization": self.scale,
            "ktheta_leak": self.membership.leak,
            "ktheta_negative_leak": self.membership.negative_leak,
            "member": self.membership.member,
            "univalent": self.univalence.univalent,
            "univalence_witness": self.univalence.witness,
            "identity_residual": self.identity_residual,
            "nevanlinna_residual": self.nevanlinna_residual,
            "F_negative_leak": self.F_leak,
            "alpha_scan": self.alpha_scan,
            "notes": self.notes,
        })


def aggregate_pipeline(spec: InnerFunctionSpec, lam: complex = 0.3, H_power: int = 3,
                       tol: Tolerances = DEFAULTS, alpha: float | None = None) -> AggregateReport:
    """Build phi from the kernel k_lam and certify the boundary identity.

    g is normalised so that sup_T |phi| = 1; every checked property is
    linear or scale-invariant in g.
    """
    G0 = reproducing_kernel(spec, lam)
    if alpha is None:
        a, phi0, uni, scan = choose_alpha(G0, spec, tol)
        if a is None:
            raise PreconditionError("no alpha on the grid passed the univalence certificate")
    else:
        a, phi0 = float(alpha), phi_aggregate(G0, alpha, spec)
        uni = disk_univalence(phi0, spec, tol)
        scan = [(a, uni.univalent)]
    N = tol.spectral_samples
    z = np.exp(1j * CircleFunction.angles(N, 0.5))
    scale = float(np.max(np.abs(phi0(z))))
    G = scaled(G0, 1 / scale)
    phi = phi_aggregate(G, a, spec)
    tr = CircleFunction.from_function(phi, N, 0.5)
    mem = ktheta_membership(tr, spec, tol)
    H = shirokov_multiplier(InnerFunctionSpec((), spec.atoms), H_power)
    t = tr.t
    mask = atom_mask(spec, t, tol.atom_window)
    Hz = H(z)
    th = eval_inner(spec, z)
    F = pseudo_continuation_F(phi, spec)
    d = np.min([np.abs(np.angle(np.exp(1j * (t - np.angle(c))))) for c, _ in spec.atoms], axis=0) \
        if spec.atoms else np.full(t.size, np.pi)
    eps = 1e-4 * np.minimum(1.0, (d / 0.1) ** 2)
    Fb = np.zeros(N, dtype=complex)
    Fb[mask] = radial_limit(F, z[mask], eps[mask])
    lhs = Hz * th * np.conj(tr.values)
    ident = float(np.max(np.abs(lhs - Hz * Fb)[mask]))
    F1 = CircleFunction(Hz * Fb, 0.5)
    F2 = CircleFunction(Hz * th, 0.5)
    nev = nevanlinna_certificate(F1, F2, tr, mask)
    F_leak = nonnegative_leak(CircleFunction(th * np.conj(tr.values), 0.5), spec, tol)
    notes = [
        f"g = k_lambda / {scale:.6e} so that sup|phi| = 1 on the circle",
        f"univalence resolved down to angular distance {uni.witness.get('resolution_floor')} from atoms",
    ]
    return AggregateReport(a, scale, phi, mem, uni, ident, nev, scan, F_leak, notes)


@dataclass
class SmoothnessContrast:
    derivative_sup: dict
    doubling_ratios: dict
    bounded: bool
    coefficient_growth: dict
    non_analytic: bool
    window: float

    def to_dict(self) -> dict:
        from .schwarz import _jsonable

        return _jsonable(self.__dict__)


def _fd_sup(phi: Callable, N: int, order: int, keep: Callable) -> float:
    t = CircleFunction.angles(N, 0.5)
    h = 2 * np.pi / N
    z = np.exp(1j * t)
    # central differences of phi(e^{it}) in t
    ks = np.arange(order + 1)
    from math import comb

    acc = np.zeros(N, dtype=complex)
    for k in ks:
        acc = acc + (-1) ** k * comb(order, k) * phi(z * np.exp(1j * (order / 2 - k) * h))
    d = np.abs(acc) / h**order
    return float(np.max(d[keep(t)]))


def smoothness_contrast(phi: Callable, spec: InnerFunctionSpec, N: int = 4096, window: float = 0.5,
                        N_spectrum: int = 16384,
                        orders=(1, 2, 3, 4), qs=(0.9, 0.95, 0.99)) -> SmoothnessContrast:
    """C^infinity proxy away from atoms and a non-analyticity proxy.

    Discrete derivatives of orders 1..4 along T, outside angular windows of
    width ``window`` centred at the atoms, should stay put when the grid is
    doubled.  The Fourier coefficients of an analytic-across-T function
    decay geometrically; here |c_n| / q^n is tracked for each q.
    """

    def keep(t):
        return atom_mask(spec, t, window)

    sup, ratio = {}, {}
    for k in orders:
        a, b = _fd_sup(phi, N, k, keep), _fd_sup(phi, 2 * N, k, keep)
        sup[k] = (a, b)
        ratio[k] = b / a if a > 0 else 1.0
    bounded = all(0.5 <= r <= 2.0 for r in ratio.values())
    c = CircleFunction.from_function(phi, N_spectrum, 0.5).coefficients()[: N_spectrum // 4]
    n = np.arange(c.size)
    growth = {}
    for q in qs:
        w = np.abs(c) / q**n
        head, tail = float(np.max(w[: c.size // 8])), float(np.max(w[-c.size // 8:]))
        growth[q] = tail / head if head > 0 else np.inf
    non_analytic = all(g > 1.0 for g in growth.values())
    return SmoothnessContrast(sup, ratio, bounded, growth, non_analytic, window)
