"""Weierstrass preparation of bivariate functions and root tracing.

Psi(z, w) is written locally as c(z, w) * P(z, w) with P monic of degree k
in w.  The coefficients of P come from contour power sums of the roots in
|w| < rho and Newton's identities, node by node on a z-grid; between nodes
they are interpolated barycentrically.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .complex_core import (
    AnalyticModel,
    Circle,
    MonicPoly,
    Path,
    cauchy_derivative,
    continue_root,
    count_zeros,
    discriminant,
    newton_to_monic,
    power_sums,
)
from .errors import (
    ContourZeroError,
    DomainError,
    IllConditionedError,
    NearBranchPointError,
    PreconditionError,
    QuadratureError,
    ResolutionError,
)
from .schwarz import (
    BoundaryArc,
    ClassificationReport,
    OmegaSampling,
    SchwarzCandidate,
    classify_boundary,
)
from .tolerances import DEFAULTS, Tolerances


@dataclass
class BivariateModel:
    """Psi(z, w) on the bidisk |z - zc| < zr, |w - wc| < wr."""

    evaluator: Callable
    dw: Callable | None = None
    z_center: complex = 0.0
    z_radius: float = 1.0
    w_center: complex = 0.0
    w_radius: float = 1.0
    name: str = ""

    def __call__(self, z, w):
        return np.asarray(self.evaluator(z, w), dtype=complex)

    def d_w(self, z, w):
        if self.dw is not None:
            return np.asarray(self.dw(z, w), dtype=complex)
        h = 1e-3 * self.w_radius
        return cauchy_derivative(lambda ww: self.evaluator(z, ww), w, h)

    def derivative_check(self, n: int = 32, seed: int = 0) -> float:
        """Worst relative gap between d_w and a central difference on random bidisk points."""
        rng = np.random.default_rng(seed)
        z = self.z_center + 0.8 * self.z_radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
        w = self.w_center + 0.8 * self.w_radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
        h = 1e-5 * self.w_radius
        fd = (self(z, w + h) - self(z, w - h)) / (2 * h)
        an = self.d_w(z, w)
        return float(np.max(np.abs(fd - an) / (1e-300 + np.maximum(np.abs(an), np.abs(fd)).clip(min=1e-12))))

    @classmethod
    def polynomial_in_w(cls, coeffs: Sequence[Callable], name: str = "", z_radius: float = 10.0,
                        w_radius: float = 10.0) -> "BivariateModel":
        """sum_j coeffs[j](z) w**j."""

        def ev(z, w):
            z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
            return sum(np.asarray(c(z), dtype=complex) * w**j for j, c in enumerate(coeffs))

        def dw(z, w):
            z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
            return sum(j * np.asarray(c(z), dtype=complex) * w ** (j - 1) for j, c in enumerate(coeffs) if j)

        return cls(ev, dw, 0.0, z_radius, 0.0, w_radius, name)


def order_in_w(Psi: BivariateModel, rho: float | None = None, tol: Tolerances = DEFAULTS) -> int:
    """Order of vanishing of w -> Psi(0, w) at the centre.

    Root counts on shrinking circles; the count that repeats on two
    consecutive radii is the order (Rouche).
    """
    z0, w0 = Psi.z_center, Psi.w_center
    r = 0.5 * Psi.w_radius if rho is None else rho
    counts = []
    for _ in range(8):
        c = Circle(w0, r, tol.quad_samples)
        try:
            k = count_zeros(lambda w: Psi(z0, w), lambda w: Psi.d_w(z0, w), c, tol)
        except ContourZeroError:
            r *= 0.61
            continue
        counts.append(k)
        if len(counts) >= 2 and counts[-1] == counts[-2]:
            break
        r *= 0.5
    if not counts:
        raise ContourZeroError("Psi(0, .) vanishes on every test circle")
    k = counts[-1]
    if k == 0:
        raise PreconditionError("Psi(0, 0) != 0: there is nothing to prepare")
    if k > tol.k_max:
        raise ResolutionError(f"order {k} exceeds k_max = {tol.k_max}")
    return k


# ---------------------------------------------------------------------------
# Pencils
# ---------------------------------------------------------------------------


def barycentric_weights(x: np.ndarray) -> np.ndarray:
    """Weights 1/prod_{k != j}(x_j - x_k), rescaled to max modulus 1."""
    x = np.asarray(x, dtype=complex)
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    # log-sum for magnitude, product of unit phases for the angle
    logm = -np.sum(np.log(np.abs(d)), axis=1)
    ph = np.prod(np.conj(d) / np.abs(d), axis=1)
    w = np.exp(logm - logm.max()) * ph
    return w


def barycentric_eval(x: np.ndarray, wts: np.ndarray, f: np.ndarray, z) -> np.ndarray:
    """Second-form barycentric interpolation; ``f`` has shape (n, m)."""
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    diff = zz[:, None] - x[None, :]
    exact = diff == 0
    diff[exact] = 1.0
    c = wts[None, :] / diff
    out = (c @ f) / np.sum(c, axis=1)[:, None]
    hit_r, hit_c = np.nonzero(exact)
    out[hit_r] = f[hit_c]
    return out


@dataclass
class MonicPolyPencil:
    """z -> w**k + a_{k-1}(z) w**(k-1) + ... + a_0(z).

    ``coefficients[i, j]`` is a_j at grid node i.  ``rule`` is
    ``"barycentric"`` (polynomial interpolation through the nodes) or
    ``"exact"``, in which case ``functions`` gives the a_j in closed form.
    """

    k: int
    grid: np.ndarray
    coefficients: np.ndarray
    rho: float
    rule: str = "barycentric"
    functions: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=complex).reshape(-1)
        self.coefficients = np.asarray(self.coefficients, dtype=complex).reshape(self.grid.size, self.k)
        if self.rule not in ("barycentric", "exact"):
            raise ValueError("rule must be 'barycentric' or 'exact'")
        if self.rule == "exact" and (self.functions is None or len(self.functions) != self.k):
            raise ValueError("exact rule needs one coefficient function per degree")
        self._w = barycentric_weights(self.grid) if self.rule == "barycentric" else None

    @classmethod
    def from_functions(cls, functions: Sequence[Callable], grid, rho: float) -> "MonicPolyPencil":
        grid = np.asarray(grid, dtype=complex).reshape(-1)
        coeffs = np.stack([np.broadcast_to(np.asarray(f(grid), dtype=complex), grid.shape) for f in functions], axis=1)
        return cls(len(functions), grid, coeffs, rho, "exact", tuple(functions))

    def coefficients_at(self, z) -> np.ndarray:
        """Array of shape (..., k) with a_0..a_{k-1} at z."""
        zz = np.asarray(z, dtype=complex)
        if self.rule == "exact":
            out = np.stack([np.broadcast_to(np.asarray(f(zz), dtype=complex), zz.shape) for f in self.functions],
                           axis=-1)
            return out
        vals = barycentric_eval(self.grid, self._w, self.coefficients, zz.reshape(-1))
        return vals.reshape(zz.shape + (self.k,))

    def slice(self, z: complex) -> MonicPoly:
        return MonicPoly(self.coefficients_at(complex(z)))

    __call__ = slice

    def value(self, z, w):
        a = self.coefficients_at(z)
        full = np.concatenate([a, np.ones(a.shape[:-1] + (1,), dtype=complex)], axis=-1)
        w = np.asarray(w, dtype=complex)
        out = np.zeros(np.broadcast(w, a[..., 0]).shape, dtype=complex)
        for j in range(self.k, -1, -1):
            out = out * w + full[..., j]
        return out

    def roots(self, z: complex) -> np.ndarray:
        return self.slice(z).roots()

    def check_roots_inside(self) -> int:
        """Index of the first node whose roots leave |w| < rho, or -1."""
        for i, z in enumerate(self.grid):
            if np.any(np.abs(self.roots(z)) >= self.rho):
                return i
        return -1

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "k": self.k,
            "rho": self.rho,
            "grid": [[z.real, z.imag] for z in self.grid],
            "coefficients": [[[c.real, c.imag] for c in row] for row in self.coefficients],
        }

    @classmethod
    def from_json(cls, d: dict) -> "MonicPolyPencil":
        if d.get("format_version") != 1:
            raise ValueError("unsupported pencil format_version")
        grid = np.array([complex(x, y) for x, y in d["grid"]])
        co = np.array([[complex(x, y) for x, y in row] for row in d["coefficients"]])
        return cls(int(d["k"]), grid, co, float(d["rho"]))


def circle_grid(center: complex, radius: float, n: int) -> np.ndarray:
    return center + radius * np.exp(2j * np.pi * np.arange(n) / n)


def weierstrass_prepare(Psi: BivariateModel, grid, rho: float, tol: Tolerances = DEFAULTS):
    """Return ``(pencil, c)`` with Psi = c * P near the centre.

    c(z, w) is evaluated as the Cauchy integral of Psi/P over |w| = rho, so
    the removable singularities at the roots of P never need special care.
    """
    grid = np.asarray(grid, dtype=complex).reshape(-1)
    if np.any(np.abs(grid - Psi.z_center) >= Psi.z_radius):
        raise DomainError("grid leaves the validity disk of Psi")
    if rho >= Psi.w_radius:
        raise DomainError("rho must be smaller than the w-radius of Psi")
    k = None
    coeffs = []
    for i, z in enumerate(grid):
        f = lambda w, z=z: Psi(z, w)
        df = lambda w, z=z: Psi.d_w(z, w)
        c = Circle(Psi.w_center, rho, tol.quad_samples)
        try:
            kz = count_zeros(f, df, c, tol)
        except (ContourZeroError, QuadratureError) as e:
            raise ResolutionError(f"root count failed at grid node {i} (z={z}): {e}; shrink rho or the grid")
        if k is None:
            k = kz
            if k < 1:
                raise PreconditionError("no roots in |w| < rho at the first node")
            if k > tol.k_max:
                raise ResolutionError(f"order {k} exceeds k_max = {tol.k_max}")
        elif kz != k:
            raise ResolutionError(f"root count changes from {k} to {kz} at grid node {i} (z={z}); "
                                  "shrink the z-grid or adjust rho")
        s = power_sums(lambda w, z=z: Psi(z, w + Psi.w_center), lambda w, z=z: Psi.d_w(z, w + Psi.w_center),
                       Circle(0.0, rho, tol.quad_samples), k, tol)
        p = newton_to_monic(s, k)
        if Psi.w_center != 0:
            p = MonicPoly.from_roots(p.roots() + Psi.w_center)
        coeffs.append(p.coefficients)
    pencil = MonicPolyPencil(k, grid, np.array(coeffs), rho)
    c = _cofactor(Psi, pencil, rho, tol)
    c00 = complex(c(Psi.z_center, Psi.w_center)) if _inside_hull(pencil, Psi.z_center) else \
        complex(c(grid[0], Psi.w_center))
    if abs(c00) < 1e-10:
        raise PreconditionError("the cofactor vanishes at the centre")
    return pencil, c


def _inside_hull(pencil: MonicPolyPencil, z: complex) -> bool:
    c = np.mean(pencil.grid)
    return abs(z - c) <= np.max(np.abs(pencil.grid - c))


def _cofactor(Psi: BivariateModel, pencil: MonicPolyPencil, rho: float, tol: Tolerances) -> BivariateModel:
    n = tol.quad_samples
    om = Psi.w_center + rho * np.exp(2j * np.pi * np.arange(n) / n)

    def c(z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        flat_z, flat_w, flat = z.reshape(-1), w.reshape(-1), out.reshape(-1)
        for i, (zi, wi) in enumerate(zip(flat_z, flat_w)):
            if abs(wi - Psi.w_center) < 0.9 * rho:
                ratio = Psi(zi, om) / pencil.value(zi, om)
                flat[i] = np.mean(ratio * (om - Psi.w_center) / (om - wi))
            else:
                flat[i] = Psi(zi, wi) / pencil.value(zi, wi)
        return out

    return BivariateModel(c, None, Psi.z_center, Psi.z_radius, Psi.w_center, rho, name="c")


# ---------------------------------------------------------------------------
# Discriminant field and square-free reduction
# ---------------------------------------------------------------------------


@dataclass
class ZeroCluster:
    center: complex
    multiplicity: int
    radius: float


@dataclass
class DiscriminantField:
    grid: np.ndarray
    values: np.ndarray
    clusters: list
    identically_zero: bool
    fit_degree: int = 0

    def to_dict(self) -> dict:
        from .schwarz import _jsonable

        return _jsonable({
            "identically_zero": self.identically_zero,
            "clusters": [{"center": c.center, "multiplicity": c.multiplicity, "radius": c.radius}
                         for c in self.clusters],
            "max_abs": float(np.max(np.abs(self.values))) if self.values.size else 0.0,
            "fit_degree": self.fit_degree,
        })


def discriminant_field(pencil: MonicPolyPencil, tol: Tolerances = DEFAULTS) -> DiscriminantField:
    """D(z_i) at every node plus the zeros of D inside the grid hull.

    D is fitted by a polynomial in the scaled variable (z - c)/R; fitted
    roots are grouped into clusters and each cluster's multiplicity is
    confirmed by the argument principle for D on a small circle.
    """
    D = np.array([discriminant(pencil.slice(z)) for z in pencil.grid])
    small = np.abs(D) < tol.disc_zero
    if np.mean(small) > 0.8:
        return DiscriminantField(pencil.grid, D, [], True)
    c = np.mean(pencil.grid)
    R = max(float(np.max(np.abs(pencil.grid - c))), 1e-300)
    x = (pencil.grid - c) / R
    scale = float(np.max(np.abs(D)))
    coef, deg = None, 0
    for deg in range(0, min(pencil.grid.size // 2, 40)):
        V = np.vander(x, deg + 1, increasing=True)
        coef = np.linalg.lstsq(V, D, rcond=None)[0]
        if np.max(np.abs(V @ coef - D)) <= 1e-9 * scale:
            break
    # trim numerically zero top coefficients
    cz = coef.copy()
    while cz.size > 1 and abs(cz[-1]) <= 1e-9 * scale:
        cz = cz[:-1]
    roots = npoly.polyroots(cz) if cz.size > 1 else np.empty(0, dtype=complex)
    roots = roots[np.abs(roots) < 1.0]
    clusters: list[ZeroCluster] = []
    rad = 1e-3
    used = np.zeros(roots.size, bool)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        grp = np.abs(roots - r) < rad
        used |= grp
        centre = complex(np.mean(roots[grp]))
        f = lambda zz: npoly.polyval(zz, cz)
        df = lambda zz: npoly.polyval(zz, npoly.polyder(cz))
        cr = min(2 * rad, 0.5 * (1 - abs(centre)) + 1e-12)
        try:
            m = count_zeros(f, df, Circle(centre, cr, 64), tol)
        except (ContourZeroError, QuadratureError):
            m = int(np.sum(grp))
        if m > 0:
            clusters.append(ZeroCluster(c + R * centre, m, R * cr))
    return DiscriminantField(pencil.grid, D, clusters, False, deg)


def _poly_gcd(a: np.ndarray, b: np.ndarray, tol: float):
    """Euclid on ascending coefficient arrays; returns (gcd, remainder norms)."""
    norms = []
    a = a / np.max(np.abs(a))
    b = b / np.max(np.abs(b))
    while True:
        _, r = npoly.polydiv(a, b)
        r = np.atleast_1d(r)
        nr = float(np.max(np.abs(r)))
        norms.append(nr)
        if nr <= tol:
            return b, norms
        a, b = b, r / nr


def squarefree_part(p: MonicPoly, tol: Tolerances = DEFAULTS) -> MonicPoly:
    """p / gcd(p, p') made monic."""
    if p.degree == 1:
        return p
    full = p.full()
    g, norms = _poly_gcd(full, npoly.polyder(full), tol.gcd_tol)
    g = np.trim_zeros(g, "b") if np.any(g) else g
    if g.size == 1:
        return p
    if len(norms) >= 2 and norms[-1] > 1e-3 * norms[-2] and norms[-1] > tol.gcd_tol * 1e-3:
        raise IllConditionedError("gcd remainders plateau; perturb the grid node and retry")
    q, r = npoly.polydiv(full, g)
    if np.max(np.abs(r)) > 1e-9 * np.max(np.abs(full)):
        raise IllConditionedError("gcd does not divide the polynomial; perturb the grid node and retry")
    q = q / q[-1]
    out = MonicPoly(q[:-1]) if q.size > 1 else None
    if out is None:
        raise IllConditionedError("square-free part collapsed to a constant")
    if out.degree > 1 and abs(discriminant(out)) < tol.disc_zero:
        raise IllConditionedError("square-free part still has a repeated root")
    return out


# ---------------------------------------------------------------------------
# Monodromy
# ---------------------------------------------------------------------------


def _as_slice_fn(P) -> Callable:
    if isinstance(P, MonicPolyPencil):
        return P.slice
    if callable(P):
        return P
    raise TypeError("expected a pencil or a z -> MonicPoly callable")


@dataclass
class Monodromy:
    permutation: tuple
    base_roots: np.ndarray
    end_values: np.ndarray

    @property
    def cycles(self) -> str:
        return cycle_string(self.permutation)

    def is_identity(self) -> bool:
        return all(p == i + 1 for i, p in enumerate(self.permutation))


def cycle_string(perm: Sequence[int]) -> str:
    """Cycle notation of a 1-based permutation, e.g. '(1 2)'; 'id' for the identity."""
    seen, out = set(), []
    for i in range(1, len(perm) + 1):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j - 1]
        if len(cyc) > 1:
            out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "id"


def compose(p2: Sequence[int], p1: Sequence[int]) -> tuple:
    """(p2 . p1)(i) = p2(p1(i))."""
    return tuple(p2[p1[i] - 1] for i in range(len(p1)))


def monodromy(P, loop: Path, base_roots=None, tol: Tolerances = DEFAULTS) -> Monodromy:
    """Permutation of the roots induced by continuation around ``loop``.

    ``permutation[i] = j`` (1-based) means root i arrives at root j.
    """
    sl = _as_slice_fn(P)
    z0 = loop.start
    if abs(loop.end - z0) > 1e-12 * (1 + abs(z0)):
        raise ValueError("loop must be closed")
    roots = np.asarray(sl(z0).roots() if base_roots is None else base_roots, dtype=complex)
    ends = np.array([continue_root(sl, (z0, r), loop, tol) for r in roots])
    d = np.abs(ends[:, None] - roots[None, :])
    row, col = linear_sum_assignment(d)
    gaps = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(gaps, np.inf)
    sep = float(np.min(gaps)) if roots.size > 1 else 1.0
    if np.max(d[row, col]) > 0.25 * sep:
        raise NearBranchPointError("continued roots do not return to base roots", location=z0)
    perm = tuple(int(c) + 1 for c in col[np.argsort(row)])
    return Monodromy(perm, roots, ends)


# ---------------------------------------------------------------------------
# Boundary matching
# ---------------------------------------------------------------------------


@dataclass
class MatchTable:
    samples: np.ndarray
    branch_values: np.ndarray
    residuals: np.ndarray
    matched: list
    excluded: np.ndarray
    tol: float
    runs: list
    max_jump_ratio: float

    @property
    def match_fraction(self) -> float:
        return float(np.mean([bool(m) for m in self.matched]))

    def matched_indices(self, branch: int | None = None) -> np.ndarray:
        return np.array([i for i, m in enumerate(self.matched) if m and (branch is None or branch in m)], dtype=int)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        k = self.branch_values.shape[1]
        w.writerow(["index", "re", "im", "matched", "excluded"] + [f"residual_{j + 1}" for j in range(k)])
        for i, z in enumerate(self.samples):
            w.writerow([i, repr(float(z.real)), repr(float(z.imag)),
                        " ".join(str(j + 1) for j in self.matched[i]), int(self.excluded[i])]
                       + [f"{r:.6e}" for r in self.residuals[i]])
        return buf.getvalue()

    def to_dict(self) -> dict:
        from .schwarz import _jsonable

        return _jsonable({
            "tol": self.tol,
            "n_samples": int(self.samples.size),
            "match_fraction": self.match_fraction,
            "excluded": int(np.sum(self.excluded)),
            "runs": [{"branch": b + 1, "start": s, "end": e} for b, s, e in self.runs],
            "max_jump_ratio": self.max_jump_ratio,
        })


def boundary_root_match(pencil, arc: BoundaryArc, tol: float | None = None, clusters: Sequence[ZeroCluster] = (),
                        tolerances: Tolerances = DEFAULTS) -> MatchTable:
    """Which root branches W_j satisfy W_j(zeta) = conj(zeta) along the arc.

    Branch values are carried from sample to sample by continuation, so a
    branch keeps its label along the arc.  Samples within the excluded
    radius of a discriminant cluster, or where continuation fails, are
    excluded; after an exclusion labels are re-attached by nearest values.
    """
    sl = _as_slice_fn(pencil)
    zs = arc.samples
    n = zs.size
    tol = 1e-6 * arc.diameter() if tol is None else tol
    ex_r = tolerances.excluded_zone_factor * max(tol, tolerances.step_floor)
    excluded = np.zeros(n, bool)
    for c in clusters:
        excluded |= np.abs(zs - c.center) < max(ex_r, c.radius)
    k = sl(zs[0]).degree
    W = np.full((n, k), np.nan + 0j)
    prev = None
    for i in range(n):
        if excluded[i]:
            continue
        if k == 1:
            try:
                W[i] = sl(zs[i]).roots()
            except DomainError:
                excluded[i] = True
            continue
        if prev is None or i == 0 or excluded[i - 1]:
            r = sl(zs[i]).roots()
            if prev is not None:
                d = np.abs(prev[:, None] - r[None, :])
                _, col = linear_sum_assignment(d)
                r = r[col]
            W[i] = r
            prev = W[i]
            continue
        seg = Path.segment(zs[i - 1], zs[i])
        try:
            W[i] = [continue_root(sl, (zs[i - 1], w), seg, tolerances) for w in prev]
        except (NearBranchPointError, DomainError):
            excluded[i] = True
            continue
        prev = W[i]
    res = np.abs(W - np.conj(zs)[:, None])
    matched = [tuple(int(j) for j in np.nonzero(res[i] < tol)[0]) if not excluded[i] else () for i in range(n)]
    # runs of a constant non-empty matched set, one per branch
    runs = []
    for j in range(k):
        on = np.array([j in m for m in matched])
        i = 0
        while i < n:
            if on[i]:
                s = i
                while i + 1 < n and on[i + 1]:
                    i += 1
                runs.append((j, s, i))
            i += 1
    # sheet-swap guard: value jumps relative to step size
    ok = ~excluded[1:] & ~excluded[:-1]
    dz = np.abs(np.diff(zs))
    jumps = np.abs(np.diff(W, axis=0))
    if np.any(ok):
        dW = np.nanmax(jumps[ok], axis=1)
        typical = np.nanmedian(dW / dz[ok]) + 1e-300
        jr = float(np.nanmax(dW / dz[ok]) / typical)
    else:
        jr = 0.0
    return MatchTable(zs, W, res, matched, excluded, float(tol), runs, jr)


@dataclass
class BranchFunction:
    """One root branch of a pencil, evaluated by continuation from the nearest anchor."""

    pencil: object
    anchors: np.ndarray
    values: np.ndarray
    tol: Tolerances = DEFAULTS

    def __call__(self, z):
        sl = _as_slice_fn(self.pencil)
        zz = np.asarray(z, dtype=complex)
        if isinstance(self.pencil, MonicPolyPencil) and self.pencil.k == 1:
            out = -self.pencil.coefficients_at(zz)[..., 0]
            return complex(out) if np.isscalar(z) else out
        flat = zz.reshape(-1)
        out = np.empty(flat.size, dtype=complex)
        for i, x in enumerate(flat):
            a = int(np.argmin(np.abs(self.anchors - x)))
            if self.anchors[a] == x:
                out[i] = self.values[a]
                continue
            out[i] = continue_root(sl, (self.anchors[a], self.values[a]), Path.segment(self.anchors[a], x), self.tol)
        return complex(out[0]) if np.isscalar(z) else out.reshape(zz.shape)


def classify_arcs(match: MatchTable, arc: BoundaryArc, pencil, omega: OmegaSampling,
                  positions: Sequence[float] = (0.1, 0.5, 0.9), tol: Tolerances = DEFAULTS) -> list:
    """Classify every matched run at interior fractions of its length.

    Local regions need arc samples on both sides of the base point, so run
    endpoints themselves are represented by the 10% and 90% points.
    """
    reports = []
    for j, s, e in match.runs:
        if e - s + 1 < 2 * tol.min_run_samples:
            continue
        idx = np.arange(s, e + 1)
        S = BranchFunction(pencil, match.samples[idx], match.branch_values[idx, j], tol)
        model = AnalyticModel.black_box(S, complex(np.mean(match.samples[idx])), 10 * arc.diameter(), name=f"W{j + 1}")
        cand = SchwarzCandidate(model)
        for q in positions:
            b = int(round(q * (idx.size - 1)))
            if arc.closed and idx.size == arc.n:
                sub = arc.with_base(b)
            else:
                sub = BoundaryArc(match.samples[idx], base_index=b, orientation=arc.orientation,
                                  parametrization=arc.parametrization,
                                  params=None if arc.params is None else np.asarray(arc.params)[idx])
            try:
                rep = classify_boundary(cand, sub, omega, tol=tol)
            except PreconditionError as err:
                rep = ClassificationReport("inconclusive", float("nan"), base_point=complex(sub.base_point),
                                           notes=[str(err)])
            rep.notes.append(f"branch {j + 1}, samples {s}..{e}, position {q:.2f}")
            reports.append(rep)
    return reports
