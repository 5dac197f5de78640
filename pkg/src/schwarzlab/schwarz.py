"""Schwarz-function verification and boundary classification.

The classifier works in coordinates centred at the base point: with
``S_t(z) = S(z + zeta0) - conj(zeta0)`` it studies ``Phi1(z) = z S_t(z)``
and ``Phi2 = sqrt(Phi1)`` on the part of the domain inside small disks
around 0.  If ``Phi1`` is univalent the boundary is a regular analytic arc
there; if only ``Phi2`` is, and its image swallows a neighbourhood of 0,
the boundary has a cusp pointing into the domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
import shapely
from scipy.spatial import cKDTree

from .complex_core import AnalyticModel, LocalInverse, distance_to_polyline, winding_numbers
from .errors import (
    DegenerateMapError,
    DomainError,
    PreconditionError,
    RejectedConstruction,
)
from .tolerances import DEFAULTS, Tolerances

LABEL_NAMES = {
    "1": "regular-analytic",
    "2a": "two-sided-arc",
    "2b": "tangent-pair",
    "2c": "cusp",
    "inconclusive": "inconclusive",
    "excluded": "excluded",
}


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryArc:
    """Oriented sampled Jordan arc.

    ``orientation`` is +1 when the domain lies to the left of the direction of
    increasing sample index and -1 when it lies to the right.  ``closed``
    arcs join their last sample back to the first.  When ``parametrization``
    is given, ``params`` holds the real parameters of the samples.
    """

    samples: np.ndarray
    base_index: int = 0
    orientation: int = 1
    closed: bool = False
    parametrization: AnalyticModel | None = None
    params: np.ndarray | None = None
    jordan_tol: float = DEFAULTS.jordan

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).reshape(-1)
        if s.size < 3:
            raise ValueError("an arc needs at least three samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("arc samples must be finite")
        if self.closed and abs(s[0] - s[-1]) <= self.jordan_tol:
            s = s[:-1]
        object.__setattr__(self, "samples", s)
        if not 0 <= self.base_index < s.size:
            raise ValueError("base index out of range")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.params is not None:
            p = np.asarray(self.params, dtype=float).reshape(-1)
            if self.closed and p.size == s.size + 1:
                p = p[:-1]
            if p.size != s.size:
                raise ValueError("params and samples differ in length")
            object.__setattr__(self, "params", p)
        pairs = cKDTree(np.c_[s.real, s.imag]).query_pairs(self.jordan_tol)
        if pairs:
            i, j = sorted(next(iter(pairs)))
            raise ValueError(f"arc samples {i} and {j} coincide (not a Jordan arc)")

    @property
    def base_point(self) -> complex:
        return complex(self.samples[self.base_index])

    @property
    def n(self) -> int:
        return self.samples.size

    def spacing(self) -> float:
        d = np.abs(np.diff(self.samples))
        return float(np.median(d))

    def max_spacing(self) -> float:
        s = self.samples
        d = np.abs(np.diff(np.append(s, s[0]) if self.closed else s))
        return float(d.max())

    def diameter(self) -> float:
        s = self.samples
        return float(max(np.ptp(s.real), np.ptp(s.imag)) * np.sqrt(2))

    def tangents(self) -> np.ndarray:
        """Unit tangents in the direction of increasing index."""
        if self.parametrization is not None and self.params is not None:
            d = self.parametrization.derivative()(self.params)
            bad = np.abs(d) < 1e-14 * (1 + np.abs(self.samples))
            if not np.any(bad):
                return d / np.abs(d)
        s = self.samples
        if self.closed:
            d = np.roll(s, -1) - np.roll(s, 1)
        else:
            d = np.gradient(s)
        return d / np.abs(d)

    def inner_normals(self) -> np.ndarray:
        """Unit normals pointing into the domain side."""
        return self.orientation * 1j * self.tangents()

    def with_base(self, index: int) -> "BoundaryArc":
        return replace(self, base_index=int(index))

    def left_oriented(self) -> "BoundaryArc":
        """Same arc traversed so that the domain lies on the left."""
        if self.orientation == 1:
            return self
        p = None if self.params is None else self.params[::-1].copy()
        return replace(
            self,
            samples=self.samples[::-1].copy(),
            base_index=self.n - 1 - self.base_index,
            orientation=1,
            params=p,
        )

    def shifted(self, c: complex) -> "BoundaryArc":
        """The translated arc with samples zeta - c."""
        par = self.parametrization
        if par is not None:
            f = par
            par = AnalyticModel.black_box(
                lambda t: f(t) - c, f.center, f.radius,
                derivative=lambda t: f.derivative()(t), name=f.name + "-shift",
            )
        return replace(self, samples=self.samples - c, parametrization=par)

    def to_json(self) -> dict:
        d = {
            "format_version": 1,
            "samples": [[float(z.real), float(z.imag)] for z in self.samples],
            "base_index": int(self.base_index),
            "orientation": int(self.orientation),
            "closed": bool(self.closed),
        }
        if self.params is not None:
            d["params"] = [float(t) for t in self.params]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "BoundaryArc":
        if d.get("format_version") != 1:
            raise ValueError("unsupported arc format_version")
        s = np.array([complex(a, b) for a, b in d["samples"]])
        return cls(
            s,
            base_index=int(d.get("base_index", 0)),
            orientation=int(d.get("orientation", 1)),
            closed=bool(d.get("closed", False)),
            params=None if "params" not in d else np.asarray(d["params"], float),
        )


@dataclass(frozen=True)
class SchwarzCandidate:
    """A candidate Schwarz function with an optional factor.

    ``side`` records where the domain is relative to the arcs it is used
    with (+1: left of the arc orientation).  When ``boundary_evaluable`` is
    false, boundary values are taken as one-sided limits from the domain.
    """

    S: AnalyticModel
    side: int = 1
    factor: AnalyticModel | None = None
    boundary_evaluable: bool = True


@dataclass(frozen=True)
class OmegaSampling:
    """Sample points of the domain, their typical spacing and an optional
    exact membership predicate."""

    points: np.ndarray
    spacing: float
    predicate: Callable[[np.ndarray], np.ndarray] | None = None

    def contains(self, z, arcs: Sequence[BoundaryArc] = ()) -> np.ndarray:
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.predicate is not None:
            return np.asarray(self.predicate(zz), dtype=bool)
        # sample-based membership: a nearby sample connects without crossing an arc
        pts = np.asarray(self.points, dtype=complex)
        tree = cKDTree(np.c_[pts.real, pts.imag])
        lines = [
            shapely.LineString(np.c_[a.samples.real, a.samples.imag]
                               if not a.closed else
                               np.c_[np.append(a.samples, a.samples[0]).real,
                                     np.append(a.samples, a.samples[0]).imag])
            for a in arcs
        ]
        out = np.zeros(zz.size, bool)
        for i, p in enumerate(zz):
            idx = tree.query_ball_point([p.real, p.imag], 2.0 * self.spacing)
            for j in sorted(idx, key=lambda j: abs(pts[j] - p))[:8]:
                seg = shapely.LineString([(p.real, p.imag), (pts[j].real, pts[j].imag)])
                if not any(seg.intersects(L) for L in lines):
                    out[i] = True
                    break
        return out


@dataclass
class ClassificationReport:
    label: str
    residual: float
    phi1: dict = field(default_factory=dict)
    phi2: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    base_point: complex = 0j
    radii: list = field(default_factory=list)
    cusp_verdict: dict | None = None
    identity_residual: float | None = None
    exceptional_points: list = field(default_factory=list)
    two_sided: dict | None = None

    def __post_init__(self):
        if self.label not in LABEL_NAMES:
            raise ValueError(f"unknown label {self.label!r}")
        if self.label == "2c" and not (self.phi2.get("univalent") and self.phi1.get("univalent") is False):
            raise ValueError("cusp label requires Phi2-univalent and not Phi1-univalent evidence")

    @property
    def case_name(self) -> str:
        return LABEL_NAMES[self.label]

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "label": self.label,
                "case": self.case_name,
                "residual": self.residual,
                "base_point": self.base_point,
                "phi1": self.phi1,
                "phi2": self.phi2,
                "cusp_verdict": self.cusp_verdict,
                "identity_residual": self.identity_residual,
                "two_sided": self.two_sided,
                "radii": self.radii,
                "exceptional_points": self.exceptional_points,
                "notes": self.notes,
            }
        )


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(np.real(x)), float(np.imag(x))]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if np.isfinite(v) else str(v)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


# ---------------------------------------------------------------------------
# Schwarz identity
# ---------------------------------------------------------------------------


def boundary_limit(f: Callable, arc: BoundaryArc, eps: float | None = None, idx=None) -> np.ndarray:
    """One-sided boundary values of ``f`` at arc samples.

    Evaluates at ``zeta + k*eps*nu`` for k = 1, 2, 4 along the inner normal
    and extrapolates to eps -> 0 (second-order Richardson).
    """
    idx = np.arange(arc.n) if idx is None else np.asarray(idx)
    if eps is None:
        eps = arc.spacing() / 4
    z = arc.samples[idx]
    nu = arc.inner_normals()[idx]
    f1 = np.asarray(f(z + eps * nu), dtype=complex)
    f2 = np.asarray(f(z + 2 * eps * nu), dtype=complex)
    f4 = np.asarray(f(z + 4 * eps * nu), dtype=complex)
    return (8 * f1 - 6 * f2 + f4) / 3


def one_sided(f: Callable, arc: BoundaryArc) -> Callable:
    """Wrap ``f`` so that points on the arc polyline get one-sided limits."""
    s = arc.samples
    line_pts = np.append(s, s[0]) if arc.closed else s
    nu_all = arc.inner_normals()
    tree = cKDTree(np.c_[s.real, s.imag])
    eps = arc.spacing() / 4
    tiny = 1e-12 * max(arc.diameter(), 1e-300)

    def g(z):
        zz = np.asarray(z, dtype=complex)
        flat = zz.reshape(-1)
        out = np.empty(flat.size, complex)
        on = distance_to_polyline(line_pts, flat) <= tiny
        if np.any(~on):
            out[~on] = np.asarray(f(flat[~on]), dtype=complex)
        if np.any(on):
            p = flat[on]
            _, j = tree.query(np.c_[p.real, p.imag])
            nu = nu_all[j]
            f1 = np.asarray(f(p + eps * nu), dtype=complex)
            f2 = np.asarray(f(p + 2 * eps * nu), dtype=complex)
            f4 = np.asarray(f(p + 4 * eps * nu), dtype=complex)
            out[on] = (8 * f1 - 6 * f2 + f4) / 3
        return out.reshape(zz.shape)

    return g


def _boundary_values(f: Callable, arc: BoundaryArc, evaluable: bool, idx=None) -> np.ndarray:
    idx = np.arange(arc.n) if idx is None else np.asarray(idx)
    if evaluable:
        return np.asarray(f(arc.samples[idx]), dtype=complex)
    return boundary_limit(f, arc, idx=idx)


def schwarz_residuals(cand: SchwarzCandidate, arc: BoundaryArc) -> np.ndarray:
    """Per-sample |S(zeta) - conj(zeta) * factor(zeta)|."""
    try:
        sv = _boundary_values(cand.S, arc, cand.boundary_evaluable)
        fac = 1.0 if cand.factor is None else _boundary_values(cand.factor, arc, cand.boundary_evaluable)
    except DomainError as exc:
        raise DomainError(f"schwarz_verify: {exc}") from exc
    r = np.abs(sv - np.conj(arc.samples) * fac)
    if not np.all(np.isfinite(r)):
        i = int(np.argmax(~np.isfinite(r)))
        raise DomainError(f"schwarz_verify: evaluation failed at sample {i} (zeta={arc.samples[i]})")
    return r


def schwarz_verify(cand: SchwarzCandidate, arc: BoundaryArc) -> float:
    """Max residual of S(zeta) = conj(zeta) * factor(zeta) over the arc samples."""
    return float(np.max(schwarz_residuals(cand, arc)))


def circle_schwarz(z0: complex, r: float) -> AnalyticModel:
    """Schwarz function conj(z0) + r**2 / (z - z0) of the circle |z - z0| = r."""
    z0 = complex(z0)
    return AnalyticModel.black_box(
        lambda z: np.conj(z0) + r * r / (z - z0),
        center=z0 + r,
        radius=r,
        derivative=lambda z: -r * r / (z - z0) ** 2,
        name="circle-schwarz",
    )


# ---------------------------------------------------------------------------
# Recentering
# ---------------------------------------------------------------------------


def recenter_monomial(S: AnalyticModel, zeta0: complex, n: int) -> AnalyticModel:
    """S_t(z) = S(z + zeta0) - conj(zeta0) * z**n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    zeta0 = complex(zeta0)
    if zeta0 == 0:
        return S
    c = np.conj(zeta0)
    dS = S.derivative()
    return AnalyticModel.black_box(
        lambda z: S(np.asarray(z) + zeta0) - c * np.asarray(z) ** n,
        S.center - zeta0,
        S.radius,
        derivative=lambda z: dS(np.asarray(z) + zeta0) - (c * n * np.asarray(z) ** (n - 1) if n else 0),
        name=f"{S.name}|recentered",
    )


def recenter_pair(f1: AnalyticModel, f2: AnalyticModel, zeta0: complex):
    """((f1)_t, (f2)_t) with (f1)_t(z) = f1(z+z0) - conj(z0) f2(z+z0), (f2)_t(z) = f2(z+z0)."""
    zeta0 = complex(zeta0)
    if zeta0 == 0:
        return f1, f2
    c = np.conj(zeta0)
    d1, d2 = f1.derivative(), f2.derivative()
    g1 = AnalyticModel.black_box(
        lambda z: f1(np.asarray(z) + zeta0) - c * f2(np.asarray(z) + zeta0),
        f1.center - zeta0,
        f1.radius,
        derivative=lambda z: d1(np.asarray(z) + zeta0) - c * d2(np.asarray(z) + zeta0),
        name=f"{f1.name}|pair",
    )
    g2 = AnalyticModel.black_box(
        lambda z: f2(np.asarray(z) + zeta0),
        f2.center - zeta0,
        f2.radius,
        derivative=lambda z: d2(np.asarray(z) + zeta0),
        name=f"{f2.name}|pair",
    )
    return g1, g2


# ---------------------------------------------------------------------------
# Diagnostics for the monomial limit and the growth bound
# ---------------------------------------------------------------------------


@dataclass
class MonomialLimitReport:
    converges: bool
    terminal_ratios: list
    partial: bool = False
    rays: list = field(default_factory=list)


def monomial_limit_diagnostic(
    S: AnalyticModel, n: int, rays: Sequence, n_steps: int = 36, threshold: float = 1e-6
) -> MonomialLimitReport:
    """Check S(z)/z**n -> 0 along rays approaching 0.

    Each ray is sampled at z_k = end + (start - end) 2**-k.  The ratio tail
    must stay under its running envelope max_{j>=k} r_j, and the envelope
    must fall below ``threshold``.
    """
    terminal = []
    details = []
    partial = False
    ok_all = True
    for ray in rays:
        w = ray.waypoints
        start, end = complex(w[0]), complex(w[-1])
        k = np.arange(n_steps + 1)
        zk = end + (start - end) * 0.5**k
        ratios = []
        for z in zk:
            try:
                v = S(z)
            except DomainError:
                partial = True
                break
            ratios.append(abs(v / z**n) if z != 0 else np.inf)
        r = np.array(ratios)
        if r.size == 0:
            ok_all = False
            terminal.append(float("nan"))
            details.append({"start": start, "ratios": []})
            continue
        env = np.maximum.accumulate(r[::-1])[::-1]
        conv = bool(np.all(np.isfinite(env)) and env[-1] < threshold and r.size == zk.size)
        ok_all &= conv
        terminal.append(float(r[-1]))
        details.append({"start": start, "ratios": r.tolist(), "envelope_end": float(env[-1])})
    return MonomialLimitReport(bool(ok_all and not partial), terminal, partial, details)


@dataclass
class PLBoundReport:
    boundary_excess: float
    interior_excess: float
    boundary_holds: bool
    interior_holds: bool


def pl_bound_check(f, boundary: BoundaryArc, interior, alpha: float, beta: float, zeta0: complex,
                   slack: float = 1e-12) -> PLBoundReport:
    """Check |f| <= 1 on the boundary (away from zeta0) and
    |f(z)| <= alpha |z - zeta0|**(-beta) inside.  Excess values are the
    worst violations (<= 0 means the bound holds)."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    s = boundary.samples
    keep = np.abs(s - zeta0) > 1e-12
    b = np.abs(np.asarray(f(s[keep]), dtype=complex))
    ex_b = float(np.max(b) - 1.0) if b.size else -np.inf
    zi = np.asarray(interior, dtype=complex).reshape(-1)
    bound = alpha * np.abs(zi - zeta0) ** (-beta)
    ex_i = float(np.max(np.abs(np.asarray(f(zi), dtype=complex)) - bound)) if zi.size else -np.inf
    return PLBoundReport(ex_b, ex_i, ex_b <= slack, ex_i <= slack * max(1.0, float(np.max(bound, initial=1.0))))


# ---------------------------------------------------------------------------
# Univalence certificate
# ---------------------------------------------------------------------------


@dataclass
class BoundaryPiece:
    """Piece of a region boundary: ``func`` maps parameters to points."""

    func: Callable[[np.ndarray], np.ndarray]
    t: np.ndarray


@dataclass
class Region:
    """Jordan region described by boundary pieces (counterclockwise, joined
    end to start) and a set of interior sample points."""

    pieces: list
    interior: np.ndarray

    def polygon(self) -> np.ndarray:
        return np.concatenate([np.asarray(p.func(p.t))[:-1] for p in self.pieces])


@dataclass
class UnivalenceResult:
    univalent: bool
    witness: dict
    mode: str

    def __bool__(self):
        return self.univalent


def _grid_inside(poly: np.ndarray, n_min: int, margin: float, avoid=None, avoid_r=0.0) -> np.ndarray:
    ring = shapely.Polygon(np.c_[poly.real, poly.imag])
    x0, y0, x1, y1 = ring.bounds
    g = 12
    pts = np.empty(0, complex)
    while g <= 192:
        xs = np.linspace(x0, x1, g + 2)[1:-1]
        ys = np.linspace(y0, y1, g + 2)[1:-1]
        X, Y = np.meshgrid(xs, ys)
        cand = (X + 1j * Y).reshape(-1)
        geo = shapely.points(np.c_[cand.real, cand.imag])
        inside = shapely.contains(ring, geo)
        dist = shapely.distance(ring.exterior, geo)
        keep = inside & (dist > margin)
        if avoid is not None:
            keep &= np.abs(cand - avoid) > avoid_r
        pts = cand[keep]
        if pts.size >= n_min:
            break
        g *= 2
    return pts


def circle_region(c, n: int | None = None) -> Region:
    """Region for a circle (``complex_core.Circle``) including its centre."""
    n = c.n if n is None else n
    t = np.linspace(0, 2 * np.pi, n + 1)
    piece = BoundaryPiece(lambda t, c=c: c.center + c.radius * np.exp(1j * t), t)
    rr, aa = np.meshgrid([0.3, 0.55, 0.8], 2 * np.pi * np.arange(8) / 8)
    interior = np.concatenate([[c.center], (c.center + c.radius * rr * np.exp(1j * aa)).reshape(-1)])
    return Region([piece], interior)


def polygon_region(samples: np.ndarray) -> Region:
    s = np.asarray(samples, dtype=complex)
    if shapely.Polygon(np.c_[s.real, s.imag]).exterior.is_ccw is False:
        s = s[::-1]
    closed = np.append(s, s[0])
    t = np.arange(closed.size, dtype=float)

    def lin(tt, closed=closed):
        tt = np.asarray(tt, float)
        i = np.clip(np.floor(tt).astype(int), 0, closed.size - 2)
        f = tt - i
        return closed[i] * (1 - f) + closed[i + 1] * f

    diam = float(np.ptp(s.real) + np.ptp(s.imag))
    interior = _grid_inside(s, 24, 1e-3 * diam)
    return Region([BoundaryPiece(lin, t)], interior)


def upper_half_disk_region(eta: float, n: int = 400) -> Region:
    """Closed upper half-disk K_eta: diameter then semicircle."""
    seg = BoundaryPiece(lambda t: np.asarray(t, float) + 0j, np.linspace(-eta, eta, n + 1))
    arc = BoundaryPiece(lambda t: eta * np.exp(1j * np.asarray(t)), np.linspace(0, np.pi, n + 1))
    rr, aa = np.meshgrid(np.linspace(0.15, 0.9, 6), np.linspace(0.15, np.pi - 0.15, 8))
    interior = (eta * rr * np.exp(1j * aa)).reshape(-1)
    return Region([seg, arc], interior)


def _as_region(region) -> Region:
    from .complex_core import Circle

    if isinstance(region, Region):
        return region
    if isinstance(region, Circle):
        return circle_region(region)
    if isinstance(region, BoundaryArc):
        return polygon_region(region.samples)
    raise TypeError("unsupported region type")


def _refined_boundary(f: Callable, region: Region, frac: float, cap: int):
    """Evaluate ``f`` on the region boundary, bisecting parameter intervals
    whose image segment exceeds ``frac`` times the image diameter."""
    ts = [np.asarray(p.t, float) for p in region.pieces]
    zs = [np.asarray(p.func(t), dtype=complex) for p, t in zip(region.pieces, ts)]
    fs = [np.asarray(f(z), dtype=complex) for z in zs]
    for _ in range(30):
        allf = np.concatenate(fs)
        if not np.all(np.isfinite(allf)):
            raise DomainError("map is not finite on the region boundary")
        diam = max(np.ptp(allf.real), np.ptp(allf.imag))
        total = sum(t.size for t in ts)
        if diam == 0 or total >= cap:
            break
        changed = False
        for k, p in enumerate(region.pieces):
            seg = np.abs(np.diff(fs[k]))
            long = np.nonzero(seg > frac * diam)[0]
            if long.size == 0:
                continue
            room = cap - total
            if room <= 0:
                break
            long = long[np.argsort(-seg[long])][:room]
            tm = 0.5 * (ts[k][long] + ts[k][long + 1])
            zm = np.asarray(p.func(tm), dtype=complex)
            fm = np.asarray(f(zm), dtype=complex)
            order = np.argsort(np.concatenate([ts[k], tm]), kind="stable")
            ts[k] = np.concatenate([ts[k], tm])[order]
            zs[k] = np.concatenate([zs[k], zm])[order]
            fs[k] = np.concatenate([fs[k], fm])[order]
            total += tm.size
            changed = True
        if not changed:
            break
    z = np.concatenate([zz[:-1] for zz in zs])
    fz = np.concatenate([ff[:-1] for ff in fs])
    return z, fz


def _face_windings(image: np.ndarray, min_area: float):
    """Winding numbers of the closed image polygon around each face of its
    planar arrangement (slivers below ``min_area`` are ignored)."""
    ring = np.append(image, image[0])
    line = shapely.LineString(np.c_[ring.real, ring.imag])
    noded = shapely.node(line)
    faces = shapely.get_parts(shapely.polygonize(shapely.get_parts(noded)))
    out = []
    if len(faces) == 0:
        return out
    areas = shapely.area(faces)
    keep = [f for f, a in zip(faces, areas) if a > min_area]
    if not keep:
        return out
    reps = shapely.point_on_surface(np.array(keep, dtype=object))
    xy = shapely.get_coordinates(reps)
    pts = xy[:, 0] + 1j * xy[:, 1]
    w = winding_numbers(image, pts)
    return list(zip(pts, np.rint(w).astype(int), [float(shapely.area(f)) for f in keep]))


def certify_from_values(
    boundary_pre: np.ndarray,
    boundary_img: np.ndarray,
    interior_pre: np.ndarray,
    interior_img: np.ndarray,
    mode: str = "closed",
    tol: Tolerances = DEFAULTS,
    witness_search: bool = True,
) -> UnivalenceResult:
    """Univalence decision from boundary and interior image samples.

    ``closed`` mode: the image boundary polygon is simple and winds once
    around every sampled interior image point.  ``open`` mode (image
    boundary may contain a doubly traversed slit): every interior image
    point has winding 1 and no face of the image arrangement has winding
    above 1, which by the degree argument means at most one preimage.
    """
    img = np.asarray(boundary_img, dtype=complex)
    diam = float(max(np.ptp(img.real), np.ptp(img.imag)))
    scale = max(diam, 1e-300)
    if diam <= 1e-13 * (1 + float(np.max(np.abs(img)))):
        raise DegenerateMapError("map is numerically constant on the region boundary")
    witness: dict = {}
    ok = True
    if interior_img.size < tol.min_interior_points:
        witness["interior_points"] = int(interior_img.size)
        ok = False
    wn = winding_numbers(img, interior_img) if interior_img.size else np.empty(0)
    wr = np.rint(wn).astype(int)
    bad = np.nonzero(wr != 1)[0]
    if bad.size:
        i = int(bad[0])
        witness.update({"kind": "winding", "point": complex(interior_img[i]),
                        "preimage": complex(interior_pre[i]), "winding": int(wr[i])})
        ok = False
    if mode == "closed":
        ring = shapely.LinearRing(np.c_[img.real, img.imag])
        if not ring.is_simple:
            ok = False
            if "kind" not in witness:
                if witness_search:
                    witness.update(_collision_witness(boundary_pre, img))
                else:
                    witness["kind"] = "collision"
    elif mode == "open":
        faces = _face_windings(img, (1e-7 * scale) ** 2)
        if faces:
            worst = max(faces, key=lambda f: f[1])
            witness.setdefault("max_face_winding", int(worst[1]))
            if worst[1] > 1:
                ok = False
                if "kind" not in witness:
                    witness.update({"kind": "winding", "point": complex(worst[0]),
                                    "winding": int(worst[1])})
    else:
        raise ValueError("mode must be 'closed' or 'open'")
    witness.setdefault("interior_points", int(interior_img.size))
    witness["boundary_vertices"] = int(img.size)
    return UnivalenceResult(bool(ok), witness, mode)


def _collision_witness(pre: np.ndarray, img: np.ndarray) -> dict:
    n = img.size
    seg = np.abs(np.diff(np.append(img, img[0])))
    local = 2 * np.maximum(seg, np.roll(seg, 1))
    tree = cKDTree(np.c_[img.real, img.imag])
    k = min(12, n)
    dist, idx = tree.query(np.c_[img.real, img.imag], k=k)
    ii = np.repeat(np.arange(n), k).reshape(n, k)
    gap = np.abs(ii - idx)
    gap = np.minimum(gap, n - gap)
    ok = (idx < n) & (dist <= local[:, None]) & (gap > 3)
    best = None
    if np.any(ok):
        d = np.where(ok, dist, np.inf)
        flat = int(np.argmin(d))
        i, c = divmod(flat, k)
        best = (i, int(idx[i, c]), float(d[i, c]))
    if best is None:
        ring = np.append(img, img[0])
        line = shapely.LineString(np.c_[ring.real, ring.imag])
        pt = shapely.get_coordinates(shapely.intersection(line, line))
        return {"kind": "collision", "pair": None, "note": "self-intersection", "points": int(len(pt))}
    i, j, d = best
    return {"kind": "collision", "pair": [complex(pre[i]), complex(pre[j])],
            "images": [complex(img[i]), complex(img[j])], "distance": float(d)}


def check_univalent(f, region, mode: str = "closed", tol: Tolerances = DEFAULTS) -> UnivalenceResult:
    """Numerical univalence certificate for ``f`` on a Jordan region.

    ``region`` is a ``Circle``, a closed ``BoundaryArc`` polygon or a
    :class:`Region`.  See :func:`certify_from_values` for the criteria.
    """
    reg = _as_region(region)
    z, fz = _refined_boundary(f, reg, tol.refine_fraction, tol.max_boundary_vertices)
    fi = np.asarray(f(reg.interior), dtype=complex)
    return certify_from_values(z, fz, reg.interior, fi, mode, tol)


# ---------------------------------------------------------------------------
# Omega ∩ D(zeta0, delta) regions
# ---------------------------------------------------------------------------


@dataclass
class LocalRegion:
    delta: float
    region: Region
    arc_piece: BoundaryPiece
    circle_piece: BoundaryPiece
    run: np.ndarray


def _crossing(a: complex, b: complex, c: complex, r: float) -> float:
    """Parameter s in [0,1] where |a + s(b-a) - c| = r (a inside, b outside or vice versa)."""
    d = b - a
    f = a - c
    A = abs(d) ** 2
    B = 2 * (f.real * d.real + f.imag * d.imag)
    C = abs(f) ** 2 - r * r
    disc = max(B * B - 4 * A * C, 0.0)
    roots = [(-B - np.sqrt(disc)) / (2 * A), (-B + np.sqrt(disc)) / (2 * A)]
    roots = [s for s in roots if -1e-12 <= s <= 1 + 1e-12]
    return float(np.clip(roots[0] if roots else 0.5, 0, 1))


def local_region(arc: BoundaryArc, delta: float, min_run: int = DEFAULTS.min_run_samples) -> LocalRegion | None:
    """Omega ∩ D(zeta0, delta) for a left-oriented arc, or None when the disk
    meets the arc in more than one run, reaches an arc end or holds too few
    samples."""
    s = arc.samples
    n = s.size
    b = arc.base_index
    zeta0 = s[b]
    if arc.closed:
        shift = n // 2 - b
        order = np.roll(np.arange(n), shift)
    else:
        order = np.arange(n)
    ss = s[order]
    bb = int(np.nonzero(order == b)[0][0])
    inside = np.abs(ss - zeta0) < delta
    i0 = bb
    while i0 > 0 and inside[i0 - 1]:
        i0 -= 1
    i1 = bb
    while i1 < n - 1 and inside[i1 + 1]:
        i1 += 1
    if i0 == 0 or i1 == n - 1:
        return None
    if np.count_nonzero(inside) != i1 - i0 + 1:
        return None
    if i1 - i0 + 1 < min_run:
        return None
    # the closing edge of a closed arc must stay clear of the disk as well
    par = arc.parametrization
    use_par = par is not None and arc.params is not None
    if use_par:
        pp = arc.params[order]
        if arc.closed:
            pp = np.unwrap(pp, period=2 * np.pi) if np.ptp(pp) > 0 else pp

        def g(t):
            return np.asarray(par(np.asarray(t, float) + 0j), dtype=complex)

        def bisect(ta, tb):
            fa = abs(g(ta) - zeta0) - delta
            for _ in range(80):
                tm = 0.5 * (ta + tb)
                fm = abs(g(tm) - zeta0) - delta
                if (fm < 0) == (fa < 0):
                    ta, fa = tm, fm
                else:
                    tb = tm
            return 0.5 * (ta + tb)

        t_in = bisect(pp[i0 - 1], pp[i0])
        t_out = bisect(pp[i1], pp[i1 + 1])
        tt = np.concatenate([[t_in], pp[i0 : i1 + 1], [t_out]])
        arc_piece = BoundaryPiece(g, tt)
        p_in, p_out = complex(g(t_in)), complex(g(t_out))
    else:
        s_in = _crossing(ss[i0], ss[i0 - 1], zeta0, delta)
        s_out = _crossing(ss[i1], ss[i1 + 1], zeta0, delta)
        p_in = ss[i0] + s_in * (ss[i0 - 1] - ss[i0])
        p_out = ss[i1] + s_out * (ss[i1 + 1] - ss[i1])
        nodes = np.concatenate([[p_in], ss[i0 : i1 + 1], [p_out]])

        def lin(tt, nodes=nodes):
            tt = np.asarray(tt, float)
            i = np.clip(np.floor(tt).astype(int), 0, nodes.size - 2)
            f = tt - i
            return nodes[i] * (1 - f) + nodes[i + 1] * f

        arc_piece = BoundaryPiece(lin, np.arange(nodes.size, dtype=float))
    a_out = np.angle(p_out - zeta0)
    a_in = np.angle(p_in - zeta0)
    if a_in <= a_out:
        a_in += 2 * np.pi
    m = max(16, int(np.ceil(64 * (a_in - a_out) / np.pi)))
    ta = np.linspace(a_out, a_in, m + 1)
    circ = BoundaryPiece(lambda t, c=zeta0, r=delta: c + r * np.exp(1j * np.asarray(t)), ta)
    poly = np.concatenate([np.asarray(arc_piece.func(arc_piece.t))[:-1], circ.func(ta)[:-1]])
    interior = _grid_inside(poly, 40, 0.02 * delta, avoid=zeta0, avoid_r=0.2 * delta)
    return LocalRegion(float(delta), Region([arc_piece, circ], interior), arc_piece, circ,
                       order[i0 : i1 + 1])


def local_radii(arc: BoundaryArc, n_radii: int = DEFAULTS.n_radii, delta_max: float | None = None,
                min_run: int = DEFAULTS.min_run_samples) -> list[LocalRegion]:
    """Nested clean regions D(zeta0, delta_j), delta_j = delta_max 2**-j."""
    if delta_max is None:
        d = 0.25 * arc.diameter()
        while d > 1e-9 * arc.diameter():
            if local_region(arc, d, min_run) is not None:
                break
            d *= 0.7
        delta_max = d
    out = []
    for j in range(n_radii):
        lr = local_region(arc, delta_max * 0.5**j, min_run)
        if lr is not None:
            out.append(lr)
    return out


# ---------------------------------------------------------------------------
# Phi tests
# ---------------------------------------------------------------------------


def _sqrt_track(values: np.ndarray, start_sign_ref: complex | None = None) -> np.ndarray:
    """Square roots chosen continuously along a sequence."""
    r = np.sqrt(values.astype(complex))
    out = np.empty_like(r)
    prev = r[0] if start_sign_ref is None else (r[0] if abs(r[0] - start_sign_ref) <= abs(r[0] + start_sign_ref) else -r[0])
    out[0] = prev
    for i in range(1, r.size):
        c = r[i]
        if abs(c - prev) > abs(c + prev):
            c = -c
        out[i] = c
        prev = c
    return out


@dataclass
class PhiEvidence:
    phi1: UnivalenceResult
    phi2: UnivalenceResult
    iv_prime: dict
    identity_residual: float


def phi_tests(F1: Callable, lr: LocalRegion, zeta0: complex, tol: Tolerances = DEFAULTS) -> PhiEvidence:
    """Univalence evidence for F1 and sqrt(F1) on a local region.

    ``F1`` is evaluated in the original coordinates and must vanish at
    ``zeta0``.  The square root is tracked continuously along the boundary,
    starting next to ``zeta0`` on the arc and never passing through it;
    interior values are continued from the nearest boundary vertex.
    """
    reg = lr.region
    z, f1 = _refined_boundary(F1, reg, tol.refine_fraction, tol.max_boundary_vertices)
    fi = np.asarray(F1(reg.interior), dtype=complex)
    ev1 = certify_from_values(z, f1, reg.interior, fi, "open", tol)
    # rotate the boundary so it starts right after zeta0 and ends at it
    j0 = int(np.argmin(np.abs(z - zeta0)))
    zr = np.roll(z, -j0)
    f1r = np.roll(f1, -j0)
    tail_z, tail_f = zr[1:], f1r[1:]
    f2_tail = _sqrt_track(tail_f)
    f2 = np.concatenate([[np.sqrt(f1r[0] + 0j) * 0], f2_tail])
    # interior values by continuation along segments from nearest vertex
    tree = cKDTree(np.c_[tail_z.real, tail_z.imag])
    _, idx = tree.query(np.c_[reg.interior.real, reg.interior.imag])
    f2i = np.empty(reg.interior.size, complex)
    for k, (p, j) in enumerate(zip(reg.interior, idx)):
        seg = tail_z[j] + (p - tail_z[j]) * np.linspace(0, 1, 33)
        vals = np.asarray(F1(seg), dtype=complex)
        f2i[k] = _sqrt_track(vals, start_sign_ref=f2_tail[j])[-1]
    ev2 = certify_from_values(zr, f2, reg.interior, f2i, "open", tol)
    ident = float(max(np.max(np.abs(f2_tail**2 - tail_f) / np.maximum(1, np.abs(tail_f))),
                      np.max(np.abs(f2i**2 - fi) / np.maximum(1, np.abs(fi)))))
    # (iv') the image of Phi2 covers a punctured neighbourhood of 0 off the real line
    rc = np.abs(f2[1:])
    circle_pts = np.abs(zr[1:] - zeta0) > lr.delta * (1 - 1e-9)
    eps = 0.5 * float(np.min(rc[circle_pts])) if np.any(circle_pts) else 0.0
    iv = {"eps": eps, "holds": False}
    if eps > 0:
        rr, aa = np.meshgrid(np.linspace(0.15, 0.9, 6), np.linspace(0, 2 * np.pi, 24, endpoint=False))
        probe = (eps * rr * np.exp(1j * aa)).reshape(-1)
        probe = probe[np.abs(probe.imag) > 0.05 * eps]
        w = np.rint(winding_numbers(f2, probe)).astype(int)
        iv["holds"] = bool(np.all(w == 1))
        iv["probes"] = int(probe.size)
        if not iv["holds"]:
            iv["uncovered"] = complex(probe[np.nonzero(w != 1)[0][0]])
    return PhiEvidence(ev1, ev2, iv, ident)


def _two_sided_probe(arc: BoundaryArc, lr: LocalRegion, omega: OmegaSampling, arcs=()) -> dict:
    """Probe both sides of the arc at samples near (not at) zeta0."""
    s = arc.samples
    zeta0 = arc.base_point
    run = lr.run
    d = np.abs(s[run] - zeta0)
    pick = run[(d > 0.2 * lr.delta) & (d < 0.8 * lr.delta)]
    if pick.size == 0:
        pick = run[run != arc.base_index]
    pick = pick[np.linspace(0, pick.size - 1, min(8, pick.size)).astype(int)]
    nu = arc.inner_normals()[pick]
    eps = min(0.25 * omega.spacing, 0.05 * lr.delta)
    left = omega.contains(s[pick] + eps * nu, arcs=(arc,) + tuple(arcs))
    right = omega.contains(s[pick] - eps * nu, arcs=(arc,) + tuple(arcs))
    return {"probes": int(pick.size), "left_in": int(left.sum()), "right_in": int(right.sum()),
            "two_sided": bool(left.all() and right.all()), "one_sided": bool(left.all() and not right.any())}


def classify_boundary(
    cand: SchwarzCandidate,
    arc: BoundaryArc,
    omega: OmegaSampling,
    twin: tuple | None = None,
    tol: Tolerances = DEFAULTS,
) -> ClassificationReport:
    """Regularity case label at the arc's base point.

    ``twin`` optionally supplies ``(candidate, arc, omega)`` for a second
    one-sided component meeting the first tangentially at the base point;
    this is the only way case (2b) can be recognised.
    """
    residual = schwarz_verify(cand, arc)
    if residual > tol.verify_threshold:
        raise PreconditionError(f"Schwarz identity residual {residual:.3e} exceeds {tol.verify_threshold}")
    if cand.side == -1:
        arc = replace(arc, orientation=-arc.orientation)
    arc = arc.left_oriented()
    zeta0 = arc.base_point
    radii = local_radii(arc, tol.n_radii, min_run=tol.min_run_samples)
    if not radii:
        return ClassificationReport("inconclusive", residual, base_point=zeta0,
                                    notes=["no disk around the base point meets the arc in a single clean run"])
    notes = []
    probe = _two_sided_probe(arc, radii[-1], omega)
    if twin is not None:
        return _classify_twin(cand, arc, omega, twin, residual, probe, tol)
    if probe["two_sided"]:
        return ClassificationReport("2a", residual, base_point=zeta0, two_sided=probe,
                                    notes=["both sides of the arc belong to the domain near the base point"])
    S_eval = cand.S if cand.boundary_evaluable else one_sided(cand.S, arc)
    St = recenter_monomial(AnalyticModel.black_box(S_eval, cand.S.center, cand.S.radius), zeta0, 0)

    def F1(z):
        w = np.asarray(z, dtype=complex) - zeta0
        return w * St(w)

    per_radius = []
    ev = None
    for lr in radii:
        ev = phi_tests(F1, lr, zeta0, tol)
        per_radius.append({
            "delta": lr.delta,
            "run_samples": int(lr.run.size),
            "phi1": {"univalent": ev.phi1.univalent, **ev.phi1.witness},
            "phi2": {"univalent": ev.phi2.univalent, **ev.phi2.witness},
            "iv_prime": ev.iv_prime,
            "identity_residual": ev.identity_residual,
        })
    assert ev is not None
    phi1 = {"univalent": ev.phi1.univalent, **ev.phi1.witness}
    phi2 = {"univalent": ev.phi2.univalent, **ev.phi2.witness}
    ident = max(r["identity_residual"] for r in per_radius)
    if ev.phi1.univalent:
        label = "1"
    elif ev.phi2.univalent and ev.iv_prime["holds"]:
        label = "2c"
        notes.append("Phi2 univalent, Phi1 two-to-one; Phi2 image covers a punctured neighbourhood of 0")
    else:
        label = "inconclusive"
        notes.append("neither univalence certificate fired at the smallest radius")
    if not probe["one_sided"]:
        notes.append(f"one-sidedness probe ambiguous: {probe}")
    return ClassificationReport(label, residual, phi1=phi1, phi2=phi2, notes=notes, base_point=zeta0,
                                radii=per_radius, cusp_verdict=ev.iv_prime if label == "2c" else None,
                                identity_residual=ident, two_sided=probe)


def _classify_twin(cand, arc, omega, twin, residual, probe, tol) -> ClassificationReport:
    """Case (2b): two one-sided regular components tangent at the base point.

    Each component is classified against its own domain sampling; the
    inner normals at the base point must be opposite.
    """
    cand2, arc2, omega2 = twin
    zeta0 = arc.base_point
    if abs(arc2.base_point - zeta0) > 10 * tol.jordan:
        return ClassificationReport("inconclusive", residual, base_point=zeta0,
                                    notes=["twin arc does not pass through the base point"])
    arc2l = (replace(arc2, orientation=-arc2.orientation) if cand2.side == -1 else arc2).left_oriented()
    n1 = arc.inner_normals()[arc.base_index]
    n2 = arc2l.inner_normals()[arc2l.base_index]
    opposite = float(np.real(n1 * np.conj(n2)))
    r1 = classify_boundary(cand, arc, omega, None, tol)
    r2 = classify_boundary(cand2, arc2, omega2, None, tol)
    sides = {"first": r1.label, "second": r2.label, "normal_alignment": opposite}
    if opposite < -1 + 1e-6 and r1.label == "1" and r2.label == "1":
        return ClassificationReport("2b", residual, phi1=r1.phi1, phi2=r1.phi2, base_point=zeta0,
                                    two_sided=probe, radii=[sides],
                                    notes=["two one-sided regular components share the tangent line at the base point"])
    return ClassificationReport("inconclusive", residual, base_point=zeta0, radii=[sides],
                                notes=[f"twin test failed: {sides}"])


# ---------------------------------------------------------------------------
# Cusp construction
# ---------------------------------------------------------------------------


@dataclass
class CuspDomain:
    arc: BoundaryArc
    S: AnalyticModel
    candidate: SchwarzCandidate
    omega: OmegaSampling
    T: AnalyticModel
    A: AnalyticModel
    inverse: LocalInverse
    eta: float
    univalence: UnivalenceResult


def _conj_reflect(T: AnalyticModel) -> AnalyticModel:
    """A(z) = conj(T(conj z))."""
    if T.kind == "series":
        return AnalyticModel.series(np.conj(T.coefficients), np.conj(T.center), T.radius, T.closed, "A")
    dT = T.derivative()
    return AnalyticModel.black_box(lambda z: np.conj(T(np.conj(z))), np.conj(T.center), T.radius,
                                   derivative=lambda z: np.conj(dT(np.conj(z))), name="A")


def build_cusp_domain(T: AnalyticModel, eta: float, n_samples: int = 401, tol: Tolerances = DEFAULTS) -> CuspDomain:
    """Domain Omega = T(upper half-disk of radius eta) with a cusp at 0.

    S = A o T^{-1} with A(z) = conj(T(conj z)) is its Schwarz function on
    the arc T((-eta, eta)).
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    dT = T.derivative()
    d2T = dT.derivative()
    scale = max(1.0, abs(d2T(0.0)))
    if abs(T(0.0)) > 1e-12 or abs(dT(0.0)) > 1e-10 * scale or abs(d2T(0.0)) < 1e-8:
        raise RejectedConstruction("T must have a zero of order exactly 2 at 0",
                                   {"T(0)": T(0.0), "T'(0)": dT(0.0), "T''(0)": d2T(0.0)})
    uni = check_univalent(T, upper_half_disk_region(eta), "closed", tol)
    if not uni.univalent:
        raise RejectedConstruction("T is not univalent on the closed upper half-disk", uni.witness)
    if n_samples % 2 == 0:
        n_samples += 1
    x = np.linspace(-eta, eta, n_samples)
    samples = T(x + 0j)
    A = _conj_reflect(T)
    dA = A.derivative()
    # seeds: polar grid in the closed upper half-disk
    rr, aa = np.meshgrid(np.linspace(0, eta, 121)[1:], np.linspace(0, np.pi, 121))
    seeds = np.concatenate([x + 0j, (rr * np.exp(1j * aa)).reshape(-1)])

    def accept(xi):
        return (xi.imag >= -1e-12 * eta) & (np.abs(xi) <= eta * (1 + 1e-9))

    inv = LocalInverse(T, seeds, accept=accept)

    def S_eval(z):
        return A(inv(z))

    def S_der(z):
        xi = inv(z)
        return dA(xi) / dT(xi)

    S = AnalyticModel.black_box(S_eval, 0.0, abs(T(eta)), derivative=S_der, name="cusp-schwarz")
    arc = BoundaryArc(samples, base_index=n_samples // 2, orientation=1, parametrization=T, params=x)
    rr2, aa2 = np.meshgrid(np.linspace(0, eta, 41)[1:-1], np.linspace(0, np.pi, 81)[1:-1])
    pts = T((rr2 * np.exp(1j * aa2)).reshape(-1))
    spacing = float(np.median(np.abs(np.diff(samples))))

    def member(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.zeros(z.size, bool)
        for i, p in enumerate(z):
            try:
                xi = inv(p)
            except DomainError:
                continue
            out[i] = xi.imag > 0 and abs(xi) < eta
        return out

    omega = OmegaSampling(pts, spacing, member)
    return CuspDomain(arc, S, SchwarzCandidate(S), omega, T, A, inv, eta, uni)
