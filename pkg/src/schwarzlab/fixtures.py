"""Reference configurations with known answers.

Used by the test-suite and by the command line (``schwarzlab fixtures``)
to materialise input files.
"""

from __future__ import annotations

import numpy as np

from .complex_core import AnalyticModel
from .schwarz import BoundaryArc, OmegaSampling, SchwarzCandidate, circle_schwarz


def circle_arc(z0: complex = 0.2 + 0.1j, r: float = 0.7, n: int = 512, base_angle: float = 0.0,
               start_angle: float | None = None) -> BoundaryArc:
    """Counterclockwise circle samples; the domain (disk) lies on the left.

    ``start_angle`` rotates where sampling begins; the base point is the
    sample closest to ``base_angle``.
    """
    start = base_angle if start_angle is None else start_angle
    t = start + 2 * np.pi * np.arange(n) / n
    s = z0 + r * np.exp(1j * t)
    b = int(np.argmin(np.abs(s - (z0 + r * np.exp(1j * base_angle)))))
    par = AnalyticModel.black_box(lambda tt: z0 + r * np.exp(1j * np.asarray(tt)), 0.0, 10.0,
                                  derivative=lambda tt: 1j * r * np.exp(1j * np.asarray(tt)), name="circle")
    return BoundaryArc(s, base_index=b, orientation=1, closed=True, parametrization=par, params=t)


def disk_omega(z0: complex, r: float, n: int = 60) -> OmegaSampling:
    xs = np.linspace(-r, r, n)
    X, Y = np.meshgrid(xs, xs)
    pts = (X + 1j * Y).reshape(-1)
    pts = z0 + pts[np.abs(pts) < r]
    return OmegaSampling(pts, 2 * r / n, lambda z: np.abs(np.asarray(z) - z0) < r)


def circle_fixture(z0=0.2 + 0.1j, r=0.7, n=512, base_angle=0.0, start_angle=None):
    arc = circle_arc(z0, r, n, base_angle, start_angle)
    return SchwarzCandidate(circle_schwarz(z0, r)), arc, disk_omega(z0, r)


def identity_model() -> AnalyticModel:
    return AnalyticModel.polynomial([0, 1], name="identity")


def slit_fixture(n: int = 401):
    """Slit [0, 1) inside the disk of radius 2, base point 1/2; S(z) = z."""
    x = np.linspace(0.0, 0.95, n)
    b = int(np.argmin(np.abs(x - 0.5)))
    par = AnalyticModel.black_box(lambda t: np.asarray(t) + 0j, 0.0, 10.0,
                                  derivative=lambda t: np.ones_like(np.asarray(t, dtype=complex)))
    arc = BoundaryArc(x + 0j, base_index=b, orientation=1, parametrization=par, params=x)

    def member(z):
        z = np.asarray(z, dtype=complex)
        on_slit = (np.abs(z.imag) < 1e-14) & (z.real >= 0) & (z.real < 1)
        return (np.abs(z) < 2) & ~on_slit

    g = np.linspace(-1.9, 1.9, 80)
    X, Y = np.meshgrid(g, g)
    pts = (X + 1j * Y).reshape(-1)
    pts = pts[member(pts)]
    return SchwarzCandidate(identity_model()), arc, OmegaSampling(pts, g[1] - g[0], member)


def real_segment_arc(a: float = -1.0, b: float = 1.0, n: int = 201) -> BoundaryArc:
    x = np.linspace(a, b, n)
    return BoundaryArc(x + 0j, base_index=n // 2)


def cusp_T() -> AnalyticModel:
    """T(z) = z**2 + i z**3."""
    return AnalyticModel.polynomial([0, 0, 1, 1j], name="T")


def tangent_circles_fixture(n: int = 512):
    """Disks |z - i| < 1 and |z + i| < 1 touching at 0.

    Returns the two (candidate, arc, omega) triples; each arc is based at 0.
    """
    out = []
    for c in (1j, -1j):
        base_angle = float(np.angle(-c))
        cand, arc, om = circle_fixture(c, 1.0, n, base_angle)
        out.append((cand, arc, om))
    return out


def unit_circle_arc(n: int = 512) -> BoundaryArc:
    return circle_arc(0.0, 1.0, n)
