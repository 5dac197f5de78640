"""Central table of default numerical tolerances.

Every report written by the command line embeds the table it ran with, so
results can be reproduced without reading source code.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # contour quadrature
    quad_samples: int = 256
    quad_max_samples: int = 8192
    integrality: float = 0.1
    contour_zero: float = 1e-10
    # root continuation
    step_floor: float = 1e-6
    branch_separation: float = 1e-8
    newton_max_iter: int = 5
    newton_tol: float = 1e-13
    # arcs and Schwarz identities
    jordan: float = 1e-9
    verify_threshold: float = 1e-6
    # univalence certificate
    min_interior_points: int = 20
    refine_fraction: float = 1.0 / 300.0
    max_boundary_vertices: int = 20000
    # classification
    n_radii: int = 3
    min_run_samples: int = 16
    # model spaces
    spectral_samples: int = 4096
    leak: float = 1e-6
    spectral_weight_power: int = 4
    atom_window: float = 1e-2
    atom_resolution_floor: float = 1e-4
    alpha_grid: int = 64
    unimodular: float = 1e-10
    # Weierstrass preparation
    pencil_nodes: int = 128
    k_max: int = 12
    match_rel_tol: float = 1e-6
    excluded_zone_factor: float = 4.0
    gcd_tol: float = 1e-10
    disc_zero: float = 1e-12
    # harmonic pipeline
    h_variance: float = 1e-8
    ratio_fit_residual: float = 1e-8
    singular_ratio: float = 1e-12

    def as_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **kw)


DEFAULTS = Tolerances()
