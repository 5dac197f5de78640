import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schwarzlab.complex_core import AnalyticModel
from schwarzlab.errors import DomainError, PreconditionError
from schwarzlab.model_spaces import (
    CircleFunction,
    InnerFunctionSpec,
    SingularityError,
    atom_mask,
    eval_inner,
    inner_outer_factorize,
    ktheta_membership,
    multiplier_lipschitz,
    nevanlinna_certificate,
    outer_from_modulus,
    phi_aggregate,
    reproducing_kernel,
    shirokov_multiplier,
    tilde,
)

ATOM = InnerFunctionSpec.single_atom(1.0)


def test_inner_at_origin():
    assert eval_inner(ATOM, 0.0) == pytest.approx(np.exp(-1))


def test_inner_unimodular_away_from_atom():
    tr = CircleFunction.from_function(lambda z: eval_inner(ATOM, z), 4096)
    keep = atom_mask(ATOM, tr.t, 1e-2)
    # the exponent reaches |cot(t/2)| ~ 400 at the window edge; rounding scales with it
    assert np.max(np.abs(np.abs(tr.values[keep]) - 1)) < 1e-11


def test_inner_singular_at_atom():
    with pytest.raises(SingularityError):
        eval_inner(ATOM, 1.0)


def test_blaschke_factor():
    spec = InnerFunctionSpec(((0.5, 1),), ())
    assert abs(eval_inner(spec, 0.5)) < 1e-15
    assert abs(abs(eval_inner(spec, np.exp(0.7j))) - 1) < 1e-14


def test_spec_validation_and_json():
    with pytest.raises(ValueError):
        InnerFunctionSpec(((1.5, 1),), ())
    with pytest.raises(ValueError):
        InnerFunctionSpec((), ((0.9, 1.0),))
    spec = InnerFunctionSpec(((0.1j, 2),), ((1j, 0.5),))
    assert InnerFunctionSpec.from_json(spec.to_json()) == spec


def test_tilde_involution():
    f = lambda z: z**2 + 0.3j
    g = tilde(tilde(f))
    z = np.array([0.3 + 0.2j, -0.5j])
    assert np.allclose(g(z), f(z))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8))
def test_fft_roundtrip(coeffs):
    c = np.zeros(64, complex)
    c[: len(coeffs)] = coeffs
    f = CircleFunction.from_coefficients(c)
    assert np.max(np.abs(f.coefficients() - c)) < 1e-13
    assert f.roundtrip_error() < 1e-13


def test_csv_roundtrip():
    f = CircleFunction.from_function(lambda z: z + 0.5 / (z - 3), 64)
    g = CircleFunction.from_csv(f.to_csv())
    assert np.array_equal(f.values, g.values) and f.offset == g.offset


def test_outer_from_constant_modulus():
    outer = outer_from_modulus(CircleFunction(np.full(256, 2.0)))
    assert outer(0.3 + 0.1j) == pytest.approx(2.0)


def test_inner_outer_of_blaschke_times_outer():
    spec = InnerFunctionSpec(((0.4, 1),), ())
    F = lambda z: eval_inner(spec, z) * (2 + z)
    fac = inner_outer_factorize(F, 1024)
    assert fac.unimodularity < 1e-10
    assert fac.outer(0.0) == pytest.approx(2.0, rel=1e-10)


def test_kernel_is_member():
    k = reproducing_kernel(ATOM, 0.3)
    res = ktheta_membership(CircleFunction.from_function(k, 4096), ATOM)
    assert res.member and res.leak <= 1e-6


def test_z_rejected_with_predicted_coefficient():
    res = ktheta_membership(CircleFunction.from_function(lambda z: z, 4096), ATOM)
    assert not res.member
    # conj(theta) z at frequency 1 equals conj(theta(0)) = e^{-1}
    assert abs(res.coefficient(1) - np.exp(-1)) < 1e-6


def test_theta_z_rejected_with_unit_coefficient():
    res = ktheta_membership(CircleFunction.from_function(lambda z: eval_inner(ATOM, z) * z, 4096), ATOM)
    assert not res.member
    assert abs(res.coefficient(1) - 1) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8))
def test_kernels_are_members(x, y):
    lam = complex(x, y)
    if abs(lam) > 0.85:
        lam *= 0.85 / abs(lam)
    res = ktheta_membership(CircleFunction.from_function(reproducing_kernel(ATOM, lam), 4096), ATOM)
    assert res.member


def test_phi_aggregate_requires_outside_point():
    with pytest.raises(DomainError):
        phi_aggregate(reproducing_kernel(ATOM, 0.3), 0.5, ATOM)


def test_phi_aggregate_stays_in_model_space():
    phi = phi_aggregate(reproducing_kernel(ATOM, 0.3), 1.5, ATOM)
    assert ktheta_membership(CircleFunction.from_function(phi, 4096), ATOM).member


def test_multiplier_vanishes_at_atom_and_is_lipschitz():
    H = shirokov_multiplier(ATOM, 3)
    assert abs(H(1.0)) == 0
    assert abs(H(0.0) - 1) == 0
    lip = multiplier_lipschitz(ATOM, H)
    assert 0.9 < lip["ratio"] < 1.1
    with pytest.raises(ValueError):
        shirokov_multiplier(ATOM, 2)
    with pytest.raises(PreconditionError):
        shirokov_multiplier(InnerFunctionSpec(((0.1, 1),), ATOM.atoms))


def test_nevanlinna_certificate_trivial_identity():
    phi = CircleFunction.from_function(lambda z: z, 64)
    f2 = CircleFunction.from_function(lambda z: 1 + 0 * z, 64)
    f1 = CircleFunction.from_function(lambda z: 1 / z, 64)
    assert nevanlinna_certificate(f1, f2, phi) < 1e-15
