import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schwarzlab.complex_core import AnalyticModel
from schwarzlab.errors import CriticalPointError, FactorizationError, PreconditionError, SingularRatioError
from schwarzlab.fixtures import circle_arc
from schwarzlab.harmonic import (
    HalfDiskHarmonic,
    analytic_sqrt_factor,
    build_R,
    harnack_check,
    normal_derivative_ratio,
    reflect_odd,
    uv_classify,
    uv_schwarz,
    vertical_limit,
)
from schwarzlab.schwarz import schwarz_verify
from schwarzlab.tolerances import DEFAULTS

U = HalfDiskHarmonic((1.0, 0.5))
V = HalfDiskHarmonic((1.0,))

coeff_lists = st.lists(st.floats(-1, 1), min_size=1, max_size=6)
points = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(coeff_lists, points)
def test_laplacian_vanishes(coeffs, z):
    u = HalfDiskHarmonic(tuple(coeffs))
    h = 1e-3
    lap = (u(z + h) + u(z - h) + u(z + 1j * h) + u(z - 1j * h) - 4 * u(z)) / h**2
    assert abs(lap) < 1e-4 * (1 + sum(abs(c) for c in coeffs))


@settings(max_examples=50, deadline=None)
@given(coeff_lists, points)
def test_odd_reflection(coeffs, z):
    u = HalfDiskHarmonic(tuple(coeffs))
    us = reflect_odd(u)
    assert us(np.conj(z)) == pytest.approx(-us(z), abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(coeff_lists, st.floats(0.1, 10))
def test_scaling_covariance(coeffs, lam):
    u = HalfDiskHarmonic(tuple(coeffs))
    z = 0.3 + 0.4j
    assert u.scaled(lam)(z) == pytest.approx(lam * u(z), rel=1e-12, abs=1e-15)


def test_json_roundtrip():
    assert HalfDiskHarmonic.from_json(U.to_json()) == U


def test_normal_derivative_on_axis():
    x = np.linspace(-0.9, 0.9, 7)
    assert np.allclose(U.y_derivative_on_axis(x), 1 + x)
    assert np.allclose([vertical_limit(lambda z: U(z) / z.imag, xx) for xx in x], 1 + x, atol=1e-8)


def test_positivity_required():
    with pytest.raises(PreconditionError):
        HalfDiskHarmonic((0.0, 1.0)).require_positive()


def test_harnack_for_im_z():
    rep = harnack_check(V, 0.0)
    assert rep.passed
    assert rep.c_low >= 1 - 1e-12 and rep.c_high <= 1 + 1e-12
    assert rep.normal_derivative == pytest.approx(1.0)


def test_ratio_recovers_one_plus_x():
    r = normal_derivative_ratio(U, V)
    x = np.linspace(-0.5, 0.5, 101)
    assert np.max(np.abs(r(x) - (1 + x))) <= 1e-8
    assert not r.proportional


def test_ratio_of_proportional_pair_is_flagged():
    r = normal_derivative_ratio(V.scaled(3.0), V)
    assert r.proportional
    assert np.allclose(r(np.array([0.1, -0.2])), 3.0)


def test_ratio_rejects_vanishing_denominator():
    # v = Im z + Im(z^2)/2 has v_y(x, 0) = 1 + x, which vanishes at the end x = -1
    tol = DEFAULTS.with_overrides(singular_ratio=1e-3)
    with pytest.raises(SingularRatioError):
        normal_derivative_ratio(V, U, interval=(-1.0, 0.0), tol=tol)


def test_sqrt_factor():
    r = normal_derivative_ratio(U, V)
    a = analytic_sqrt_factor(r)
    x = np.linspace(-0.5, 0.5, 101)
    assert np.max(np.abs(np.abs(a(x + 0j)) ** 2 - (1 + x))) <= 1e-10
    assert np.all(np.real(a(x + 0j)) > 0)


def test_sqrt_factor_needs_positive_ratio():
    r = normal_derivative_ratio(U, V, interval=(-0.5, 0.5))
    r.coefficients = np.array([-1.0, 1.0])
    with pytest.raises(FactorizationError):
        analytic_sqrt_factor(r)


def test_build_R_for_identity_map():
    r = normal_derivative_ratio(U, V)
    arc = circle_arc(0.0, 0.4, 128)
    R, res = build_R(r, None, arc)
    assert res is None
    assert R(0.1 + 0.1j) == pytest.approx(1.1 + 0.1j)


def circle_uv():
    # A = z + 2 on the circle |z| = 1/2 and R = A * A^#, A^#(z) = conj(A(conj z)) composed with the Schwarz function
    arc = circle_arc(0.0, 0.5, 256)
    A = AnalyticModel.polynomial([2.0, 1.0])
    R = AnalyticModel.black_box(lambda z: (z + 2) * (0.25 / z + 2), 0.0, 1.0)
    return R, A, arc


def test_uv_schwarz_identity_on_circle():
    R, A, arc = circle_uv()
    cand, img = uv_schwarz(R, A, arc)
    assert schwarz_verify(cand, img) <= 1e-12


def test_uv_classify_regular_on_circle():
    R, A, arc = circle_uv()
    assert uv_classify(R, A, arc).label == "1"


def test_uv_schwarz_critical_point():
    arc = circle_arc(0.0, 0.5, 128)
    A = AnalyticModel.polynomial([1.0, 0, 1.0])
    A0 = AnalyticModel.black_box(lambda z: A(z - arc.base_point), 0.0, 1.0,
                                 derivative=lambda z: 2 * (z - arc.base_point))
    with pytest.raises(CriticalPointError):
        uv_schwarz(A0, A0, arc)


def test_uv_classify_excludes_critical_point():
    arc = circle_arc(0.0, 0.5, 256)
    b = arc.base_point
    A = AnalyticModel.black_box(lambda z: 3 + (z - b) ** 2, 0.0, 1.0, derivative=lambda z: 2 * (z - b))
    R = AnalyticModel.black_box(lambda z: np.abs(3 + 0 * z) ** 2, 0.0, 1.0)
    assert uv_classify(R, A, arc).label == "excluded"
