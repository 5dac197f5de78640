import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schwarzlab.complex_core import (
    AnalyticModel,
    Circle,
    LocalInverse,
    MonicPoly,
    Path,
    compose,
    contour_integrate,
    continue_root,
    count_zeros,
    discriminant,
    newton_to_monic,
    power_sums,
    resultant,
    winding_numbers,
)
from schwarzlab.errors import ContourZeroError, DomainError, NearBranchPointError

complexes = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def test_series_model_refuses_outside_disk():
    m = AnalyticModel.series([1, 2, 3], 0.0, 0.5)
    assert m(0.1) == pytest.approx(1 + 0.2 + 0.03)
    with pytest.raises(DomainError):
        m(0.6)


def test_closed_series_accepts_boundary():
    m = AnalyticModel.series([0, 1], 0.0, 1.0, closed=True)
    assert m(np.exp(0.3j) * (1 + 1e-14)) == pytest.approx(np.exp(0.3j))


def test_black_box_numeric_derivative():
    m = AnalyticModel.black_box(np.exp, 0.0, 1.0)
    z = np.array([0.1 + 0.2j, -0.3j])
    assert np.max(np.abs(m.derivative()(z) - np.exp(z))) < 1e-9


def test_compose():
    f = AnalyticModel.polynomial([0, 0, 1])
    g = AnalyticModel.polynomial([1, 1])
    h = compose(f, g)
    assert h(2.0) == pytest.approx(9.0)


def test_contour_integral_of_one_over_z():
    assert contour_integrate(lambda z: 1 / z, Circle(0, 0.5)) == pytest.approx(1.0, abs=1e-14)


def test_count_zeros_polynomial():
    f = lambda z: (z - 0.1) * (z + 0.2j) * (z - 3)
    df = lambda z: (z + 0.2j) * (z - 3) + (z - 0.1) * (z - 3) + (z - 0.1) * (z + 0.2j)
    assert count_zeros(f, df, Circle(0, 1)) == 2


def test_count_zeros_rejects_zero_on_contour():
    with pytest.raises(ContourZeroError):
        count_zeros(lambda z: z - 1, lambda z: np.ones_like(z), Circle(0, 1))


def test_power_sums_and_newton_recover_roots():
    roots = np.array([0.1, -0.2 + 0.1j, 0.05j])
    p = MonicPoly.from_roots(roots)
    s = power_sums(p, p.derivative_at, Circle(0, 0.5), 3)
    q = newton_to_monic(s, 3)
    assert np.max(np.abs(q.coefficients - p.coefficients)) < 1e-13


@settings(max_examples=60, deadline=None)
@given(st.lists(complexes, min_size=1, max_size=5))
def test_newton_identities_roundtrip(roots):
    p = MonicPoly.from_roots(roots)
    k = p.degree
    r = np.asarray(roots, dtype=complex)
    s = [np.sum(r**m) for m in range(1, k + 1)]
    q = newton_to_monic(s, k)
    scale = 1 + np.max(np.abs(p.coefficients))
    assert np.max(np.abs(q.coefficients - p.coefficients)) < 1e-9 * scale


@settings(max_examples=100, deadline=None)
@given(complexes, complexes)
def test_quadratic_discriminant_closed_form(b, c):
    d = discriminant(MonicPoly([c, b]))
    ref = b * b - 4 * c
    assert abs(d - ref) <= 1e-12 * max(1.0, abs(b) ** 2, abs(c))


@settings(max_examples=100, deadline=None)
@given(complexes, complexes)
def test_cubic_discriminant_closed_form(p, q):
    d = discriminant(MonicPoly([q, p, 0]))
    ref = -4 * p**3 - 27 * q**2
    assert abs(d - ref) <= 1e-12 * max(1.0, abs(p) ** 3, abs(q) ** 2) * 30


def test_discriminant_vanishes_on_double_root():
    assert abs(discriminant(MonicPoly.from_roots([0.3, 0.3, -1]))) < 1e-14


def test_resultant_of_coprime_linear():
    # Res(z - a, z - b) = b - a  (Sylvester, highest degree first)
    assert resultant(np.array([1, -2.0]), np.array([1, -5.0])) == pytest.approx(-3.0)


def test_path_validation():
    with pytest.raises(ValueError):
        Path(np.array([1.0]))
    with pytest.raises(ValueError):
        Path(np.array([0, 1, 0.5]), closed=True)
    loop = Path.circle(0, 1, 16)
    assert loop.closed and loop.start == loop.end
    assert loop.length() == pytest.approx(2 * np.pi, rel=0.01)


def test_continue_root_square_root_swaps_sheets():
    P = lambda z: MonicPoly([-z, 0])
    w = continue_root(P, (1.0, 1.0), Path.circle(0, 1, 64))
    assert w == pytest.approx(-1.0, abs=1e-10)


def test_continue_root_refuses_branch_point():
    P = lambda z: MonicPoly([-z, 0])
    with pytest.raises(NearBranchPointError):
        continue_root(P, (1.0, 1.0), Path.segment(1.0, 0.0))


def test_continue_root_rejects_non_root():
    P = lambda z: MonicPoly([-z, 0])
    with pytest.raises(ValueError):
        continue_root(P, (1.0, 0.5), Path.segment(1.0, 2.0))


def test_winding_numbers_of_doubled_circle():
    t = np.linspace(0, 4 * np.pi, 801)[:-1]
    w = winding_numbers(np.exp(1j * t), np.array([0.0, 3.0]))
    assert np.allclose(w, [2, 0], atol=1e-9)


def test_local_inverse_of_square():
    T = AnalyticModel.polynomial([0, 0, 1])
    seeds = 0.5 * np.exp(1j * np.linspace(0.1, np.pi - 0.1, 50))
    inv = LocalInverse(T, seeds, accept=lambda x: x.imag > 0)
    z = np.array([-0.2 + 0.1j, 0.1j, 0.2 - 0.05j])
    x = inv(z)
    assert np.max(np.abs(x**2 - z)) < 1e-12
    assert np.all(x.imag > 0)
