import numpy as np
import numpy.polynomial.polynomial as npoly
import pytest
from hypothesis import given, settings, strategies as st

from schwarzlab.complex_core import MonicPoly, Path
from schwarzlab.errors import PreconditionError
from schwarzlab.fixtures import circle_fixture, unit_circle_arc
from schwarzlab.schwarz import circle_schwarz
from schwarzlab.weierstrass import (
    BivariateModel,
    MonicPolyPencil,
    boundary_root_match,
    circle_grid,
    classify_arcs,
    compose,
    cycle_string,
    discriminant_field,
    monodromy,
    order_in_w,
    squarefree_part,
    weierstrass_prepare,
)


def w2_minus_z():
    return BivariateModel(lambda z, w: w**2 - z, lambda z, w: 2 * w + 0 * z, 0, 1, 0, 1, "w^2-z")


def power_pencil(k):
    fs = [lambda z: -np.asarray(z, dtype=complex)] + [lambda z: 0 * np.asarray(z, dtype=complex)] * (k - 1)
    return lambda z: MonicPoly([complex(f(z)) for f in fs])


@pytest.fixture(scope="module")
def prepared():
    grid = circle_grid(0, 0.04, 128)
    return weierstrass_prepare(w2_minus_z(), grid, 0.3)


def test_order_in_w():
    assert order_in_w(w2_minus_z()) == 2
    exp_model = BivariateModel(lambda z, w: np.exp(w) - 1 + 0 * z, lambda z, w: np.exp(w) + 0 * z)
    assert order_in_w(exp_model) == 1
    with pytest.raises(PreconditionError):
        order_in_w(BivariateModel(lambda z, w: w - 0.5 + 0 * z, lambda z, w: 1 + 0 * z * w))


def test_derivative_check():
    assert w2_minus_z().derivative_check() < 1e-8


def test_prepare_square_root(prepared):
    pencil, c = prepared
    assert pencil.k == 2
    assert np.max(np.abs(pencil.coefficients[:, 1])) <= 1e-8
    assert np.max(np.abs(pencil.coefficients[:, 0] + pencil.grid)) <= 1e-8
    assert abs(c(0.01, 0.1) - 1) <= 1e-6


def test_held_out_interpolation(prepared):
    pencil, _ = prepared
    rng = np.random.default_rng(3)
    z = 0.03 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
    a = pencil.coefficients_at(z)
    assert np.max(np.abs(a[:, 0] + z)) < 1e-8 and np.max(np.abs(a[:, 1])) < 1e-8


def test_prepare_product():
    Psi = BivariateModel(lambda z, w: (w - z) * (2 + w), lambda z, w: 2 * w + 2 - z, 0, 1, 0, 1)
    pencil, c = weierstrass_prepare(Psi, circle_grid(0, 0.04, 128), 0.5)
    assert pencil.k == 1
    assert np.max(np.abs(pencil.coefficients[:, 0] + pencil.grid)) <= 1e-8
    w = np.array([0.1, -0.2j, 0.3])
    assert np.max(np.abs(c(0.02, w) - (2 + w))) <= 1e-8


def test_prepare_unit_cofactor_for_exp():
    Psi = BivariateModel(lambda z, w: np.exp(w) - 1 + 0 * z, lambda z, w: np.exp(w) + 0 * z)
    pencil, c = weierstrass_prepare(Psi, circle_grid(0, 0.04, 32), 0.5)
    assert pencil.k == 1
    assert abs(c(0.0, 0.0) - 1) < 1e-10


def test_pencil_json_roundtrip(prepared):
    pencil, _ = prepared
    back = MonicPolyPencil.from_json(pencil.to_json())
    z = 0.01 + 0.02j
    assert np.allclose(back.coefficients_at(z), pencil.coefficients_at(z), atol=1e-14)


def test_discriminant_field_square_root(prepared):
    D = discriminant_field(prepared[0])
    assert len(D.clusters) == 1
    assert abs(D.clusters[0].center) < 1e-6
    assert D.clusters[0].multiplicity == 1


def test_discriminant_field_two_branch_points():
    fs = [lambda z: -(z**2) + 0.25 * 0.04**2, lambda z: 0 * z]
    pen = MonicPolyPencil.from_functions(fs, circle_grid(0, 0.04, 64), 0.3)
    pen = MonicPolyPencil(2, pen.grid, pen.coefficients, 0.3)
    D = discriminant_field(pen)
    centers = sorted(c.center.real for c in D.clusters)
    assert np.allclose(centers, [-0.02, 0.02], atol=1e-6)


def test_discriminant_field_without_zeros():
    pen = MonicPolyPencil(2, circle_grid(0, 0.04, 32), np.tile([-0.25, 0.0], (32, 1)), 1.0)
    assert discriminant_field(pen).clusters == []


def test_squarefree_part():
    p = MonicPoly.from_roots([0.5, 0.5, -1.0])
    q = squarefree_part(p)
    assert q.degree == 2
    assert np.allclose(np.sort_complex(q.roots()), [-1.0, 0.5])
    assert squarefree_part(MonicPoly.from_roots([1, 2, 3])).degree == 3


def test_squarefree_examples():
    z0 = 0.3 - 0.1j
    assert np.allclose(squarefree_part(MonicPoly.from_roots([z0, z0])).coefficients, [-z0])
    assert np.allclose(squarefree_part(MonicPoly([0, 0, 0])).coefficients, [0])
    p = MonicPoly([-0.2, 0])
    assert squarefree_part(p) is p or np.allclose(squarefree_part(p).coefficients, p.coefficients)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=3), st.integers(1, 3))
def test_squarefree_part_divides(roots, mult):
    r = np.asarray(roots, dtype=complex)
    gaps = np.abs(r[:, None] - r[None, :]) + np.eye(r.size)
    if r.size > 1 and gaps.min() < 0.05:
        return
    p = MonicPoly.from_roots(np.repeat(r, mult))
    q = squarefree_part(p)
    assert q.degree == r.size
    _, rem = npoly.polydiv(p.full(), q.full())
    assert np.max(np.abs(rem)) <= 1e-9 * np.max(np.abs(p.full()))


def test_cycle_strings():
    assert cycle_string((2, 1)) == "(1 2)"
    assert cycle_string((2, 3, 1)) == "(1 2 3)"
    assert cycle_string((1, 2, 3)) == "id"


@pytest.mark.parametrize("k", [2, 3, 4])
def test_monodromy_of_roots_is_a_full_cycle(k):
    m = monodromy(power_pencil(k), Path.circle(0, 0.5, 64))
    assert m.cycles.count(" ") == k - 1 and m.cycles.count("(") == 1


def test_monodromy_named_cycles():
    assert monodromy(power_pencil(2), Path.circle(0, 0.5, 64)).cycles == "(1 2)"
    assert monodromy(power_pencil(3), Path.circle(0, 0.5, 64)).cycles in ("(1 2 3)", "(1 3 2)")


def test_monodromy_of_loop_not_enclosing_branch_point():
    assert monodromy(power_pencil(2), Path.circle(1.0, 0.5, 64)).is_identity()


@settings(max_examples=5, deadline=None)
@given(st.integers(1, 3), st.integers(-2, 2), st.integers(-2, 2))
def test_monodromy_homomorphism(k_turns, j1, j2):
    # loops through the common base point 0.5 winding around 0 (or not)
    def loop(turns):
        if turns == 0:
            return Path.circle(0.75, 0.25, 32, start_angle=np.pi)
        p = Path.circle(0, 0.5, 64, turns=abs(turns))
        return p if turns > 0 else p.reversed()

    P = power_pencil(k_turns + 1)
    base = P(0.5).roots()
    m1 = monodromy(P, loop(j1), base)
    m2 = monodromy(P, loop(j2), base)
    both = monodromy(P, loop(j1).concat(loop(j2)), base)
    assert both.permutation == compose(m2.permutation, m1.permutation)


def test_boundary_match_circle():
    cand, arc, _ = circle_fixture()
    z0, r = 0.2 + 0.1j, 0.7
    pen = MonicPolyPencil.from_functions([lambda z: -circle_schwarz(z0, r)(z)], arc.samples, 1.0)
    m = boundary_root_match(pen, arc)
    assert m.match_fraction == 1.0
    assert [b for b, _, _ in m.runs] == [0]


def test_boundary_match_w2_minus_z():
    arc = unit_circle_arc(384)
    m = boundary_root_match(power_pencil(2), arc)
    hits = arc.samples[m.matched_indices()]
    targets = np.exp(1j * np.array([0, 2 * np.pi / 3, -2 * np.pi / 3]))
    assert np.all(np.min(np.abs(hits[:, None] - targets[None, :]), axis=1) <= 1e-4)
    assert len(hits) == 3


def test_classify_arcs_on_circle():
    cand, arc, om = circle_fixture()
    z0, r = 0.2 + 0.1j, 0.7
    pen = MonicPolyPencil.from_functions([lambda z: -circle_schwarz(z0, r)(z)], arc.samples, 1.0)
    reps = classify_arcs(boundary_root_match(pen, arc), arc, pen, om)
    assert [r.label for r in reps] == ["1", "1", "1"]
