import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import lie_vectors, rationals
from niltheta.coadjoint import INF, subordinate_family
from niltheta.lie import U, X1, X2, X3, LieVector, T
from niltheta.symplectic import (
    KForm, QuadraticSurd, beta, cy_structure, cy_structure_exact, exterior_d, is_lagrangian,
    is_special_lagrangian, is_torus_fiber, lagrangian_for_e, lagrangian_to_subalgebra, omega,
    subalgebra_to_lagrangian, two_form_matrix, verify_cy, verify_cy_exact, verify_hamiltonian_frame,
)


def reference_J(e):
    """Closed-form complex structure for e >= 0, entered by hand."""
    a = abs(e)
    s, p, q = math.sqrt(a), 1 + 2 * a, 1 + a
    return np.array([
        [0, -s * p / q, -4 * a - 1 / q, -s * p / q],
        [-s / p, 0, -s * p / q, -1],
        [q / p, -s, 0, s / p],
        [-s, p, s * p / q, 0],
    ])


def k_forms(degree):
    keys = list(combinations(range(5), degree))
    return st.dictionaries(st.sampled_from(keys), rationals, max_size=len(keys)).map(
        lambda d: KForm(degree, d))


def test_structure_equations():
    assert exterior_d(beta(2)) == KForm(2, {(0, 1): -1})
    assert exterior_d(beta(4)) == KForm(2, {(0, 2): 1, (1, 3): 1})
    for i in (0, 1, 3):
        assert exterior_d(beta(i)).is_zero()


def test_omega_is_closed_and_nondegenerate():
    assert exterior_d(omega()).is_zero()
    W = two_form_matrix(omega(normalized=True))
    assert abs(np.linalg.det(W)) == pytest.approx(1.0)
    assert omega()(X1, X3) == pytest.approx(2 * math.pi)


@given(k_forms(1))
def test_d_squared_vanishes_on_one_forms(f):
    assert exterior_d(exterior_d(f)).is_zero()


@given(k_forms(2))
def test_d_squared_vanishes_on_two_forms(f):
    assert exterior_d(exterior_d(f)).is_zero()


@given(lie_vectors, lie_vectors)
def test_d_of_one_form_is_minus_form_of_bracket(v, w):
    from niltheta.lie import bracket
    for i in range(5):
        assert exterior_d(beta(i))(v, w) == -list(bracket(v, w))[i]


@given(k_forms(1), k_forms(1))
def test_wedge_anticommutes_on_one_forms(a, b):
    assert a.wedge(b) == -(b.wedge(a))


@pytest.mark.parametrize("tag,params", [("c", ("1/2",)), ("bd", ("3", "-1")), ("e", ("2",)), ("e", (INF,))])
def test_subalgebra_lagrangian_correspondence(tag, params):
    h = subordinate_family(tag, *params)
    L = subalgebra_to_lagrangian(h)
    assert is_lagrangian(L)
    back = lagrangian_to_subalgebra(L)
    assert back is not None


def test_lagrangian_that_is_not_a_subalgebra():
    L = (X1, X2)                      # isotropic, but [X1, X2] = X3 leaves the span
    assert is_lagrangian(L)
    assert lagrangian_to_subalgebra(L) is None


def test_is_lagrangian_validation():
    with pytest.raises(ValueError):
        is_lagrangian((X1, U))
    with pytest.raises(ValueError):
        is_lagrangian((X1, 2 * X1))
    assert not is_lagrangian((X1, X3))


@pytest.mark.parametrize("e", [0, 1, 2, 0.5, 3.25])
def test_closed_form_complex_structure(e):
    assert np.allclose(cy_structure(e).J, reference_J(e), atol=1e-14)


@pytest.mark.parametrize("e", [0, 1, -1, 2, -2, Fraction(1, 3), Fraction(-5, 7), 10])
def test_cy_identities(e):
    c = cy_structure(e)
    report = verify_cy(c)
    for key in ("J_squared_is_minus_identity", "omega_compatible", "volume_normalized",
                "d_re_eps_closed", "eps_type_2_0"):
        assert report[key], key
    assert is_special_lagrangian(lagrangian_for_e(e), c)
    assert np.all(np.linalg.eigvalsh(c.period.imag) > 0)
    assert np.allclose(c.period, c.period.T)


def test_negative_e_is_not_the_absolute_value_formula():
    c = cy_structure(-1)
    assert not np.allclose(c.J, reference_J(-1))


@pytest.mark.parametrize("e", [0, 1, 4, Fraction(1, 4)])
def test_cy_identities_exact(e):
    assert all(verify_cy_exact(e).values())


def test_exact_construction_needs_rational_root():
    with pytest.raises(ValueError):
        cy_structure_exact(2)


def test_other_foliations_are_not_special_lagrangian():
    c = cy_structure(1)
    assert not is_special_lagrangian(lagrangian_for_e(3), c)


def test_torus_fibres():
    assert is_torus_fiber(Fraction(1, 2), QuadraticSurd(Fraction(3, 7)))
    assert not is_torus_fiber(Fraction(1, 2), QuadraticSurd(Fraction(0), Fraction(1), 2))
    assert is_torus_fiber(0, QuadraticSurd(Fraction(0), Fraction(1), 2))
    assert is_torus_fiber(Fraction(2), QuadraticSurd(Fraction(1), Fraction(3), 1))
    with pytest.raises(ValueError):
        QuadraticSurd(Fraction(1), Fraction(1), 8)


def test_hamiltonian_frame():
    rng = np.random.default_rng(0)
    report = verify_hamiltonian_frame(rng.normal(size=(25, 4)) * 3)
    assert report["frame_holds"]
    assert report["poisson_holds"]
