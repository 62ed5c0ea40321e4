import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import group_elements, lattice_elements, rationals
from niltheta.lie import U, X1, X2, X3, GroupElement, LieVector, T, multiply
from niltheta.reps import (
    CosetCoords, DiffOperator, HElement, IntegralPoint, character, derived_rep, embed,
    enumerate_integral_points, gamma_action, induced_rep_apply, lattice_action,
    laplacian_symbol, master_solution, multiplicity, orbit_representative, section,
)

small = st.integers(-30, 30)


def f0(x, t):
    return np.exp(-(x - 0.3) ** 2 - 2 * (t + 0.1) ** 2) * (1 + 0.5j * x)


@given(rationals, rationals, group_elements)
def test_master_equation(x, t, g):
    p = CosetCoords(x, t)
    h, q = master_solution(p, g)
    assert multiply(section(p), g) == multiply(embed(h), section(q))


def test_master_examples():
    assert master_solution(CosetCoords(0, 0), GroupElement()) == (HElement(0, 0, 0), CosetCoords(0, 0))
    h, q = master_solution(CosetCoords(Fraction(2), Fraction(5)), GroupElement.of(3, 0, 0, 7, 0))
    assert h == HElement(0, 0, 0) and q == CosetCoords(5, 12)
    h, q = master_solution(CosetCoords(Fraction(1), Fraction(0)), GroupElement.of(0, 1, 0, 0, 0))
    assert (h.h2, h.h3, h.h5) == (1, 1, Fraction(-1, 2))
    assert q == CosetCoords(1, 0)


@given(lattice_elements, st.integers(1, 4), small, small)
def test_character_trivial_on_lattice_part_of_h(gamma, k, m, n):
    h = HElement(gamma.a2, gamma.a3, gamma.v)
    assert abs(character(IntegralPoint(k, m, n), h) - 1) < 1e-9


@given(group_elements, group_elements)
def test_induced_representation_is_a_homomorphism(g, h):
    pt = IntegralPoint(1, 1, 0)
    p = CosetCoords(0.4, -0.3)
    g = GroupElement(*(float(c) for c in g))
    h = GroupElement(*(float(c) for c in h))
    # (pi(g) pi(h) f)(p) = (pi(gh) f)(p)
    inner = lambda x, t: induced_rep_apply(pt, h, f0, CosetCoords(x, t))  # noqa: E731
    lhs = induced_rep_apply(pt, g, inner, p)
    rhs = induced_rep_apply(pt, multiply(g, h), f0, p)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_induced_examples():
    pt = IntegralPoint(1)
    x, t, v = 0.7, -0.2, 0.31
    p = CosetCoords(x, t)
    assert induced_rep_apply(pt, GroupElement(0, 0, 0, 0, v), f0, p) == pytest.approx(np.exp(-4j * math.pi * v) * f0(x, t))
    assert induced_rep_apply(pt, GroupElement(1, 0, 0, 0, 0), f0, p) == pytest.approx(f0(x + 1, t))
    assert induced_rep_apply(pt, GroupElement(0, 1, 0, 0, 0), f0, p) == pytest.approx(
        np.exp(-4j * math.pi * (t - x * x / 2)) * f0(x, t))


def test_gamma_action_examples():
    assert gamma_action(3, (0, 0), (4, 5)) == (4, 5)
    assert gamma_action(1, (1, 0), (0, 0)) == (-1, 2)


@given(st.integers(1, 4), small, small, st.integers(-3, 3), st.integers(-3, 3))
def test_gamma_action_agrees_with_coadjoint_action(k, m, n, x0, t0):
    gamma = GroupElement(Fraction(x0), Fraction(0), Fraction(0), Fraction(t0), Fraction(0))
    assert lattice_action(k, gamma, (m, n)) == gamma_action(k, (x0, t0), (m, n))


@given(st.integers(1, 4), small, small, st.integers(-3, 3), st.integers(-3, 3))
def test_representative_is_an_orbit_invariant(k, m, n, x0, t0):
    rep = orbit_representative(k, (m, n))
    assert all(0 <= c < 2 * k for c in rep)
    assert orbit_representative(k, gamma_action(k, (x0, t0), (m, n))) == rep


@pytest.mark.parametrize("k,count", [(1, 4), (2, 16), (3, 36), (4, 64), (5, 100)])
def test_multiplicity(k, count):
    assert multiplicity(k) == count
    assert len({(p.m, p.n) for p in enumerate_integral_points(k)}) == count


def test_level_zero_rejected():
    with pytest.raises(ValueError):
        IntegralPoint(0)
    with pytest.raises(ValueError):
        enumerate_integral_points(0)


def test_derived_representation_examples():
    x, t = DiffOperator.symbols()
    for k in (1, 3):
        D = derived_rep(U, IntegralPoint(k, 2, 1))
        assert sympy.simplify(D.c0 + 4 * sympy.pi * sympy.I * k) == 0 and D.c1 == 0 and D.c2 == 0
    D = derived_rep(X1, IntegralPoint(2))
    assert (D.c0, D.c1, D.c2) == (0, 1, 0)


@pytest.mark.parametrize("X", [X1, X2, X3, T, U, X1 + 2 * X2 - T])
def test_derived_representation_matches_finite_differences(X):
    pt = IntegralPoint(2, 1, 1)
    D = derived_rep(X, pt)
    x0, t0, h = 0.35, -0.2, 1e-5

    def moved(s):
        from niltheta.lie import exp_algebra
        g = exp_algebra(LieVector(*(s * float(c) for c in X)))
        return induced_rep_apply(pt, g, f0, CosetCoords(x0, t0))

    fd = (moved(h) - moved(-h)) / (2 * h)
    fx = lambda x, t: (f0(x + h, t) - f0(x - h, t)) / (2 * h)  # noqa: E731
    ft = lambda x, t: (f0(x, t + h) - f0(x, t - h)) / (2 * h)  # noqa: E731
    assert abs(D.evaluate(f0, fx, ft, x0, t0) - fd) < 1e-6


@pytest.mark.parametrize("k", [1, 2])
def test_laplacian_is_the_quartic_oscillator(k):
    x, t = DiffOperator.symbols()
    F = sympy.Function("F")(x, t)
    expected = (-sympy.diff(F, x, 2) - sympy.diff(F, t, 2)
                + 16 * k ** 2 * sympy.pi ** 2 * ((x ** 2 + t ** 2) + x ** 2 * (x ** 2 / 4 - t)) * F)
    assert sympy.simplify(laplacian_symbol(IntegralPoint(k)) - sympy.expand(expected)) == 0
