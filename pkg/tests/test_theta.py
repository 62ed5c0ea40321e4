import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from niltheta.lie import GroupElement, multiply
from niltheta.reps import CosetCoords, IntegralPoint, induced_rep_apply
from niltheta.theta import (
    GaussianSpec, QuadratureGrid, TruncationError, TruncationWindow, certify_window,
    check_intertwining, check_pseudoperiodicity, classical_delta1_apply, inner_product_P,
    jacobi_theta, l2_norm_squared, sample_section, theta_grid, theta_map, theta_R4,
    weil_brezin_torus,
)

F = GaussianSpec(0.2, -0.1, 0.9)
unit = st.floats(min_value=0, max_value=1, allow_nan=False)
points = st.tuples(unit, unit, unit, unit)


def lattice_sum_oracle(k, m, n, f, g, W=9):
    """Sum over the coset representatives (a, 0, 0, b, 0) of (pi(gamma g) f)(0, 0)."""
    pt = IntegralPoint(k, m, n)
    return sum(
        induced_rep_apply(pt, multiply(GroupElement(float(a), 0.0, 0.0, float(b), 0.0), g), f, CosetCoords(0.0, 0.0))
        for a in range(-W, W + 1) for b in range(-W, W + 1)
    )


@pytest.mark.parametrize("k,m,n", [(1, 0, 0), (1, 1, 0), (2, 1, 3), (-1, 0, 1), (3, 5, 2)])
def test_closed_form_matches_lattice_sum(k, m, n):
    g = GroupElement(0.3, 0.7, -0.4, 0.55, 0.21)
    assert abs(theta_map(k, m, n, F, g) - lattice_sum_oracle(k, m, n, F, g)) < 1e-13


@given(points, st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2))
def test_left_lattice_invariance(p, a1, a2, a3, r):
    g = GroupElement(*p, 0.17)
    gamma = GroupElement(float(a1), float(a2), float(a3), float(r), 0.0)
    assert abs(theta_map(1, 1, 0, F, multiply(gamma, g)) - theta_map(1, 1, 0, F, g)) < 1e-11


def test_central_character():
    g = GroupElement(0.3, 0.1, 0.2, 0.4, 0.0)
    u = 0.37
    for k in (1, 2):
        lhs = theta_map(k, 0, 1, F, g.with_v(u))
        assert abs(lhs - np.exp(-4j * math.pi * k * u) * theta_map(k, 0, 1, F, g)) < 1e-13


@given(points, st.sampled_from([1, 2, 3]), st.integers(0, 5), st.integers(0, 5))
def test_pseudoperiodicity(p, k, m, n):
    rep = check_pseudoperiodicity(k, m, n, F, p)
    assert max(rep["residuals"]) < 1e-10
    assert max(rep["factor_vs_cocycle"]) < 1e-12


def test_intertwining():
    rng = np.random.default_rng(3)
    samples = [GroupElement(*rng.random(5)) for _ in range(5)]
    g = GroupElement(0.4, -0.3, 0.8, 0.25, 0.1)
    assert check_intertwining(2, 1, 1, F, g, samples) < 1e-11


def test_grid_matches_pointwise():
    xs, ys, zs, ts = (np.linspace(0, 1, 4, endpoint=False) + s for s in (0.05, 0.1, 0.15, 0.2))
    G = theta_grid(2, 1, 3, F, xs, ys, zs, ts)
    X, Y, Z, T = np.meshgrid(xs, ys, zs, ts, indexing="ij")
    assert np.max(np.abs(G - theta_R4(2, 1, 3, F, (X, Y, Z, T)))) < 1e-12


def test_truncation_is_certified():
    w = certify_window(F, [0.5], [0.5], tol=1e-12)
    assert w.W >= 1
    with pytest.raises(TruncationError):
        theta_R4(1, 0, 0, GaussianSpec(sigma=3.0), (0.1, 0.2, 0.3, 0.4), window=TruncationWindow(2, 1e-12))
    with pytest.raises(ValueError):
        TruncationWindow(0)


def test_callbacks_without_envelope_use_empirical_tails():
    def plain(x, t):
        return np.exp(-math.pi * (x * x + t * t))
    p = (0.3, 0.6, 0.1, 0.8)
    assert abs(theta_R4(1, 0, 1, plain, p) - theta_R4(1, 0, 1, GaussianSpec(), p)) < 1e-13


def test_gaussian_norm():
    f = GaussianSpec(0.3, -0.2, 1.3, 2.0)
    assert l2_norm_squared(f) == pytest.approx(f.norm_squared(), rel=1e-12)


def test_sections_for_distinct_labels_are_orthogonal():
    f = GaussianSpec()
    grid = QuadratureGrid.gauss_legendre(10)
    fields = {(m, n): sample_section(1, m, n, f, grid) for m in (0, 1) for n in (0, 1)}
    for a in fields:
        for b in fields:
            if a != b:
                assert abs(inner_product_P(fields[a], fields[b])) < 1e-3


def test_haar_norm_is_half_the_l2_norm():
    """What the Haar-normalized quadrature measures: <Theta f, Theta f>_P = ||f||^2 / 2."""
    f = GaussianSpec()
    S = sample_section(1, 0, 0, f)
    assert inner_product_P(S, S).real == pytest.approx(f.norm_squared() / 2, rel=1e-5)


def test_inner_product_rejects_mismatched_levels():
    f = GaussianSpec()
    grid = QuadratureGrid.gauss_legendre(4)
    with pytest.raises(ValueError):
        inner_product_P(sample_section(1, 0, 0, f, grid), sample_section(2, 0, 0, f, grid))


@pytest.mark.parametrize("z", [0.1 + 0.2j, 0.5 - 0.7j, 0.93 + 1.0j])
def test_jacobi_theta_against_mpmath(z):
    ref = complex(mpmath.jtheta(3, mpmath.pi * z, mpmath.exp(-mpmath.pi)))
    assert abs(jacobi_theta(z) - ref) < 1e-13


def test_torus_transform_against_mpmath():
    worst = 0.0
    for x in (0.0, 0.3, 0.75):
        for y in (-0.8, 0.0, 0.45):
            lhs = weil_brezin_torus(1, lambda s: np.exp(-math.pi * s * s), (x, y, 0.0))
            rhs = complex(mpmath.jtheta(3, mpmath.pi * (x + 1j * y), mpmath.exp(-mpmath.pi))) * math.exp(-math.pi * y * y)
            worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-12


def test_classical_laplacian():
    t = sympy.Symbol("t", real=True)
    assert classical_delta1_apply(sympy.exp(-sympy.pi * t ** 2)) == 0
    f1 = t * sympy.exp(-sympy.pi * t ** 2)
    assert sympy.simplify(classical_delta1_apply(f1) - sympy.pi * f1) == 0
