import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import eval_hermite

from niltheta.spectral import (
    NonConvergenceError, bnf_band_coefficients, build_scaled_hamiltonian, direct_delta_k_matrix,
    finite_difference_residual, ground_state, hermite_functions, potential_eval,
    quantization_basis, scaled_eps, spectrum_delta_k,
)
from niltheta.theta import check_pseudoperiodicity


def test_hermite_functions_against_scipy():
    u = np.linspace(-4, 4, 9)
    ours = hermite_functions(12, u)
    for n in range(13):
        ref = eval_hermite(n, u) * np.exp(-u * u / 2) / math.sqrt(2 ** n * math.factorial(n) * math.sqrt(math.pi))
        assert np.allclose(ours[n], ref, atol=1e-13)


def test_hermite_functions_stay_finite_far_out():
    vals = hermite_functions(120, np.array([0.0, 15.0, 40.0]))
    assert np.all(np.isfinite(vals))
    x, w = np.polynomial.hermite.hermgauss(150)
    H = hermite_functions(120, x) * np.exp(x * x / 2)
    assert np.allclose((H * w) @ H.T, np.eye(121), atol=1e-10)


def test_unperturbed_levels():
    op = build_scaled_hamiltonian(0.0, 12)
    vals = np.linalg.eigvalsh(op.matrix)[:10]
    assert np.allclose(vals, [2, 4, 4, 6, 6, 6, 8, 8, 8, 8])


@pytest.mark.parametrize("eps", [0.05, 0.3])
def test_hamiltonian_is_symmetric_and_banded(eps):
    op = build_scaled_hamiltonian(eps, 20)
    assert op.symmetry_defect() < 1e-13
    assert op.max_level_jump() <= 4


@pytest.mark.parametrize("k", [1, 2])
def test_direct_matrix_agrees(k):
    N = 20
    direct = np.linalg.eigvalsh(direct_delta_k_matrix(k, N))[:5]
    scaled = 4 * math.pi * k * np.linalg.eigvalsh(build_scaled_hamiltonian(scaled_eps(k), N).matrix)[:5]
    assert np.allclose(direct, scaled, rtol=1e-12)


@pytest.mark.parametrize("k", [1, 3])
def test_ground_level(k):
    rep = spectrum_delta_k(k, 40, count=3)
    assert rep.converged and rep.multiplicities[0] == 1
    assert abs(rep.eigenvalues[0] - 8 * math.pi * k) < 1
    assert rep.eigenvalues[1] - rep.eigenvalues[0] > 0.9 * 4 * math.pi * k


def test_small_basis_is_flagged():
    assert not spectrum_delta_k(1, 4, count=2).converged
    with pytest.raises(NonConvergenceError):
        ground_state(1, 4)
    with pytest.raises(ValueError):
        spectrum_delta_k(0)


def test_second_order_shift_matches_normal_form():
    """(lambda_0(H_eps) - 2) / eps^2 approaches the K4 vacuum prediction 1/12."""
    predicted = bnf_band_coefficients()
    assert predicted[2][0] == pytest.approx(1 / 12)
    eps = 0.02
    lam0 = np.linalg.eigvalsh(build_scaled_hamiltonian(eps, 30).matrix)[0]
    assert (lam0 - 2) / eps ** 2 == pytest.approx(1 / 12, abs=2e-3)


def test_first_excited_band_matches_normal_form():
    predicted = sorted(bnf_band_coefficients()[4])
    eps = 0.02
    vals = np.linalg.eigvalsh(build_scaled_hamiltonian(eps, 30).matrix)[1:3]
    assert np.allclose(sorted((vals - 4) / eps ** 2), predicted, atol=5e-3)


@pytest.mark.parametrize("x,t", [(0, 0), (1, 2), ("1/2", "-3/4"), (3, "5/3")])
def test_potential_forms_agree_exactly(x, t):
    a, b = potential_eval(2, Fraction(x), Fraction(t), exact=True)
    assert a == b


def test_potential_minimum():
    d, f = potential_eval(1, 0.0, 0.0)
    assert d == f == 0
    assert potential_eval(1, 1.0, 0.5)[1] == pytest.approx(16 * math.pi ** 2)


@pytest.fixture(scope="module")
def ground():
    return ground_state(1, 40)


def test_ground_state_shape(ground):
    assert ground.norm() == pytest.approx(1.0)
    assert np.max(np.abs(ground.coefficients[1::2, :])) < 1e-14      # even in x
    s = np.linspace(-4, 4, 401)
    h = s[1] - s[0]
    assert np.sum(ground.grid(s, s) ** 2) * h * h == pytest.approx(1.0, rel=1e-8)
    assert ground(0.3, -0.2) == pytest.approx(ground.grid([0.3], [-0.2])[0, 0])


def test_ground_state_solves_the_pde(ground):
    assert finite_difference_residual(ground) < 1e-8


def test_quantization_basis_size_and_pseudoperiodicity(ground):
    basis = quantization_basis(1)
    assert len(basis) == 4
    assert {(ev.point.m, ev.point.n) for ev in basis} == {(0, 0), (0, 1), (1, 0), (1, 1)}
    ev = basis[3]
    rep = check_pseudoperiodicity(1, ev.point.m, ev.point.n, ev.ground_state, (0.2, 0.7, 0.4, 0.9))
    assert max(rep["residuals"]) < 1e-10
    assert abs(ev((0.2, 0.7, 0.4, 0.9))) > 0
