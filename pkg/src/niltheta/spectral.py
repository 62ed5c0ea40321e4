"""Spectrum of the filtered Laplacian in a truncated two-dimensional Hermite basis.

The level-k Laplacian

    Delta_k = -d_xx - d_tt + 16 pi^2 k^2 [x^2 + (t - x^2/2)^2]

is unitarily equivalent, after the dilation x -> sqrt(hbar) x with hbar = 1/(4 pi k),
to 4 pi k times H_eps = -Lap + x^2 + t^2 - eps x^2 t + eps^2 x^4/4, eps = sqrt(hbar).
Flipping t -> -t turns the sign of the cubic term around without changing the
spectrum; build_scaled_hamiltonian uses +eps x^2 t as in the ladder grading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.linalg import eigh

__all__ = [
    "NumberBasis", "NumberBasisOperator", "SpectrumReport", "GroundState",
    "hermite_functions", "build_scaled_hamiltonian", "scaled_eps",
    "spectrum_delta_k", "direct_delta_k_matrix", "band_report", "ground_state",
    "potential_eval", "finite_difference_residual", "quantization_basis",
    "bnf_band_coefficients", "NonConvergenceError",
]

RHO = 8   # basis-cut refinement used for convergence certificates


class NonConvergenceError(RuntimeError):
    pass


def scaled_eps(k: int) -> float:
    return (4 * math.pi * k) ** -0.5


# ---------------------------------------------------------------- Hermite functions

def hermite_functions(n_max: int, u) -> np.ndarray:
    """Orthonormal Hermite functions phi_0..phi_{n_max} at u, shape (n_max + 1, *u.shape).

    Upward recurrence on the polynomial part with a running log-scale per point,
    so neither the polynomial nor the Gaussian overflows for large n or |u|.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty((n_max + 1,) + u.shape)
    log_scale = -u * u / 2
    prev = np.zeros_like(u)
    cur = np.full_like(u, math.pi ** -0.25)
    out[0] = cur * np.exp(log_scale)
    for n in range(n_max):
        nxt = math.sqrt(2 / (n + 1)) * u * cur - math.sqrt(n / (n + 1)) * prev
        big = np.abs(nxt) > 1e100
        if np.any(big):
            s = np.where(big, 1e-100, 1.0)
            nxt, cur = nxt * s, cur * s
            log_scale = log_scale + np.where(big, 100 * math.log(10), 0.0)
        prev, cur = cur, nxt
        out[n + 1] = cur * np.exp(log_scale)
    return out


def _hermite_polys(n_max: int, u: np.ndarray) -> np.ndarray:
    """phi_n(u) e^{u^2/2}, used with Gauss-Hermite weights."""
    out = np.empty((n_max + 1, len(u)))
    out[0] = math.pi ** -0.25
    if n_max >= 1:
        out[1] = math.sqrt(2) * u * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2 / (n + 1)) * u * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


# ---------------------------------------------------------------- number basis

@dataclass(frozen=True)
class NumberBasis:
    """States |n1, n2> with n1 + n2 <= N, ordered by total degree then n1 descending."""

    N: int

    @cached_property
    def states(self) -> list[tuple[int, int]]:
        return [(level - j, j) for level in range(self.N + 1) for j in range(level + 1)]

    @cached_property
    def n1(self) -> np.ndarray:
        return np.array([s[0] for s in self.states])

    @cached_property
    def n2(self) -> np.ndarray:
        return np.array([s[1] for s in self.states])

    def __len__(self) -> int:
        return len(self.states)

    def coefficient_grid(self, vec: np.ndarray) -> np.ndarray:
        C = np.zeros((self.N + 1, self.N + 1), dtype=vec.dtype)
        C[self.n1, self.n2] = vec
        return C


def _position_powers(M: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """x, x^2, x^4 in the 1D number basis of size M, with x = (a + b)/sqrt 2."""
    off = np.sqrt(np.arange(1, M) / 2)
    X = np.diag(off, 1) + np.diag(off, -1)
    X2 = X @ X
    return X, X2, X2 @ X2


@dataclass(frozen=True)
class NumberBasisOperator:
    basis: NumberBasis
    matrix: np.ndarray
    eps: float

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def max_level_jump(self) -> int:
        lv = self.basis.n1 + self.basis.n2
        i, j = np.nonzero(np.abs(self.matrix) > 0)
        return int(np.max(np.abs(lv[i] - lv[j]))) if len(i) else 0


def build_scaled_hamiltonian(eps: float, N: int) -> NumberBasisOperator:
    """-Lap + x^2 + t^2 + eps x^2 t + eps^2 x^4/4 on {n1 + n2 <= N}.

    The 1D operators are built on a basis five states larger than N so that
    every retained matrix element of x^4 is exact.
    """
    if N < 4:
        raise ValueError("N must be at least 4")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    basis = NumberBasis(N)
    X, X2, X4 = _position_powers(N + 5)
    n1, n2 = basis.n1, basis.n2
    same2 = (n2[:, None] == n2[None, :])
    H = np.diag(2.0 * (n1 + n2 + 1))
    H = H + eps * X2[n1[:, None], n1[None, :]] * X[n2[:, None], n2[None, :]]
    H = H + eps * eps / 4 * X4[n1[:, None], n1[None, :]] * same2
    return NumberBasisOperator(basis, H, eps)


@dataclass
class SpectrumReport:
    k: int | None
    eps: float
    N: int
    eigenvalues: np.ndarray
    ground_vector: np.ndarray
    converged: bool
    refinement_change: float
    multiplicities: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "k": self.k, "eps": self.eps, "basis": self.N,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "multiplicities": self.multiplicities,
            "converged": self.converged,
            "refinement_change": self.refinement_change,
        }


def _lowest(op: NumberBasisOperator, count: int) -> tuple[np.ndarray, np.ndarray]:
    count = min(count, len(op.basis))
    vals, vecs = eigh(op.matrix, subset_by_index=[0, count - 1])
    return vals, vecs


def _multiplicities(vals: np.ndarray, rtol: float = 1e-9) -> list[int]:
    groups: list[int] = []
    last = None
    for v in vals:
        if last is not None and abs(v - last) <= rtol * max(1.0, abs(v)):
            groups[-1] += 1
        else:
            groups.append(1)
        last = v
    return groups


def spectrum_delta_k(k: int, N: int = 40, count: int = 10, rtol: float = 1e-8) -> SpectrumReport:
    """Lowest eigenvalues of Delta_k = 4 pi k spec(H_eps), certified by N -> N + 8."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    eps = scaled_eps(k)
    scale = 4 * math.pi * k
    vals, vecs = _lowest(build_scaled_hamiltonian(eps, N), count)
    ref, _ = _lowest(build_scaled_hamiltonian(eps, N + RHO), 1)
    change = abs(vals[0] - ref[0]) / abs(ref[0])
    eigen = scale * vals
    return SpectrumReport(k, eps, N, eigen, vecs[:, 0], change <= rtol, float(change),
                          _multiplicities(eigen))


def direct_delta_k_matrix(k: int, N: int) -> np.ndarray:
    """Delta_k on the dilated Hermite functions, assembled by Gauss-Hermite quadrature.

    Shares no code with build_scaled_hamiltonian: the kinetic part uses the
    derivative of the Hermite functions and the potential is evaluated
    pointwise from potential_eval.
    """
    s = scaled_eps(k)
    basis = NumberBasis(N)
    q = N + 6
    u, w = np.polynomial.hermite.hermgauss(q)
    P = _hermite_polys(N, u)                           # phi_n e^{u^2/2}
    dP = np.zeros_like(P)                              # (phi_n)' e^{u^2/2}
    dP[:] = -u * P
    dP[1:] += np.sqrt(2 * np.arange(1, N + 1))[:, None] * P[:-1]
    K1 = (dP * w) @ dP.T / (s * s)
    n1, n2 = basis.n1, basis.n2
    kinetic = K1[n1[:, None], n1[None, :]] * (n2[:, None] == n2[None, :]) \
        + K1[n2[:, None], n2[None, :]] * (n1[:, None] == n1[None, :])
    Xg, Tg = np.meshgrid(s * u, s * u, indexing="ij")
    V = potential_eval(k, Xg, Tg)[0]
    Phi = (P[n1][:, :, None] * P[n2][:, None, :]) * np.sqrt(np.outer(w, w))[None]
    Phi = Phi.reshape(len(basis), -1)
    return kinetic + (Phi * V.reshape(-1)) @ Phi.T


def band_report(eps_values=(0.05, 0.1, 0.2), N: int = 40, count: int = 6) -> dict:
    """Distance of the lowest eigenvalues of H_eps from the oscillator levels 2, 4, 6, ..."""
    rows = []
    for eps in eps_values:
        vals, _ = _lowest(build_scaled_hamiltonian(eps, N), count)
        centers = 2 * np.maximum(np.rint(vals / 2), 1)
        dev = vals - centers
        bands: dict[int, float] = {}
        for c, d in zip(centers, dev):
            bands[int(c)] = max(bands.get(int(c), 0.0), abs(float(d)))
        rows.append({"eps": eps, "eigenvalues": vals.tolist(), "centers": centers.tolist(),
                     "deviations": dev.tolist(), "max_deviation_per_band": bands,
                     "scaled_max": float(np.max(np.abs(dev))) / eps ** 2 if eps else 0.0})
    out = {"rows": rows}
    ground = [abs(r["deviations"][0]) for r in rows if r["eps"] > 0]
    pos = [e for e in eps_values if e > 0]
    if len(ground) >= 2:
        slope = np.polyfit(np.log(pos), np.log(ground), 1)[0]
        out["ground_slope"] = float(slope)
    return out


def bnf_band_coefficients(levels=(0, 1, 2)) -> dict[int, list[float]]:
    """eps^2 shifts of H_eps predicted by the Birkhoff normal form.

    H_eps = 2 [H2 + (eps/2) H3 + (eps^2/2) H4], so the shift of a level-N state
    is 2 eps^2 times an eigenvalue of K4 (for the weights 1/2, 1/2) restricted
    to the level-N eigenspace of H2.
    """
    from .ladder import bnf, restrict_to_level

    K4 = bnf(4, Fraction(1, 2), Fraction(1, 2))[2][0]
    out = {}
    for level in levels:
        _, M = restrict_to_level(K4, level)
        out[2 * (level + 1)] = sorted(2 * np.linalg.eigvalsh((M + M.T) / 2))
    return out


# ---------------------------------------------------------------- ground state

def potential_eval(k: int, x, t, exact: bool = False):
    """(expanded, factored) forms of 16 pi^2 k^2 [x^2 + t^2 + x^2 (x^2/4 - t)].

    With exact=True the common factor pi^2 is left out and Fractions in give
    Fractions out, so the two forms can be compared exactly.
    """
    c = 16 * k * k * (1 if exact else math.pi ** 2)
    if exact:
        x, t = Fraction(x), Fraction(t)
        quarter, half = Fraction(1, 4), Fraction(1, 2)
    else:
        quarter, half = 0.25, 0.5
    expanded = c * ((x * x + t * t) + x * x * (x * x * quarter - t))
    factored = c * (x * x + (t - x * x * half) ** 2)
    return expanded, factored


@dataclass
class GroundState:
    """psi_0(x, t) = s^-1 sum_{n1,n2} C[n1, n2] phi_n1(x/s) phi_n2(t/s), s = sqrt(hbar)."""

    k: int
    N: int
    coefficients: np.ndarray
    eigenvalue: float
    gap: float

    @property
    def scale(self) -> float:
        return scaled_eps(self.k)

    def __call__(self, x, t):
        s = self.scale
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        Hx = hermite_functions(self.N, x / s)
        Ht = hermite_functions(self.N, t / s)
        return np.einsum("i...,ij,j...->...", Hx, self.coefficients, Ht, optimize=True) / s

    def grid(self, xs, ts) -> np.ndarray:
        s = self.scale
        Hx = hermite_functions(self.N, np.asarray(xs, dtype=float) / s)
        Ht = hermite_functions(self.N, np.asarray(ts, dtype=float) / s)
        return Hx.T @ self.coefficients @ Ht / s

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))


def ground_state(k: int, N: int = 40, rtol: float = 1e-8) -> GroundState:
    report = spectrum_delta_k(k, N, count=2, rtol=rtol)
    if not report.converged:
        raise NonConvergenceError(f"ground energy moved by {report.refinement_change:.2e} under N -> N + {RHO}")
    vals = report.eigenvalues
    if vals[1] - vals[0] <= 1e-6 * abs(vals[0]):
        raise NonConvergenceError("ground state is not separated from the next eigenvalue")
    basis = NumberBasis(N)
    vec = report.ground_vector.copy()
    vec *= np.where(basis.n2 % 2, -1.0, 1.0)      # t -> -t: back to the sign of Delta_k
    pivot = np.argmax(np.abs(vec))
    vec *= np.sign(vec[pivot])
    return GroundState(k, N, basis.coefficient_grid(vec), float(vals[0]), float(vals[1] - vals[0]))


def _second_derivative_weights(p: int) -> np.ndarray:
    """Central weights for f'' on offsets -p..p, exact for polynomials of degree 2p + 1."""
    off = np.arange(-p, p + 1, dtype=float)
    V = np.vander(off, increasing=True).T
    rhs = np.zeros(2 * p + 1)
    rhs[2] = 2.0
    return np.linalg.solve(V, rhs)


def finite_difference_residual(gs: GroundState, points: int = 200, half_width: float | None = None,
                               stencil: int = 6) -> float:
    """||(Delta_k - lambda_0) psi_0|| / ||psi_0|| on a uniform grid, high-order stencils."""
    if half_width is None:
        half_width = 9 * gs.scale
    s = np.linspace(-half_width, half_width, points)
    h = s[1] - s[0]
    psi = gs.grid(s, s)
    w = _second_derivative_weights(stencil) / (h * h)
    p = stencil
    inner = slice(p, points - p)
    lap = np.zeros((points - 2 * p, points - 2 * p))
    for j, c in enumerate(w):
        shift = j - p
        lap += c * psi[p + shift:points - p + shift, inner]
        lap += c * psi[inner, p + shift:points - p + shift]
    X, T = np.meshgrid(s[inner], s[inner], indexing="ij")
    V = potential_eval(gs.k, X, T)[0]
    res = -lap + (V - gs.eigenvalue) * psi[inner, inner]
    return float(np.linalg.norm(res) / np.linalg.norm(psi[inner, inner]))


def quantization_basis(k: int, N: int = 40, tol: float = 1e-12):
    """The 4k^2 theta functions theta_k^{m,n} psi_0 as evaluators (x, y, z, t) -> complex."""
    from .reps import enumerate_integral_points
    from .theta import theta_R4

    gs = ground_state(k, N)
    evaluators = []
    for pt in enumerate_integral_points(k):
        def evaluate(point, _pt=pt):
            return theta_R4(_pt.k, _pt.m, _pt.n, gs, point, tol=tol)
        evaluate.point = pt
        evaluate.ground_state = gs
        evaluators.append(evaluate)
    return evaluators
