"""Left-invariant forms, Lagrangian subspaces and the CY structures J_e, eps_e.

Forms live on the coframe (beta1, beta2, beta3, betaT, betaU), indexed 0..4.
A k-form is a dict from increasing index tuples to coefficients; the
coefficients can be Fractions, complex floats or sympy numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

import numpy as np
import sympy

from .coadjoint import SubalgebraSpec, in_span, is_subalgebra, rank
from .lie import BASIS, GroupElement, LieVector, U, bracket

__all__ = [
    "KForm", "beta", "omega", "exterior_d", "two_form_matrix", "is_lagrangian",
    "subalgebra_to_lagrangian", "lagrangian_to_subalgebra", "lagrangian_for_e",
    "CYStructure", "cy_structure", "cy_structure_exact", "verify_cy",
    "verify_cy_exact", "is_special_lagrangian", "QuadraticSurd", "is_torus_fiber",
    "HamiltonianAssignment", "hamiltonian_assignment", "verify_hamiltonian_frame",
]

NAMES = ("1", "2", "3", "T", "U")


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation, 0 if an index repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


@dataclass(frozen=True)
class KForm:
    degree: int
    coeffs: Mapping[tuple[int, ...], object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, c in dict(self.coeffs).items():
            if len(key) != self.degree:
                raise ValueError("index tuple does not match degree")
            sign, skey = _sort_sign(key)
            if sign == 0:
                continue
            clean[skey] = clean.get(skey, 0) + sign * c
        object.__setattr__(self, "coeffs", {k: c for k, c in clean.items() if c != 0})

    def __add__(self, other: KForm) -> KForm:
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return KForm(self.degree, out)

    def __neg__(self) -> KForm:
        return KForm(self.degree, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: KForm) -> KForm:
        return self + (-other)

    def scale(self, s) -> KForm:
        return KForm(self.degree, {k: s * c for k, c in self.coeffs.items()})

    def map(self, fn) -> KForm:
        return KForm(self.degree, {k: fn(c) for k, c in self.coeffs.items()})

    def wedge(self, other: KForm) -> KForm:
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                sign, key = _sort_sign(k1 + k2)
                if sign:
                    out[key] = out.get(key, 0) + sign * c1 * c2
        return KForm(self.degree + other.degree, out)

    __xor__ = wedge

    def __call__(self, *vectors: LieVector):
        """Evaluate on k vectors, with (beta_i ^ beta_j)(e_i, e_j) = 1."""
        if len(vectors) != self.degree:
            raise ValueError(f"expected {self.degree} vectors")
        cols = [list(v) for v in vectors]
        total = 0
        for key, c in self.coeffs.items():
            det = 0
            for perm in permutations(range(self.degree)):
                sign, _ = _sort_sign(perm)
                term = sign
                for slot, p in enumerate(perm):
                    term = term * cols[slot][key[p]]
                det = det + term
            total = total + c * det
        return total

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(complex(c)) <= tol for c in self.coeffs.values())

    def top_coefficient(self):
        """Coefficient of beta1^beta2^beta3^betaT for a 4-form on the base."""
        return self.coeffs.get((0, 1, 2, 3), 0)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*b" + "".join(NAMES[i] for i in k)
                          for k, c in sorted(self.coeffs.items()))


def beta(*indices: int, coeff=1) -> KForm:
    return KForm(len(indices), {tuple(indices): coeff})


def omega(normalized: bool = False) -> KForm:
    """2pi (beta1^beta3 + beta2^betaT); normalized=True drops the 2pi."""
    s = Fraction(1) if normalized else 2 * math.pi
    return KForm(2, {(0, 2): s, (1, 3): s})


def _d_basis(k: int) -> KForm:
    # d beta^k (X, Y) = -beta^k([X, Y])
    out = {}
    for i in range(5):
        for j in range(i + 1, 5):
            c = list(bracket(BASIS[i], BASIS[j]))[k]
            if c:
                out[(i, j)] = -c
    return KForm(2, out)


_D_BASIS = [_d_basis(k) for k in range(5)]


def exterior_d(form: KForm) -> KForm:
    """Left-invariant exterior derivative, extended by the graded Leibniz rule."""
    if form.degree >= 4:
        raise ValueError("exterior derivative is only taken below degree 4")
    out = KForm(form.degree + 1)
    for key, c in form.coeffs.items():
        for pos, idx in enumerate(key):
            left = KForm(pos, {key[:pos]: (-1) ** pos * c})
            right = KForm(len(key) - pos - 1, {key[pos + 1:]: 1})
            out = out + left.wedge(_D_BASIS[idx]).wedge(right)
    return out


def two_form_matrix(form: KForm, dim: int = 4) -> np.ndarray:
    """Antisymmetric matrix A[i, j] = form(e_i, e_j) on the first dim basis vectors."""
    if form.degree != 2:
        raise ValueError("expected a 2-form")
    dtype = complex if any(isinstance(c, complex) for c in form.coeffs.values()) else float
    A = np.zeros((dim, dim), dtype=dtype)
    for (i, j), c in form.coeffs.items():
        if i < dim and j < dim:
            A[i, j] = complex(c) if dtype is complex else float(c)
            A[j, i] = -A[i, j]
    return A


def form_from_matrix(A) -> KForm:
    n = len(A)
    return KForm(2, {(i, j): A[i][j] for i in range(n) for j in range(i + 1, n)})


# ---------------------------------------------------------------- Lagrangians

def _check_base(L: Sequence[LieVector]) -> None:
    if len(L) != 2:
        raise ValueError("a Lagrangian subspace of g is two-dimensional")
    if any(v.u != 0 for v in L):
        raise ValueError("Lagrangian subspaces live in g, the U component must vanish")
    if rank(L) != 2:
        raise ValueError("degenerate basis")


def is_lagrangian(L: Sequence[LieVector]) -> bool:
    _check_base(L)
    return omega(normalized=True)(L[0], L[1]) == 0


def subalgebra_to_lagrangian(h: SubalgebraSpec) -> tuple[LieVector, LieVector]:
    """Project out U and keep an independent pair."""
    chosen: list[LieVector] = []
    for v in h.basis:
        p = v.base_part()
        if not p.is_zero() and not in_span(p, chosen):
            chosen.append(p)
    if len(chosen) != 2:
        raise ValueError("projection is not two-dimensional")
    return tuple(chosen)


def lagrangian_to_subalgebra(L: Sequence[LieVector]) -> SubalgebraSpec | None:
    h = SubalgebraSpec(tuple(L) + (U,))
    return h if is_subalgebra(h) else None


def lagrangian_for_e(e) -> tuple[LieVector, LieVector]:
    from .coadjoint import subordinate_family
    return subalgebra_to_lagrangian(subordinate_family("e", e))


# ---------------------------------------------------------------- CY structures

_REFLECT = np.diag([1.0, -1.0, -1.0, 1.0])


def _period_entries(E, s, I):
    """Entries of the period matrix for |e| = E, sqrt|e| = s (e >= 0 form)."""
    o11 = (1 + 2 * E) * (-E / (1 + E) + I)
    o12 = s * (-1 + I)
    o22 = (-E + I * (1 + E)) / (1 + 2 * E)
    return o11, o12, o22


def _eps_entries(E, s, I):
    """Upper entries (i, j) of eps / (pi i) on X1, X2, X3, T for e >= 0."""
    return {
        (0, 1): 1,
        (0, 2): s * (1 + I),
        (0, 3): (E + I * (1 + E)) / (1 + 2 * E),
        (1, 2): -E * (1 + 2 * E) / (1 + E) - I * (1 + 2 * E),
        (1, 3): -s * (1 + I),
        (2, 3): -(1 + 2 * E) / (1 + E),
    }


def _complex_structure(period):
    """J from Omega = Omega1 + i Omega2 by the block formula."""
    if isinstance(period, np.ndarray):
        O1, O2 = period.real, period.imag
        O2i = np.linalg.inv(O2)
        return np.block([[O1 @ O2i, -O2 - O1 @ O2i @ O1], [O2i, -O2i @ O1]])
    O1 = period.applyfunc(sympy.re)
    O2 = period.applyfunc(sympy.im)
    O2i = O2.inv()
    top = (O1 * O2i).row_join(-O2 - O1 * O2i * O1)
    bottom = O2i.row_join(-O2i * O1)
    return sympy.simplify(top.col_join(bottom))


@dataclass(frozen=True)
class CYStructure:
    e: object
    period: np.ndarray      # 2x2 complex, in the Siegel upper half space
    J: np.ndarray           # 4x4 real, acting on coefficient columns (X1, X2, X3, T)
    eps: np.ndarray         # 4x4 complex antisymmetric, eps[i, j] = eps(e_i, e_j)

    @property
    def eps_form(self) -> KForm:
        return form_from_matrix(self.eps)


def cy_structure(e) -> CYStructure:
    """Left-invariant (omega, J_e, eps_e) with L_e = span{X2 + eT, X3} special Lagrangian.

    For e >= 0 the structure comes from the closed-form period matrix.  For
    e < 0 the same formulas with |e| substituted give no (2,0)-form vanishing
    on L_e, so the structure for |e| is pulled back by the anti-symplectic
    automorphism X2 -> -X2, X3 -> -X3 and conjugated, which keeps every
    identity intact.
    The period matrix is then read back from J.
    """
    if isinstance(e, float) and not math.isfinite(e):
        raise ValueError("e must be finite")
    E = abs(float(e))
    s = math.sqrt(E)
    o11, o12, o22 = _period_entries(E, s, 1j)
    period = np.array([[o11, o12], [o12, o22]], dtype=complex)
    eps = np.zeros((4, 4), dtype=complex)
    for (i, j), c in _eps_entries(E, s, 1j).items():
        eps[i, j] = math.pi * 1j * c
        eps[j, i] = -eps[i, j]
    J = _complex_structure(period)
    if e < 0:
        J = -_REFLECT @ J @ _REFLECT
        eps = (_REFLECT @ eps @ _REFLECT).conj()
        period = _period_from_J(J)
    return CYStructure(e, period, J, eps)


def _period_from_J(J: np.ndarray) -> np.ndarray:
    """Inverse of the block formula: Omega2 = (J21)^-1, Omega1 = -Omega2 J22."""
    O2 = np.linalg.inv(J[2:, :2])
    return -O2 @ J[2:, 2:] + 1j * O2


def cy_structure_exact(e):
    """Exact (J, eps) as sympy matrices; needs |e| a rational square, e >= 0."""
    E = sympy.nsimplify(e)
    s = sympy.sqrt(E)
    if E < 0 or not s.is_rational:
        raise ValueError("exact construction needs e >= 0 with rational square root")
    o11, o12, o22 = _period_entries(E, s, sympy.I)
    period = sympy.Matrix([[o11, o12], [o12, o22]])
    eps = sympy.zeros(4, 4)
    for (i, j), c in _eps_entries(E, s, sympy.I).items():
        eps[i, j] = sympy.I * c        # pi is dropped: identities are homogeneous in it
        eps[j, i] = -eps[i, j]
    return _complex_structure(period), eps


def _omega_matrix(scale=2 * math.pi) -> np.ndarray:
    return scale * np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)


def _volume_ratio(eps: np.ndarray, omega_mat: np.ndarray) -> complex:
    ef = form_from_matrix(eps)
    num = ef.wedge(ef.map(lambda c: complex(c).conjugate())).top_coefficient()
    of = form_from_matrix(omega_mat)
    den = of.wedge(of).top_coefficient() / 2
    return complex(num) / float(den)


def verify_cy(c: CYStructure, tol: float = 1e-10) -> dict:
    """Check J^2 = -I, omega-compatibility, eps^eps-bar = omega^2/2 and d(Re eps) = 0."""
    J, W = c.J, _omega_matrix()
    scale = 2 * math.pi
    j_sq = float(np.max(np.abs(J @ J + np.eye(4))))
    compat = float(np.max(np.abs(J.T @ W @ J - W))) / scale
    metric = W @ J
    sym = float(np.max(np.abs(metric - metric.T))) / scale
    pos = float(np.min(np.linalg.eigvalsh((metric + metric.T) / 2))) > 0
    ratio = _volume_ratio(c.eps, W)
    type_20 = float(np.max(np.abs(c.eps @ J - 1j * c.eps))) / math.pi
    d_re = exterior_d(form_from_matrix(c.eps.real))
    d_re_max = max((abs(v) for v in d_re.coeffs.values()), default=0.0) / math.pi
    return {
        "e": str(c.e),
        "J_squared_is_minus_identity": j_sq <= tol,
        "omega_compatible": compat <= tol and sym <= tol and pos,
        "volume_normalized": abs(ratio - 1) <= tol,
        "d_re_eps_closed": d_re_max <= tol,
        "eps_type_2_0": type_20 <= tol,
        "volume_ratio": [ratio.real, ratio.imag],
        "residuals": {"J_squared": j_sq, "compatibility": compat, "type_2_0": type_20,
                      "d_re_eps": d_re_max},
    }


def verify_cy_exact(e) -> dict:
    """verify_cy in exact arithmetic (omega and eps both divided by their pi factors)."""
    J, eps = cy_structure_exact(e)
    W = sympy.Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    ef = form_from_matrix(eps.tolist())
    wedge = ef.wedge(ef.map(sympy.conjugate)).top_coefficient()
    of = form_from_matrix(W.tolist())
    # omega = 2pi * W and eps = pi * eps_hat, so eps^eps-bar / (omega^2/2) = wedge / (2 * top(W^W))
    ratio = sympy.simplify(wedge / (2 * of.wedge(of).top_coefficient()))
    d_re = exterior_d(ef.map(sympy.re))
    return {
        "J_squared_is_minus_identity": sympy.simplify(J * J + sympy.eye(4)) == sympy.zeros(4, 4),
        "omega_compatible": sympy.simplify(J.T * W * J - W) == sympy.zeros(4, 4),
        "volume_normalized": ratio == 1,
        "d_re_eps_closed": all(sympy.simplify(v) == 0 for v in d_re.coeffs.values()),
        "eps_type_2_0": sympy.simplify(eps * J - sympy.I * eps) == sympy.zeros(4, 4),
    }


def is_special_lagrangian(L: Sequence[LieVector], c: CYStructure, tol: float = 1e-10) -> bool:
    if not is_lagrangian(L):
        raise ValueError("subspace is not Lagrangian")
    v = np.array([float(x) for x in list(L[0])[:4]])
    w = np.array([float(x) for x in list(L[1])[:4]])
    return abs((v @ c.eps @ w).imag) <= tol


# ---------------------------------------------------------------- torus fibres

@dataclass(frozen=True)
class QuadraticSurd:
    """p + q sqrt(d) with p, q rational and d a square-free nonnegative integer."""

    p: Fraction
    q: Fraction = Fraction(0)
    d: int = 0

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be nonnegative")
        if any(self.d % (k * k) == 0 for k in range(2, math.isqrt(self.d) + 1)):
            raise ValueError("d must be square-free")

    def is_rational(self) -> bool:
        return self.q == 0 or self.d in (0, 1)

    def is_zero(self) -> bool:
        if self.d in (0, 1):
            return self.p + self.q * self.d == 0
        return self.p == 0 and self.q == 0


def is_torus_fiber(e, x: QuadraticSurd) -> bool:
    """Whether the leaf through x of the foliation by L_e closes up to a torus."""
    if (isinstance(e, float) and math.isinf(e)) or e == 0:
        return True
    # e is a nonzero rational, so {x, e} is Q-dependent iff x is rational
    return x.is_zero() or x.is_rational()


# ---------------------------------------------------------------- Hamiltonians

_A = sympy.symbols("a1 a2 a3 r", real=True)


@dataclass(frozen=True)
class HamiltonianAssignment:
    phis: tuple        # sympy expressions for phi1, phi2, phi3, phiT
    phi_u: object


def hamiltonian_assignment() -> HamiltonianAssignment:
    a1, a2, a3, r = _A
    tp = 2 * sympy.pi
    return HamiltonianAssignment((-tp * a3, -tp * (r + a1 ** 2 / 2), tp * a1, tp * a2), tp)


def right_invariant_fields():
    """Coefficient columns of X1R, X2R, X3R, TR in the coordinate frame (d/da1, d/da2, d/da3, d/dr)."""
    a1 = _A[0]
    return (
        sympy.Matrix([1, 0, 0, 0]),
        sympy.Matrix([0, 1, -a1, 0]),
        sympy.Matrix([0, 0, 1, 0]),
        sympy.Matrix([0, 0, 0, 1]),
    )


def verify_hamiltonian_frame(samples, tol: float = 1e-12) -> dict:
    """dphi_i = omega(., X_iR) and the Poisson relations, at each sample (a1, a2, a3, r).

    The Poisson bracket is {f, g} = X_f(g) with X_f the field satisfying df = omega(., X_f).
    """
    H = hamiltonian_assignment()
    W = 2 * sympy.pi * sympy.Matrix(_omega_matrix(1).astype(int))
    fields_ = right_invariant_fields()
    grads = [sympy.Matrix([sympy.diff(p, a) for a in _A]) for p in H.phis]
    frame_exprs = [grads[i] - W * fields_[i] for i in range(4)]

    def pb(i, j):
        return (grads[j].T * fields_[i])[0]

    a1, a2, a3, r = _A
    poisson_exprs = {
        "{phi1,phi2}+phi3": pb(0, 1) + H.phis[2],
        "{phi1,phi3}-2pi": pb(0, 2) - 2 * sympy.pi,
        "{phi2,phiT}-2pi": pb(1, 3) - 2 * sympy.pi,
        "{phi1,phiT}": pb(0, 3),
    }
    frame_fn = sympy.lambdify(_A, sympy.Matrix.hstack(*frame_exprs), "numpy")
    pb_fns = {k: sympy.lambdify(_A, v, "numpy") for k, v in poisson_exprs.items()}
    frame_res, pb_res = 0.0, {k: 0.0 for k in pb_fns}
    for pt in samples:
        pt = [float(c) for c in pt]
        frame_res = max(frame_res, float(np.max(np.abs(np.asarray(frame_fn(*pt), dtype=float)))))
        for k, fn in pb_fns.items():
            pb_res[k] = max(pb_res[k], abs(float(fn(*pt))))
    return {
        "frame_holds": frame_res <= tol,
        "poisson_holds": all(v <= tol for v in pb_res.values()),
        "frame_residual": frame_res,
        "poisson_residuals": pb_res,
        "samples": len(samples),
    }
