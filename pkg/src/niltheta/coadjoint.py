"""Coadjoint orbits and subordinate subalgebras of the extended algebra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import sympy

from .lie import BASIS, GroupElement, LieVector, U, X1, X2, X3, T, _div, bracket

__all__ = [
    "Covector", "FourDim", "TwoDim", "ZeroDim", "OrbitClass", "SubalgebraSpec",
    "coadjoint_action", "classify_orbit", "canonical_representative",
    "orbit_normalizer", "orbit_pairing", "pairing", "rank", "in_span", "same_span",
    "is_subalgebra", "is_subordinate", "max_subordinate_dim", "subordinate_family",
    "is_ideal", "is_commutative", "INF",
]

INF = math.inf


@dataclass(frozen=True)
class Covector:
    """Coordinates (alpha1, alpha2, alpha3, rho, mu) dual to X1, X2, X3, T, U."""

    alpha1: object = 0
    alpha2: object = 0
    alpha3: object = 0
    rho: object = 0
    mu: object = 0

    def __iter__(self):
        return iter((self.alpha1, self.alpha2, self.alpha3, self.rho, self.mu))

    @classmethod
    def of(cls, *coords) -> Covector:
        return cls(*(Fraction(str(c)) for c in coords))


def pairing(lam: Covector, X: LieVector):
    return sum((p * q for p, q in zip(lam, X)), 0)


@dataclass(frozen=True)
class FourDim:
    mu: object


@dataclass(frozen=True)
class TwoDim:
    alpha3: object
    rho: object


@dataclass(frozen=True)
class ZeroDim:
    alpha1: object
    alpha2: object
    rho: object


OrbitClass = Union[FourDim, TwoDim, ZeroDim]


def coadjoint_action(g: GroupElement, lam: Covector) -> Covector:
    a1, a2, a3, r, _ = g
    al1, al2, al3, rho, mu = lam
    return Covector(
        al1 + a2 * al3 - a3 * mu,
        al2 - a1 * al3 - (r + _div(a1 * a1, 2)) * mu,
        al3 + a1 * mu,
        rho + a2 * mu,
        mu,
    )


def classify_orbit(lam: Covector) -> OrbitClass:
    if lam.mu != 0:
        return FourDim(lam.mu)
    if lam.alpha3 != 0:
        return TwoDim(lam.alpha3, lam.rho)
    return ZeroDim(lam.alpha1, lam.alpha2, lam.rho)


def canonical_representative(lam: Covector) -> Covector:
    cls = classify_orbit(lam)
    zero = 0 * lam.mu
    if isinstance(cls, FourDim):
        return Covector(zero, zero, zero, zero, lam.mu)
    if isinstance(cls, TwoDim):
        return Covector(zero, zero, lam.alpha3, lam.rho, zero)
    return lam


def orbit_normalizer(lam: Covector) -> GroupElement:
    """Group element carrying lam to (0, 0, 0, 0, mu); requires mu != 0."""
    al1, al2, al3, rho, mu = lam
    if mu == 0:
        raise ValueError("normalizer exists only on four-dimensional orbits (mu != 0)")
    mu = Fraction(mu) if isinstance(mu, int) else mu
    return GroupElement(
        -al3 / mu,
        -rho / mu,
        (mu * al1 - rho * al3) / (mu * mu),
        (al3 * al3 + 2 * al2 * mu) / (2 * mu * mu),
        0 * mu,
    )


def orbit_pairing(lam: Covector, v: LieVector, w: LieVector):
    """The skew form (v, w) -> <lam, [v, w]> written out in coordinates."""
    return (lam.alpha3 * (v.x1 * w.x2 - v.x2 * w.x1)
            + lam.mu * (v.x3 * w.x1 - v.x1 * w.x3 + v.t * w.x2 - v.x2 * w.t))


# ---------------------------------------------------------------- spans

def rank(vectors: Sequence[LieVector]) -> int:
    if not vectors:
        return 0
    return sympy.Matrix([list(v) for v in vectors]).rank()


def in_span(w: LieVector, vectors: Sequence[LieVector]) -> bool:
    return rank(list(vectors) + [w]) == rank(vectors)


def same_span(A: Sequence[LieVector], B: Sequence[LieVector]) -> bool:
    r = rank(A)
    return r == rank(B) == rank(list(A) + list(B))


@dataclass(frozen=True)
class SubalgebraSpec:
    basis: tuple
    label: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_independent(self) -> bool:
        return rank(self.basis) == len(self.basis)


def is_subalgebra(h: SubalgebraSpec) -> bool:
    B = h.basis
    return all(in_span(bracket(B[i], B[j]), B)
               for i in range(len(B)) for j in range(i + 1, len(B)))


def max_subordinate_dim(lam: Covector) -> int:
    cls = classify_orbit(lam)
    return {FourDim: 3, TwoDim: 4, ZeroDim: 5}[type(cls)]


def is_subordinate(h: SubalgebraSpec, lam: Covector) -> bool:
    if not h.is_independent() or not is_subalgebra(h):
        return False
    B = h.basis
    if any(orbit_pairing(lam, B[i], B[j]) != 0
           for i in range(len(B)) for j in range(i + 1, len(B))):
        return False
    return h.dim == max_subordinate_dim(lam)


def is_ideal(h: SubalgebraSpec) -> bool:
    return all(in_span(bracket(e, v), h.basis) for e in BASIS for v in h.basis)


def is_commutative(h: SubalgebraSpec) -> bool:
    return all(bracket(v, w).is_zero() for v in h.basis for w in h.basis)


def _is_inf(p) -> bool:
    return isinstance(p, float) and math.isinf(p)


def _rat(p):
    if _is_inf(p) or isinstance(p, Fraction):
        return p
    if isinstance(p, str) and p.strip().lstrip("+-") in ("inf", "oo"):
        return -INF if p.strip().startswith("-") else INF
    return Fraction(str(p))


def subordinate_family(tag: str, *params) -> SubalgebraSpec:
    """Subordinate subalgebras for (0,0,0,0,mu).

    tag "c": R(X1 + cX3) + RT + RU, and c = inf gives span{X3, T, U}.
    tag "bd": R(X1 + bX2 + dT) + R(X3 - T/b) + RU with b != 0; b = inf gives
    span{X2, X3, U} and d = inf gives span{X3, T, U}.
    tag "e": R(X2 + eT) + RX3 + RU; e = +-inf gives span{X3, T, U}.
    """
    params = tuple(_rat(p) for p in params)
    if tag == "c":
        (c,) = params
        if _is_inf(c):
            basis = (X3, T, U)
        else:
            basis = (X1 + c * X3, T, U)
    elif tag == "bd":
        b, d = params
        if b == 0:
            raise ValueError("b = 0 is excluded from the (b, d) family")
        if _is_inf(b):
            basis = (X2, X3, U)
        elif _is_inf(d):
            basis = (T, X3, U)
        else:
            basis = (X1 + b * X2 + d * T, X3 - (1 / b) * T, U)
    elif tag == "e":
        (e,) = params
        basis = (X3, T, U) if _is_inf(e) else (X2 + e * T, X3, U)
    else:
        raise ValueError(f"unknown family tag {tag!r}")
    return SubalgebraSpec(basis, (tag,) + params)
