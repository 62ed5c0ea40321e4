"""Exact arithmetic in the central extension of Heis(3) x R and its Lie algebra.

Group elements are stored in canonical coordinates (a1, a2, a3, r, v).  The
first four coordinates describe the Kodaira-Thurston group G, the last one is
the central circle direction.  Every routine here is generic in the scalar
type: Fractions give bit-exact results, floats are accepted for the numeric
modules downstream and sympy expressions for symbolic differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "LieVector", "GroupElement", "IDENTITY", "BASIS", "X1", "X2", "X3", "T", "U",
    "multiply", "inverse", "cocycle_psi", "bracket", "to_matrix", "from_matrix",
    "exp_algebra", "log_group", "algebra_matrix", "log_matrix", "exp_matrix", "mat_mul", "lattice_reduce",
    "in_lattice", "ad_matrix", "to_json", "from_json", "parse_rational",
]


def _div(x, n: int):
    """x / n without leaving exact arithmetic when x is a Python int."""
    if isinstance(x, int):
        return Fraction(x, n)
    return x / n


def parse_rational(text) -> Fraction:
    """Parse "p/q", an integer or a decimal literal into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


@dataclass(frozen=True)
class LieVector:
    """Coefficients with respect to the ordered basis X1, X2, X3, T, U."""

    x1: object = 0
    x2: object = 0
    x3: object = 0
    t: object = 0
    u: object = 0

    def __iter__(self):
        return iter((self.x1, self.x2, self.x3, self.t, self.u))

    def __add__(self, other: LieVector) -> LieVector:
        return LieVector(*(p + q for p, q in zip(self, other)))

    def __sub__(self, other: LieVector) -> LieVector:
        return LieVector(*(p - q for p, q in zip(self, other)))

    def __neg__(self) -> LieVector:
        return LieVector(*(-p for p in self))

    def __mul__(self, scalar) -> LieVector:
        return LieVector(*(scalar * p for p in self))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(p == 0 for p in self)

    def base_part(self) -> LieVector:
        """Drop the U component (projection of the extension onto g)."""
        return LieVector(self.x1, self.x2, self.x3, self.t, 0)


X1 = LieVector(1, 0, 0, 0, 0)
X2 = LieVector(0, 1, 0, 0, 0)
X3 = LieVector(0, 0, 1, 0, 0)
T = LieVector(0, 0, 0, 1, 0)
U = LieVector(0, 0, 0, 0, 1)
BASIS = (X1, X2, X3, T, U)


def bracket(v: LieVector, w: LieVector) -> LieVector:
    """Bilinear extension of [X1,X2] = X3, [X1,X3] = -U, [X2,T] = -U."""
    c12 = v.x1 * w.x2 - v.x2 * w.x1
    c13 = v.x1 * w.x3 - v.x3 * w.x1
    c2t = v.x2 * w.t - v.t * w.x2
    return LieVector(0, 0, c12, 0, -c13 - c2t)


def ad_matrix(v: LieVector) -> list[list]:
    """Matrix of ad(v) acting on coefficient columns."""
    cols = [list(bracket(v, e)) for e in BASIS]
    return [[cols[j][i] for j in range(5)] for i in range(5)]


@dataclass(frozen=True)
class GroupElement:
    a1: object = 0
    a2: object = 0
    a3: object = 0
    r: object = 0
    v: object = 0

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3, self.r, self.v))

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    @classmethod
    def of(cls, *coords) -> GroupElement:
        return cls(*(parse_rational(c) for c in coords))

    def base(self) -> tuple:
        """The G part (a1, a2, a3, r)."""
        return (self.a1, self.a2, self.a3, self.r)

    def with_v(self, v) -> GroupElement:
        return GroupElement(self.a1, self.a2, self.a3, self.r, v)


IDENTITY = GroupElement(Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(0))


def cocycle_psi(g1, g2):
    """The scalar cocycle a3*b1 - a2*b1^2/2 + r*b2 of the central extension.

    Accepts GroupElements or (a1, a2, a3, r) tuples; any v entry is ignored.
    """
    a1, a2, a3, r = tuple(g1)[:4]
    b1, b2, b3, s = tuple(g2)[:4]
    return a3 * b1 - _div(a2 * b1 * b1, 2) + r * b2


def multiply(g1: GroupElement, g2: GroupElement) -> GroupElement:
    return GroupElement(
        g1.a1 + g2.a1,
        g1.a2 + g2.a2,
        g1.a3 + g2.a3 - g1.a2 * g2.a1,
        g1.r + g2.r,
        g1.v + g2.v + cocycle_psi(g1, g2),
    )


def inverse(g: GroupElement) -> GroupElement:
    a1, a2, a3, r, v = g
    return GroupElement(
        -a1,
        -a2,
        -a3 - a1 * a2,
        -r,
        -v + a1 * a3 + _div(a1 * a1 * a2, 2) + r * a2,
    )


# ---------------------------------------------------------------- matrices

def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(m)), 0 * A[i][0]) for j in range(p)]
            for i in range(n)]


def _eye(n: int, one=Fraction(1)) -> list[list]:
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def to_matrix(g: GroupElement) -> list[list]:
    """Unipotent 5x5 image of g, equal to exp(a1 X1) exp(a2 X2) exp(a3 X3) exp(rT) exp(vU)."""
    a1, a2, a3, r, v = g
    z = 0 * a1
    one = z + 1
    return [
        [one, a1, a2, a1 * a2 + 2 * a3, -a1 * a3 + _div(a2 * a2, 2) - 3 * a2 * r + 3 * v],
        [z, one, z, a2, -a3],
        [z, z, one, -a1, -_div(a1 * a1, 2) + a2 - 3 * r],
        [z, z, z, one, a1],
        [z, z, z, z, one],
    ]


def from_matrix(M: Sequence[Sequence]) -> GroupElement:
    """Invert to_matrix; raises ValueError unless M has exactly that shape."""
    if len(M) != 5 or any(len(row) != 5 for row in M):
        raise ValueError("expected a 5x5 matrix")
    a1, a2 = M[0][1], M[0][2]
    a3 = -M[1][4]
    r = _div(a2 - _div(a1 * a1, 2) - M[2][4], 3)
    v = _div(M[0][4] + a1 * a3 - _div(a2 * a2, 2) + 3 * a2 * r, 3)
    g = GroupElement(a1, a2, a3, r, v)
    rebuilt = to_matrix(g)
    if any(rebuilt[i][j] != M[i][j] for i in range(5) for j in range(5)):
        raise ValueError("matrix is not in the image of the canonical embedding")
    return g


# Algebra generators in the same representation (columns act on R^5).
def _unit(i: int, j: int, c) -> list[list]:
    m = [[0] * 5 for _ in range(5)]
    m[i][j] = c
    return m


def _mat_add(*mats) -> list[list]:
    return [[sum(m[i][j] for m in mats) for j in range(5)] for i in range(5)]


GENERATOR_MATRICES = (
    _mat_add(_unit(0, 1, 1), _unit(2, 3, -1), _unit(3, 4, 1)),   # X1
    _mat_add(_unit(0, 2, 1), _unit(1, 3, 1), _unit(2, 4, 1)),    # X2
    _mat_add(_unit(0, 3, 2), _unit(1, 4, -1)),                   # X3
    _unit(2, 4, -3),                                             # T
    _unit(0, 4, 3),                                              # U
)


def algebra_matrix(X: LieVector) -> list[list]:
    return [[sum(c * G[i][j] for c, G in zip(X, GENERATOR_MATRICES)) for j in range(5)]
            for i in range(5)]


def exp_matrix(N: Sequence[Sequence]) -> list[list]:
    """exp of a strictly upper-triangular 5x5 matrix (series stops at N^4)."""
    one = N[0][0] * 0 + 1
    result = _eye(5, one)
    power = _eye(5, one)
    for k in range(1, 5):
        power = mat_mul(power, N)
        result = [[result[i][j] + _div(power[i][j], math.factorial(k)) for j in range(5)]
                  for i in range(5)]
    return result


def log_matrix(M: Sequence[Sequence]) -> list[list]:
    """log of a unipotent 5x5 matrix via the terminating series in M - I."""
    N = [[M[i][j] - (1 if i == j else 0) for j in range(5)] for i in range(5)]
    if any(N[i][j] != 0 for i in range(5) for j in range(i + 1)):
        raise ValueError("matrix is not unipotent upper-triangular")
    result = [[0 * N[0][0]] * 5 for _ in range(5)]
    power = _eye(5, N[0][0] * 0 + 1)
    for k in range(1, 5):
        power = mat_mul(power, N)
        sign = 1 if k % 2 else -1
        result = [[result[i][j] + _div(sign * power[i][j], k) for j in range(5)] for i in range(5)]
    return result


def exp_algebra(X: LieVector) -> GroupElement:
    """Canonical coordinates of exp(X)."""
    return from_matrix(exp_matrix(algebra_matrix(X)))


def log_group(g: GroupElement) -> LieVector:
    """Inverse of exp_algebra, read off the matrix logarithm."""
    L = log_matrix(to_matrix(g))
    x2 = L[0][2]
    X = LieVector(L[0][1], x2, _div(L[0][3], 2), _div(x2 - L[2][4], 3), _div(L[0][4], 3))
    rebuilt = algebra_matrix(X)
    if any(rebuilt[i][j] != L[i][j] for i in range(5) for j in range(5)):
        raise ValueError("logarithm left the Lie algebra image")
    return X


# ---------------------------------------------------------------- lattice

def _is_integer(x) -> bool:
    return x == math.floor(x)


def in_lattice(g: GroupElement) -> bool:
    """Membership in the integer lattice with half-integral central coordinate."""
    a1, a2, a3, r, v = g
    return all(_is_integer(c) for c in (a1, a2, a3, r)) and _is_integer(2 * v)


def lattice_reduce(g: GroupElement) -> tuple[GroupElement, GroupElement]:
    """Return (gamma, g0) with g0 = gamma * g in [0,1)^4 x [0,1/2) and gamma in the lattice."""
    a1, a2, a3, r, v = g
    c1 = -math.floor(a1)
    c2 = -math.floor(a2)
    c3 = -math.floor(a3 - c2 * a1)
    c4 = -math.floor(r)
    shifted_v = v + cocycle_psi((c1, c2, c3, c4), g)
    cv = Fraction(-math.floor(2 * shifted_v), 2)
    if isinstance(shifted_v, float):
        cv = float(cv)
    gamma = GroupElement(c1, c2, c3, c4, cv)
    return gamma, multiply(gamma, g)


# ---------------------------------------------------------------- serialization

def _rat_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_json(obj) -> list:
    """GroupElement or LieVector to a list of "p/q" strings; matrices row-major."""
    if isinstance(obj, (GroupElement, LieVector)):
        return [_rat_str(c) for c in obj]
    return [[_rat_str(c) for c in row] for row in obj]


def from_json(data: Iterable, kind=GroupElement):
    return kind(*(parse_rational(c) for c in data))

