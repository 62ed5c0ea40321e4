"""Normal-ordered polynomials in a1, a2, b1, b2 with [a_i, b_j] = delta_ij.

A monomial a1^al1 a2^al2 b1^be1 b2^be2 is keyed by (al1, al2, be1, be2), with all
a's to the left.  Coefficients live in Q(sqrt 2), which is enough for the cubic
term (x^2 t)/(2 sqrt 2) and keeps every Birkhoff coefficient exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, sqrt
from typing import Iterable, Mapping

__all__ = [
    "QSqrt2", "LadderPolynomial", "a1", "a2", "b1", "b2", "one",
    "normal_product", "commutator", "ad_h2", "ad_h2_inverse", "project_kernel",
    "hamiltonian_grading", "GradedSeries", "bnf", "exp_ad_apply",
    "vacuum_expectation", "restrict_to_level",
]


@dataclass(frozen=True)
class QSqrt2:
    """p + q sqrt(2) with rational p, q."""

    p: Fraction = Fraction(0)
    q: Fraction = Fraction(0)

    @staticmethod
    def lift(x) -> QSqrt2:
        if isinstance(x, QSqrt2):
            return x
        return QSqrt2(Fraction(x), Fraction(0))

    def __add__(self, other) -> QSqrt2:
        o = QSqrt2.lift(other)
        return QSqrt2(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self) -> QSqrt2:
        return QSqrt2(-self.p, -self.q)

    def __sub__(self, other) -> QSqrt2:
        return self + (-QSqrt2.lift(other))

    def __rsub__(self, other) -> QSqrt2:
        return QSqrt2.lift(other) - self

    def __mul__(self, other) -> QSqrt2:
        o = QSqrt2.lift(other)
        return QSqrt2(self.p * o.p + 2 * self.q * o.q, self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> QSqrt2:
        o = QSqrt2.lift(other)
        norm = o.p * o.p - 2 * o.q * o.q
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        return self * QSqrt2(o.p / norm, -o.q / norm)

    def __eq__(self, other) -> bool:
        try:
            o = QSqrt2.lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.p == o.p and self.q == o.q

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __bool__(self) -> bool:
        return bool(self.p) or bool(self.q)

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * sqrt(2)

    def is_rational(self) -> bool:
        return self.q == 0

    def __str__(self) -> str:
        def r(x):
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        if self.q == 0:
            return r(self.p)
        if self.p == 0:
            return f"{r(self.q)}*sqrt2"
        return f"{r(self.p)} + {r(self.q)}*sqrt2"


SQRT2 = QSqrt2(Fraction(0), Fraction(1))
Key = tuple[int, int, int, int]


class LadderPolynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, object] | None = None):
        clean: dict[Key, QSqrt2] = {}
        for key, c in (terms or {}).items():
            c = QSqrt2.lift(c)
            if c:
                clean[tuple(key)] = clean.get(tuple(key), QSqrt2()) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def constant(cls, c) -> LadderPolynomial:
        return cls({(0, 0, 0, 0): c})

    def __add__(self, other: LadderPolynomial) -> LadderPolynomial:
        if not isinstance(other, LadderPolynomial):
            other = LadderPolynomial.constant(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, QSqrt2()) + c
        return LadderPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> LadderPolynomial:
        return LadderPolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> LadderPolynomial:
        if not isinstance(other, LadderPolynomial):
            other = LadderPolynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> LadderPolynomial:
        return (-self) + other

    def __mul__(self, other) -> LadderPolynomial:
        if isinstance(other, LadderPolynomial):
            return normal_product(self, other)
        c = QSqrt2.lift(other)
        return LadderPolynomial({k: c * v for k, v in self.terms.items()})

    def __rmul__(self, other) -> LadderPolynomial:
        c = QSqrt2.lift(other)
        return LadderPolynomial({k: c * v for k, v in self.terms.items()})

    def __truediv__(self, other) -> LadderPolynomial:
        c = QSqrt2.lift(other)
        return LadderPolynomial({k: v / c for k, v in self.terms.items()})

    def __pow__(self, n: int) -> LadderPolynomial:
        out = one()
        for _ in range(n):
            out = normal_product(out, self)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, LadderPolynomial):
            other = LadderPolynomial.constant(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, key: Key) -> QSqrt2:
        return self.terms.get(tuple(key), QSqrt2())

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    def sorted_terms(self) -> list[tuple[Key, QSqrt2]]:
        """Graded lexicographic order on (al1, al2, be1, be2)."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __repr__(self) -> str:
        return f"LadderPolynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ("a1", "a2", "b1", "b2")
        parts = []
        for key, c in self.sorted_terms():
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, key) if e)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [{"a": list(k[:2]), "b": list(k[2:]), "coeff": str(c)} for k, c in self.sorted_terms()]


def _var(i: int) -> LadderPolynomial:
    key = [0, 0, 0, 0]
    key[i] = 1
    return LadderPolynomial({tuple(key): 1})


def one() -> LadderPolynomial:
    return LadderPolynomial.constant(1)


a1, a2, b1, b2 = (_var(i) for i in range(4))


def _reorder(beta: int, gamma: int) -> list[tuple[int, int, int]]:
    """b^beta a^gamma = sum_j coeff * a^(gamma-j) b^(beta-j), returned as (coeff, gamma-j, beta-j)."""
    return [((-1) ** j * factorial(j) * comb(beta, j) * comb(gamma, j), gamma - j, beta - j)
            for j in range(min(beta, gamma) + 1)]


def normal_product(p: LadderPolynomial, q: LadderPolynomial) -> LadderPolynomial:
    out: dict[Key, QSqrt2] = {}
    for (pa1, pa2, pb1, pb2), cp in p.terms.items():
        for (qa1, qa2, qb1, qb2), cq in q.terms.items():
            c = cp * cq
            for c1, x1, y1 in _reorder(pb1, qa1):
                for c2, x2, y2 in _reorder(pb2, qa2):
                    key = (pa1 + x1, pa2 + x2, y1 + qb1, y2 + qb2)
                    out[key] = out.get(key, QSqrt2()) + c * (c1 * c2)
    return LadderPolynomial(out)


def commutator(p: LadderPolynomial, q: LadderPolynomial) -> LadderPolynomial:
    return normal_product(p, q) - normal_product(q, p)


def _weight(key: Key) -> int:
    return key[2] + key[3] - key[0] - key[1]


def ad_h2(p: LadderPolynomial) -> LadderPolynomial:
    """[H2, p], diagonal on monomials with eigenvalue |beta| - |alpha|."""
    return LadderPolynomial({k: _weight(k) * c for k, c in p.terms.items()})


def ad_h2_inverse(p: LadderPolynomial) -> LadderPolynomial:
    if any(_weight(k) == 0 for k in p.terms):
        raise ValueError("input has a component in ker ad(H2)")
    return LadderPolynomial({k: c / _weight(k) for k, c in p.terms.items()})


def project_kernel(p: LadderPolynomial) -> LadderPolynomial:
    return LadderPolynomial({k: c for k, c in p.terms.items() if _weight(k) == 0})


def hamiltonian_grading() -> tuple[LadderPolynomial, LadderPolynomial, LadderPolynomial]:
    """H2 = sum(a_i b_i - 1/2), H3 = (a1+b1)^2 (a2+b2) / (2 sqrt 2), H4 = (a1+b1)^4 / 16."""
    half = Fraction(1, 2)
    H2 = a1 * b1 + a2 * b2 - 2 * half
    x1 = a1 + b1
    H3 = (x1 ** 2 * (a2 + b2)) * (SQRT2 / 4)
    H4 = x1 ** 4 * Fraction(1, 16)
    return H2, H3, H4


class GradedSeries:
    """Sum over j of eps^(j-2) P_j; stored as {eps power: polynomial}."""

    def __init__(self, terms: Mapping[int, LadderPolynomial] | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}
        for power, poly in self.terms.items():
            grade = power + 2
            if any(sum(key) > grade or (sum(key) - grade) % 2 for key in poly.terms):
                raise ValueError(f"polynomial at eps^{power} is not of grade {grade}")

    def __getitem__(self, power: int) -> LadderPolynomial:
        return self.terms.get(power, LadderPolynomial())

    def __add__(self, other: GradedSeries) -> GradedSeries:
        keys = set(self.terms) | set(other.terms)
        return GradedSeries({k: self[k] + other[k] for k in keys})

    def scale(self, c) -> GradedSeries:
        return GradedSeries({k: v * c for k, v in self.terms.items()})

    def bracket(self, other: GradedSeries, order: int) -> GradedSeries:
        out: dict[int, LadderPolynomial] = {}
        for i, p in self.terms.items():
            for j, q in other.terms.items():
                if i + j <= order:
                    out[i + j] = out.get(i + j, LadderPolynomial()) + commutator(p, q)
        return GradedSeries(out)

    def truncate(self, order: int) -> GradedSeries:
        return GradedSeries({k: v for k, v in self.terms.items() if k <= order})

    def __eq__(self, other) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(self[k] == other[k] for k in keys)


def exp_ad_apply(A: GradedSeries, H: GradedSeries, order: int) -> GradedSeries:
    """exp(ad A) H = H + [A, H] + [A, [A, H]]/2 + ..., truncated at eps^order."""
    if any(k < 1 for k in A.terms):
        raise ValueError("generator must start at order eps^1")
    result = H.truncate(order)
    term = H.truncate(order)
    for n in range(1, order + 1):
        term = A.bracket(term, order).scale(Fraction(1, n))
        result = result + term
    return result


def bnf(max_order: int = 4, h3_weight=1, h4_weight=1) -> list[tuple[LadderPolynomial, LadderPolynomial]]:
    """Birkhoff normal form of H2 + eps w3 H3 + eps^2 w4 H4.

    Returns [(K2, A2), (K3, A3), (K4, A4)] up to grade max_order.  The default
    weights give the operator exactly as graded above.
    """
    if max_order not in (2, 3, 4):
        raise ValueError("max_order must be 2, 3 or 4")
    H2, H3, H4 = hamiltonian_grading()
    H3, H4 = H3 * h3_weight, H4 * h4_weight
    out = [(H2, LadderPolynomial())]
    if max_order >= 3:
        K3 = project_kernel(H3)
        A3 = ad_h2_inverse(H3 - K3)
        out.append((K3, A3))
    if max_order >= 4:
        R4 = H4 + commutator(A3, H3) + commutator(A3, commutator(A3, H2)) * Fraction(1, 2)
        K4 = project_kernel(R4)
        A4 = ad_h2_inverse(R4 - K4)
        out.append((K4, A4))
    return out


def series_from(polys: Iterable[LadderPolynomial]) -> GradedSeries:
    return GradedSeries({i: p for i, p in enumerate(polys)})


def vacuum_expectation(p: LadderPolynomial) -> QSqrt2:
    """<0| p |0> with a|0> = 0: only a^al b^al survives, with value al1! al2!."""
    total = QSqrt2()
    for (x1, x2, y1, y2), c in p.terms.items():
        if (x1, x2) == (y1, y2):
            total = total + c * (factorial(x1) * factorial(x2))
    return total


def restrict_to_level(p: LadderPolynomial, level: int):
    """Matrix of p on span{|n1, n2> : n1 + n2 = level}, basis ordered by n1.

    Only meaningful for p in ker ad(H2), which preserves the level.
    """
    import numpy as np

    states = [(n1, level - n1) for n1 in range(level + 1)]
    index = {s: i for i, s in enumerate(states)}
    M = np.zeros((len(states), len(states)))
    for (x1, x2, y1, y2), c in p.terms.items():
        for col, (n1, n2) in enumerate(states):
            # b raises, a lowers; b^y first, then a^x
            m1, m2 = n1 + y1, n2 + y2
            amp = sqrt(factorial(m1) / factorial(n1)) * sqrt(factorial(m2) / factorial(n2))
            if m1 < x1 or m2 < x2:
                continue
            amp *= sqrt(factorial(m1) / factorial(m1 - x1)) * sqrt(factorial(m2) / factorial(m2 - x2))
            row = index.get((m1 - x1, m2 - x2))
            if row is not None:
                M[row, col] += float(c) * amp
    return states, M
