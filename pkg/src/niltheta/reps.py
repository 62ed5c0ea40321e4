"""Induced representations of the four-dimensional orbits from the ideal h^{e=0}.

H0 = {(0, y, z, 0, v)} and the coset space H0 \\ G~ is identified with R^2 through
the section (x, t) -> (x, 0, 0, t, 0).  A character of H0 trivial on the lattice
is labelled by an IntegralPoint (k, m, n).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
import sympy

from .coadjoint import Covector, coadjoint_action
from .lie import GroupElement, LieVector, _div, exp_algebra, inverse, multiply

__all__ = [
    "IntegralPoint", "HElement", "CosetCoords", "section", "embed",
    "master_solution", "character", "induced_rep_apply", "induced_function",
    "gamma_action", "lattice_action", "orbit_representative",
    "enumerate_integral_points", "multiplicity", "DiffOperator", "derived_rep",
    "laplacian_symbol",
]

Function2D = Callable[[object, object], object]


@dataclass(frozen=True)
class IntegralPoint:
    k: int
    m: int = 0
    n: int = 0

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("k must be nonzero")

    def covector(self) -> Covector:
        """Restriction to h^{e=0} of a covector realising the character."""
        return Covector(0, -self.m, self.n, 0, -2 * self.k)


@dataclass(frozen=True)
class HElement:
    h2: object = 0
    h3: object = 0
    h5: object = 0


@dataclass(frozen=True)
class CosetCoords:
    x: object = 0
    t: object = 0


def section(p: CosetCoords) -> GroupElement:
    z = 0 * p.x
    return GroupElement(p.x, z, z, p.t, z)


def embed(h: HElement) -> GroupElement:
    z = 0 * h.h2
    return GroupElement(z, h.h2, h.h3, z, h.h5)


def master_solution(p: CosetCoords, g: GroupElement) -> tuple[HElement, CosetCoords]:
    """Solve s(p) g = h s(p') for h in H0 and the new coset p'."""
    a, b, c, r, v = g
    xa = p.x + a
    h = HElement(b, c + b * xa, v + b * p.t - c * xa - _div(b * xa * xa, 2))
    return h, CosetCoords(xa, p.t + r)


def character(pt: IntegralPoint, h: HElement) -> complex:
    phase = -4 * math.pi * pt.k * h.h5 - 2 * math.pi * (pt.m * h.h2 - pt.n * h.h3)
    return np.exp(1j * np.asarray(phase, dtype=float)) if np.ndim(phase) else cmath.exp(1j * float(phase))


def induced_rep_apply(pt: IntegralPoint, g: GroupElement, f: Function2D, p: CosetCoords):
    """(pi(g) f)(p) = chi(h(p, g)) f(p . g); p may hold numpy arrays."""
    h, q = master_solution(p, g)
    return character(pt, h) * f(q.x, q.t)


class induced_function:
    """The function pi(g) f, carrying f's tail bound along the coset shift."""

    def __init__(self, pt: IntegralPoint, g: GroupElement, f: Function2D):
        self.pt, self.g, self.f = pt, g, f

    def __call__(self, x, t):
        return induced_rep_apply(self.pt, self.g, self.f, CosetCoords(x, t))

    def envelope(self):
        inner = getattr(self.f, "envelope", None)
        if inner is None:
            return None
        cx, ct, width, const = inner()
        return cx - float(self.g.a1), ct - float(self.g.r), width, const


# ---------------------------------------------------------------- integral points

def gamma_action(k: int, gamma0: tuple[int, int], mn: tuple[int, int]) -> tuple[int, int]:
    """Action of the lattice element (x0, 0, 0, t0, 0) on the label (m, n)."""
    x0, t0 = gamma0
    m, n = mn
    return m - n * x0 + 2 * k * t0 - k * x0 * x0, n + 2 * k * x0


def lattice_action(k: int, gamma: GroupElement, mn: tuple[int, int]) -> tuple[int, int]:
    """Same action for an arbitrary lattice element, through the coadjoint action of gamma^-1."""
    m, n = mn
    lam = coadjoint_action(inverse(gamma), IntegralPoint(k, m, n).covector())
    return int(-lam.alpha2), int(lam.alpha3)


def orbit_representative(k: int, mn: tuple[int, int]) -> tuple[int, int]:
    """The unique point of {0..2|k|-1}^2 in the lattice orbit of (m, n)."""
    m, n = mn
    period = 2 * abs(k)
    x0 = -((n - n % period) // (2 * k))
    m1, n1 = gamma_action(k, (x0, 0), (m, n))
    t0 = -((m1 - m1 % period) // (2 * k))
    return gamma_action(k, (0, t0), (m1, n1))


def enumerate_integral_points(k: int) -> list[IntegralPoint]:
    if k == 0:
        raise ValueError("k must be nonzero")
    period = 2 * abs(k)
    return [IntegralPoint(k, m, n) for m in range(period) for n in range(period)]


def multiplicity(k: int) -> int:
    return len(enumerate_integral_points(k))


# ---------------------------------------------------------------- derived representation

_x, _t, _s = sympy.symbols("x t s", real=True)


@dataclass(frozen=True)
class DiffOperator:
    """c0(x, t) + c1(x, t) d/dx + c2(x, t) d/dt, coefficients as sympy expressions."""

    c0: sympy.Expr
    c1: sympy.Expr
    c2: sympy.Expr

    def apply(self, F: sympy.Expr) -> sympy.Expr:
        return self.c0 * F + self.c1 * sympy.diff(F, _x) + self.c2 * sympy.diff(F, _t)

    def evaluate(self, f: Function2D, fx: Function2D, ft: Function2D, x: float, t: float) -> complex:
        subs = {_x: x, _t: t}
        c0, c1, c2 = (complex(c.subs(subs)) for c in (self.c0, self.c1, self.c2))
        return c0 * f(x, t) + c1 * fx(x, t) + c2 * ft(x, t)

    @staticmethod
    def symbols():
        return _x, _t


def derived_rep(X: LieVector, pt: IntegralPoint) -> DiffOperator:
    """Differentiate s -> pi(exp(sX)) at s = 0 symbolically."""
    sX = LieVector(*(_s * sympy.nsimplify(c) for c in X))
    g = exp_algebra(sX)
    h, q = master_solution(CosetCoords(_x, _t), g)
    log_phase = sympy.I * (-4 * sympy.pi * pt.k * h.h5
                           - 2 * sympy.pi * (pt.m * h.h2 - pt.n * h.h3))
    at0 = {_s: 0}
    return DiffOperator(
        sympy.expand(sympy.diff(log_phase, _s).subs(at0)),
        sympy.expand(sympy.diff(q.x, _s).subs(at0)),
        sympy.expand(sympy.diff(q.t, _s).subs(at0)),
    )


def laplacian_symbol(pt: IntegralPoint) -> sympy.Expr:
    """-(X1^2 + X2^2 + X3^2 + T^2) under the derived representation, applied to a generic F."""
    from .lie import X1, X2, X3, T
    F = sympy.Function("F")(_x, _t)
    total = 0
    for X in (X1, X2, X3, T):
        D = derived_rep(X, pt)
        total += D.apply(D.apply(F))
    return sympy.expand(-total)
