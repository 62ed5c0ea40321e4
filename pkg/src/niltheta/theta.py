"""Periodizing maps onto the prequantum bundle and their trivialized theta functions.

For an integral point (k, m, n) and f on R^2 the section is

    Theta f (x, y, z, t, u) = e^{-2 pi i (m y - n (z + x y))} e^{-4 pi i k (u - z x)}
        * sum_{a, b} e^{2 pi i n y a} e^{-4 pi i k (b y - z a - (y/2)(x + a)^2)} f(x + a, t + b)

which is the lattice sum of pi(gamma g) f at the origin.  theta_R4 is the same
thing at u = 0.  Lattice sums are truncated to |a|, |b| <= W, and W is certified
against a tail bound before any value is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .lie import GroupElement, cocycle_psi, inverse, multiply
from .reps import IntegralPoint, induced_function

__all__ = [
    "GaussianSpec", "TruncationWindow", "TruncationError", "SectionField",
    "QuadratureGrid", "theta_map", "theta_R4", "theta_grid", "certify_window",
    "check_pseudoperiodicity", "check_intertwining", "sample_section",
    "inner_product_P", "l2_norm_squared", "weil_brezin_torus", "jacobi_theta",
    "classical_delta1_apply", "PSEUDOPERIODIC_GENERATORS",
]

TWO_PI = 2 * math.pi


class TruncationError(RuntimeError):
    """The requested window cannot certify the requested tolerance."""


@dataclass(frozen=True)
class TruncationWindow:
    W: int
    tol: float = 1e-12

    def __post_init__(self):
        if self.W < 1 or self.tol <= 0:
            raise ValueError("window needs W >= 1 and tol > 0")


@dataclass(frozen=True)
class GaussianSpec:
    """const * exp(-pi ((x - x0)^2 + (t - t0)^2) / sigma^2)."""

    x0: float = 0.0
    t0: float = 0.0
    sigma: float = 1.0
    const: complex = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def __call__(self, x, t):
        r2 = (np.asarray(x) - self.x0) ** 2 + (np.asarray(t) - self.t0) ** 2
        return self.const * np.exp(-math.pi * r2 / self.sigma ** 2)

    def envelope(self) -> tuple[float, float, float, float]:
        return self.x0, self.t0, self.sigma, abs(self.const)

    def norm_squared(self) -> float:
        """Exact L^2(R^2) norm squared."""
        return abs(self.const) ** 2 * self.sigma ** 2 / 2


# ---------------------------------------------------------------- truncation

def _one_sided_tail(d: float, sigma: float) -> float:
    """Upper bound for sum_{j >= 0} exp(-pi (d + j)^2 / sigma^2), d > 0."""
    q = math.exp(-2 * math.pi * d / sigma ** 2)
    return math.exp(-math.pi * d * d / sigma ** 2) / (1 - q)


def gaussian_tail_bound(envelope, x, t, W: int) -> float:
    """Bound on the discarded part of sum_{a,b} |f(x + a, t + b)| outside [-W, W]^2."""
    x0, t0, sigma, C = envelope
    dx = W + 1 - abs(float(x) - x0)
    dt = W + 1 - abs(float(t) - t0)
    if dx <= 0 or dt <= 0:
        return math.inf
    full = 1 + sigma       # sup over shifts of the full 1D sum
    tail_x = 2 * _one_sided_tail(dx, sigma)
    tail_t = 2 * _one_sided_tail(dt, sigma)
    return C * (tail_x + tail_t) * full


def _empirical_tail(f, xs, ts, W: int, rings: int = 3) -> float:
    """Sum of |f| over the next few lattice rings, doubled.  Used when f has no envelope."""
    worst = 0.0
    for x, t in zip(np.ravel(xs), np.ravel(ts)):
        total = 0.0
        for R in range(W + 1, W + 1 + rings):
            a = np.arange(-R, R + 1)
            ring_x = np.concatenate([a, a, np.full(2 * R - 1, -R), np.full(2 * R - 1, R)])
            ring_t = np.concatenate([np.full(2 * R + 1, -R), np.full(2 * R + 1, R),
                                     a[1:-1], a[1:-1]])
            total += float(np.sum(np.abs(f(x + ring_x, t + ring_t))))
        worst = max(worst, 2 * total)
    return worst


def tail_bound(f, xs, ts, W: int) -> float:
    env = getattr(f, "envelope", None)
    env = env() if env is not None else None
    if env is None:
        return _empirical_tail(f, xs, ts, W)
    xs, ts = np.ravel(xs), np.ravel(ts)
    # extreme points dominate; checking the box corners covers every point in between
    pts = [(x, t) for x in (xs.min(), xs.max()) for t in (ts.min(), ts.max())]
    return max(gaussian_tail_bound(env, x, t, W) for x, t in pts)


def certify_window(f, xs, ts, tol: float = 1e-12, W_max: int = 64) -> TruncationWindow:
    """Smallest window from the Gaussian heuristic upward whose tail bound is below tol."""
    env = getattr(f, "envelope", None)
    env = env() if env is not None else None
    xs, ts = np.ravel(np.asarray(xs, dtype=float)), np.ravel(np.asarray(ts, dtype=float))
    if env is not None:
        x0, t0, sigma, C = env
        reach = max(np.max(np.abs(xs - x0)), np.max(np.abs(ts - t0)))
        W = int(math.ceil(reach + sigma * math.sqrt(max(math.log(max(C, 1e-300) / tol), 0) / math.pi))) + 1
    else:
        W = int(math.ceil(max(np.max(np.abs(xs)), np.max(np.abs(ts))))) + 1
    W = max(W, 1)
    while tail_bound(f, xs, ts, W) > tol:
        W += 1
        if W > W_max:
            raise TruncationError(f"no window up to {W_max} certifies tol={tol}")
    return TruncationWindow(W, tol)


def _resolve_window(f, xs, ts, window: TruncationWindow | None, tol: float) -> TruncationWindow:
    if window is None:
        return certify_window(f, xs, ts, tol)
    bound = tail_bound(f, xs, ts, window.W)
    if bound > window.tol:
        raise TruncationError(f"window W={window.W} leaves a tail bound {bound:.3e} > tol {window.tol:.1e}")
    return window


# ---------------------------------------------------------------- lattice sums

def _theta_points(k, m, n, f, x, y, z, t, u, W: int) -> np.ndarray:
    """Pointwise evaluation; all coordinates are broadcast 1D arrays."""
    x, y, z, t, u = (np.asarray(c, dtype=float).reshape(-1) for c in np.broadcast_arrays(x, y, z, t, u))
    a = np.arange(-W, W + 1, dtype=float)
    X = x[:, None, None] + a[None, :, None]
    Tt = t[:, None, None] + a[None, None, :]
    F = np.asarray(f(X, Tt), dtype=complex)
    yy, zz = y[:, None, None], z[:, None, None]
    phase = (TWO_PI * n * yy * a[None, :, None]
             - 2 * TWO_PI * k * (a[None, None, :] * yy - zz * a[None, :, None] - yy / 2 * X ** 2))
    total = np.sum(np.exp(1j * phase) * F, axis=(1, 2))
    pre = -TWO_PI * (m * y - n * (z + x * y)) - 2 * TWO_PI * k * (u - z * x)
    return np.exp(1j * pre) * total


def theta_map(k: int, m: int, n: int, f, g: GroupElement,
              window: TruncationWindow | None = None, tol: float = 1e-12) -> complex:
    """Value of the section Theta_k^{m,n} f at g in G~."""
    if k == 0:
        raise ValueError("k must be nonzero")
    coords = [float(c) for c in g]
    w = _resolve_window(f, coords[0], coords[3], window, tol)
    return complex(_theta_points(k, m, n, f, *coords, w.W)[0])


def theta_R4(k: int, m: int, n: int, f, point: Sequence[float],
             window: TruncationWindow | None = None, tol: float = 1e-12):
    """Trivialized theta function (u = 0).  point may be a tuple of equal-shape arrays."""
    if k == 0:
        raise ValueError("k must be nonzero")
    x, y, z, t = (np.asarray(c, dtype=float) for c in point)
    shape = np.broadcast(x, y, z, t).shape
    w = _resolve_window(f, x, t, window, tol)
    vals = _theta_points(k, m, n, f, x, y, z, t, 0.0, w.W)
    return complex(vals[0]) if shape == () else vals.reshape(shape)


def _grid_eval(f, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """f on the outer grid xs x ts (uses f.grid when the callback offers it)."""
    grid = getattr(f, "grid", None)
    if grid is not None:
        return np.asarray(grid(xs, ts), dtype=complex)
    return np.asarray(f(xs[:, None], ts[None, :]), dtype=complex)


def theta_grid(k: int, m: int, n: int, f, xs, ys, zs, ts,
               window: TruncationWindow | None = None, tol: float = 1e-12) -> np.ndarray:
    """theta_R4 on the tensor grid xs x ys x zs x ts, shape (nx, ny, nz, nt).

    The x and t dependence of the lattice sum separates from y and z, so f is
    only sampled on (xs + a) x (ts + b).
    """
    xs, ys, zs, ts = (np.asarray(c, dtype=float).reshape(-1) for c in (xs, ys, zs, ts))
    w = _resolve_window(f, xs, ts, window, tol)
    a = np.arange(-w.W, w.W + 1, dtype=float)
    XA = (xs[:, None] + a[None, :]).reshape(-1)
    TB = (ts[:, None] + a[None, :]).reshape(-1)
    F = _grid_eval(f, XA, TB).reshape(len(xs), len(a), len(ts), len(a))
    # sum over b: e^{-4 pi i k b y}
    Eb = np.exp(-2j * TWO_PI * k * np.outer(ys, a))                        # (y, b)
    G = np.einsum("xatb,yb->xaty", F, Eb)
    # y- and x-dependent phase in a: e^{2 pi i n y a} e^{2 pi i k y (x + a)^2}
    xa2 = (xs[:, None] + a[None, :]) ** 2                                  # (x, a)
    P1 = np.exp(1j * TWO_PI * (n * ys[:, None, None] * a[None, None, :]
                               + k * ys[:, None, None] * xa2[None, :, :]))  # (y, x, a)
    P2 = np.exp(2j * TWO_PI * k * np.outer(zs, a))                         # (z, a)
    H = np.einsum("yxa,za,xaty->xyzt", P1, P2, G)
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    pre = np.exp(1j * (-TWO_PI * (m * Y - n * (Z + X * Y)) + 2 * TWO_PI * k * Z * X))
    return pre[..., None] * H


# ---------------------------------------------------------------- checks

# shifted point and closed-form factor for each of the four rules
def _rule_shift(i: int, x, y, z, t):
    return [(x + 1, y, z, t), (x, y + 1, z - x, t), (x, y, z + 1, t), (x, y, z, t + 1)][i]


def _rule_factor(i: int, k: int, x, y, z, t):
    return [1.0 + 0j,
            np.exp(-1j * TWO_PI * k * x * x),
            np.exp(2j * TWO_PI * k * x),
            np.exp(2j * TWO_PI * k * y)][i]


PSEUDOPERIODIC_GENERATORS = (
    GroupElement(1, 0, 0, 0, 0),
    GroupElement(0, 1, 0, 0, 0),
    GroupElement(0, 0, 1, 0, 0),
    GroupElement(0, 0, 0, 1, 0),
)


def cocycle_factor(k: int, gamma: GroupElement, point) -> complex:
    """e^{-4 pi i k psi(gamma^-1, gamma p)} for p = (x, y, z, t) at u = 0."""
    x, y, z, t = (float(c) for c in point)
    moved = multiply(gamma, GroupElement(x, y, z, t, 0.0))
    return complex(np.exp(-2j * TWO_PI * k * cocycle_psi(inverse(gamma), moved)))


def check_pseudoperiodicity(k: int, m: int, n: int, f, point,
                            window: TruncationWindow | None = None, tol: float = 1e-12) -> dict:
    """Residuals |theta(shifted) - factor * theta(point)| for the four rules."""
    x, y, z, t = (float(c) for c in point)
    shifted = [_rule_shift(i, x, y, z, t) for i in range(4)]
    xs = np.array([x] + [p[0] for p in shifted])
    ts = np.array([t] + [p[3] for p in shifted])
    w = _resolve_window(f, xs, ts, window, tol)
    pts = np.array([(x, y, z, t)] + shifted)
    vals = _theta_points(k, m, n, f, pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3], 0.0, w.W)
    base = vals[0]
    residuals, factor_gaps = [], []
    for i in range(4):
        expected = _rule_factor(i, k, x, y, z, t)
        residuals.append(float(abs(vals[i + 1] - expected * base)))
        factor_gaps.append(float(abs(expected - cocycle_factor(k, PSEUDOPERIODIC_GENERATORS[i], shifted[i]))))
    return {"residuals": residuals, "factor_vs_cocycle": factor_gaps, "window": w.W,
            "value": [base.real, base.imag]}


def check_intertwining(k: int, m: int, n: int, f, g: GroupElement, samples: Sequence[GroupElement],
                       tol: float = 1e-12) -> float:
    """max_p |Theta(pi(g) f)(p) - Theta(f)(p g)|."""
    pt = IntegralPoint(k, m, n)
    moved = induced_function(pt, g, f)
    worst = 0.0
    for p in samples:
        lhs = theta_map(k, m, n, moved, p, tol=tol)
        rhs = theta_map(k, m, n, f, multiply(p, g), tol=tol)
        worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------- inner products

@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor Gauss-Legendre rule on [0, 1)."""

    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def gauss_legendre(cls, n: int = 12) -> QuadratureGrid:
        x, w = np.polynomial.legendre.leggauss(n)
        return cls((x + 1) / 2, w / 2)


@dataclass(frozen=True)
class SectionField:
    """Samples of theta_R4 on a quadrature grid of the fundamental domain."""

    k: int
    m: int
    n: int
    values: np.ndarray
    grid: QuadratureGrid


def sample_section(k: int, m: int, n: int, f, grid: QuadratureGrid | None = None,
                   tol: float = 1e-12) -> SectionField:
    grid = grid or QuadratureGrid.gauss_legendre()
    g = grid.nodes
    return SectionField(k, m, n, theta_grid(k, m, n, f, g, g, g, g, tol=tol), grid)


FIBRE_VOLUME = 0.5   # the central coordinate runs over [0, 1/2) in the fundamental domain


def inner_product_P(F: SectionField, G: SectionField) -> complex:
    """Haar inner product on the bundle, linear in F.

    Both sections transform by e^{-4 pi i k u} along the fibre, so the u
    integral contributes its length 1/2 and the rest is a quadrature over
    [0, 1)^4.
    """
    if F.k != G.k:
        raise ValueError("sections of different level are orthogonal by fiat; mismatched k")
    if F.values.shape != G.values.shape:
        raise ValueError("sections sampled on different grids")
    w = F.grid.weights
    W4 = np.einsum("i,j,k,l->ijkl", w, w, w, w)
    return complex(FIBRE_VOLUME * np.sum(W4 * F.values * np.conj(G.values)))


def l2_norm_squared(f, half_width: float = 8.0, points: int = 801) -> float:
    """||f||^2 on R^2 by the trapezoid rule (spectrally accurate for rapidly decaying f)."""
    s = np.linspace(-half_width, half_width, points)
    h = s[1] - s[0]
    vals = _grid_eval(f, s, s)
    return float(np.sum(np.abs(vals) ** 2) * h * h)


# ---------------------------------------------------------------- classical torus

def weil_brezin_torus(k: int, f: Callable, point, W: int = 12) -> complex:
    """e^{-2 pi i k phi} sum_{|m| <= W} f(y + m) e^{2 pi i m x}."""
    x, y, phi = (float(c) for c in point)
    if W < abs(y) + 6:
        raise TruncationError("window insufficient for Gaussian-decaying f")
    m = np.arange(-W, W + 1, dtype=float)
    return complex(np.exp(-1j * TWO_PI * k * phi) * np.sum(f(y + m) * np.exp(1j * TWO_PI * m * x)))


def jacobi_theta(z: complex, terms: int = 30) -> complex:
    """sum_n exp(-pi n^2 + 2 pi i n z)."""
    n = np.arange(-terms, terms + 1, dtype=float)
    return complex(np.sum(np.exp(-math.pi * n * n + 2j * math.pi * n * z)))


def classical_delta1_apply(f, t=None):
    """-(1/4) [f'' - 4 pi^2 t^2 f + 2 pi f] for a sympy expression f(t).

    Returns the simplified expression, or its value when t is given.
    """
    import sympy

    s = sympy.Symbol("t", real=True)
    f = sympy.sympify(f)
    if f.free_symbols - {s}:
        f = f.subs({sym: s for sym in f.free_symbols})
    out = sympy.simplify(-(sympy.diff(f, s, 2) - 4 * sympy.pi ** 2 * s ** 2 * f + 2 * sympy.pi * f) / 4)
    return out if t is None else out.subs(s, t)
