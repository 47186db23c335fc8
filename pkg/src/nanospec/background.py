"""Unperturbed two-periodic Jacobi background.

The half-line operator has diagonal ``v, -v, v, -v, ...`` (site 1 carries
``+v``) and off-diagonal ``1, a, 1, a, ...`` (coupling between sites 1 and 2
is 1; between sites 2 and 3 is ``a``).  Band structure, Lyapunov function,
Floquet multipliers with two-sheet branch selection, Titchmarsh-Weyl
functions and the fundamental solution polynomials all live here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .polycore import Polynomial

__all__ = [
    "Background",
    "BandStructure",
    "SheetPoint",
    "PLUS",
    "MINUS",
    "OnCutError",
    "WeylPoleError",
    "band_edges",
    "lyapunov",
    "floquet_multipliers",
    "weyl_m",
    "fundamental",
]

PLUS = "plus"
MINUS = "minus"

EDGE_EPS = 1e-9


class OnCutError(ValueError):
    """Evaluation requested at a real point strictly inside a spectral band."""


class WeylPoleError(ArithmeticError):
    """The Titchmarsh-Weyl function has a pole at the requested point."""

    def __init__(self, message, residue_sign=0):
        super().__init__(message)
        self.residue_sign = residue_sign


@dataclass(frozen=True)
class Background:
    """Two-periodic background coefficients (v on-site amplitude, a > 0)."""

    v: float
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"off-diagonal coefficient must be positive, got a={self.a}")

    def diag(self, n: int) -> float:
        """Unperturbed diagonal entry v_n (n >= 1): +v at odd sites."""
        return self.v if n % 2 == 1 else -self.v

    def offdiag(self, n: int) -> float:
        """Coupling a_n between sites n and n+1: a at even n, 1 at odd n."""
        return self.a if n % 2 == 0 else 1.0


@dataclass(frozen=True)
class BandStructure:
    """Band edges and gaps; bands are [lam0_plus, lam1_minus], [lam1_plus, lam0_minus]."""

    lam0_minus: float
    lam0_plus: float
    lam1_minus: float
    lam1_plus: float

    @property
    def edges(self):
        return (self.lam0_plus, self.lam1_minus, self.lam1_plus, self.lam0_minus)

    @property
    def bands(self):
        return ((self.lam0_plus, self.lam1_minus), (self.lam1_plus, self.lam0_minus))

    @property
    def middle_gap_closed(self) -> bool:
        return self.lam1_plus == self.lam1_minus

    def gap_index(self, x: float):
        """0, 1 or 2 for the open gap containing x; None on a band or edge."""
        if x < self.lam0_plus:
            return 0
        if self.lam1_minus < x < self.lam1_plus:
            return 1
        if x > self.lam0_minus:
            return 2
        return None

    def nearest_edge(self, x: float):
        return min(self.edges, key=lambda e: abs(x - e))


@dataclass(frozen=True)
class SheetPoint:
    """A point of the two-sheeted surface: complex projection plus sheet tag."""

    lam: complex
    sheet: str = PLUS

    def __post_init__(self):
        if self.sheet not in (PLUS, MINUS):
            raise ValueError(f"sheet must be 'plus' or 'minus', got {self.sheet!r}")

    def conjugate(self) -> "SheetPoint":
        return SheetPoint(complex(self.lam).conjugate(), self.sheet)

    def flipped(self) -> "SheetPoint":
        return SheetPoint(self.lam, MINUS if self.sheet == PLUS else PLUS)


def band_edges(bg: Background) -> BandStructure:
    v, a = bg.v, bg.a
    outer = math.sqrt(v * v + (a + 1.0) ** 2)
    inner = math.sqrt(v * v + (a - 1.0) ** 2)
    return BandStructure(
        lam0_minus=outer, lam0_plus=-outer, lam1_minus=-inner, lam1_plus=inner
    )


def lyapunov(bg: Background, lam) -> complex:
    """Half-trace of the period-two monodromy matrix."""
    return (lam * lam - bg.v * bg.v - bg.a * bg.a - 1.0) / (2.0 * bg.a)


def in_band_interior(bg: Background, x: float, eps_edge: float = EDGE_EPS) -> bool:
    """True when real x lies strictly inside a band, |Delta(x)| < 1 - eps_edge."""
    return abs(lyapunov(bg, x)) < 1.0 - eps_edge


def floquet_multipliers(bg: Background, pt: SheetPoint, eps_edge: float = EDGE_EPS):
    """Floquet multiplier pair (xi_plus^2, xi_minus^2) on the given sheet.

    On the plus sheet |xi_plus^2| <= 1 (the l2-decaying branch); on the minus
    sheet the roles swap.  Ties at band edges give xi^2 = Delta.
    """
    lam = complex(pt.lam)
    delta = complex(lyapunov(bg, lam))
    if lam.imag == 0.0 and abs(delta) < 1.0 - eps_edge:
        raise OnCutError(f"on-cut evaluation at lambda={lam.real}")
    s = cmath.sqrt(delta * delta - 1.0)
    r1, r2 = delta + s, delta - s
    small, large = (r1, r2) if abs(r1) <= abs(r2) else (r2, r1)
    if pt.sheet == PLUS:
        return small, large
    return large, small


def weyl_m(bg: Background, pt: SheetPoint, eps_edge: float = EDGE_EPS) -> complex:
    """Titchmarsh-Weyl function m = (xi_plus^2 + a) / (lambda - v) on the sheet.

    At lambda = v the function is regular only on the sheet where the
    numerator vanishes (|a| < 1 on the plus sheet); otherwise a
    :class:`WeylPoleError` is raised carrying the sign of the residue.
    """
    lam = complex(pt.lam)
    den = lam - bg.v
    pole_tol = 1e-12 * (1.0 + abs(bg.v))
    if abs(den) > pole_tol:
        xi_p, _ = floquet_multipliers(bg, pt, eps_edge)
        return (xi_p + bg.a) / den
    # lambda = v: numerator value decides regularity
    xi_p, _ = floquet_multipliers(bg, pt, eps_edge)
    num = xi_p + bg.a
    if abs(num) > 1e-9 * (1.0 + bg.a):
        sign = 1 if num.real > 0 else -1
        raise WeylPoleError(f"Weyl pole at lambda=v={bg.v} on sheet {pt.sheet}", sign)
    if abs(bg.a - 1.0) < 1e-12:
        raise WeylPoleError(f"branch point at lambda=v={bg.v} (a=1)")
    # removable singularity: Richardson-extrapolated difference quotient
    # along the gap direction (v lies in the middle gap for a != 1)
    h = 1e-6 * (1.0 + abs(bg.v))

    def quotient(step):
        p = SheetPoint(bg.v + step, pt.sheet)
        xi, _ = floquet_multipliers(bg, p, eps_edge)
        return (xi + bg.a) / step

    q1 = 0.5 * (quotient(h) + quotient(-h))
    q2 = 0.5 * (quotient(h / 2) + quotient(-h / 2))
    return (4.0 * q2 - q1) / 3.0


def fundamental(bg: Background, n: int):
    """Fundamental solution polynomials (theta_n, phi_n) of the background.

    Forward three-term recursion from theta_0 = 1, theta_1 = 0, phi_0 = 0,
    phi_1 = 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    seq = fundamental_sequence(bg, n)
    return seq[n]


def fundamental_sequence(bg: Background, n_max: int, exact: bool = False):
    """List of (theta_k, phi_k) for k = 0..n_max."""
    if exact:
        v, a = Fraction(bg.v), Fraction(bg.a)
        one, zero = Fraction(1), Fraction(0)
    else:
        v, a = bg.v, bg.a
        one, zero = 1.0, 0.0
    theta = [Polynomial((one,)), Polynomial(())]
    phi = [Polynomial(()), Polynomial((one,))]
    # recursion at site k: a_{k-1} y_{k-1} + a_k y_{k+1} + v_k y_k = lam y_k
    for k in range(1, n_max):
        vk = v if k % 2 == 1 else -v
        a_prev = a if (k - 1) % 2 == 0 else one
        a_next = a if k % 2 == 0 else one
        shift = Polynomial((-vk, one))
        theta.append((shift * theta[k] + theta[k - 1].scale(-a_prev)).scale(one / a_next))
        phi.append((shift * phi[k] + phi[k - 1].scale(-a_prev)).scale(one / a_next))
    return list(zip(theta, phi))[: n_max + 1]
