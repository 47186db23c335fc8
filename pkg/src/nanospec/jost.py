"""Perturbed fundamental solutions, Jost functions and the state polynomial.

The finitely supported perturbation q_1..q_p shifts the diagonal of the
half-line operator at the first p sites.  The perturbed fundamental
solutions are obtained by a downward three-term recursion seeded with the
background fundamentals at sites p, p+1; the degree-2p state polynomial
F = (lam - v) f0+ f0- collects all bound states, antibound states and
resonances as its zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .background import (
    Background,
    SheetPoint,
    fundamental_sequence,
    in_band_interior,
    weyl_m,
)
from .polycore import Polynomial

__all__ = [
    "Perturbation",
    "PerturbedSolutionPair",
    "StatePolynomial",
    "CancellationError",
    "PoleAtVError",
    "perturbed_fundamentals",
    "state_polynomial",
    "jost_value",
    "jost_solution",
]

TAIL_TOL = 1e-8


class CancellationError(ArithmeticError):
    """High-degree coefficients of F failed to cancel within tolerance."""


class PoleAtVError(ArithmeticError):
    """Jost function evaluation at lambda = v where phi~_0(v) != 0."""


@dataclass(frozen=True)
class Perturbation:
    """Finite diagonal perturbation; q[j-1] is q_j for j = 1..p."""

    q: tuple

    def __init__(self, q=()):
        object.__setattr__(self, "q", tuple(float(x) for x in q))
        if self.q and self.q[-1] == 0.0:
            raise ValueError("last perturbation entry q_p must be nonzero")

    @property
    def p(self) -> int:
        return len(self.q)

    def q_at(self, j: int) -> float:
        """q_j with 1-based index, zero beyond the support."""
        return self.q[j - 1] if 1 <= j <= len(self.q) else 0.0

    def perturbed_diag(self, bg: Background, n: int) -> float:
        return bg.diag(n) + self.q_at(n)


@dataclass(frozen=True)
class PerturbedSolutionPair:
    """The n = 0 values of the perturbed fundamental solutions."""

    theta0: Polynomial
    phi0: Polynomial


@dataclass(frozen=True)
class StatePolynomial:
    """F = (lam - v) f0+ f0-, degree 2p, zeros = projections of all states.

    ``F`` carries float coefficients for cheap evaluation; ``F_exact`` keeps
    the rational-arithmetic construction, whose exact cancellation above
    degree 2p certifies the assembly and whose exact evaluations drive the
    root polishing.
    """

    F: Polynomial
    F_exact: Polynomial
    background: Background
    perturbation: Perturbation


def _perturbed_sequences(bg: Background, q: Perturbation, exact: bool = False):
    """Lists theta~[0..p+1], phi~[0..p+1] from the downward recursion."""
    p = q.p
    base = fundamental_sequence(bg, p + 1, exact=exact)
    theta = [None] * (p + 2)
    phi = [None] * (p + 2)
    theta[p], phi[p] = base[p]
    theta[p + 1], phi[p + 1] = base[p + 1]
    if exact:
        conv = Fraction
    else:
        conv = float
    for n in range(p, 0, -1):
        vn = conv(bg.diag(n)) + conv(q.q_at(n))
        a_n = conv(bg.offdiag(n))
        a_prev = conv(bg.offdiag(n - 1))
        shift = Polynomial((-vn, conv(1)))
        theta[n - 1] = (shift * theta[n] + theta[n + 1].scale(-a_n)).scale(conv(1) / a_prev)
        phi[n - 1] = (shift * phi[n] + phi[n + 1].scale(-a_n)).scale(conv(1) / a_prev)
    return theta, phi


@lru_cache(maxsize=256)
def _cached_solutions(v: float, a: float, q: tuple):
    theta, phi = _perturbed_sequences(Background(v, a), Perturbation(q))
    return tuple(theta), tuple(phi)


def perturbed_solutions(bg: Background, q: Perturbation):
    """Cached perturbed fundamentals theta~[0..p+1], phi~[0..p+1] (floats)."""
    return _cached_solutions(bg.v, bg.a, q.q)


def perturbed_fundamentals(bg: Background, q: Perturbation, exact: bool = False) -> PerturbedSolutionPair:
    theta, phi = _perturbed_sequences(bg, q, exact=exact)
    return PerturbedSolutionPair(theta0=theta[0], phi0=phi[0])


def _assemble_F(bg: Background, theta0: Polynomial, phi0: Polynomial) -> Polynomial:
    """F = (lam-v) theta0^2 + (1/a)(lam^2 - v^2 + a^2 - 1) theta0 phi0 + (lam+v) phi0^2."""
    exact = theta0.exact or phi0.exact
    if exact:
        v, a, one = Fraction(bg.v), Fraction(bg.a), Fraction(1)
    else:
        v, a, one = bg.v, bg.a, 1.0
    phi2 = Polynomial((-v, one))
    theta3_neg = Polynomial((v, one))  # -theta_3 = lam + v
    twophi = Polynomial(((-(v * v) + a * a - one) / a, 0 * one, one / a))
    terms = [
        phi2 * theta0 * theta0,
        twophi * theta0 * phi0,
        theta3_neg * phi0 * phi0,
    ]
    n = max(len(t.coeffs) for t in terms)
    if exact:
        coeffs = [sum(t.coeffs[i] if i < len(t.coeffs) else Fraction(0) for t in terms) for i in range(n)]
    else:
        coeffs = [
            math.fsum(t.coeffs[i] for t in terms if i < len(t.coeffs)) for i in range(n)
        ]
    return Polynomial(coeffs)


def expected_leading_coefficient(bg: Background, q: Perturbation) -> float:
    """Degree-2p coefficient of F: -q_p (a^2 if p even else 1) / (a_0...a_p)^2."""
    p = q.p
    prod = 1.0
    for j in range(0, p + 1):
        prod *= bg.offdiag(j)
    qp = q.q[-1]
    num = -qp * (bg.a**2 if p % 2 == 0 else 1.0)
    return num / prod**2


def state_polynomial(bg: Background, q: Perturbation) -> StatePolynomial:
    """Assemble and truncate the degree-2p state polynomial.

    The construction runs in exact rational arithmetic on the (float)
    inputs: the coefficients above degree 2p then cancel identically, which
    certifies the assembly, and the exact polynomial is retained for
    root polishing.
    """
    p = q.p
    if p == 0:
        F_exact = Polynomial((Fraction(-bg.v), Fraction(1)))
        return StatePolynomial(Polynomial((-bg.v, 1.0)), F_exact, bg, q)

    pair = perturbed_fundamentals(bg, q, exact=True)
    F_exact = _assemble_F(bg, pair.theta0, pair.phi0)
    if not _tail_ok(F_exact, 2 * p):
        raise CancellationError(
            f"coefficients above degree {2 * p} did not cancel (p={p}, a={bg.a})"
        )
    F_exact = F_exact.truncated(2 * p)
    return StatePolynomial(F_exact.to_float(), F_exact, bg, q)


def _tail_ok(F: Polynomial, deg: int) -> bool:
    coeffs = F.coeffs
    if len(coeffs) <= deg:
        return False  # lost the leading term entirely
    lead = abs(coeffs[deg])
    if lead == 0.0:
        return False
    return all(abs(c) <= TAIL_TOL * lead for c in coeffs[deg + 1 :])


def jost_value(bg: Background, q: Perturbation, pt: SheetPoint) -> complex:
    """Jost function f0+ on the given sheet: theta~_0 + m_+ phi~_0."""
    return jost_solution(bg, q, pt, 0)


def jost_solution(bg: Background, q: Perturbation, pt: SheetPoint, n: int) -> complex:
    """Jost solution f_n+ = theta~_n + m_+ phi~_n on the given sheet.

    For n > p this equals the Floquet solution (xi_+^{2k} for n = 2k,
    xi_+^{2k} m_+ for n = 2k+1).  At lambda = v the value is the removable
    limit when phi~_n(v) = 0 and a :class:`PoleAtVError` otherwise.
    """
    theta, phi = perturbed_solutions(bg, q)
    if n <= q.p + 1:
        th_n, ph_n = theta[n], phi[n]
    else:
        th_n, ph_n = None, None
    lam = complex(pt.lam)
    v_tol = 1e-9 * (1.0 + abs(bg.v))
    if abs(lam - bg.v) > v_tol:
        return _jost_eval(bg, q, pt, n, th_n, ph_n)
    # lambda = v special path
    ph_v = phi[n](bg.v) if ph_n is not None else None
    if ph_n is not None and abs(ph_v) > 1e-8 * max(1.0, ph_n.coeff_scale()):
        raise PoleAtVError(f"pole at v: phi~_{n}(v) = {ph_v} != 0")
    if ph_n is None and n % 2 == 1:
        raise PoleAtVError(f"pole at v for odd Floquet index n={n}")
    # removable singularity: probe at v +/- delta and Richardson-extrapolate
    scale = 1.0 + abs(bg.v)
    delta = 1e-6 * scale
    sides = [s for s in (+1.0, -1.0) if not in_band_interior(bg, bg.v + s * delta)]
    if not sides:
        raise PoleAtVError("cannot probe: both sides of v lie inside a band")

    def probe(d):
        vals = [
            _jost_eval(bg, q, SheetPoint(bg.v + s * d, pt.sheet), n, th_n, ph_n)
            for s in sides
        ]
        return sum(vals) / len(vals)

    f1, f2 = probe(delta), probe(delta / 2)
    return (4.0 * f2 - f1) / 3.0


def _jost_eval(bg, q, pt, n, th_n, ph_n):
    m = weyl_m(bg, pt)
    if th_n is not None:
        return th_n(complex(pt.lam)) + m * ph_n(complex(pt.lam))
    # Floquet regime n > p + 1
    from .background import floquet_multipliers

    xi_p, _ = floquet_multipliers(bg, pt)
    k = n // 2
    val = xi_p**k
    if n % 2 == 1:
        val *= m
    return val
