"""Closed-form results for small perturbations and asymptotic regimes.

Explicit p = 1 and p = 2 state formulas, the cubic discriminant dichotomy,
flat-band (a = 0) spectra, and limit predictors for a -> 0, v -> infinity
and large coupling.  These serve both as fast paths and as independent
oracles for the general state machinery.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .jost import Perturbation

__all__ = [
    "CubicModel",
    "GapClosedWarning",
    "p1_states",
    "p2_cubic",
    "p2_limits",
    "flat_band_spectrum",
    "a_to_zero_resonance_limits",
    "large_v_scaled_roots",
    "large_coupling_limit",
    "cubic_discriminant",
    "LARGE_V_REALITY_WINDOW",
]

# roots of mu^3 - mu^2 - mu + q2 are all real iff q2 lies in this window
LARGE_V_REALITY_WINDOW = ((11.0 - 16.0) / 27.0, (11.0 + 16.0) / 27.0)


class GapClosedWarning(UserWarning):
    """v = 0, a = 1: the middle gap is closed and sheet membership is moot."""


@dataclass(frozen=True)
class CubicModel:
    """p3(lam) = k0 lam^3 + k1 lam^2 + k2 lam + k3 with its discriminant."""

    k0: float
    k1: float
    k2: float
    k3: float
    D: float

    def __call__(self, lam):
        return ((self.k0 * lam + self.k1) * lam + self.k2) * lam + self.k3

    def roots(self):
        """The three roots, via the depressed-cubic trigonometric solution."""
        a, b, c, d = self.k0, self.k1, self.k2, self.k3
        # reduce to t^3 + pt + q with lam = t - b/(3a)
        p = (3 * a * c - b * b) / (3 * a * a)
        qq = (2 * b**3 - 9 * a * b * c + 27 * a * a * d) / (27 * a**3)
        shift = -b / (3 * a)
        if p == 0 and qq == 0:
            return [shift, shift, shift]
        disc = (qq / 2) ** 2 + (p / 3) ** 3
        if disc <= 0:
            # three real roots
            r = math.sqrt(-(p**3) / 27)
            phi = math.acos(max(-1.0, min(1.0, -qq / (2 * r))))
            m = 2 * math.sqrt(-p / 3)
            return sorted(m * math.cos((phi + 2 * math.pi * k) / 3) + shift for k in range(3))
        s = math.sqrt(disc)
        u = _cbrt(-qq / 2 + s)
        w = _cbrt(-qq / 2 - s)
        t1 = u + w
        re = -t1 / 2
        im = (u - w) * math.sqrt(3) / 2
        return [t1 + shift, complex(re + shift, -abs(im)), complex(re + shift, abs(im))]


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def cubic_discriminant(k0: float, k1: float, k2: float, k3: float) -> float:
    """Generic cubic discriminant k1^2k2^2 - 4k1^3k3 - 4k0k2^3 + 18k0k1k2k3 - 27k0^2k3^2."""
    return (
        k1 * k1 * k2 * k2
        - 4.0 * k1**3 * k3
        - 4.0 * k0 * k2**3
        + 18.0 * k0 * k1 * k2 * k3
        - 27.0 * k0 * k0 * k3 * k3
    )


def _discriminant_transcribed(v: float, a: float, q2: float) -> float:
    """The expanded form of the same discriminant written directly in (v, a, q2)."""
    A = v * q2 + q2 * q2
    B = 2.0 * v * q2 - v * v - a * a - 1.0
    C = (v * q2 - v * v - 1.0) * (v * q2 - a * a) - v * v * a * a
    return (
        A * A * q2 * q2 * B * B
        - 4.0 * A**3 * C
        - 4.0 * q2**4 * B**3
        + 18.0 * q2 * A * q2 * B * C
        - 27.0 * q2 * q2 * C * C
    )


def p1_states(v: float, a: float, q1: float):
    """The two real p = 1 states lam_- < lam_+ (each bound or antibound).

    lam_pm = q1/2 + a^2/(2 q1) +/- sqrt((q1/2 + v - a^2/(2 q1))^2 + 1); the
    discriminant (q1^2 + 2 v q1 - a^2)^2 + 4 q1^2 is positive for q1 != 0,
    so both states are always real.
    """
    if q1 == 0:
        raise ValueError("unperturbed: q1 must be nonzero")
    center = q1 / 2.0 + a * a / (2.0 * q1)
    r = math.sqrt((q1 / 2.0 + v - a * a / (2.0 * q1)) ** 2 + 1.0)
    return center - r, center + r


def p2_cubic(v: float, a: float, q2: float) -> CubicModel:
    """Cubic factor a^2 F/(lam - v) for p = 2 with q1 = 0, plus discriminant.

    The discriminant is computed both from the generic cubic formula applied
    to (k0..k3) and from its direct expansion in (v, a, q2); the two must
    agree, guarding against transcription errors.
    """
    if q2 == 0:
        raise ValueError("q2 must be nonzero")
    k0 = -q2
    k1 = v * q2 + q2 * q2
    k2 = -q2 * (2.0 * v * q2 - v * v - a * a - 1.0)
    k3 = (v * q2 - v * v - 1.0) * (v * q2 - a * a) - v * v * a * a
    D = cubic_discriminant(k0, k1, k2, k3)
    D2 = _discriminant_transcribed(v, a, q2)
    scale = max(abs(D), abs(D2), 1e-300)
    if abs(D - D2) > 1e-10 * scale:
        raise ArithmeticError(
            f"discriminant paths disagree: {D} vs {D2} at (v={v}, a={a}, q2={q2})"
        )
    return CubicModel(k0, k1, k2, k3, D)


def p2_limits(v: float, q1: float, q2: float):
    """a -> 0 limits of the four p = 2 states.

    Returns (lam1, lam2, lam3, lam4): lam1,2 are the real limits of the
    bound-state pair, lam3,4 the (possibly complex) limits of the
    resonance pair.
    """
    if q2 == 0:
        raise ValueError("q2 must be nonzero")
    s = math.sqrt((v + (q1 - q2) / 2.0) ** 2 + 1.0)
    shift = (q1 + q2) / 2.0
    lam1, lam2 = -s + shift, s + shift
    rad = q1 * (q2 * q1 - 4.0) / (4.0 * q2)
    root = cmath.sqrt(rad)
    lam3, lam4 = v + q1 / 2.0 - root, v + q1 / 2.0 + root
    return lam1, lam2, _realify(lam3), _realify(lam4)


def _realify(z: complex):
    return z.real if z.imag == 0 else z


def flat_band_spectrum(v: float, q: Perturbation):
    """Point spectrum of the decoupled a = 0 operator.

    The chain splits into 2x2 blocks; block n couples sites 2n-1, 2n with
    eigenvalues z_{n,+-} = v_n^+ +- sqrt((v_n^-)^2 + 1) where
    v_n^{+-} = (v~_{2n-1} +- v~_{2n})/2.  Blocks past the perturbation all
    give the two flat bands +-sqrt(v^2+1) of infinite multiplicity.

    Returns (discrete, flat) where discrete is the sorted list of perturbed
    block eigenvalues and flat the two flat-band values.
    """
    p = q.p
    n_blocks = (p + 1) // 2 if p % 2 == 1 else p // 2
    discrete = []
    for n in range(1, n_blocks + 1):
        v1 = v + q.q_at(2 * n - 1)
        v2 = -v + q.q_at(2 * n)
        vp = (v1 + v2) / 2.0
        vm = (v1 - v2) / 2.0
        r = math.sqrt(vm * vm + 1.0)
        discrete.extend([vp - r, vp + r])
    flat = (-math.sqrt(v * v + 1.0), math.sqrt(v * v + 1.0))
    return sorted(discrete), flat


def a_to_zero_resonance_limits(v: float, q: Perturbation):
    """a -> 0 limits of the resonances.

    For even p: the block eigenvalues z_{n,+-} for n <= (p-2)/2 together
    with mu0 = v + q_{p-1}/2 +- sqrt(q_{p-1}^2/4 - q_{p-1}/q_p), the only
    pair that can be complex.  For odd p: the (all real) block eigenvalues
    z_{n,+-} for n <= (p-1)/2.
    """
    p = q.p
    if p == 0:
        return []
    out = []
    if p % 2 == 0:
        for n in range(1, (p - 2) // 2 + 1):
            v1 = v + q.q_at(2 * n - 1)
            v2 = -v + q.q_at(2 * n)
            vp, vm = (v1 + v2) / 2.0, (v1 - v2) / 2.0
            r = math.sqrt(vm * vm + 1.0)
            out.extend([vp - r, vp + r])
        qp1 = q.q_at(p - 1)
        qp = q.q_at(p)
        root = cmath.sqrt(qp1 * qp1 / 4.0 - qp1 / qp)
        out.extend([_realify(v + qp1 / 2.0 - root), _realify(v + qp1 / 2.0 + root)])
    else:
        for n in range(1, (p - 1) // 2 + 1):
            v1 = v + q.q_at(2 * n - 1)
            v2 = -v + q.q_at(2 * n)
            vp, vm = (v1 + v2) / 2.0, (v1 - v2) / 2.0
            r = math.sqrt(vm * vm + 1.0)
            out.extend([vp - r, vp + r])
    return out


def large_v_scaled_roots(q2: float):
    """Roots of mu^3 - mu^2 - mu + q2, the v -> infinity scaled states.

    States of the p = 2, q1 = 0 operator scale like lam ~ mu v for large v.
    Returns (roots, window) where window is the q2-interval on which all
    three roots are real: [-5/27, 1].
    """
    if q2 == 0:
        raise ValueError("q2 must be nonzero")
    model = CubicModel(1.0, -1.0, -1.0, q2, cubic_discriminant(1.0, -1.0, -1.0, q2))
    return model.roots(), LARGE_V_REALITY_WINDOW


def large_coupling_limit(p: int, v: float) -> float:
    """Finite accumulation point (-1)^p v of the states under q = t q0, t -> inf."""
    return v if p % 2 == 0 else -v
