"""Dense real-coefficient polynomials and robust complex root finding.

Coefficients are stored low-to-high, so ``coeffs[i]`` multiplies ``lam**i``.
Entries are ordinarily floats; exact :class:`fractions.Fraction` entries are
supported for the cancellation-sensitive downward recursions elsewhere in
the package.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

__all__ = [
    "Polynomial",
    "NoRootsError",
    "DEFAULT_CLUSTER_EPS",
    "roots",
]

DEFAULT_CLUSTER_EPS = 1e-7


class NoRootsError(ValueError):
    """Raised when roots are requested of a constant or zero polynomial."""


class Polynomial:
    """Immutable dense polynomial with real (float or Fraction) coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1.0,))

    @classmethod
    def monomial(cls, degree: int, coeff=1.0) -> "Polynomial":
        return cls((0.0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def exact(self) -> bool:
        return any(isinstance(c, Fraction) for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero or other.is_zero:
            return Polynomial.zero()
        if self.exact or other.exact:
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, ci in enumerate(self.coeffs):
                fi = Fraction(ci)
                for j, cj in enumerate(other.coeffs):
                    out[i + j] += fi * Fraction(cj)
            return Polynomial(out)
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def scale(self, factor) -> "Polynomial":
        return Polynomial(tuple(factor * c for c in self.coeffs))

    def __call__(self, lam):
        """Horner evaluation at a (complex) point."""
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * lam + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def to_float(self) -> "Polynomial":
        return Polynomial(tuple(float(c) for c in self.coeffs))

    def truncated(self, degree: int) -> "Polynomial":
        return Polynomial(self.coeffs[: degree + 1])

    def coeff_scale(self) -> float:
        """Magnitude scale of the coefficient vector (0 for zero poly)."""
        return max((abs(float(c)) for c in self.coeffs), default=0.0)


def add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def eval_poly(p: Polynomial, lam):
    return p(lam)


def _exact_eval(coeffs, zr: Fraction, zi: Fraction):
    """Exact complex Horner evaluation of a Fraction-coefficient polynomial."""
    ar, ai = Fraction(0), Fraction(0)
    for c in reversed(coeffs):
        ar, ai = ar * zr - ai * zi + Fraction(c), ar * zi + ai * zr
    return ar, ai


def _exact_newton(coeffs, dcoeffs, z, iters=10):
    """Newton refinement with exact rational residuals at float iterates.

    Coefficient cancellation cannot pollute the residual, so the iteration
    converges to the true root of the (rational-coefficient) polynomial to
    double precision even when the coefficients are badly scaled.
    """
    best, best_res = z, None
    for _ in range(iters):
        zr, zi = Fraction(z.real), Fraction(z.imag)
        pr, pi = _exact_eval(coeffs, zr, zi)
        res = math.hypot(float(pr), float(pi))
        if best_res is None or res < best_res:
            best, best_res = z, res
        if res == 0.0:
            break
        dr, di = _exact_eval(dcoeffs, zr, zi)
        d = complex(float(dr), float(di))
        if d == 0:
            break
        step = complex(float(pr), float(pi)) / d
        z = z - step
        if abs(step) < 1e-17 * (1.0 + abs(z)):
            zr, zi = Fraction(z.real), Fraction(z.imag)
            pr, pi = _exact_eval(coeffs, zr, zi)
            res = math.hypot(float(pr), float(pi))
            if res < best_res:
                best, best_res = z, res
            break
    return best


def _newton_refine(coeffs_desc, dcoeffs_desc, z, iters=8):
    """Newton iterations on the original polynomial; keeps the best iterate."""
    best = z
    best_res = abs(np.polyval(coeffs_desc, z))
    for _ in range(iters):
        d = np.polyval(dcoeffs_desc, z)
        if d == 0:
            break
        step = np.polyval(coeffs_desc, z) / d
        z = z - step
        res = abs(np.polyval(coeffs_desc, z))
        if res < best_res:
            best, best_res = z, res
        if abs(step) < 1e-16 * (1.0 + abs(z)):
            break
    return best


def _merge_clusters(zs, eps_cluster):
    """Union-find merge of roots closer than eps_cluster*(1+|z|)."""
    n = len(zs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            tol = eps_cluster * (1.0 + 0.5 * (abs(zs[i]) + abs(zs[j])))
            if abs(zs[i] - zs[j]) <= tol:
                parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(zs[i])
    return list(groups.values())


def _pair_conjugates(merged, eps_cluster):
    """Realify near-real roots and enforce exact conjugate pairing."""
    reals, complexes = [], []
    for z, m in merged:
        if abs(z.imag) <= eps_cluster * (1.0 + abs(z)):
            reals.append((complex(z.real, 0.0), m))
        else:
            complexes.append((z, m))
    upper = [(z, m) for z, m in complexes if z.imag > 0]
    lower = [(z, m) for z, m in complexes if z.imag < 0]
    paired = []
    for z, m in upper:
        if not lower:
            # unmatched: symmetrize against its own conjugate
            paired.append((z, m))
            paired.append((z.conjugate(), m))
            continue
        k = min(range(len(lower)), key=lambda i: abs(lower[i][0].conjugate() - z))
        w, mw = lower.pop(k)
        zz = 0.5 * (z + w.conjugate())
        paired.append((zz, m))
        paired.append((zz.conjugate(), mw))
    for z, m in lower:  # leftovers, should not occur for real coefficients
        paired.append((z, m))
        paired.append((z.conjugate(), m))
    return reals + paired


def roots(p: Polynomial, eps_cluster: float = DEFAULT_CLUSTER_EPS):
    """All complex roots of ``p`` with multiplicities.

    Companion-matrix eigenvalues (via numpy, which balances internally)
    followed by Newton refinement on the original polynomial.  Roots closer
    than ``eps_cluster * (1 + |root|)`` are merged into a single root with
    summed multiplicity, and non-real roots are returned in exact conjugate
    pairs.

    Returns a list of ``(root, multiplicity)`` sorted by (Re, Im).
    """
    pf = p.to_float()
    if pf.degree < 1:
        raise NoRootsError("no roots defined for a constant or zero polynomial")
    coeffs_desc = np.array(pf.coeffs[::-1], dtype=float)
    raw = np.roots(coeffs_desc)
    if p.exact:
        exact = [Fraction(c) for c in p.coeffs]
        dexact = [i * c for i, c in enumerate(exact)][1:]
        refined = [_exact_newton(exact, dexact, complex(z)) for z in raw]
    else:
        exact = dexact = None
        dcoeffs_desc = np.polyder(coeffs_desc)
        refined = [_newton_refine(coeffs_desc, dcoeffs_desc, complex(z)) for z in raw]
    groups = _merge_clusters(refined, eps_cluster)
    realify_eps = 1e-10 if p.exact else eps_cluster

    # collapse each cluster to a multiple root refined on the appropriate
    # derivative (where it is simple); with exact polishing available, a
    # cluster of near-conjugate points that is neither real nor truly
    # coincident is kept as separate simple roots (a tight resonance pair,
    # not a multiple root)
    out = []
    for members in groups:
        m = len(members)
        if m == 1:
            out.append((members[0], 1))
            continue
        center = sum(members) / m
        if exact is not None:
            scale = 1.0 + abs(center)
            all_real = all(abs(z.imag) <= realify_eps * scale for z in members)
            coincident = max(abs(z - center) for z in members) <= 1e-9 * scale
            if not (all_real or coincident):
                out.extend((z, 1) for z in members)
                continue
            dk, ddk = exact, dexact
            for _ in range(m - 1):
                dk, ddk = ddk, [i * c for i, c in enumerate(ddk)][1:]
            z = _exact_newton(dk, ddk, center)
            if m == 2:
                # certify the double root against the original polynomial:
                # a conjugate pair with imaginary part below the float root
                # resolution also lands here, but leaves a residual that a
                # true double root cannot; split it back via the local
                # quadratic model F(z + w) ~ F(z) + F''(z) w^2 / 2
                zr, zi = Fraction(z.real), Fraction(z.imag)
                pr, pi = _exact_eval(exact, zr, zi)
                resid = complex(float(pr), float(pi))
                d2r, d2i = _exact_eval(ddk, zr, zi)
                d2 = complex(float(d2r), float(d2i))
                if d2 != 0:
                    w = cmath.sqrt(-2.0 * resid / d2)
                    if abs(w) > 1e-11 * (1.0 + abs(z)):
                        out.append((_exact_newton(exact, dexact, z + w), 1))
                        out.append((_exact_newton(exact, dexact, z - w), 1))
                        continue
        else:
            dk = coeffs_desc
            for _ in range(m - 1):
                dk = np.polyder(dk)
            z = _newton_refine(dk, np.polyder(dk), center)
        out.append((z, m))
    out = _pair_conjugates(out, realify_eps)
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def from_roots(root_mults, leading=1.0) -> Polynomial:
    """Reconstruct a polynomial from (root, multiplicity) pairs."""
    p = Polynomial((leading,))
    for z, m in root_mults:
        for _ in range(m):
            p = p * Polynomial((-z, 1.0)) if isinstance(z, float) else p * Polynomial((complex(-z), 1.0))
    # collapse residual imaginary parts from conjugate expansion
    return Polynomial(tuple(c.real if isinstance(c, complex) else c for c in p.coeffs))
