"""Locate and classify all states of the perturbed half-line operator.

The 2p zeros of the state polynomial F are lifted to the two-sheeted
spectral surface: real zeros inside a gap vanish either in the decaying
Jost function (bound state, sheet plus) or in its second-sheet
continuation (antibound state); zeros at band edges are virtual states;
non-real zeros are resonances on the second sheet.  A zero projecting
onto the Dirichlet point lambda = v is a state iff phi~_0(v) = 0, and its
sheet is decided by probing the growth of the resolvent kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .background import (
    EDGE_EPS,
    Background,
    BandStructure,
    MINUS,
    PLUS,
    SheetPoint,
    band_edges,
    in_band_interior,
    weyl_m,
)
from .jost import Perturbation, jost_solution, jost_value, perturbed_solutions, state_polynomial
from .polycore import DEFAULT_CLUSTER_EPS, roots

__all__ = [
    "BOUND",
    "ANTIBOUND",
    "RESONANCE",
    "VIRTUAL",
    "Tolerances",
    "StateRecord",
    "StateReport",
    "ValidationResult",
    "EmbeddedRootError",
    "UnclassifiableRootError",
    "ProbeInconclusiveError",
    "find_states",
    "classify_root",
    "resolvent_probe",
    "unperturbed_state",
    "validate_counts",
]

BOUND = "bound"
ANTIBOUND = "antibound"
RESONANCE = "resonance"
VIRTUAL = "virtual"


class EmbeddedRootError(ValueError):
    """A real zero of F lies strictly inside a spectral band."""


class UnclassifiableRootError(ValueError):
    """Contradictory sheet evidence for a real zero of F."""


class ProbeInconclusiveError(ArithmeticError):
    """The resolvent growth fit did not converge to a pole order."""


@dataclass(frozen=True)
class Tolerances:
    """Floating-point bands for the exact dichotomies of the classification."""

    eps_edge: float = EDGE_EPS
    eps_v_rel: float = 1e-8
    eps_cluster: float = DEFAULT_CLUSTER_EPS
    jost_zero_rel: float = 1e-7

    def eps_v(self, v: float) -> float:
        return self.eps_v_rel * (1.0 + abs(v))


@dataclass(frozen=True)
class StateRecord:
    point: SheetPoint
    kind: str
    multiplicity: int = 1
    is_v_state: bool = False

    @property
    def lam(self) -> complex:
        return self.point.lam


@dataclass(frozen=True)
class StateReport:
    states: tuple
    total_multiplicity: int
    gap_census: dict
    cluster_merged: bool = False

    def by_kind(self, kind: str):
        return [s for s in self.states if s.kind == kind]

    def multiplicity_of(self, kind: str) -> int:
        return sum(s.multiplicity for s in self.states if s.kind == kind)


@dataclass(frozen=True)
class ValidationResult:
    bound_virtual_at_least_two: bool
    middle_gap_odd: bool
    middle_gap_has_bound_or_virtual: bool
    interlacing: bool
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _jost_zero_scale(bg: Background, q: Perturbation) -> float:
    theta, phi = perturbed_solutions(bg, q)
    return max(1.0, theta[0].coeff_scale(), phi[0].coeff_scale())


def resolvent_probe(bg: Background, q: Perturbation, lam0: float, sheet: str) -> float:
    """Fitted pole order of the resolvent kernel R_n = f_n+/f_0+ at lam0.

    Returns 0.0 (regular), 0.5 (square-root branch singularity, virtual
    state) or 1.0 (simple pole).  The growth is sampled at lam0 +/- delta
    for three decades of delta, on gap sides only, for n in {1, 2, 3};
    each n is fitted separately and the maximum order wins, since ratios
    at individual sites can stay regular at a genuine pole.
    """
    scale = 1.0 + abs(lam0)
    deltas = [1e-4 * scale, 1e-5 * scale, 1e-6 * scale]
    sides = [s for s in (1.0, -1.0) if not in_band_interior(bg, lam0 + s * deltas[0])]
    if not sides:
        raise ProbeInconclusiveError(f"no gap side to probe at lambda={lam0}")
    best = 0.0
    for n in (1, 2, 3):
        mags = []
        for d in deltas:
            vals = []
            for s in sides:
                pt = SheetPoint(lam0 + s * d, sheet)
                f0 = jost_value(bg, q, pt)
                fn = jost_solution(bg, q, pt, n)
                if f0 == 0:
                    raise ProbeInconclusiveError("Jost function vanished at probe point")
                vals.append(abs(fn / f0))
            mags.append(max(vals))
        # slope of log|R| against log(delta); a pole of order s gives -s
        s1 = (math.log(mags[1]) - math.log(mags[0])) / math.log(deltas[1] / deltas[0])
        s2 = (math.log(mags[2]) - math.log(mags[1])) / math.log(deltas[2] / deltas[1])
        slope = 0.5 * (s1 + s2)
        if abs(s1 - s2) > 0.3:
            raise ProbeInconclusiveError(
                f"non-convergent growth fit at lambda={lam0}: slopes {s1:.3f}, {s2:.3f}"
            )
        order = min((0.0, 0.5, 1.0), key=lambda c: abs(-slope - c))
        if abs(-slope - order) > 0.2:
            raise ProbeInconclusiveError(
                f"growth exponent {-slope:.3f} not near 0, 1/2 or 1 at lambda={lam0}"
            )
        best = max(best, order)
    return best


def _classify_v_root(bg, q, lam0, mult, tol) -> StateRecord:
    theta, phi = perturbed_solutions(bg, q)
    phi_v = phi[0](bg.v)
    scale = max(1.0, phi[0].coeff_scale())
    if abs(phi_v) > tol.jost_zero_rel * scale:
        raise UnclassifiableRootError(
            f"root at lambda=v={bg.v} but phi~_0(v)={phi_v} != 0: not a state"
        )
    orders = {}
    for sheet in (PLUS, MINUS):
        try:
            orders[sheet] = resolvent_probe(bg, q, bg.v, sheet)
        except ProbeInconclusiveError:
            orders[sheet] = None
    plus_o, minus_o = orders[PLUS], orders[MINUS]
    if plus_o is not None and plus_o >= 0.5:
        return StateRecord(SheetPoint(bg.v, PLUS), BOUND, mult, is_v_state=True)
    if minus_o is not None and minus_o >= 0.5:
        return StateRecord(SheetPoint(bg.v, MINUS), ANTIBOUND, mult, is_v_state=True)
    if plus_o is None or minus_o is None:
        # the probe window may straddle a second nearby zero (e.g. a state
        # pair collapsing onto v); fall back to the Jost values at v itself
        try:
            f_plus = abs(jost_value(bg, q, SheetPoint(bg.v, PLUS)))
            f_minus = abs(jost_value(bg, q, SheetPoint(bg.v, MINUS)))
        except ArithmeticError:
            f_plus = f_minus = math.inf
        zero_tol = tol.jost_zero_rel * _jost_zero_scale(bg, q)
        if f_plus <= zero_tol and f_plus <= f_minus:
            return StateRecord(SheetPoint(bg.v, PLUS), BOUND, mult, is_v_state=True)
        if f_minus <= zero_tol:
            return StateRecord(SheetPoint(bg.v, MINUS), ANTIBOUND, mult, is_v_state=True)
        # no zero of the Jost functions at v: the state is the pole of the
        # Weyl function itself, which sits on the minus sheet for a < 1 and
        # on the plus sheet for a > 1, exactly as for the unperturbed chain
        if bg.a > 1.0:
            return StateRecord(SheetPoint(bg.v, PLUS), BOUND, mult, is_v_state=True)
        if bg.a < 1.0:
            return StateRecord(SheetPoint(bg.v, MINUS), ANTIBOUND, mult, is_v_state=True)
    raise UnclassifiableRootError(
        f"state at lambda=v={bg.v} regular on both sheets (orders {plus_o}, {minus_o})"
    )


def classify_root(
    bg: Background,
    q: Perturbation,
    lam0: complex,
    mult: int = 1,
    tol: Tolerances = Tolerances(),
) -> StateRecord:
    """Lift one zero of F onto the spectral surface and name its kind."""
    lam0 = complex(lam0)
    if lam0.imag != 0.0:
        return StateRecord(SheetPoint(lam0, MINUS), RESONANCE, mult)
    x = lam0.real
    bands = band_edges(bg)
    edge = bands.nearest_edge(x)
    if abs(x - edge) <= tol.eps_edge * (1.0 + abs(edge)):
        return StateRecord(SheetPoint(x, PLUS), VIRTUAL, 1)
    if in_band_interior(bg, x, tol.eps_edge):
        raise EmbeddedRootError(f"embedded root at lambda={x} inside a band")
    if abs(x - bg.v) <= tol.eps_v(bg.v):
        return _classify_v_root(bg, q, x, mult, tol)
    if mult > 1:
        # bound states are simple, so a multiple real zero sits on the
        # second sheet
        return StateRecord(SheetPoint(x, MINUS), ANTIBOUND, mult)
    # locate the actual zero of the Jost function on each sheet near x and
    # attribute the root to the sheet whose zero it is; this stays robust
    # when a bound and an antibound state lie close together
    scale_x = 1.0 + abs(x)
    dist = {}
    for sheet in (PLUS, MINUS):
        z = _jost_zero_near(bg, q, x, sheet, tol)
        dist[sheet] = abs(z - x) if z is not None else math.inf
    near_tol = 1e-5 * scale_x
    if dist[PLUS] < dist[MINUS] and dist[PLUS] <= near_tol:
        return StateRecord(SheetPoint(x, PLUS), BOUND, mult)
    if dist[MINUS] <= near_tol:
        return StateRecord(SheetPoint(x, MINUS), ANTIBOUND, mult)
    # fall back to a relative cancellation test: |f0| measured against the
    # separate magnitudes of its two terms (robust at large |lambda|, where
    # absolute Jost values grow like the polynomial scale)
    theta, phi = perturbed_solutions(bg, q)
    rel = {}
    for sheet in (PLUS, MINUS):
        try:
            m = weyl_m(bg, SheetPoint(x, sheet))
        except ArithmeticError:
            rel[sheet] = math.inf
            continue
        num = abs(theta[0](x) + m * phi[0](x))
        den = abs(theta[0](x)) + abs(m) * abs(phi[0](x))
        rel[sheet] = num / den if den > 0 else math.inf
    if rel[PLUS] <= tol.jost_zero_rel and rel[PLUS] < rel[MINUS]:
        return StateRecord(SheetPoint(x, PLUS), BOUND, mult)
    if rel[MINUS] <= tol.jost_zero_rel:
        return StateRecord(SheetPoint(x, MINUS), ANTIBOUND, mult)
    # decisive separation between the sheets also settles the attribution,
    # even when evaluation noise keeps the smaller residual above the strict
    # threshold (large |lambda| amplifies the polynomial condition number)
    if rel[PLUS] <= 1e-4 and rel[PLUS] <= 1e-3 * rel[MINUS]:
        return StateRecord(SheetPoint(x, PLUS), BOUND, mult)
    if rel[MINUS] <= 1e-4 and rel[MINUS] <= 1e-3 * rel[PLUS]:
        return StateRecord(SheetPoint(x, MINUS), ANTIBOUND, mult)
    raise UnclassifiableRootError(
        f"root at lambda={x}: relative |f0+|={rel[PLUS]}, |f0-|={rel[MINUS]}"
    )


def _jost_zero_near(bg, q, x, sheet, tol):
    """Secant-search zero of the Jost function on one sheet near real x."""
    scale = 1.0 + abs(x)
    x0, x1 = x, x + 1e-7 * scale

    def h(t):
        return complex(jost_value(bg, q, SheetPoint(t, sheet))).real

    try:
        f0, f1 = h(x0), h(x1)
        for _ in range(60):
            if f1 == f0:
                break
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if abs(x2 - x1) > 0.1 * scale:
                return None
            if in_band_interior(bg, x2, tol.eps_edge):
                return None
            x0, f0, x1 = x1, f1, x2
            f1 = h(x1)
            if abs(x1 - x0) < 1e-14 * scale:
                break
        else:
            return None
    except (ArithmeticError, ValueError):
        return None
    return x1


def _gap_census(states, bands: BandStructure, eps_edge: float):
    census = {k: {BOUND: 0, ANTIBOUND: 0, VIRTUAL: 0} for k in (0, 1, 2)}
    for s in states:
        if s.kind == RESONANCE:
            continue
        x = complex(s.lam).real
        if s.kind == VIRTUAL:
            edge = bands.nearest_edge(x)
            if edge in (bands.lam1_minus, bands.lam1_plus):
                census[1][VIRTUAL] += s.multiplicity
            elif edge == bands.lam0_plus:
                census[0][VIRTUAL] += s.multiplicity
            else:
                census[2][VIRTUAL] += s.multiplicity
            continue
        k = bands.gap_index(x)
        if k is not None:
            census[k][s.kind] += s.multiplicity
    return census


def find_states(
    bg: Background, q: Perturbation, tol: Tolerances = Tolerances()
) -> StateReport:
    """All 2p states of the perturbed operator, classified onto the surface."""
    if q.p < 1:
        rec = unperturbed_state(bg)
        states = (rec,) if rec is not None else ()
        total = sum(s.multiplicity for s in states)
        return StateReport(states, total, _gap_census(states, band_edges(bg), tol.eps_edge))
    sp = state_polynomial(bg, q)
    root_list = roots(sp.F_exact, tol.eps_cluster)
    states = []
    for z, m in root_list:
        states.append(classify_root(bg, q, z, m, tol))
    states.sort(key=lambda s: (complex(s.lam).real, complex(s.lam).imag))
    total = sum(s.multiplicity for s in states)
    merged = any(m > 1 for _, m in root_list)
    return StateReport(
        tuple(states), total, _gap_census(states, band_edges(bg), tol.eps_edge), merged
    )


def unperturbed_state(bg: Background):
    """The single state of the unperturbed half-line operator, or None.

    The Dirichlet point lambda = v hosts a bound state for a > 1, an
    antibound state for 0 < a < 1 and a virtual state for a = 1 (where v
    coincides with an inner band edge); for v = 0, a = 1 the middle gap is
    closed and there is no state.
    """
    if bg.a > 1.0:
        return StateRecord(SheetPoint(bg.v, PLUS), BOUND, 1, is_v_state=True)
    if bg.a < 1.0:
        return StateRecord(SheetPoint(bg.v, MINUS), ANTIBOUND, 1, is_v_state=True)
    if bg.v == 0.0:
        return None
    return StateRecord(SheetPoint(bg.v, PLUS), VIRTUAL, 1, is_v_state=True)


def validate_counts(report: StateReport, bg: Background) -> ValidationResult:
    """Check the counting claims: bound+virtual >= 2, odd middle-gap census
    with at least one bound or virtual member, and an odd number >= 1 of
    antibound states mirrored between consecutive bound states in a gap."""
    violations = []
    bv = report.multiplicity_of(BOUND) + report.multiplicity_of(VIRTUAL)
    bv_ok = bv >= 2
    if not bv_ok:
        violations.append(f"bound+virtual multiplicity {bv} < 2")

    bands = band_edges(bg)
    in_middle = 0
    middle_bv = 0
    for s in report.states:
        if s.kind == RESONANCE:
            continue
        x = complex(s.lam).real
        lo, hi = bands.lam1_minus, bands.lam1_plus
        eps = 1e-9 * (1.0 + abs(hi))
        if lo - eps <= x <= hi + eps:
            in_middle += s.multiplicity
            if s.kind in (BOUND, VIRTUAL):
                middle_bv += s.multiplicity
    odd_ok = in_middle % 2 == 1
    if not odd_ok:
        violations.append(f"middle-gap census {in_middle} is even")
    middle_bv_ok = middle_bv >= 1
    if not middle_bv_ok:
        violations.append("no bound or virtual state in the middle gap closure")

    inter_ok = True
    for k in (0, 1, 2):
        bounds = sorted(
            complex(s.lam).real
            for s in report.states
            if s.kind == BOUND and bands.gap_index(complex(s.lam).real) == k
        )
        for left, right in zip(bounds, bounds[1:]):
            n_anti = sum(
                s.multiplicity
                for s in report.states
                if s.kind == ANTIBOUND and left < complex(s.lam).real < right
            )
            if n_anti % 2 != 1:
                inter_ok = False
                violations.append(
                    f"gap {k}: {n_anti} antibound between bound states "
                    f"{left:.6g} and {right:.6g}"
                )
    return ValidationResult(bv_ok, odd_ok, middle_bv_ok, inter_ok, tuple(violations))
