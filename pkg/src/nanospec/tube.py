"""Magnetic channel decomposition of the zigzag half-nanotube Hamiltonian.

The Hamiltonian with N hexagons around the cylinder and reduced magnetic
flux b is unitarily equivalent to the direct sum of N half-line Jacobi
channels with even-site coupling a_k = 2|cos(b + pi k/N)|.  Channels with
c_k = 0 degenerate into decoupled 2x2 blocks (flat bands); the rest
delegate to the general state machinery.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .background import Background, band_edges
from .closedform import flat_band_spectrum
from .jost import Perturbation
from .states import StateReport, Tolerances, find_states

__all__ = [
    "DEG_EPS",
    "NEAR_DEG_EPS",
    "TubeConfig",
    "ChannelSpec",
    "ChannelResult",
    "TubeReport",
    "ChannelError",
    "field_param",
    "channels",
    "tube_states",
    "field_sweep",
]

DEG_EPS = 1e-12
NEAR_DEG_EPS = 1e-4


class ChannelError(RuntimeError):
    """Error in one channel computation, tagged with the channel index."""

    def __init__(self, k: int, cause: Exception):
        super().__init__(f"channel k={k}: {cause}")
        self.k = k
        self.cause = cause


def _worker_count() -> int:
    raw = os.environ.get("NANOSPEC_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def field_param(B_magnitude: float, N: int) -> float:
    """Reduced flux b = (3|B|/16) cot(pi/(2N))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return (3.0 * abs(B_magnitude) / 16.0) * (1.0 / math.tan(math.pi / (2 * N)))


@dataclass(frozen=True)
class TubeConfig:
    """Tube geometry and perturbation; b is normalized into [0, pi/N)."""

    N: int
    b: float
    v: float
    q: Perturbation = field(default_factory=Perturbation)
    b_raw: float = None

    def __init__(self, N, b=None, v=0.0, q=None, B_magnitude=None):
        if N < 1:
            raise ValueError("N must be >= 1")
        if (b is None) == (B_magnitude is None):
            if b is None:
                raise ValueError("specify exactly one of b or B_magnitude")
        if b is None:
            b = field_param(B_magnitude, N)
        period = math.pi / N
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "b_raw", float(b))
        object.__setattr__(self, "b", float(b) % period)
        object.__setattr__(self, "v", float(v))
        object.__setattr__(self, "q", q if q is not None else Perturbation())


@dataclass(frozen=True)
class ChannelSpec:
    k: int
    c_k: float
    a: float
    degenerate: bool
    near_degenerate: bool = False


@dataclass(frozen=True)
class ChannelResult:
    spec: ChannelSpec
    report: StateReport = None
    flat_spectrum: tuple = None  # (discrete eigenvalues, flat-band pair)


@dataclass(frozen=True)
class TubeReport:
    config: TubeConfig
    channels: tuple
    ac_spectrum: tuple  # union of per-channel band intervals
    pp_spectrum: tuple  # aggregated real point spectrum

    def channel(self, k: int) -> ChannelResult:
        for ch in self.channels:
            if ch.spec.k == k:
                return ch
        raise KeyError(k)


def channels(N: int, b: float):
    """Channel coefficients c_k = cos(b + pi k/N), a_k = 2|c_k|, k = 1..N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    out = []
    for k in range(1, N + 1):
        c = math.cos(b + math.pi * k / N)
        a = 2.0 * abs(c)
        out.append(
            ChannelSpec(
                k=k,
                c_k=c,
                a=a,
                degenerate=a <= DEG_EPS,
                near_degenerate=DEG_EPS < a < NEAR_DEG_EPS,
            )
        )
    return out


def _run_channel(cfg: TubeConfig, spec: ChannelSpec, tol: Tolerances) -> ChannelResult:
    try:
        if spec.degenerate:
            discrete, flat = flat_band_spectrum(cfg.v, cfg.q)
            return ChannelResult(spec, flat_spectrum=(tuple(discrete), flat))
        report = find_states(Background(cfg.v, spec.a), cfg.q, tol)
        return ChannelResult(spec, report=report)
    except Exception as e:  # error surfaces with the channel index attached
        raise ChannelError(spec.k, e) from e


def tube_states(cfg: TubeConfig, tol: Tolerances = Tolerances()) -> TubeReport:
    """Per-channel states plus aggregated ac and point spectra."""
    specs = channels(cfg.N, cfg.b)
    workers = min(_worker_count(), len(specs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: _run_channel(cfg, s, tol), specs))
    else:
        results = [_run_channel(cfg, s, tol) for s in specs]

    ac = []
    pp = []
    for res in results:
        if res.spec.degenerate:
            discrete, flat = res.flat_spectrum
            pp.extend(discrete)
            pp.extend(flat)
            continue
        bands = band_edges(Background(cfg.v, res.spec.a)).bands
        ac.extend(bands)
        for s in res.report.states:
            lam = complex(s.lam)
            if lam.imag == 0 and s.kind == "bound":
                pp.extend([lam.real] * s.multiplicity)
    ac.sort()
    pp.sort()
    return TubeReport(cfg, tuple(results), tuple(ac), tuple(pp))


def field_sweep(cfg: TubeConfig, b_grid, tol: Tolerances = Tolerances()):
    """tube_states along a b-grid, with nearest-neighbor trajectory labels.

    Returns a list of (b, TubeReport, trajectories) where trajectories maps
    each state of the report to a stable integer label continued from the
    previous grid point by nearest-neighbor matching of (channel, position).
    """
    b_grid = list(b_grid)
    if not b_grid:
        raise ValueError("b grid must be nonempty")
    out = []
    prev = None  # list of (label, k, position)
    next_label = 0
    for b in b_grid:
        step_cfg = TubeConfig(cfg.N, b=b, v=cfg.v, q=cfg.q)
        report = tube_states(step_cfg, tol)
        current = []
        for ch in report.channels:
            if ch.report is None:
                continue
            for s in ch.report.states:
                current.append((ch.spec.k, complex(s.lam), s))
        labels = {}
        used = set()
        for idx, (k, lam, s) in enumerate(current):
            best = None
            if prev:
                candidates = [
                    (abs(lam - plam), plabel)
                    for (plabel, pk, plam) in prev
                    if pk == k and plabel not in used
                ]
                if candidates:
                    d, plabel = min(candidates)
                    if d < 1.0:
                        best = plabel
            if best is None:
                best = next_label
                next_label += 1
            used.add(best)
            labels[idx] = best
        out.append((b, report, {i: labels[i] for i in labels}))
        prev = [(labels[i], current[i][0], current[i][1]) for i in labels]
    return out
