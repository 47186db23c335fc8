"""State classification onto the two-sheeted surface."""

import math

import numpy as np
import pytest

from nanospec.background import MINUS, PLUS, Background
from nanospec.closedform import p1_states
from nanospec.jost import Perturbation
from nanospec.oracle import bound_state_oracle
from nanospec.states import (
    ANTIBOUND,
    BOUND,
    RESONANCE,
    VIRTUAL,
    Tolerances,
    find_states,
    resolvent_probe,
    unperturbed_state,
    validate_counts,
)


def _lams(report):
    return [complex(s.lam) for s in report.states for _ in range(s.multiplicity)]


def test_unperturbed_trichotomy():
    assert unperturbed_state(Background(1.0, 2.0)).kind == BOUND
    assert unperturbed_state(Background(1.0, 0.5)).kind == ANTIBOUND
    assert unperturbed_state(Background(1.0, 1.0)).kind == VIRTUAL
    assert unperturbed_state(Background(0.0, 1.0)) is None
    assert unperturbed_state(Background(1.0, 2.0)).point.sheet == PLUS
    assert unperturbed_state(Background(1.0, 0.5)).point.sheet == MINUS


def test_resolvent_probe_orders():
    q = Perturbation()
    assert resolvent_probe(Background(1.0, 2.0), q, 1.0, PLUS) == 1.0
    assert resolvent_probe(Background(1.0, 0.5), q, 1.0, MINUS) == 1.0
    assert resolvent_probe(Background(1.0, 0.5), q, 1.0, PLUS) == 0.0
    assert resolvent_probe(Background(1.0, 1.0), q, 1.0, PLUS) == 0.5


def test_p1_positions_match_closed_form():
    rng = np.random.default_rng(11)
    for _ in range(25):
        v = rng.uniform(-2, 2)
        a = rng.uniform(0.1, 2)
        q1 = rng.uniform(-3, 3)
        if q1 == 0:
            q1 = 1.0
        rep = find_states(Background(v, a), Perturbation([q1]))
        got = sorted(z.real for z in _lams(rep))
        lo, hi = p1_states(v, a, q1)
        assert abs(got[0] - lo) < 1e-9 and abs(got[1] - hi) < 1e-9


def test_p1_kinds_match_truncation_oracle():
    # classification is faithful to the operator: bound states coincide with
    # the truncation eigenvalues, for a point where one of the two roots is
    # antibound and for a point where both are bound
    for (v, a, q1) in [(1.0, 1.0, 1.0), (1.0, 2.0, 0.1), (0.5, 1.5, -2.0)]:
        bg, q = Background(v, a), Perturbation([q1])
        rep = find_states(bg, q)
        bound = sorted(
            complex(s.lam).real for s in rep.states if s.kind == BOUND
        )
        oracle = bound_state_oracle(bg, q, 3000)
        assert len(bound) == len(oracle)
        for x, y in zip(bound, sorted(oracle)):
            assert abs(x - y) < 1e-6


def test_p2_known_bound_set():
    # v=1, a=1, q=(0, 1): two bound states and nothing else real-bound
    rep = find_states(Background(1.0, 1.0), Perturbation([0.0, 1.0]))
    bound = sorted(complex(s.lam).real for s in rep.states if s.kind == BOUND)
    assert len(bound) == 2
    assert abs(bound[0] - (0.5 - math.sqrt(5) / 2 + 1)) < 1e-6 or abs(
        bound[0] + 0.8019377358048383
    ) < 1e-6
    oracle = bound_state_oracle(Background(1.0, 1.0), Perturbation([0.0, 1.0]), 3000)
    assert np.allclose(bound, sorted(oracle), atol=1e-6)


def test_total_multiplicity_2p_and_conjugate_symmetry():
    rng = np.random.default_rng(23)
    for _ in range(30):
        p = int(rng.integers(1, 7))
        v = rng.uniform(-2, 2)
        a = rng.uniform(0.1, 2)
        q = list(rng.uniform(-3, 3, p))
        if q[-1] == 0:
            q[-1] = 1.0
        rep = find_states(Background(v, a), Perturbation(q))
        assert rep.total_multiplicity == 2 * p
        res = [complex(s.lam) for s in rep.states if s.kind == RESONANCE]
        for z in res:
            assert any(abs(w - z.conjugate()) < 1e-9 * (1 + abs(z)) for w in res)
        for s in rep.states:
            if s.kind == RESONANCE:
                assert s.point.sheet == MINUS


def test_validate_counts_structure():
    bg = Background(1.0, 1.0)
    rep = find_states(bg, Perturbation([0.0, 1.0]))
    vr = validate_counts(rep, bg)
    assert vr.middle_gap_odd
    assert vr.interlacing


def test_resonance_pair_reported_for_small_q2():
    # v=1, a=1, q=(0, q2) with small q2: D < 0 regime has a conjugate pair
    rep = find_states(Background(1.0, 1.0), Perturbation([0.0, 0.1]))
    res = rep.by_kind(RESONANCE)
    assert len(res) == 2
    assert rep.total_multiplicity == 4


def test_cluster_merged_flag_default_false():
    rep = find_states(Background(1.0, 1.0), Perturbation([1.0]))
    assert rep.cluster_merged is False


def test_p0_report():
    rep = find_states(Background(1.0, 2.0), Perturbation())
    assert rep.total_multiplicity == 1
    assert rep.states[0].kind == BOUND
    rep = find_states(Background(0.0, 1.0), Perturbation())
    assert rep.total_multiplicity == 0
