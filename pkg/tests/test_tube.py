"""Channel decomposition of the nanotube Hamiltonian."""

import math

import numpy as np
import pytest

from nanospec.jost import Perturbation
from nanospec.tube import (
    ChannelError,
    TubeConfig,
    channels,
    field_param,
    field_sweep,
    tube_states,
)


def test_field_param():
    assert field_param(0.0, 5) == 0.0
    assert abs(field_param(1.0, 1)) < 1e-15  # cot(pi/2) = 0
    # monotone increasing in N for fixed |B|
    vals = [field_param(1.0, n) for n in range(2, 8)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_channels_n3_b0():
    chs = channels(3, 0.0)
    assert sorted(round(c.a, 12) for c in chs) == [1.0, 1.0, 2.0]
    assert not any(c.degenerate for c in chs)


def test_channel_degenerate_at_critical_flux():
    N = 5
    b = math.pi * (0.5 - 1.0 / N)
    chs = channels(N, b)
    assert sum(1 for c in chs if c.degenerate) == 1


def test_channels_cyclic_shift():
    N = 4
    a1 = [round(c.a, 12) for c in channels(N, 0.2)]
    a2 = [round(c.a, 12) for c in channels(N, 0.2 + math.pi / N)]
    assert a2 == a1[-1:] + a1[:-1] or sorted(a1) == sorted(a2)


def test_channels_reflection():
    N = 5
    a_pos = sorted(round(c.a, 12) for c in channels(N, 0.3))
    a_neg = sorted(round(c.a, 12) for c in channels(N, -0.3))
    assert a_pos == a_neg


def test_b_normalization():
    cfg = TubeConfig(N=4, b=0.1 + math.pi / 4, v=0.0)
    assert abs(cfg.b - 0.1) < 1e-12
    assert abs(cfg.b_raw - (0.1 + math.pi / 4)) < 1e-15


def test_config_from_field_magnitude():
    cfg = TubeConfig(N=3, B_magnitude=0.0, v=1.0)
    assert cfg.b == 0.0


def test_tube_states_flat_bands_present():
    N = 3
    b = math.pi * (0.5 - 1.0 / N)
    rep = tube_states(TubeConfig(N=N, b=b, v=1.0))
    root2 = math.sqrt(2.0)
    assert any(abs(x - root2) < 1e-12 for x in rep.pp_spectrum)
    assert any(abs(x + root2) < 1e-12 for x in rep.pp_spectrum)
    assert any(abs(x - 1.0) < 1e-9 for x in rep.pp_spectrum)


def test_tube_states_flat_bands_absent_nondegenerate():
    rep = tube_states(TubeConfig(N=3, b=0.1, v=1.0))
    root2 = math.sqrt(2.0)
    assert not any(abs(abs(x) - root2) < 1e-9 for x in rep.pp_spectrum)


def test_tube_total_multiplicity_2p_per_channel():
    q = Perturbation([0.5, -1.0])
    rep = tube_states(TubeConfig(N=4, b=0.2, v=0.5, q=q))
    for ch in rep.channels:
        assert not ch.spec.degenerate
        assert ch.report.total_multiplicity == 4


def test_spectrum_periodicity_in_b():
    q = Perturbation([1.0])
    r1 = tube_states(TubeConfig(N=3, b=0.2, v=0.5, q=q))
    r2 = tube_states(TubeConfig(N=3, b=0.2 + math.pi / 3, v=0.5, q=q))
    s1 = sorted(complex(x).real for x in r1.pp_spectrum)
    s2 = sorted(complex(x).real for x in r2.pp_spectrum)
    assert np.allclose(s1, s2, atol=1e-10)


def test_field_sweep_labels_continuous():
    cfg = TubeConfig(N=3, b=0.0, v=1.0, q=Perturbation([1.0]))
    grid = [0.05, 0.1, 0.15]
    out = field_sweep(cfg, grid)
    assert len(out) == 3
    labels0 = set(out[0][2].values())
    labels1 = set(out[1][2].values())
    assert labels0 == labels1  # trajectories continue, no new labels


def test_field_sweep_empty_grid_rejected():
    with pytest.raises(ValueError):
        field_sweep(TubeConfig(N=3, b=0.0, v=1.0), [])


def test_invalid_config():
    with pytest.raises(ValueError):
        TubeConfig(N=0, b=0.1)
    with pytest.raises(ValueError):
        TubeConfig(N=3)
