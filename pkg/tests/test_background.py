"""Band structure, Floquet multipliers and Weyl functions of the
unperturbed two-periodic chain."""

import math

import numpy as np
import pytest

from nanospec.background import (
    MINUS,
    PLUS,
    Background,
    OnCutError,
    SheetPoint,
    band_edges,
    floquet_multipliers,
    fundamental_sequence,
    in_band_interior,
    lyapunov,
    weyl_m,
)


def test_band_edges_formulas():
    bg = Background(1.0, 2.0)
    bs = band_edges(bg)
    outer = math.sqrt(1.0 + 9.0)
    inner = math.sqrt(1.0 + 1.0)
    assert np.allclose(bs.edges, (-outer, -inner, inner, outer))
    (lo1, hi1), (lo2, hi2) = bs.bands
    assert lo1 == -outer and hi1 == -inner and lo2 == inner and hi2 == outer


def test_lyapunov_at_edges_is_pm_one():
    bg = Background(0.7, 1.4)
    bs = band_edges(bg)
    for e in bs.edges:
        assert abs(abs(lyapunov(bg, e)) - 1.0) < 1e-12


def test_middle_gap_closed_iff_a_one():
    assert band_edges(Background(0.0, 1.0)).middle_gap_closed
    assert not band_edges(Background(0.5, 1.0)).middle_gap_closed
    assert not band_edges(Background(0.0, 1.5)).middle_gap_closed


def test_in_band_interior():
    bg = Background(1.0, 2.0)
    assert in_band_interior(bg, 2.0)
    assert not in_band_interior(bg, 0.0)
    assert not in_band_interior(bg, 100.0)


def test_floquet_multipliers_product_one_and_modulus():
    bg = Background(0.9, 1.3)
    for x in (-5.0, 0.4, 7.7):
        xi_p, xi_other = floquet_multipliers(bg, SheetPoint(x, PLUS))
        xi_m, _ = floquet_multipliers(bg, SheetPoint(x, MINUS))
        assert abs(xi_p * xi_m - 1.0) < 1e-12
        assert abs(xi_p * xi_other - 1.0) < 1e-12
        assert abs(xi_p) <= 1.0 <= abs(xi_m)


def test_floquet_multiplier_at_v():
    # xi_+^2(v) = -a for a < 1 and -1/a for a > 1
    for a in (0.5, 2.0):
        bg = Background(0.8, a)
        xi_p, _ = floquet_multipliers(bg, SheetPoint(bg.v, PLUS))
        expected = -a if a < 1 else -1.0 / a
        assert abs(xi_p - expected) < 1e-10


def test_on_cut_raises():
    bg = Background(1.0, 2.0)
    with pytest.raises(OnCutError):
        floquet_multipliers(bg, SheetPoint(2.0, PLUS))


def test_weyl_m_eigenvector_property():
    # (1, m) is a monodromy eigenvector: m = (xi^2 + a)/(lam - v)
    bg = Background(0.6, 1.7)
    for x in (-4.0, 0.2, 5.5):
        for sheet in (PLUS, MINUS):
            m = weyl_m(bg, SheetPoint(x, sheet))
            xi, _ = floquet_multipliers(bg, SheetPoint(x, sheet))
            assert abs(m - (xi + bg.a) / (x - bg.v)) < 1e-10


def test_fundamental_recursion():
    # theta, phi satisfy a_{n-1} y_{n-1} + a_n y_{n+1} + v_n y_n = lam y_n
    bg = Background(0.5, 1.2)
    seq = fundamental_sequence(bg, 6)
    lam = 0.37
    for n in range(1, 5):
        a_prev = bg.offdiag(n - 1)
        a_next = bg.offdiag(n)
        vn = bg.diag(n)
        for comp in (0, 1):
            y = [seq[k][comp](lam) for k in range(6)]
            assert abs(a_prev * y[n - 1] + a_next * y[n + 1] + vn * y[n] - lam * y[n]) < 1e-12


def test_fundamental_initial_conditions():
    bg = Background(0.5, 1.2)
    seq = fundamental_sequence(bg, 2)
    theta0, phi0 = seq[0]
    theta1, phi1 = seq[1]
    assert theta0.coeffs == (1.0,) and theta1.is_zero
    assert phi0.is_zero and phi1.coeffs == (1.0,)


def test_invalid_background():
    with pytest.raises(ValueError):
        Background(1.0, 0.0)
    with pytest.raises(ValueError):
        Background(1.0, -2.0)
