import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dmorse.errors import DomainError
from dmorse.model import DMParams
from dmorse.quad import gauss_legendre, integrate_panels
from dmorse.wigner import (NU_TOL, abs_line_integral, negativity, phase_space_negativity,
                           wigner0, wigner_grid, wigner_norm)


@given(st.floats(0.01, 1.95))
def test_origin_value(A):
    assert abs(wigner0(0.0, 0.0, A) - 1 / math.pi) < 1e-12


def test_parity():
    w = wigner0(0.4, 1.7, 0.5)
    assert w == wigner0(0.4, -1.7, 0.5) == wigner0(-0.4, 1.7, 0.5)


def test_grid_matches_pointwise():
    xs, ps = np.array([0.0, 0.3, 1.1]), np.array([-2.0, 0.0, 0.7, 4.0])
    W = wigner_grid(xs, ps, 0.4)
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            assert abs(W[i, j] - wigner0(x, p, 0.4)) < 1e-13


def test_negative_regions_deep_wells():
    p = DMParams(5.0, 1.0)
    W = wigner_grid(np.linspace(0, 2, 41), np.linspace(0, 8, 161), p)
    assert W.min() < 0


@pytest.mark.parametrize("A", [1.0, 0.2])
def test_normalization(A):
    assert abs(wigner_norm(A) - 1.0) < 1e-6


def test_quadrant_normalization_equals_full():
    assert abs(wigner_norm(0.5, quadrant=True) - wigner_norm(0.5, quadrant=False)) < 1e-6


def test_nc_baseline():
    r = negativity(DMParams.from_A(1.0))
    assert abs(r.eta_nc - 0.009) <= 1e-3
    assert r.converged and r.error_estimate >= 0


def test_increasing_in_alpha():
    vals = [negativity(DMParams(a, 1.0), tol=1e-3).eta_nc for a in np.linspace(1, 5, 8)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_result_invariants():
    r = negativity(0.3)
    assert r.nu >= -1e-6
    assert 0 <= r.eta_nc < 1
    assert abs(r.eta_nc - r.nu / (r.nu + 1)) < 1e-15
    assert abs(r.abs_integral - 1 - r.nu) < 1e-15


def test_nc_monotone_in_nu():
    rs = sorted((negativity(A, tol=1e-3) for A in (0.05, 0.3, 0.8, 1.5)), key=lambda r: r.nu)
    assert all(a.eta_nc <= b.eta_nc for a, b in zip(rs, rs[1:]))


def test_gaussian_harness():
    def w(x, p):
        return np.exp(-x * x - np.asarray(p) ** 2) / math.pi
    assert abs(phase_space_negativity(w, 7.0, 7.0, panel_width=0.5, step=0.1)) < 1e-8


def test_abs_line_integral_sine():
    # int_0^{2 pi} |sin p| dp = 4
    assert abs(abs_line_integral(np.sin, 0.0, 2 * math.pi) - 4.0) < 1e-10


def test_full_plane_generic_route_agrees():
    A = 1.0
    r = negativity(A)

    def w(x, p):
        return wigner_grid([x], np.asarray(p), A)[0]

    nu_full = phase_space_negativity(w, r.x_cutoff, r.p_cutoff, panel_width=0.25, step=0.05)
    assert abs(nu_full - r.nu) < 1e-6


@pytest.mark.parametrize("A", [1.0, 0.05])
def test_p_tail_below_error_estimate(A):
    """|W0| mass between p_cutoff and 2 p_cutoff is inside the reported error."""
    r = negativity(A)
    P = r.p_cutoff

    def strip(xs):
        return np.array([abs_line_integral(lambda p: wigner_grid([x], p, A)[0], P, 2 * P, 0.1) for x in xs])

    mass = 4 * integrate_panels(strip, 0.0, r.x_cutoff, gauss_legendre(16), 1.0).value
    assert mass <= max(r.error_estimate, NU_TOL)


@settings(max_examples=5)
@given(st.floats(1.0, 4.0), st.floats(0.5, 3.0))
def test_collapse(alpha, x0b):
    p = DMParams(alpha, 1.0)
    q = DMParams.from_A(p.A, x0b)
    assert abs(negativity(p, tol=1e-3).eta_nc - negativity(q, tol=1e-3).eta_nc) <= 1e-12


def test_domain():
    with pytest.raises(DomainError):
        negativity(0.0)
    with pytest.raises(DomainError):
        wigner0(0.0, 0.0, -1.0)
