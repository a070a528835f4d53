import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dmorse.entangle import (beam_splitter_5050, entanglement_entropy, ep, fock_expand, hermite_functions,
                             jacobi_singular_values)
from dmorse.errors import DomainError
from dmorse.model import DMParams
from dmorse.quad import integrate_panels


@pytest.mark.parametrize("A", [0.01, 0.3, 1.0, 1.8])
def test_parity_and_sign(A):
    f = fock_expand(A, 32)
    assert np.all(f.c[1::2] == 0.0)
    assert f.c[0] > 0
    assert np.sum(f.c ** 2) <= 1 + 1e-9 and f.leaked_mass >= -1e-9


def test_completeness_at_threshold():
    assert abs(np.sum(fock_expand(1.0, 64).c ** 2) - 1) < 1e-8


def test_hermite_orthonormal():
    phi = lambda y: hermite_functions(12, y)
    G = np.array([[integrate_panels(lambda y: phi(y)[i] * phi(y)[j], -12, 12).value for j in range(13)]
                  for i in range(13)])
    assert np.max(np.abs(G - np.eye(13))) < 1e-13


def test_bad_truncation():
    for N in (0, 3, 7):
        with pytest.raises(DomainError):
            fock_expand(0.5, N)


def test_vacuum_and_single_photon_maps():
    M = beam_splitter_5050([1.0, 0.0, 0.0])
    assert M[0, 0] == 1 and np.count_nonzero(M) == 1
    M = beam_splitter_5050([0.0, 1.0, 0.0])
    assert abs(M[1, 0] - 1 / math.sqrt(2)) < 1e-15 and abs(M[0, 1] - 1 / math.sqrt(2)) < 1e-15


def test_beam_splitter_unitary_on_truncation():
    f = fock_expand(0.5, 32)
    assert abs(np.sum(beam_splitter_5050(f) ** 2) - np.sum(f.c ** 2)) < 1e-12


def test_single_photon_entropy():
    r = entanglement_entropy(beam_splitter_5050([0.0, 1.0]))
    assert abs(r.entropy - math.log(2)) < 1e-10
    assert np.allclose(sorted(r.schmidt)[-2:], [0.5, 0.5], atol=1e-12)


def test_product_state_entropy():
    u, v = np.array([0.6, 0.8, 0.0]), np.array([0.2, 0.5, 0.3])
    assert entanglement_entropy(np.outer(u, v)).entropy < 1e-12


def test_zero_matrix():
    with pytest.raises(DomainError):
        entanglement_entropy(np.zeros((3, 3)))


@given(arrays(float, (5, 4), elements=st.floats(-1, 1)))
def test_transpose_symmetry(M):
    if np.sum(M * M) < 1e-6:
        return
    assert abs(entanglement_entropy(M).entropy - entanglement_entropy(M.T).entropy) < 1e-10


def _char_poly_coefficients(M):
    """Coefficients (e1, e2, e3) of det(lambda - B) = lambda^3 - e1 lambda^2 + e2 lambda - e3, B = M M^T."""
    B = M @ M.T
    t = np.trace(B)
    return t, 0.5 * (t * t - np.trace(B @ B)), np.linalg.det(M) ** 2


@given(arrays(float, (3, 3), elements=st.floats(-2, 2)))
def test_jacobi_vs_characteristic_polynomial(M):
    # the squared singular values are the roots of the characteristic polynomial of
    # M M^T, so their elementary symmetric functions must reproduce its coefficients
    # (root extraction itself is ill-conditioned at repeated eigenvalues)
    lam = jacobi_singular_values(M) ** 2
    e1, e2, e3 = _char_poly_coefficients(M)
    s = max(1.0, e1)
    assert abs(lam.sum() - e1) < 1e-10 * s
    assert abs(lam[0] * lam[1] + lam[0] * lam[2] + lam[1] * lam[2] - e2) < 1e-10 * s ** 2
    assert abs(lam.prod() - e3) < 1e-10 * s ** 3


def test_jacobi_vs_numpy_svd():
    rng = np.random.default_rng(7)
    for shape in ((6, 6), (9, 4), (4, 9), (33, 33)):
        M = rng.standard_normal(shape)
        assert np.max(np.abs(jacobi_singular_values(M) - np.linalg.svd(M, compute_uv=False))) < 1e-12


def test_schmidt_and_entropy_invariants():
    r = ep(0.2)
    assert r.converged and r.entropy >= 0
    assert np.all(r.schmidt >= 0) and abs(np.sum(r.schmidt) - 1) < 1e-6


def test_local_phase_invariance():
    """A phase rotation c_n -> i^n c_n (real here: (-1)^(n/2)) or a global sign keeps the spectrum."""
    c = fock_expand(0.1, 48).c
    base = entanglement_entropy(beam_splitter_5050(c)).entropy
    rot = np.array([(-1) ** (n // 2) for n in range(len(c))]) * c
    assert abs(entanglement_entropy(beam_splitter_5050(rot)).entropy - base) < 1e-10
    assert abs(entanglement_entropy(beam_splitter_5050(-c)).entropy - base) < 1e-10


@pytest.mark.xfail(strict=True, reason="flipping one c_n is not a local unitary; it changes the input state "
                                        "and hence the output entanglement")
def test_single_sign_flip_invariance():
    c = fock_expand(0.1, 48).c
    base = entanglement_entropy(beam_splitter_5050(c)).entropy
    for n in range(0, 8, 2):
        d = c.copy()
        d[n] = -d[n]
        assert abs(entanglement_entropy(beam_splitter_5050(d)).entropy - base) < 1e-10


def test_truncation_monotonic():
    A = 0.02
    runs = [ep(A, N, auto=False) for N in (8, 16, 32, 64)]
    leaks = [r.leaked_mass for r in runs]
    assert all(a > b for a, b in zip(leaks, leaks[1:]))
    diffs = [abs(a.entropy - b.entropy) for a, b in zip(runs, runs[1:])]
    assert all(a > b for a, b in zip(diffs, diffs[1:]))


def test_truncation_warning_flag():
    f = fock_expand(0.001, 4)
    assert f.truncation_warning


def test_vacuum_input_zero():
    assert entanglement_entropy(beam_splitter_5050([1.0] + [0.0] * 8)).entropy == 0.0


def test_ordering_in_x0():
    e = [ep(DMParams(2.0, x0)).entropy for x0 in (1.0, 2.0, 3.0)]
    assert e[2] > e[1] > e[0]


@pytest.mark.xfail(strict=True, reason="in the unit-frequency y-basis the ground state is closest to vacuum "
                                        "near A ~ 0.25, so EP has a minimum near alpha ~ 2 at x0 = 1")
def test_increasing_in_alpha():
    e = [ep(DMParams(a, 1.0)).entropy for a in np.linspace(1, 5, 20)]
    assert all(a < b for a, b in zip(e, e[1:]))


def test_fixed_truncation_collapse():
    p = DMParams(2.5, 1.0)
    q = DMParams.from_A(p.A, 2.0)
    assert abs(ep(p, 64, auto=False).entropy - ep(q, 64, auto=False).entropy) <= 1e-10
