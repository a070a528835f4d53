"""Entanglement potential: the ground state mixed with vacuum on a 50:50 beam splitter.

The Fock reference is the unit-frequency oscillator in the y-coordinate
(Hermite functions, [x, p] = i), the same quadrature convention as the
covariance matrix. EP magnitudes depend on this choice; orderings and
limits do not.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .model import DMParams, psi0
from .quad import composite_nodes, gauss_legendre
from .specfun import SpecFunOptions, truncation_point

log = logging.getLogger(__name__)

LEAK_WARN = 1e-6
N_DEFAULT = 64
N_MAX = 256
EP_CONVERGED = 1e-5


@dataclass(frozen=True, eq=False)
class FockAmplitudes:
    c: np.ndarray
    N: int
    leaked_mass: float

    @property
    def truncation_warning(self) -> bool:
        return self.leaked_mass > LEAK_WARN


@dataclass(frozen=True, eq=False)
class EPResult:
    entropy: float
    schmidt: np.ndarray
    N: int
    leaked_mass: float
    converged: bool


def hermite_functions(N: int, y) -> np.ndarray:
    """phi_0..phi_N at the points y, shape (N+1, len(y)), by the stable recurrence."""
    y = np.asarray(y, dtype=float)
    out = np.empty((N + 1,) + y.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * y * y)
    if N >= 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for n in range(1, N):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * y * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def fock_expand(params, N: int = N_DEFAULT, opts: SpecFunOptions | None = None) -> FockAmplitudes:
    """Overlaps c_n = <n|psi0> for n = 0..N; odd entries vanish by parity."""
    if N < 2 or N % 2:
        raise DomainError(f"N must be an even integer >= 2, got {N!r}")
    A = params.A if isinstance(params, DMParams) else float(params)
    opts = opts or SpecFunOptions()
    # psi0 support from the Bessel floor; Hermite functions reach sqrt(2N+1)
    Y = max(0.5 * truncation_point(A, opts) + 0.5, math.sqrt(2 * N + 1) + 8.0)
    Y = min(Y, 36.0)
    width = min(0.125, 0.5 / math.sqrt(2 * N + 1))
    y, w = composite_nodes(0.0, Y, gauss_legendre(32), math.ceil(Y / width))
    phi = hermite_functions(N, y)
    overlap = 2.0 * (phi[0::2] @ (w * psi0(y, A, opts)))
    c = np.zeros(N + 1)
    c[0::2] = overlap
    leaked = 1.0 - float(np.sum(c * c))
    if leaked > LEAK_WARN:
        log.warning("Fock truncation N=%d leaves mass %.3g outside the basis (A=%g)", N, leaked, A)
    return FockAmplitudes(c, N, leaked)


def _log_split(n_max):
    """log sqrt(binom(k+l, k) 2^-(k+l)) on the (n_max+1)^2 grid."""
    k = np.arange(n_max + 1)
    lg = np.array([math.lgamma(i + 1) for i in range(2 * n_max + 1)])
    K, L = np.meshgrid(k, k, indexing="ij")
    n = K + L
    return 0.5 * (lg[n] - lg[K] - lg[L] - n * math.log(2.0)), n


def beam_splitter_5050(f) -> np.ndarray:
    """Output amplitudes M[k, l] for k photons in mode A and l in mode B.

    M[k, l] = c_{k+l} sqrt(binom(k+l, k)) 2^{-(k+l)/2}, restricted to
    k + l <= N, with real positive transmission/reflection.
    """
    c = np.asarray(f.c if isinstance(f, FockAmplitudes) else f, dtype=float)
    N = len(c) - 1
    logw, n = _log_split(N)
    M = np.zeros((N + 1, N + 1))
    inside = n <= N
    M[inside] = c[n[inside]] * np.exp(logw[inside])
    return M


def _round_robin(n):
    """Pairings of 0..n-1 (n even) so every pair meets once in n-1 rounds."""
    idx = list(range(n))
    for _ in range(n - 1):
        yield np.array(idx[: n // 2]), np.array(idx[n // 2:][::-1])
        idx = [idx[0]] + [idx[-1]] + idx[1:-1]


def jacobi_singular_values(M, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Singular values of a real matrix by one-sided (Hestenes) Jacobi rotations.

    Column pairs are orthogonalized in round-robin order, n/2 disjoint pairs
    at a time, until every pair satisfies |u_i . u_j| <= tol |u_i| |u_j|.
    Returned in descending order.
    """
    U = np.array(M, dtype=float)
    if U.ndim != 2:
        raise DomainError("expected a 2-D matrix")
    if U.shape[0] < U.shape[1]:
        U = U.T.copy()
    n = k = U.shape[1]
    if n % 2:
        U = np.hstack([U, np.zeros((U.shape[0], 1))])
        n += 1
    # columns at rounding level of the whole matrix count as zero
    floor = (np.finfo(float).eps * np.linalg.norm(U)) ** 2
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for i, j in _round_robin(n):
            ui, uj = U[:, i], U[:, j]
            a = np.einsum("ij,ij->j", ui, ui)
            b = np.einsum("ij,ij->j", uj, uj)
            c = np.einsum("ij,ij->j", ui, uj)
            act = (np.abs(c) > tol * np.sqrt(a * b)) & (np.minimum(a, b) > floor)
            if not act.any():
                continue
            rotated = True
            i, j, a, b, c = i[act], j[act], a[act], b[act], c[act]
            zeta = (b - a) / (2.0 * c)
            t = np.sign(zeta) / (np.abs(zeta) + np.hypot(1.0, zeta))
            t[zeta == 0] = 1.0
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = cs * t
            ui, uj = U[:, i].copy(), U[:, j]
            U[:, i] = cs * ui - sn * uj
            U[:, j] = sn * ui + cs * uj
        if not rotated:
            return np.sort(np.sqrt(np.einsum("ij,ij->j", U, U)))[::-1][:k]
    raise ConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps",
                           best=np.sort(np.linalg.norm(U, axis=0))[::-1][:k], sweeps=max_sweeps)


def entanglement_entropy(M, N: int | None = None, leaked_mass: float = 0.0) -> EPResult:
    """von Neumann entropy (nats) of the reduced state of a bipartite pure amplitude matrix."""
    M = np.asarray(M, dtype=float)
    mass = float(np.sum(M * M))
    if not mass > 0:
        raise DomainError("amplitude matrix has zero norm")
    sv = jacobi_singular_values(M)
    lam = sv * sv / mass
    nz = lam[lam > 0]
    S = float(-np.sum(nz * np.log(nz)))
    return EPResult(max(S, 0.0), lam, N if N is not None else M.shape[0] - 1, leaked_mass, True)


def ep(params, N: int = N_DEFAULT, opts: SpecFunOptions | None = None, auto: bool = True,
       N_max: int = N_MAX) -> EPResult:
    """Entanglement potential of the ground state.

    With ``auto`` the truncation is doubled from N until the entropy moves by
    less than 1e-5 or N_max is reached; ``converged`` records which happened.
    With ``auto=False`` the entropy at exactly N is returned and
    ``converged`` compares it against 2N.
    """
    def at(n):
        f = fock_expand(params, n, opts)
        r = entanglement_entropy(beam_splitter_5050(f), n, f.leaked_mass)
        return r

    cur = at(N)
    if not auto:
        nxt = at(2 * N)
        return EPResult(cur.entropy, cur.schmidt, N, cur.leaked_mass,
                        abs(nxt.entropy - cur.entropy) < EP_CONVERGED)
    while 2 * cur.N <= N_max:
        nxt = at(2 * cur.N)
        if abs(nxt.entropy - cur.entropy) < EP_CONVERGED:
            return EPResult(nxt.entropy, nxt.schmidt, nxt.N, nxt.leaked_mass, True)
        cur = nxt
    if cur.leaked_mass > LEAK_WARN:
        log.warning("EP not converged at N=%d (leaked mass %.3g)", cur.N, cur.leaked_mass)
    return EPResult(cur.entropy, cur.schmidt, cur.N, cur.leaked_mass, False)
