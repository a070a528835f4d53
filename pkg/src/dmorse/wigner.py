r"""Ground-state Wigner function and its integrated negativity.

The ground-state Wigner function is

.. math::
    W_0(x, p) = \frac{K_{ip}(A\cosh 2x)}{\pi K_0(A)},

even in x and in p, so the negativity is a quadrant integral

.. math::
    \nu = \frac{4}{\pi K_0(A)}\int_0^\infty dx \int_0^\infty dp\,
          |K_{ip}(A\cosh 2x)| - 1 .

Along one x-line the p-integral of K_{ip}(z) has the closed antiderivative
S(p) = int e^{-z cosh t} sin(pt)/t dt. Once the sign changes of K_{ip}(z)
in p are located, the line integral of |K| is the sum of |S(r_{j+1}) - S(r_j)|
over consecutive roots, which is exact up to the t-quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ConvergenceError, DomainError
from .model import DMParams
from .quad import composite_nodes, gauss_legendre, integrate_panels
from .specfun import ImagOrderKernel, SpecFunOptions, k_imag, k_real

NU_TOL = 1e-4
NU_TOL_FAST = 1e-3
P_START = 8.0
P_MAX = 256.0
SAMPLE_STEP = 0.02
ROOT_TOL = 1e-8


@dataclass(frozen=True)
class NegativityResult:
    abs_integral: float
    nu: float
    eta_nc: float
    x_cutoff: float
    p_cutoff: float
    error_estimate: float
    converged: bool = True


def _A(params):
    A = params.A if isinstance(params, DMParams) else float(params)
    if not A > 0:
        raise DomainError(f"A must be positive, got {A!r}")
    return A


def wigner0(x: float, p: float, params, opts: SpecFunOptions | None = None) -> float:
    """W0(x, p) at a single phase-space point."""
    A = _A(params)
    return k_imag(p, A * math.cosh(2.0 * x), opts) / (math.pi * k_real(0, A, opts))


def wigner_grid(xs, ps, params, opts: SpecFunOptions | None = None) -> np.ndarray:
    """W0 on the tensor grid xs x ps; result has shape (len(xs), len(ps))."""
    A = _A(params)
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    kern = ImagOrderKernel(A, float(np.max(np.abs(ps), initial=1.0)), opts)
    K = kern.values(kern.envelope(A * np.cosh(2.0 * xs)), np.abs(ps))
    return K / (math.pi * k_real(0, A, opts))


def x_cutoff(A: float, opts: SpecFunOptions | None = None) -> float:
    """x beyond which A cosh 2x exceeds the superexponential-decay floor."""
    opts = opts or SpecFunOptions()
    lam = opts.log_floor
    return 0.5 * math.acosh(max(lam / A, 1.0)) + 0.25


def _line_abs_integrals(z, kern, P, floor_rel=1e-10):
    """Per x-line: (int_0^P |K|, int_{P/2}^P |K|, int_0^P K) for each z."""
    pg = np.arange(0.0, P + 0.5 * SAMPLE_STEP, SAMPLE_STEP)
    t = kern.t
    env_all = kern.envelope(z)
    arg = np.outer(t, pg)
    sin_tp = np.sin(arg)
    K = env_all @ np.cos(arg)
    dK = -env_all @ (t[:, None] * sin_tp)
    S = env_all @ (sin_tp / t[:, None])
    del arg, sin_tp
    half = np.searchsorted(pg, 0.5 * P)
    total = np.empty(len(z))
    strip = np.empty(len(z))
    for i in range(len(z)):
        k = K[i]
        floor = floor_rel * np.sum(env_all[i])
        flips = np.nonzero((np.sign(k[:-1]) * np.sign(k[1:]) < 0)
                           & (np.maximum(np.abs(k[:-1]), np.abs(k[1:])) > floor))[0]
        if flips.size == 0:
            total[i] = abs(S[i, -1])
            strip[i] = abs(S[i, -1] - S[i, half])
            continue
        active = env_all[i] > 0.0
        roots, s_roots = _refine_roots(env_all[i, active], t[active], pg, k, dK[i], flips)
        bounds_p = np.concatenate(([0.0], roots, [pg[-1]]))
        bounds_s = np.concatenate(([0.0], s_roots, [S[i, -1]]))
        pieces = np.abs(np.diff(bounds_s))
        total[i] = pieces.sum()
        # pieces beyond P/2, with the straddling piece split at the grid point
        j = np.searchsorted(bounds_p, pg[half])
        strip[i] = pieces[j:].sum() + abs(bounds_s[j] - S[i, half])
    return total, strip, S[:, -1].copy()


def _hermite_root(lo, hi, f0, f1, d0, d1):
    """Root of the cubic Hermite interpolant on each bracket [lo, hi]."""
    h = hi - lo
    m0, m1 = d0 * h, d1 * h
    s = -f0 / (f1 - f0)
    for _ in range(8):
        s2, s3 = s * s, s * s * s
        val = ((2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * m0
               + (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * m1)
        der = ((6 * s2 - 6 * s) * f0 + (3 * s2 - 4 * s + 1) * m0
               + (-6 * s2 + 6 * s) * f1 + (3 * s2 - 2 * s) * m1)
        with np.errstate(divide="ignore", invalid="ignore"):
            s_new = s - val / der
        s = np.where(np.isfinite(s_new), np.clip(s_new, 0.0, 1.0), s)
    return lo + s * h


def _refine_roots(env, t, pg, k, dk, flips):
    """Roots of K_ip(z) in p and the antiderivative S at each root.

    Seeds come from cubic Hermite interpolation of the sampled (K, dK/dp);
    exact Newton steps follow until the correction is below ``ROOT_TOL``
    or K at the iterate is at the rounding floor of the t-quadrature.
    Each pass evaluates cos and sin once, which also gives S at the
    current iterate; S at the corrected root follows by Taylor expansion.
    """
    lo, hi = pg[flips], pg[flips + 1]
    noise = 64 * np.finfo(float).eps * np.sum(env)
    r = _hermite_root(lo, hi, k[flips], k[flips + 1], dk[flips], dk[flips + 1])
    for _ in range(20):
        arg = np.outer(t, r)
        c, s = np.cos(arg), np.sin(arg)
        val = env @ c
        der = -(env * t) @ s
        s_r = env @ (s / t[:, None])
        step = -val / der
        if not np.all(np.isfinite(step)):
            break
        r_new = np.clip(r + step, lo, hi)
        step = r_new - r
        # S(r + d) = S(r) + K d + K' d^2 / 2
        s_new = s_r + val * step + 0.5 * der * step * step
        r = r_new
        if np.all((np.abs(step) < ROOT_TOL) | (np.abs(val) < noise)):
            return r, s_new
    raise ConvergenceError("root refinement of K_ip(z) in p did not converge", best=r)


def _quadrant_integrals(A, opts, tol, panel_width, x_order=16):
    """Return (abs_integral, signed_integral, X, P, error) for the normalized W0."""
    opts = opts or SpecFunOptions()
    K0 = k_real(0, A, opts)
    X = x_cutoff(A, opts)
    rule = gauss_legendre(x_order)
    P = P_START
    while True:
        kern = ImagOrderKernel(A, P, opts)
        cache = {}

        def line(xs, which):
            key = xs.tobytes()
            if key not in cache:
                cache[key] = _line_abs_integrals(A * np.cosh(2.0 * xs), kern, P)
            return cache[key][which]

        scale = 4.0 / (math.pi * K0)
        tot = integrate_panels(lambda xs: line(xs, 0), 0.0, X, rule, panel_width)
        strip = integrate_panels(lambda xs: line(xs, 1), 0.0, X, rule, panel_width)
        sig = integrate_panels(lambda xs: line(xs, 2), 0.0, X, rule, panel_width)
        abs_int = scale * tot.value
        strip_val = scale * strip.value
        if strip_val < tol * abs_int or 2 * P > P_MAX:
            break
        P *= 2
    # the dropped tail beyond P is bounded by the last strip (geometric decay in p)
    err = scale * tot.error_estimate + strip_val * 1e-2 + (strip_val if strip_val >= tol * abs_int else 0.0)
    return abs_int, scale * sig.value, X, P, err, strip_val < tol * abs_int


def negativity(params, opts: SpecFunOptions | None = None, tol: float = NU_TOL,
               panel_width: float | None = None) -> NegativityResult:
    """Integrated Wigner negativity nu and the bounded measure eta_nc = nu/(nu+1)."""
    A = _A(params)
    if panel_width is None:
        panel_width = 0.5 if tol < NU_TOL_FAST else 1.0
    abs_int, _, X, P, err, ok = _quadrant_integrals(A, opts, tol, panel_width)
    nu = abs_int - 1.0
    if nu < -max(err, 1e-6):
        raise ConsistencyError(f"integrated |W0| = {abs_int} is below 1 beyond the error estimate")
    nu = max(nu, 0.0)
    if not ok:
        raise ConvergenceError(f"p-tail of |W0| did not fall below tol={tol:g} by p={P}",
                               best=NegativityResult(abs_int, nu, nu / (nu + 1.0), X, P, err, False),
                               x_cutoff=X, p_cutoff=P)
    return NegativityResult(abs_int, nu, nu / (nu + 1.0), X, P, err)


def wigner_norm(params, opts: SpecFunOptions | None = None, quadrant: bool = True,
                panel_width: float = 0.5) -> float:
    """Phase-space integral of W0 (unity for a normalized state).

    With ``quadrant=True`` the x>0, p>0 quadrant is integrated and multiplied
    by four; otherwise x runs over [-X, X] and p over [-P, P] directly.
    """
    A = _A(params)
    opts = opts or SpecFunOptions()
    K0 = k_real(0, A, opts)
    X = x_cutoff(A, opts)
    P = 64.0
    kern = ImagOrderKernel(A, P, opts)
    rule = gauss_legendre(16)

    def line(xs):
        env = kern.envelope(A * np.cosh(2.0 * xs))
        s = kern.antiderivative(env, [-P, P])
        return s[:, 1] - s[:, 0]

    if quadrant:
        est = integrate_panels(line, 0.0, X, rule, panel_width)
        return 2.0 * est.value / (math.pi * K0)
    est = integrate_panels(line, -X, X, rule, panel_width)
    return est.value / (math.pi * K0)


def abs_line_integral(f, p_lo: float, p_hi: float, step: float = SAMPLE_STEP,
                      order: int = 16, max_piece: float = 0.25) -> float:
    """int_{p_lo}^{p_hi} |f(p)| dp for a smooth vectorized f with isolated sign changes.

    Sign changes are bracketed on a uniform sample grid, bisected to
    ``ROOT_TOL``, and |f| is integrated piecewise between roots with
    Gauss-Legendre panels no wider than ``max_piece``.
    """
    n = max(2, int(math.ceil((p_hi - p_lo) / step)) + 1)
    pg = np.linspace(p_lo, p_hi, n)
    v = np.asarray(f(pg), dtype=float)
    flips = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    lo, hi = pg[flips].copy(), pg[flips + 1].copy()
    flo = v[flips].copy()
    while lo.size and np.max(hi - lo) > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        fm = np.asarray(f(mid), dtype=float)
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    cuts = np.concatenate(([p_lo], 0.5 * (lo + hi), [p_hi]))
    rule = gauss_legendre(order)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        t, w = composite_nodes(a, b, rule, max(1, int(math.ceil((b - a) / max_piece))))
        total += abs(float(np.dot(w, f(t))))
    return total


def phase_space_negativity(w, x_cut: float, p_cut: float, panel_width: float = 0.25,
                           step: float = SAMPLE_STEP) -> float:
    """nu = int int |w| - 1 over [-x_cut, x_cut] x [-p_cut, p_cut] for a generic w(x, p).

    ``w`` takes a scalar x and an array of p. This is the general-purpose
    route used to validate the Bessel-specific path above.
    """
    rule = gauss_legendre(16)

    def line(xs):
        return np.array([abs_line_integral(lambda p: w(x, p), -p_cut, p_cut, step) for x in xs])

    return integrate_panels(line, -x_cut, x_cut, rule, panel_width).value - 1.0
