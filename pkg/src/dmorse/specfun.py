r"""Modified Bessel functions of the second kind from their integral representation.

Every value is computed from

.. math::
    K_\nu(z) = \int_0^\infty e^{-z\cosh t}\cosh(\nu t)\,dt

with the kernel ``cosh(nu t)`` replaced by ``cos(p t)`` for purely
imaginary order and by ``t**2`` for the second order-derivative at
``nu = 0``. No library Bessel routine is used, so one truncation and
refinement strategy controls the error of all three families.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .quad import composite_nodes, gauss_legendre

KERNEL_ORDER = 32
REAL_PANEL_WIDTH = 0.25


@dataclass(frozen=True)
class SpecFunOptions:
    """Tolerances shared by the quadrature-backed kernels."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_panels: int = 1 << 16

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if self.max_panels < 1:
            raise DomainError("max_panels must be >= 1")

    @property
    def log_floor(self) -> float:
        """Exponent below which integrand tails are dropped."""
        return -math.log(self.abs_tol) + 40.0


def truncation_point(z: float, opts: SpecFunOptions, growth: float = 0.0) -> float:
    """Smallest T on a 1/8 grid with z (cosh T - 1) - growth T - ln(1+T^2) above the floor.

    Measuring the decay from the peak value e^{-z} keeps the dropped tail
    small relative to the result for large z. ``growth`` is the
    exponential rate of the kernel (``n`` for cosh(n t)).
    """
    lam = opts.log_floor
    T = math.acosh(1.0 + lam / z)
    T = math.ceil(T * 8) / 8
    while z * (math.cosh(T) - 1.0) - growth * T - math.log1p(T * T) <= lam:
        T += 0.125
    return T


def _check_z(z):
    if not z > 0 or not math.isfinite(z):
        raise DomainError(f"argument must be positive and finite, got z={z!r}")


def _kernel_integral(z, kernel, width, opts, growth=0.0, what="integral"):
    T = truncation_point(z, opts, growth)
    rule = gauss_legendre(KERNEL_ORDER)
    n = max(1, math.ceil(T / width))
    prev = None
    while True:
        # always evaluate once so a failure can still report an estimate
        t, w = composite_nodes(0.0, T, rule, n)
        terms = w * np.exp(-z * np.cosh(t)) * kernel(t)
        val = float(np.sum(terms))
        scale = float(np.sum(np.abs(terms)))
        if prev is not None and abs(val - prev) <= opts.rel_tol * abs(val) + opts.abs_tol * scale:
            return val
        prev = val
        n *= 2
        if n > max(opts.max_panels, 1):
            break
    raise ConvergenceError(f"{what} did not reach rel_tol={opts.rel_tol:g} "
                           f"within {opts.max_panels} panels", best=prev)


def k_real(n: int, z: float, opts: SpecFunOptions | None = None) -> float:
    """K_n(z) for integer order n in {0, 1, 2}."""
    opts = opts or SpecFunOptions()
    if n not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {n!r}")
    _check_z(z)
    if n == 0:
        kernel = np.ones_like
    else:
        def kernel(t):
            return np.cosh(n * t)
    return _kernel_integral(z, kernel, REAL_PANEL_WIDTH, opts, growth=n, what=f"K_{n}({z})")


def imag_panel_width(p: float) -> float:
    """Panel width keeping one panel below a quarter period of cos(p t)."""
    return min(1.0, math.pi / (4.0 * max(abs(p), 1.0)))


def k_imag(p: float, z: float, opts: SpecFunOptions | None = None) -> float:
    """K_{ip}(z), the modified Bessel function of purely imaginary order ip."""
    opts = opts or SpecFunOptions()
    _check_z(z)
    if not math.isfinite(p):
        raise DomainError(f"order parameter must be finite, got p={p!r}")
    p = abs(p)

    def kernel(t):
        return np.cos(p * t)
    return _kernel_integral(z, kernel, imag_panel_width(p), opts, what=f"K_i{p}({z})")


def k_order_deriv2_at0(z: float, opts: SpecFunOptions | None = None) -> float:
    """Second derivative of K_nu(z) with respect to nu at nu = 0."""
    opts = opts or SpecFunOptions()
    _check_z(z)
    return _kernel_integral(z, np.square, REAL_PANEL_WIDTH, opts, what=f"d2K/dnu2({z})")


def entropy_h(x: float) -> float:
    """h(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2), defined for x >= 1/2."""
    if not x >= 0.5:
        raise DomainError(f"entropy_h needs x >= 1/2, got {x!r}")
    up = x + 0.5
    d = x - 0.5
    if d < 1e-12:
        return up * math.log(up)
    return up * math.log(up) - d * math.log(d)


class ImagOrderKernel:
    """Shared t-quadrature for evaluating K_{ip}(z) on many (p, z) at once.

    Built once for the smallest argument ``z_min`` and largest order
    ``p_max`` it will be asked about; arguments above ``z_min`` only
    shorten the effective range because the integrand underflows.
    Panels span at most ``2 / p_max`` in t (two radians of cos(p_max t)),
    which the 16-point rule resolves to rounding level.
    """

    ORDER = 16

    def __init__(self, z_min: float, p_max: float, opts: SpecFunOptions | None = None):
        opts = opts or SpecFunOptions()
        _check_z(z_min)
        self.z_min = z_min
        self.p_max = p_max
        self.T = truncation_point(z_min, opts)
        width = min(0.5, 2.0 / max(p_max, 1.0))
        n = math.ceil(self.T / width)
        self.t, self.w = composite_nodes(0.0, self.T, gauss_legendre(self.ORDER), n)
        self._cosh = np.cosh(self.t)

    def envelope(self, z):
        """Weighted e^{-z cosh t} rows, shape (len(z), n_nodes)."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        return np.exp(-np.outer(z, self._cosh)) * self.w

    def values(self, env, p):
        """K_{ip}(z) for every envelope row and every p; shape (rows, len(p))."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return env @ np.cos(np.outer(self.t, p))

    def antiderivative(self, env, p):
        """S(p) = int_0^p K_{iq}(z) dq = int e^{-z cosh t} sin(p t)/t dt."""
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return env @ (np.sin(np.outer(self.t, p)) / self.t[:, None])
