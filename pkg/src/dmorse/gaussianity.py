"""Quadrature covariance matrix of the ground state and its non-Gaussianity.

With [x, p] = i in the y-coordinate, first moments vanish by parity and

    <x^2>     = (d^2 K_nu(A) / d nu^2 at nu = 0) / (4 K0(A))
    <p^2>     = 2A K1/K0 - A^2 (K2 - K0) / (2 K0)
    <{x,p}>/2 = 0.

The relative-entropy non-Gaussianity of a pure state is h(sqrt(det sigma)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .model import DMParams, psi0
from .quad import integrate_panels
from .specfun import SpecFunOptions, entropy_h, k_order_deriv2_at0, k_real, truncation_point

DET_SLACK = 1e-9


@dataclass(frozen=True)
class CovarianceMatrix:
    xx: float
    pp: float
    xp: float = 0.0

    @property
    def det(self) -> float:
        return self.xx * self.pp - self.xp * self.xp

    def as_array(self) -> np.ndarray:
        return np.array([[self.xx, self.xp], [self.xp, self.pp]])


def _A(params):
    A = params.A if isinstance(params, DMParams) else float(params)
    if not A > 0:
        raise DomainError(f"A must be positive, got {A!r}")
    return A


def covariance(params, opts: SpecFunOptions | None = None) -> CovarianceMatrix:
    """Closed-form covariance entries from the Bessel-function kernels."""
    A = _A(params)
    K0 = k_real(0, A, opts)
    K1 = k_real(1, A, opts)
    K2 = k_real(2, A, opts)
    xx = k_order_deriv2_at0(A, opts) / (4.0 * K0)
    pp = 2.0 * A * K1 / K0 - A * A * (K2 - K0) / (2.0 * K0)
    return CovarianceMatrix(xx, pp, 0.0)


def covariance_by_quadrature(params, opts: SpecFunOptions | None = None) -> CovarianceMatrix:
    """The same entries from direct y-integrals of psi0.

    <x^2> = int y^2 psi0^2 dy and, for a real wavefunction,
    <p^2> = int (psi0')^2 dy with psi0' = -A sinh(2y) psi0.
    """
    A = _A(params)
    opts = opts or SpecFunOptions()
    # psi0^2 ~ exp(-A cosh 2y); the same floor as the Bessel kernels
    Y = 0.5 * truncation_point(A, opts, growth=0.0) + 0.5

    def dens(y):
        return psi0(y, A, opts) ** 2

    xx = 2.0 * integrate_panels(lambda y: y * y * dens(y), 0.0, Y, panel_width=0.125).value
    pp = 2.0 * integrate_panels(lambda y: (A * np.sinh(2 * y)) ** 2 * dens(y), 0.0, Y,
                                panel_width=0.125).value
    return CovarianceMatrix(xx, pp, 0.0)


def eta_ng(params, opts: SpecFunOptions | None = None) -> float:
    """Relative-entropy non-Gaussianity h(sqrt(det sigma)) of the ground state."""
    sigma = covariance(params, opts)
    det = sigma.det
    if det < 0.25 - DET_SLACK:
        raise ConsistencyError(f"det sigma = {det} violates the uncertainty bound 1/4")
    return entropy_h(math.sqrt(max(det, 0.25)))
