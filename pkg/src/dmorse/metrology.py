"""Fisher information for estimating alpha from the ground state.

The state depends on alpha only through A = 2 exp(-alpha x0), so
d/dalpha = -x0 A d/dA acting at fixed y. With <.> the average over psi0^2,

    F_A     = Var(cosh 2y) = [(K2 K0 + K0^2)/2 - K1^2] / K0^2
    F_alpha = (x0 A)^2 F_A.

The alpha-dependence of y = alpha x / 2 is not differentiated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import DMParams, psi0
from .quad import integrate_panels
from .specfun import SpecFunOptions, k_real, truncation_point

UNDERFLOW = 1e-300


@dataclass(frozen=True)
class FisherResult:
    qfi_closed: float
    qfi_numeric: float
    cfi_position: float
    crb: float
    skipped_bound: float = 0.0

    @property
    def saturated(self) -> bool:
        rel = max(abs(self.qfi_numeric - self.qfi_closed), abs(self.cfi_position - self.qfi_closed))
        return rel <= 1e-6 * self.qfi_closed


def _split(params):
    if not isinstance(params, DMParams):
        raise DomainError("Fisher information in alpha needs DMParams (x0 enters the prefactor)")
    return params.A, params.x0


def _bessels(A, opts):
    return k_real(0, A, opts), k_real(1, A, opts), k_real(2, A, opts)


def qfi_A(A: float, opts: SpecFunOptions | None = None) -> float:
    """Quantum Fisher information with A itself as the parameter."""
    if not A > 0:
        raise DomainError(f"A must be positive, got {A!r}")
    K0, K1, K2 = _bessels(A, opts)
    return ((K2 * K0 + K0 * K0) / 2.0 - K1 * K1) / (K0 * K0)


def qfi_closed(params: DMParams, opts: SpecFunOptions | None = None) -> float:
    A, x0 = _split(params)
    K0, K1, K2 = _bessels(A, opts)
    return (A * x0 / K0) ** 2 * ((K2 * K0 + K0 * K0) / 2.0 - K1 * K1)


def _y_range(A, opts):
    return 0.5 * truncation_point(A, opts) + 0.5


def dpsi_dalpha(y, params: DMParams, opts: SpecFunOptions | None = None):
    """d psi0 / d alpha at fixed y."""
    A, x0 = _split(params)
    K0, K1 = k_real(0, A, opts), k_real(1, A, opts)
    y = np.asarray(y, dtype=float)
    return -x0 * A * psi0(y, A, opts) * (K1 / (2 * K0) - 0.5 * np.cosh(2 * y))


def qfi_numeric(params: DMParams, opts: SpecFunOptions | None = None) -> float:
    """4 int (d psi0/d alpha)^2 dy by composite quadrature over the even integrand."""
    opts = opts or SpecFunOptions()
    A, _ = _split(params)
    est = integrate_panels(lambda y: dpsi_dalpha(y, params, opts) ** 2, 0.0, _y_range(A, opts),
                           panel_width=0.125)
    return 8.0 * est.value


def _cfi(params, opts):
    A, x0 = _split(params)
    K0, K1 = k_real(0, A, opts), k_real(1, A, opts)
    mean = K1 / K0
    skipped = [0.0]

    def integrand(y):
        p = psi0(y, A, opts) ** 2
        # score d ln p / d alpha
        s = -x0 * A * (mean - np.cosh(2 * y))
        keep = p >= UNDERFLOW
        if not keep.all():
            skipped[0] = max(skipped[0], float(np.max(np.where(keep, 0.0, UNDERFLOW * s * s))))
        return np.where(keep, p * s * s, 0.0)

    Y = _y_range(A, opts)
    est = integrate_panels(integrand, 0.0, Y, panel_width=0.125)
    return 2.0 * est.value, 2.0 * Y * skipped[0]


def cfi_position(params: DMParams, opts: SpecFunOptions | None = None) -> float:
    """Classical Fisher information of a y-position measurement, int p (d ln p/d alpha)^2 dy."""
    return _cfi(params, opts or SpecFunOptions())[0]


def crb(fisher: float) -> float:
    """Cramer-Rao bound 1/F on the variance of a locally unbiased estimator (one shot)."""
    if not fisher > 0:
        raise DomainError(f"Fisher information must be positive, got {fisher!r}")
    return 1.0 / fisher


def fisher(params: DMParams, opts: SpecFunOptions | None = None) -> FisherResult:
    opts = opts or SpecFunOptions()
    q = qfi_closed(params, opts)
    cfi, bound = _cfi(params, opts)
    return FisherResult(q, qfi_numeric(params, opts), cfi, crb(q), bound)
