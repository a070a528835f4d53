"""The double-Morse oscillator: parameters, potential and exact ground state.

Lengths are in the dimensionless coordinate y = alpha x / 2 and energies
in units where the Schrodinger equation reads

    psi'' + [eps - mu^2 (A cosh 2y - 1)^2] psi = 0,

with the quasi-exact-solvability index mu pinned to 1. Every
state-dependent quantity is then a function of A = 2 exp(-alpha x0) alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .specfun import SpecFunOptions, k_real

MU = 1


@dataclass(frozen=True)
class DMParams:
    """Model parameters (alpha, x0); ``A`` and ``bistable`` are derived."""

    alpha: float
    x0: float
    D_phys: Optional[float] = None
    mu: int = field(default=MU, init=False)

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not (self.x0 > 0 and math.isfinite(self.x0)):
            raise DomainError(f"x0 must be positive, got {self.x0!r}")
        if self.D_phys is not None and not self.D_phys > 0:
            raise DomainError(f"D_phys must be positive, got {self.D_phys!r}")

    @property
    def A(self) -> float:
        return 2.0 * math.exp(-self.alpha * self.x0)

    @property
    def bistable(self) -> bool:
        return self.A < 1.0

    @property
    def threshold_alpha(self) -> float:
        """alpha at which the double well appears (A = 1) for this x0."""
        return math.log(2.0) / self.x0

    @classmethod
    def from_A(cls, A: float, x0: float = 1.0, **kw) -> "DMParams":
        """Parameters with the given well-shape value A at separation x0."""
        if not 0 < A:
            raise DomainError(f"A must be positive, got {A!r}")
        return cls(alpha=math.log(2.0 / A) / x0, x0=x0, **kw)

    def x_of_y(self, y):
        """Physical coordinate x = 2y / alpha."""
        return 2.0 * np.asarray(y) / self.alpha


@dataclass(frozen=True)
class GroundState:
    """psi0(y) = exp(-(A/2) cosh 2y) / sqrt(K0(A))."""

    A: float
    norm_constant: float

    def __call__(self, y):
        A = self.A
        return self.norm_constant * np.exp(-0.5 * A * np.cosh(2.0 * np.asarray(y, dtype=float)))

    def density(self, y):
        return self(y) ** 2


def _A_of(params) -> float:
    A = params.A if isinstance(params, DMParams) else float(params)
    if not A > 0:
        raise DomainError(f"A must be positive, got {A!r}")
    return A


def potential_physical(x, D: float, params: DMParams):
    """V(x) = D (A cosh(alpha x) - 1)^2."""
    if not D > 0:
        raise DomainError(f"D must be positive, got {D!r}")
    return D * (params.A * np.cosh(params.alpha * np.asarray(x, dtype=float)) - 1.0) ** 2


def potential_dimensionless(y, params: DMParams):
    """(A cosh 2y - 1)^2, the mu = 1 potential of the scaled equation."""
    A = _A_of(params)
    return (A * np.cosh(2.0 * np.asarray(y, dtype=float)) - 1.0) ** 2


def wells(params) -> float:
    """Non-negative y of the potential minimum: 0 if A >= 1, else acosh(1/A)/2."""
    A = _A_of(params)
    if A >= 1.0:
        return 0.0
    return 0.5 * math.acosh(1.0 / A)


def ground_state(params, opts: SpecFunOptions | None = None) -> GroundState:
    A = _A_of(params)
    return GroundState(A, 1.0 / math.sqrt(k_real(0, A, opts)))


def psi0(y, params, opts: SpecFunOptions | None = None):
    """Normalized ground-state amplitude at y (vectorized)."""
    return ground_state(params, opts)(y)


def ground_energy(params) -> float:
    A = params.A if isinstance(params, DMParams) else float(params)
    return MU ** 2 * (1.0 + A * A)


def psi0_second_derivative(y, params, opts: SpecFunOptions | None = None):
    """Analytic psi0'' = (A^2 sinh^2 2y - 2A cosh 2y) psi0."""
    A = _A_of(params)
    y = np.asarray(y, dtype=float)
    return (A * A * np.sinh(2 * y) ** 2 - 2 * A * np.cosh(2 * y)) * psi0(y, params, opts)


def schrodinger_residual(params, y_grid, opts: SpecFunOptions | None = None) -> float:
    """max |psi'' + [eps0 - V(y)] psi| over the grid.

    Uses the analytic second derivative, so the result is at rounding level
    when (psi0, eps0) is an exact eigenpair.
    """
    y = np.asarray(y_grid, dtype=float)
    if not np.all(np.isfinite(y)):
        raise DomainError("grid points must be finite")
    psi = psi0(y, params, opts)
    res = psi0_second_derivative(y, params, opts) + (ground_energy(params) - potential_dimensionless(y, params)) * psi
    return float(np.max(np.abs(res)))
