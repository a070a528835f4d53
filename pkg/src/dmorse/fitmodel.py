"""Least-squares fit of eta_NC = a + b eta_NG + eta_NG**c."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

DEFAULT_INIT = (0.0, 0.3, 5.0)
GRAD_TOL = 1e-10
STEP_TOL = 1e-12
MAX_ITER = 500


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    residual_rms: float
    iterations: int
    converged: bool

    @property
    def params(self):
        return (self.a, self.b, self.c)


def model(x, a, b, c):
    x = np.asarray(x, dtype=float)
    return a + b * x + x ** c


def _prepare(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError("points must be a sequence of (eta_ng, eta_nc) pairs")
    if len(pts) < 4:
        raise DomainError(f"need at least 4 points, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("points must be finite")
    if np.any(pts[:, 0] <= 0):
        raise DomainError("eta_ng must be positive for the power term")
    # fixed order so the result does not depend on the caller's ordering
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order, 0], pts[order, 1]


def objective(theta, x, y) -> float:
    r = y - model(x, *theta)
    return float(r @ r)


def _gradient(theta, x, y):
    a, b, c = theta
    xc = x ** c
    r = y - a - b * x - xc
    J = -np.column_stack([np.ones_like(x), x, xc * np.log(x)])
    return r, J, 2.0 * (J.T @ r)


def _gauss_newton(theta, x, y):
    theta = np.array(theta, dtype=float)
    r, J, g = _gradient(theta, x, y)
    F = float(r @ r)
    for it in range(1, MAX_ITER + 1):
        if np.max(np.abs(g)) < GRAD_TOL:
            return theta, F, it - 1, True
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        t = 1.0
        while t > 1e-10:
            trial = theta + t * step
            Ft = objective(trial, x, y)
            if np.isfinite(Ft) and Ft <= F + 1e-4 * t * float(g @ step):
                break
            t *= 0.5
        else:
            trial, Ft = theta, F
        moved = np.max(np.abs(trial - theta))
        theta, F = trial, Ft
        r, J, g = _gradient(theta, x, y)
        if moved < STEP_TOL:
            # a stalled step only counts when the gradient is small on the objective's scale
            ok = np.max(np.abs(g)) < GRAD_TOL or np.max(np.abs(g)) < 1e-6 * (1.0 + F)
            return theta, F, it, bool(ok)
    raise ConvergenceError(f"Gauss-Newton did not converge in {MAX_ITER} iterations",
                           best=tuple(theta), objective=F)


def _starts(init):
    a0, b0, c0 = init
    for da, db, sc in itertools.product((-0.02, 0.0, 0.02), (-0.2, 0.0, 0.2), (0.5, 1.0, 2.0)):
        yield (a0 + da, b0 + db, c0 * sc)


def fit_nc_vs_ng(points, init=None) -> FitResult:
    """Fit (a, b, c) by Gauss-Newton with backtracking from a 3x3x3 multistart around init."""
    x, y = _prepare(points)
    init = tuple(DEFAULT_INIT if init is None else init)
    best = None
    failures = []
    for start in _starts(init):
        try:
            theta, F, it, ok = _gauss_newton(start, x, y)
        except ConvergenceError as exc:
            failures.append(exc)
            continue
        key = (not ok, F)
        if best is None or key < best[0]:
            best = (key, theta, F, it, ok)
    if best is None:
        raise ConvergenceError("no multistart converged", best=failures[0].best)
    _, theta, F, it, ok = best
    return FitResult(float(theta[0]), float(theta[1]), float(theta[2]),
                     float(np.sqrt(F / len(x))), it, ok)


def residual_rms(points, theta) -> float:
    x, y = _prepare(points)
    return float(np.sqrt(objective(theta, x, y) / len(x)))
