"""Endemic equilibrium on a truncated line.

Solves ``-d_I I'' + alpha I' = (beta - gamma) I - beta/N* I**2`` on ``(-L, L)``
with the far-field value ``a/b`` imposed at both ends.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import NumericError, ValidationError
from .model import bulk_rates

DEFAULT_DX = 0.05
NEWTON_TOL = 1.0e-10
AGREEMENT_TOL = 1.0e-7


@dataclass
class EquilibriumProfile:
    L: float
    x: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    residual_history: list = field(default_factory=list, repr=False)

    def __call__(self, x):
        return np.interp(x, self.x, self.values)


def grid_for(L, dx=DEFAULT_DX):
    """Interior node count giving spacing ``dx`` on ``(-L, L)``; nodes land on multiples of dx."""
    return int(round(2.0 * L / dx)) - 1


def _operator(spec, x, dx):
    k = spec.d_I / (dx * dx)
    c = spec.alpha / (2.0 * dx)
    beta = spec.beta(x)
    return k, c, beta - spec.gamma(x), beta / spec.n_star


def equilibrium_residual(spec, x, values, boundary):
    """Residual of the stationary equation at the interior nodes."""
    dx = x[1] - x[0]
    k, c, growth, crowd = _operator(spec, x, dx)
    padded = np.concatenate([[boundary], values, [boundary]])
    lap = padded[2:] - 2.0 * values + padded[:-2]
    grad = padded[2:] - padded[:-2]
    return -k * lap + c * grad - growth * values + crowd * values * values


def _newton(spec, x, guess, boundary, tol, maxiter):
    dx = x[1] - x[0]
    k, c, growth, crowd = _operator(spec, x, dx)
    n = x.size
    ab = np.zeros((3, n))
    ab[0, 1:] = -k + c
    ab[2, :-1] = -k - c
    u = guess.copy()
    F = equilibrium_residual(spec, x, u, boundary)
    norm = float(np.max(np.abs(F)))
    history = [norm]
    for _ in range(maxiter):
        if norm < tol:
            return u, history
        ab[1] = 2.0 * k - growth + 2.0 * crowd * u
        delta = solve_banded((1, 1), ab, -F, check_finite=False)
        lam = 1.0
        for _ in range(30):
            trial = u + lam * delta
            F_trial = equilibrium_residual(spec, x, trial, boundary)
            n_trial = float(np.max(np.abs(F_trial)))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            lam *= 0.5
        else:
            break
        u, F, norm = trial, F_trial, n_trial
        history.append(norm)
    if norm < tol:
        return u, history
    raise NumericError("equilibrium Newton iteration diverged", {"residual_history": history})


def solve_equilibrium(spec, L=50.0, n=None, tol=NEWTON_TOL, maxiter=100):
    """Positive equilibrium on ``(-L, L)`` with ``I(+-L) = a/b``.

    Solved twice, from the constant guesses ``a/b`` and ``N*``; the two
    answers must agree to ``1e-7`` or a non-uniqueness diagnostic is raised.
    """
    if L < 20:
        raise ValidationError(f"truncation half-length must be >= 20, got {L}")
    a, b, _ = bulk_rates(spec)
    boundary = a / b
    if n is None:
        n = grid_for(L)
    dx = 2.0 * L / (n + 1)
    x = -L + dx * np.arange(1, n + 1)
    low, history = _newton(spec, x, np.full(n, boundary), boundary, tol, maxiter)
    high, _ = _newton(spec, x, np.full(n, spec.n_star), boundary, tol, maxiter)
    gap = float(np.max(np.abs(low - high)))
    if gap > AGREEMENT_TOL:
        raise NumericError("equilibrium depends on the initial guess; enlarge L",
                           {"max_difference": gap})
    if low.min() <= 0 or low.max() > spec.n_star:
        raise NumericError("equilibrium left (0, N*]", {"min": float(low.min()), "max": float(low.max())})
    xs = np.concatenate([[-L], x, [L]])
    values = np.concatenate([[boundary], low, [boundary]])
    return EquilibriumProfile(L, xs, values, history)
