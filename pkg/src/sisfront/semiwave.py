"""Semi-waves and the asymptotic spreading speeds they select.

A semi-wave with effective speed ``c`` solves

    d_I q'' - c q' + q (a - b q) = 0,   q(0) = 0,   q(+inf) = a/b,   q > 0,

with ``c = k - alpha`` for the rightward front and ``c = k + alpha`` for the
leftward one.  The free-boundary matching condition ``mu q'(0) = k`` picks a
unique speed ``k`` in each direction.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BracketError, NumericError, ValidationError
from .model import bulk_rates, check

EPSILON = 1.0e-8
RTOL = 1.0e-10
ATOL = 1.0e-12
ROOT_RTOL = 1.0e-9
BRACKET_PAD = 1.0e-6


@dataclass
class SemiWaveResult:
    direction: str
    k_star: float
    slope0: float
    z: np.ndarray = field(default=None, repr=False)
    q: np.ndarray = field(default=None, repr=False)


@dataclass
class _Profile:
    slope: float
    z: np.ndarray
    q: np.ndarray
    p: np.ndarray


def _shoot(c_eff, a, b, d_I, eps=EPSILON, rtol=RTOL, atol=ATOL, dense=False):
    if not c_eff < 2.0 * math.sqrt(a * d_I):
        raise ValidationError(
            f"no semi-wave: effective speed {c_eff:g} >= 2 sqrt(a d_I) = {2.0 * math.sqrt(a * d_I):g}"
        )
    q_inf = a / b
    # linearization at the saddle (a/b, 0): q' = p, p' = (a/d) q + (c/d) p
    lam = 0.5 * (c_eff / d_I - math.sqrt((c_eff / d_I) ** 2 + 4.0 * a / d_I))
    y0 = [q_inf - eps, -eps * lam]

    # integrate in s = -z: the stable manifold of the saddle becomes unstable
    def rhs(_s, y):
        q, p = y
        return [-p, -(c_eff * p - q * (a - b * q)) / d_I]

    def hit_zero(_s, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    def collapsed(_s, y):
        # spiral toward the origin shrank below any resolvable crossing
        return abs(y[0]) + abs(y[1]) * math.sqrt(d_I / a) - 1e-14 * q_inf

    collapsed.terminal = True
    collapsed.direction = -1

    # the crossing time grows like 1/Im(eigenvalue at the origin)
    disc = 4.0 * a * d_I - c_eff * c_eff
    s_max = 200.0 * math.sqrt(d_I / a) + 4.0 * math.pi * d_I / math.sqrt(disc) + 100.0 * abs(math.log(eps))
    sol = solve_ivp(rhs, (0.0, s_max), y0, method="RK45", rtol=rtol, atol=atol * q_inf,
                    events=(hit_zero, collapsed), dense_output=False)
    if sol.status == -1:
        raise NumericError(f"semi-wave integration failed: {sol.message}", {"c_eff": c_eff})
    if sol.t_events[0].size:
        s_end = float(sol.t_events[0][0])
        slope = float(sol.y_events[0][0][1])
    elif sol.t_events[1].size:
        s_end = float(sol.t_events[1][0])
        slope = 0.0
    else:
        raise NumericError("semi-wave did not reach q = 0", {"c_eff": c_eff, "s_max": s_max})
    z = s_end - sol.t[::-1]
    q = sol.y[0][::-1]
    p = sol.y[1][::-1]
    if dense:
        z = np.concatenate([[0.0], z[1:]]) if z[0] != 0.0 else z
        q = np.concatenate([[0.0], q[1:]])
        p = np.concatenate([[slope], p[1:]])
    return _Profile(slope, z, q, p)


def semiwave_slope(c_eff, a, b, d_I, eps=EPSILON, rtol=RTOL, atol=ATOL):
    """Boundary slope ``q'(0)`` of the semi-wave with effective speed ``c_eff``.

    Shoots backward from the saddle ``(a/b, 0)`` along its stable eigendirection
    until ``q`` reaches zero.  Raises :class:`ValidationError` when
    ``c_eff >= 2 sqrt(a d_I)``; a return of 0.0 means the trajectory shrank
    below rounding before crossing, which only happens right at that bound.
    """
    return _shoot(c_eff, a, b, d_I, eps, rtol, atol).slope


def semiwave_profile(c_eff, a, b, d_I, eps=EPSILON):
    """``(z, q, slope)`` on the traversed range, shifted so ``q(0) = 0``."""
    prof = _shoot(c_eff, a, b, d_I, eps, dense=True)
    return prof.z, prof.q, prof.slope


def _direction_sign(direction):
    if direction in ("right", "rightward"):
        return -1.0
    if direction in ("left", "leftward"):
        return 1.0
    raise ValueError(f"direction must be 'rightward' or 'leftward', not {direction!r}")


def matching_residual(k, direction, mu, alpha, a, b, d_I):
    """``mu q'(0) - k`` for the semi-wave of speed ``k``; strictly decreasing in ``k``."""
    c_eff = k + _direction_sign(direction) * alpha
    return mu * semiwave_slope(c_eff, a, b, d_I) - k


def speed_bracket(direction, alpha, a, d_I):
    upper = 2.0 * math.sqrt(a * d_I) + (-_direction_sign(direction)) * alpha
    return BRACKET_PAD, upper - BRACKET_PAD


def solve_speed(direction, mu, alpha, a, b, d_I, rtol=ROOT_RTOL, profile=True):
    """Speed ``k*`` with ``mu q'(0) = k`` for the given direction, by bisection."""
    name = "rightward" if _direction_sign(direction) < 0 else "leftward"
    lo, hi = speed_bracket(direction, alpha, a, d_I)
    if not lo < hi:
        raise BracketError(f"empty speed bracket for the {name} semi-wave (large advection)")
    f_lo = matching_residual(lo, direction, mu, alpha, a, b, d_I)
    f_hi = matching_residual(hi, direction, mu, alpha, a, b, d_I)
    if not (f_lo > 0 > f_hi):
        raise BracketError(
            f"matching residual has no sign change on [{lo:g}, {hi:g}]: "
            f"f(lo) = {f_lo:g}, f(hi) = {f_hi:g}"
        )
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if matching_residual(mid, direction, mu, alpha, a, b, d_I) > 0:
            lo = mid
        else:
            hi = mid
    k = 0.5 * (lo + hi)
    c_eff = k + _direction_sign(direction) * alpha
    if profile:
        z, q, slope = semiwave_profile(c_eff, a, b, d_I)
    else:
        z = q = None
        slope = semiwave_slope(c_eff, a, b, d_I)
    return SemiWaveResult(name, k, slope, z, q)


def speed(direction, spec):
    """Asymptotic spreading speed of one front for a validated model."""
    check(spec)
    a, b, _ = bulk_rates(spec)
    return solve_speed(direction, spec.mu, spec.alpha, a, b, spec.d_I)


def speeds(spec):
    """``(left, right, k0)``: both directional results and the advection-free speed."""
    check(spec)
    a, b, _ = bulk_rates(spec)
    right = solve_speed("rightward", spec.mu, spec.alpha, a, b, spec.d_I)
    left = solve_speed("leftward", spec.mu, spec.alpha, a, b, spec.d_I)
    k0 = solve_speed("rightward", spec.mu, 0.0, a, b, spec.d_I, profile=False).k_star
    return left, right, k0
