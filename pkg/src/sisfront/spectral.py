"""Principal eigenvalues and basic reproduction numbers on fixed intervals.

Everything goes through the Liouville substitution ``psi = exp(alpha x / (2 d_I)) phi``
which turns the advective operator ``-d_I psi'' + alpha psi' + (gamma - beta) psi``
into the self-adjoint ``-d_I phi'' + (alpha**2/(4 d_I) + gamma - beta) phi``.
After a centred second-difference discretization only symmetric tridiagonal
matrices remain, so the smallest eigenvalue is located by Sturm-sequence
bisection and the eigenvector by shifted inverse iteration.

Reproduction numbers solve the generalized problem
``(-d_I D2 + alpha**2/(4 d_I) + gamma) phi = (beta / R) phi``; scaling by
``beta**-1/2`` on both sides gives a symmetric tridiagonal matrix whose
smallest eigenvalue is ``1/R``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import BracketError, InvariantViolation, NumericError, ValidationError

DEFAULT_N = 400
EIG_RTOL = 1.0e-12
R0_RTOL = 1.0e-10
MAX_SWEEPS = 10_000
MONOTONE_TOL = 1.0e-8


class ResolutionError(ValidationError):
    """Interval resolved by fewer than four grid cells."""


@dataclass
class SpectralResult:
    interval: tuple
    lambda0: float
    r0: float
    x: np.ndarray = field(repr=False)
    eigenfunction: np.ndarray = field(repr=False)


# --- symmetric tridiagonal kernels -------------------------------------------------


def sturm_count(diag, off, sigma):
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``sigma``.

    An eigenvalue exactly at ``sigma`` (zero pivot) is counted.
    """
    count = 0
    q = 1.0
    prev_off2 = 0.0
    tiny = 1e-300
    for d, e2 in zip(diag, off):
        q = d - sigma - prev_off2 / q
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
        prev_off2 = e2
    return count


def smallest_eigenvalue(diag, off, rtol=EIG_RTOL):
    """Smallest eigenvalue of ``tridiag(off, diag, off)`` by Sturm bisection."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.size
    absoff = np.abs(off)
    radius = np.zeros(n)
    radius[:-1] += absoff
    radius[1:] += absoff
    lo = float(np.min(diag - radius))
    hi = float(np.min(diag))
    scale = float(np.max(np.abs(diag)) + 2.0 * np.max(absoff, initial=0.0))
    atol = 1e-15 * scale
    d_list = diag.tolist()
    # off2[i] couples rows i and i+1; pad so zip() sees one value per row
    off2 = (off * off).tolist() + [0.0]
    if sturm_count(d_list, off2, hi) == 0:
        # hi is itself (to rounding) the smallest eigenvalue
        hi = hi + max(atol, abs(hi) * 1e-15)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sturm_count(d_list, off2, mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo <= max(rtol * max(abs(lo), abs(hi)), atol):
            break
    return 0.5 * (lo + hi)


def inverse_iteration(diag, off, shift, tol=1e-13, max_sweeps=MAX_SWEEPS):
    """Eigenvector nearest ``shift`` by shifted inverse iteration.

    Stops when the Rayleigh quotient settles to ``tol`` relative, or to a
    rounding floor proportional to the matrix norm.

    Returns ``(vector, rayleigh_quotient, sweeps)``; the vector has unit sup-norm
    and positive sum.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    v = np.ones(n) / math.sqrt(n)
    rq_old = math.inf
    scale = float(np.max(np.abs(diag)) + 2.0 * np.max(np.abs(off), initial=0.0))
    floor = 64.0 * np.finfo(float).eps * scale
    for sweep in range(1, max_sweeps + 1):
        w = solve_banded((1, 1), ab, v, check_finite=False)
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0.0:
            raise NumericError("inverse iteration broke down", {"sweep": sweep})
        v = w / norm
        tv = diag * v
        tv[:-1] += off * v[1:]
        tv[1:] += off * v[:-1]
        rq = float(v @ tv)
        if abs(rq - rq_old) <= max(tol * abs(rq), floor) and sweep > 1:
            break
        rq_old = rq
    else:
        raise NumericError(
            "inverse iteration did not converge",
            {"sweeps": max_sweeps, "residual": float(np.linalg.norm(tv - rq * v))},
        )
    if v.sum() < 0:
        v = -v
    return v / np.max(np.abs(v)), rq, sweep


# --- discretization ----------------------------------------------------------------


def _nodes(interval, n):
    g0, h0 = map(float, interval)
    if not h0 > g0:
        raise ValidationError(f"degenerate interval ({g0}, {h0})")
    if n < 3:
        raise ResolutionError(f"interval needs at least 4 grid cells, got n = {n} interior nodes")
    dx = (h0 - g0) / (n + 1)
    x = g0 + dx * np.arange(1, n + 1)
    return x, dx


def _potential(spec, x, d_I, alpha):
    return alpha * alpha / (4.0 * d_I) + spec.gamma(x) - spec.beta(x)


def eigen_matrix(interval, spec, n, d_I=None, alpha=None):
    """Diagonal, off-diagonal and nodes of the symmetrized eigen-operator."""
    d_I = spec.d_I if d_I is None else d_I
    alpha = spec.alpha if alpha is None else alpha
    x, dx = _nodes(interval, n)
    k = d_I / (dx * dx)
    diag = 2.0 * k + _potential(spec, x, d_I, alpha)
    off = np.full(n - 1, -k)
    return diag, off, x


def r0_matrix(interval, spec, n, d_I=None, alpha=None):
    """Symmetric tridiagonal matrix whose smallest eigenvalue is ``1/R0``."""
    d_I = spec.d_I if d_I is None else d_I
    alpha = spec.alpha if alpha is None else alpha
    x, dx = _nodes(interval, n)
    k = d_I / (dx * dx)
    beta = spec.beta(x)
    gamma = spec.gamma(x)
    root = np.sqrt(beta)
    diag = (2.0 * k + alpha * alpha / (4.0 * d_I) + gamma) / beta
    off = -k / (root[:-1] * root[1:])
    return diag, off, x


def richardson(coarse, fine):
    """Second-order Richardson combination for a halved grid spacing."""
    return (4.0 * fine - coarse) / 3.0


def _fine(n):
    # 2n+1 interior nodes halve the spacing exactly
    return 2 * n + 1


# --- public operations -------------------------------------------------------------


def principal_eigenvalue(interval, spec, n=DEFAULT_N, extrapolate=True, d_I=None, alpha=None):
    """Principal Dirichlet eigenvalue of ``-d_I psi'' + alpha psi' + (gamma - beta) psi``.

    Returns ``(lambda0, x, psi)`` with ``psi`` sampled on the ``n`` interior
    nodes, positive and scaled to unit maximum.
    """
    d_I = spec.d_I if d_I is None else d_I
    alpha = spec.alpha if alpha is None else alpha
    diag, off, x = eigen_matrix(interval, spec, n, d_I, alpha)
    lam = smallest_eigenvalue(diag, off)
    if extrapolate:
        dg, of, _ = eigen_matrix(interval, spec, _fine(n), d_I, alpha)
        lam_value = richardson(lam, smallest_eigenvalue(dg, of))
    else:
        lam_value = lam
    phi = _eigenvector(diag, off, lam)
    mid = 0.5 * (x[0] + x[-1])
    psi = np.exp(alpha * (x - mid) / (2.0 * d_I)) * phi
    return lam_value, x, psi / psi.max()


def _eigenvector(diag, off, lam):
    scale = float(np.max(np.abs(diag)) + 2.0 * np.max(np.abs(off), initial=0.0))
    shift = lam - 1e-9 * max(abs(lam), scale * 1e-3)
    v, _, _ = inverse_iteration(diag, off, shift)
    return v


def r0_dirichlet_advection(interval, spec, n=DEFAULT_N, extrapolate=True, d_I=None, alpha=None,
                           return_eigenfunction=False):
    """Basic reproduction number of the advective Dirichlet problem on ``interval``.

    With ``return_eigenfunction`` the result is ``(R0, x, phi)`` where ``phi``
    solves the symmetrized generalized problem on the ``n``-node grid.
    """
    d_I = spec.d_I if d_I is None else d_I
    alpha = spec.alpha if alpha is None else alpha
    diag, off, x = r0_matrix(interval, spec, n, d_I, alpha)
    nu, v = _generalized_smallest(diag, off)
    if extrapolate:
        dg, of, _ = r0_matrix(interval, spec, _fine(n), d_I, alpha)
        nu_fine, _ = _generalized_smallest(dg, of, want_vector=False)
        nu_value = richardson(nu, nu_fine)
    else:
        nu_value = nu
    r0 = 1.0 / nu_value
    if not return_eigenfunction:
        return r0
    phi = v / np.sqrt(spec.beta(x))
    return r0, x, phi / phi.max()


def _generalized_smallest(diag, off, want_vector=True):
    nu = smallest_eigenvalue(diag, off)
    if not want_vector:
        return nu, None
    scale = float(np.max(np.abs(diag)))
    v, rq, _ = inverse_iteration(diag, off, nu - 1e-9 * max(abs(nu), scale * 1e-3), tol=R0_RTOL * 1e-3)
    if abs(rq - nu) > 1e-8 * max(abs(nu), 1e-12) + 1e-13 * scale:
        raise NumericError("inverse iteration disagrees with Sturm bisection", {"sturm": nu, "rayleigh": rq})
    return nu, v


def analyze_interval(interval, spec, n=DEFAULT_N):
    """Eigenvalue, reproduction number and eigenfunction for one interval."""
    lam, x, psi = principal_eigenvalue(interval, spec, n)
    r0 = r0_dirichlet_advection(interval, spec, n)
    return SpectralResult(tuple(map(float, interval)), lam, r0, x, psi)


def rayleigh_quotient(interval, spec, phi, d_I=None, alpha=None):
    """Discrete variational quotient ``sum beta phi^2 / (d_I |phi_x|^2 + (alpha^2/4d_I + gamma) phi^2)``."""
    d_I = spec.d_I if d_I is None else d_I
    alpha = spec.alpha if alpha is None else alpha
    x, dx = _nodes(interval, len(phi))
    padded = np.concatenate([[0.0], phi, [0.0]])
    grad = np.diff(padded) / dx
    num = np.sum(spec.beta(x) * phi * phi) * dx
    den = d_I * np.sum(grad * grad) * dx + np.sum((alpha * alpha / (4.0 * d_I) + spec.gamma(x)) * phi * phi) * dx
    return num / den


def closed_form_r0(interval, beta, gamma, d_I, alpha=0.0):
    """Reproduction number for constant coefficients."""
    length = interval[1] - interval[0]
    return beta / (d_I * (math.pi / length) ** 2 + alpha * alpha / (4.0 * d_I) + gamma)


def closed_form_lambda0(interval, beta, gamma, d_I, alpha=0.0):
    length = interval[1] - interval[0]
    return d_I * (math.pi / length) ** 2 + alpha * alpha / (4.0 * d_I) + gamma - beta


def r0_free_series(trajectory, spec, n=DEFAULT_N, stride=1, strict=True):
    """``R0`` on the recorded front intervals of a trajectory.

    Returns a list of ``(t, g, h, R0)``.  With ``strict`` a decrease larger than
    ``1e-8`` between consecutive samples raises :class:`InvariantViolation`.
    """
    fronts = trajectory.sampled_fronts(stride)
    if not fronts:
        raise ValidationError("trajectory has no recorded fronts")
    out = []
    cache = {}
    for t, g, h in fronts:
        key = (g, h)
        if key not in cache:
            cache[key] = r0_dirichlet_advection((g, h), spec, n)
        out.append((t, g, h, cache[key]))
    if strict:
        check_monotone_series(out)
    return out


def check_monotone_series(series, tol=MONOTONE_TOL):
    values = np.array([row[-1] for row in series])
    drops = np.diff(values)
    if drops.size and drops.min() < -tol:
        i = int(np.argmin(drops))
        raise InvariantViolation(
            "R0 series is not increasing",
            {"t": series[i + 1][0], "previous": values[i], "value": values[i + 1]},
        )


@dataclass
class ProbeReport:
    rows: list
    checks: dict

    @property
    def passed(self):
        return all(self.checks.values())

    def table(self):
        width = max(len(k) for k in self.checks)
        return "\n".join(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}" for name, ok in self.checks.items())


def r0_properties_probe(spec, interval=(-1.0, 1.0), n=200, alphas=(0.0, 0.5, 1.0, 1.5),
                        scales=(1.0, 2.0, 4.0), far_length=50.0):
    """Sample R0 over parameter ladders and check its qualitative properties.

    ``rows`` holds ``(parameter, value, R0)`` triples; ``checks`` maps each
    property name to a pass flag.
    """
    rows = []
    checks = {}
    mid = 0.5 * (interval[0] + interval[1])
    half = 0.5 * (interval[1] - interval[0])

    def r0(iv, **kw):
        return r0_dirichlet_advection(iv, spec, n, **kw)

    values = []
    for a in alphas:
        values.append(r0(interval, alpha=a))
        rows.append(("alpha", a, values[-1]))
    checks["non-increasing in |alpha|"] = bool(np.all(np.diff(values) <= 1e-12))

    values = []
    for s in scales:
        iv = (mid - s * half, mid + s * half)
        values.append(r0(iv))
        rows.append(("half_length", s * half, values[-1]))
    checks["increasing in interval"] = bool(np.all(np.diff(values) > 0))

    large = [10.0 ** k for k in range(0, 5)]
    values = []
    for d in large:
        values.append(r0(interval, d_I=d))
        rows.append(("d_I", d, values[-1]))
    checks["decreasing in large d_I"] = bool(np.all(np.diff(values) < 0))
    checks["R0 -> 0 as d_I -> inf"] = values[-1] < 1e-2 * values[0]

    if spec.alpha != 0.0:
        small = [10.0 ** k for k in (-1.0, -1.5, -2.0)]
        values = []
        for d in small:
            # the boundary layer has width ~ d_I/|alpha|; resolve it
            m = max(n, int(8 * (interval[1] - interval[0]) * abs(spec.alpha) / d))
            values.append(r0_dirichlet_advection(interval, spec, m, d_I=d))
            rows.append(("d_I", d, values[-1]))
        checks["R0 -> 0 as d_I -> 0 (alpha != 0)"] = bool(np.all(np.diff(values) < 0))

    far = (mid - far_length, mid + far_length)
    r_far = r0(far)
    floor = spec.beta_inf / (spec.alpha ** 2 / (4.0 * spec.d_I) + spec.gamma_inf)
    rows.append(("far_half_length", far_length, r_far))
    checks["far-field floor within 5%"] = r_far >= 0.95 * floor
    return ProbeReport(rows, checks)


def threshold_diffusion(spec, interval=None, n=DEFAULT_N, d_min=1e-6, d_max=1e6, rtol=1e-10):
    """Critical diffusion rate where the advection-free R0 crosses 1.

    Returns 0 when every site is low-risk and R0 < 1 already at ``d_min``.
    """
    if spec.alpha != 0.0:
        raise ValidationError("the diffusion threshold is defined for alpha = 0")
    if interval is None:
        interval = (-spec.h0, spec.h0)

    def excess(d):
        return r0_dirichlet_advection(interval, spec, n, d_I=d) - 1.0

    lo = d_min
    if excess(lo) < 0:
        x = np.linspace(interval[0], interval[1], 4001)
        if np.all(spec.beta(x) <= spec.gamma(x)):
            return 0.0
        raise BracketError(f"R0 < 1 already at d_I = {d_min:g}; threshold lies below the bracket")
    hi = 1.0
    while excess(hi) > 0:
        if hi >= d_max:
            raise BracketError(f"R0 > 1 at d_I = {d_max:g}; widen the bracket")
        hi = min(hi * 4.0, d_max)
        lo = hi / 4.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
