"""Front-fixing integrator for the two-front Stefan problem.

The moving interval ``[g(t), h(t)]`` is mapped onto ``y in [-1, 1]`` by
``x = (g + h)/2 + y (h - g)/2``.  With ``s = (h - g)/2`` the equation becomes

    I_t = (d_I / s**2) I_yy - conv(y) I_y + (beta - gamma) I - beta/N* I**2
    conv(y) = (alpha - (1 - y)/2 g' - (1 + y)/2 h') / s

on a fixed uniform grid.  Each step is backward Euler in time with centred
differences in space; the nonlinear system is solved by damped Newton with a
tridiagonal Jacobian.  Front positions and the mesh velocity are coupled to
the profile through a predictor-corrector loop on the Stefan conditions
``g' = -mu I_x(g)``, ``h' = -mu I_x(h)``.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvariantViolation, StepFailure, ValidationError
from .model import check, velocity_bound

POSITIVE_MASS = 1.0e-12


@dataclass(frozen=True)
class Grid:
    """Uniform interior nodes of the computational interval ``[-1, 1]``."""

    n: int
    y: np.ndarray = field(repr=False, compare=False)
    dy: float

    @classmethod
    def uniform(cls, n):
        if n < 16:
            raise ValidationError(f"grid needs at least 16 interior nodes, got {n}")
        dy = 2.0 / (n + 1)
        y = -1.0 + dy * np.arange(1, n + 1)
        return cls(n, y, dy)


@dataclass(frozen=True)
class FrontState:
    t: float
    g: float
    h: float


@dataclass
class Snapshot:
    t: float
    g: float
    h: float
    values: np.ndarray = field(repr=False)
    grid: Grid = field(repr=False)

    @property
    def front(self):
        return FrontState(self.t, self.g, self.h)

    @property
    def half_width(self):
        return 0.5 * (self.h - self.g)

    @property
    def x(self):
        """Physical coordinates of the interior nodes."""
        return 0.5 * (self.g + self.h) + self.half_width * self.grid.y

    def profile(self):
        """``(x, I)`` including the two front points where ``I = 0``."""
        x = np.concatenate([[self.g], self.x, [self.h]])
        values = np.concatenate([[0.0], self.values, [0.0]])
        return x, values

    @property
    def sup(self):
        return float(np.max(self.values))


@dataclass
class SolverOptions:
    newton_tol: float = 1.0e-10
    newton_maxiter: int = 25
    outer_tol: float = 1.0e-9
    outer_maxiter: int = 20
    clip_tol: float = 1.0e-8
    max_halvings: int = 10
    peclet_limit: float = 2.0

    @classmethod
    def from_dict(cls, data):
        known = cls.__dataclass_fields__
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ValidationError(f"unknown solver options: {', '.join(unknown)}")
        return cls(**data)


@dataclass
class StepInfo:
    gdot: float
    hdot: float
    raw_min: float
    raw_max: float
    newton_iterations: int
    outer_iterations: int


@dataclass
class Trajectory:
    """Time-ordered output of one run.

    ``front_history`` has one row ``(t, g, h, g', h', sup I)`` per accepted
    step (plus the initial state); ``snapshots`` are thinned by the output
    stride; ``r0f_history`` holds ``(t, R0)`` pairs filled in by hooks.
    """

    spec: object
    grid: Grid
    dt: float
    snapshots: list = field(default_factory=list)
    rows: list = field(default_factory=list, repr=False)
    raw_bounds: list = field(default_factory=list, repr=False)
    r0f_history: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    stopped_early: bool = False

    @property
    def front_history(self):
        return np.array(self.rows, dtype=float).reshape(-1, 6)

    @property
    def times(self):
        return self.front_history[:, 0]

    @property
    def final(self):
        return self.snapshots[-1]

    @property
    def t_end(self):
        return self.rows[-1][0]

    def sampled_fronts(self, stride=1):
        """``(t, g, h)`` at every ``stride``-th snapshot, always keeping the last one."""
        picked = self.snapshots[::stride]
        if picked and picked[-1] is not self.snapshots[-1]:
            picked.append(self.snapshots[-1])
        return [(s.t, s.g, s.h) for s in picked]

    def snapshot_at(self, t, atol=1e-9):
        for snap in self.snapshots:
            if abs(snap.t - t) <= atol:
                return snap
        raise KeyError(t)


def transform_coefficients(front, front_velocity, y, d_I, alpha):
    """Diffusion and convection coefficients of the equation in ``y``.

    ``front`` is ``(g, h)`` or a :class:`FrontState`; ``front_velocity`` is
    ``(g', h')``.  Works elementwise on arrays of ``y``.
    """
    g, h = (front.g, front.h) if isinstance(front, (FrontState, Snapshot)) else front
    if not h > g:
        raise ValidationError(f"degenerate domain: h = {h} <= g = {g}")
    gdot, hdot = front_velocity
    s = 0.5 * (h - g)
    y = np.asarray(y, dtype=float)
    diffusion = d_I / (s * s)
    convection = (alpha - 0.5 * (1.0 - y) * gdot - 0.5 * (1.0 + y) * hdot) / s
    return diffusion, convection


def boundary_slopes(values, dx):
    """Second-order one-sided ``I_x`` at the left and right fronts (``I = 0`` there)."""
    if values.size < 3:
        raise ValidationError("slope stencil needs at least 3 interior nodes")
    left = (4.0 * values[0] - values[1]) / (2.0 * dx)
    right = -(4.0 * values[-1] - values[-2]) / (2.0 * dx)
    return left, right


def stefan_velocity(snapshot, mu):
    """Front velocities ``(g', h') = (-mu I_x(g), -mu I_x(h))``."""
    dx = snapshot.half_width * snapshot.grid.dy
    left, right = boundary_slopes(snapshot.values, dx)
    return -mu * left, -mu * right


class FrontFixSolver:
    """Backward-Euler / Newton stepper for one validated model on one grid."""

    def __init__(self, spec, grid, options=None):
        self.spec = spec
        self.grid = grid
        self.options = options or SolverOptions()
        self.velocity_bound = velocity_bound(spec)
        self.peclet_warned = False
        self.bound_warned = False

    def initial_snapshot(self):
        spec = self.spec
        snap = Snapshot(0.0, -spec.h0, spec.h0, np.zeros(self.grid.n), self.grid)
        values = np.clip(spec.i0(snap.x), 0.0, spec.n_star)
        snap.values = values
        return snap

    def velocities(self, snapshot):
        return stefan_velocity(snapshot, self.spec.mu)

    def _newton(self, old, guess, g, h, gdot, hdot, dt):
        spec, grid, opts = self.spec, self.grid, self.options
        y, dy = grid.y, grid.dy
        s = 0.5 * (h - g)
        x = 0.5 * (g + h) + s * y
        beta = spec.beta(x)
        growth = beta - spec.gamma(x)
        crowd = beta / spec.n_star
        diffusion, conv = transform_coefficients((g, h), (gdot, hdot), y, spec.d_I, spec.alpha)
        k = diffusion / (dy * dy)
        lower = k + conv / (2.0 * dy)
        upper = k - conv / (2.0 * dy)
        peclet = float(np.max(np.abs(conv))) * dy / diffusion
        if peclet > opts.peclet_limit and not self.peclet_warned:
            self.peclet_warned = True
            warnings.warn(f"cell Peclet number {peclet:.3g} exceeds {opts.peclet_limit:g}; refine the grid",
                          RuntimeWarning, stacklevel=3)

        def residual(J):
            lap = -2.0 * k * J
            lap[1:] += lower[1:] * J[:-1]
            lap[:-1] += upper[:-1] * J[1:]
            return J - old - dt * (lap + growth * J - crowd * J * J)

        ab = np.empty((3, grid.n))
        ab[0, 0] = 0.0
        ab[0, 1:] = -dt * upper[:-1]
        ab[2, -1] = 0.0
        ab[2, :-1] = -dt * lower[1:]

        J = guess.copy()
        F = residual(J)
        norm = float(np.max(np.abs(F)))
        # at least one correction: for tiny profiles the initial residual is
        # already below an absolute tolerance and the decay would stall
        for it in range(1, opts.newton_maxiter + 1):
            ab[1] = 1.0 - dt * (-2.0 * k + growth - 2.0 * crowd * J)
            delta = solve_banded((1, 1), ab, -F, check_finite=False)
            lam = 1.0
            for _ in range(12):
                J_try = J + lam * delta
                F_try = residual(J_try)
                norm_try = float(np.max(np.abs(F_try)))
                if np.isfinite(norm_try) and (norm_try < norm or norm_try < opts.newton_tol):
                    break
                lam *= 0.5
            else:
                break
            J, F, norm = J_try, F_try, norm_try
            if norm < opts.newton_tol:
                return J, it
        raise StepFailure(
            "Newton iteration did not converge",
            {"iterations": opts.newton_maxiter, "residual": norm, "dt": dt},
        )

    def step(self, snapshot, dt):
        """Advance one backward-Euler step; returns ``(snapshot, StepInfo)``."""
        if not dt > 0:
            raise ValidationError("dt must be positive")
        opts = self.options
        old = snapshot.values
        mu = self.spec.mu
        dx_of = self.grid.dy

        gdot, hdot = self.velocities(snapshot)
        g, h = snapshot.g + dt * gdot, snapshot.h + dt * hdot
        J = old
        newton_total = 0
        for outer in range(1, opts.outer_maxiter + 1):
            J, its = self._newton(old, J, g, h, gdot, hdot, dt)
            newton_total += its
            left, right = boundary_slopes(J, 0.5 * (h - g) * dx_of)
            gdot, hdot = -mu * left, -mu * right
            g_new, h_new = snapshot.g + dt * gdot, snapshot.h + dt * hdot
            change = max(abs(g_new - g), abs(h_new - h))
            g, h = g_new, h_new
            if change < opts.outer_tol * (h - g):
                break
        else:
            raise StepFailure(
                "front predictor-corrector did not converge",
                {"outer_iterations": opts.outer_maxiter, "change": change, "dt": dt},
            )
        # final solve on the converged fronts
        J, its = self._newton(old, J, g, h, gdot, hdot, dt)
        newton_total += its

        raw_min, raw_max = float(J.min()), float(J.max())
        n_star = self.spec.n_star
        if raw_min < -opts.clip_tol or raw_max > n_star + opts.clip_tol:
            raise StepFailure(
                "profile left [0, N*] beyond the clipping tolerance",
                {"min": raw_min, "max": raw_max, "dt": dt},
            )
        J = np.clip(J, 0.0, n_star)
        new = Snapshot(snapshot.t + dt, g, h, J, self.grid)
        return new, StepInfo(gdot, hdot, raw_min, raw_max, newton_total, outer)

    def advance(self, snapshot, dt, depth=0):
        """Step by ``dt``, halving on failure up to ``max_halvings`` times.

        Returns the new snapshot and the list of StepInfo records of the
        sub-steps actually taken.
        """
        try:
            new, info = self.step(snapshot, dt)
            return new, [(new, info)]
        except StepFailure as exc:
            if depth >= self.options.max_halvings:
                if "min" in exc.diagnostics:
                    raise InvariantViolation(str(exc), exc.diagnostics) from None
                raise
        half = 0.5 * dt
        mid, first = self.advance(snapshot, half, depth + 1)
        end, second = self.advance(mid, half, depth + 1)
        return end, first + second

    def run(self, dt, t_end, hooks=(), output_stride=1, check_invariants=True):
        """Integrate to ``t_end`` with nominal step ``dt``.

        Each hook is called as ``hook(trajectory, snapshot)`` at every output
        sample (the initial state included); a truthy return stops the run.
        """
        if not (dt > 0 and t_end > 0):
            raise ValidationError("dt and t_end must be positive")
        if output_stride < 1:
            raise ValidationError("output_stride must be >= 1")
        traj = Trajectory(self.spec, self.grid, dt)
        snap = self.initial_snapshot()
        gdot, hdot = self.velocities(snap)
        traj.rows.append((0.0, snap.g, snap.h, gdot, hdot, snap.sup))
        traj.raw_bounds.append((float(snap.values.min()), float(snap.values.max())))
        traj.snapshots.append(snap)
        if _call_hooks(hooks, traj, snap):
            traj.stopped_early = True
            return traj

        n_steps = max(1, int(round(t_end / dt)))
        for i in range(1, n_steps + 1):
            target = i * dt
            new, parts = self.advance(snap, target - snap.t)
            for sub, info in parts:
                if check_invariants:
                    self._check_step(traj, sub, info)
                traj.rows.append((sub.t, sub.g, sub.h, info.gdot, info.hdot, sub.sup))
                traj.raw_bounds.append((info.raw_min, info.raw_max))
            new.t = target
            traj.rows[-1] = (target,) + traj.rows[-1][1:]
            snap = new
            if i % output_stride == 0 or i == n_steps:
                traj.snapshots.append(snap)
                if _call_hooks(hooks, traj, snap):
                    traj.stopped_early = i < n_steps
                    break
        return traj

    def _check_step(self, traj, sub, info):
        prev = traj.rows[-1]
        bound = self.velocity_bound
        if max(-info.gdot, info.hdot) > bound and not self.bound_warned:
            self.bound_warned = True
            msg = f"front speed {max(-info.gdot, info.hdot):.6g} exceeds the a-priori bound {bound:.6g}"
            traj.warnings.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=3)
        if prev[5] > POSITIVE_MASS and not (sub.g < prev[1] and sub.h > prev[2]):
            msg = f"front monotonicity violated at t = {sub.t:.6g}"
            traj.warnings.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=3)


def _call_hooks(hooks, traj, snap):
    stop = False
    for hook in hooks:
        stop = bool(hook(traj, snap)) or stop
    return stop


def run(spec, dt, n, t_end, hooks=(), output_stride=1, options=None, validate=True):
    """Simulate one model from its initial data; returns a :class:`Trajectory`."""
    if validate:
        check(spec)
    solver = FrontFixSolver(spec, Grid.uniform(n), options)
    return solver.run(dt, t_end, hooks=hooks, output_stride=output_stride)


def resample(snapshot, x):
    """Cubic-spline interpolation of a snapshot's profile (zero outside the fronts)."""
    from scipy.interpolate import CubicSpline

    xs, vs = snapshot.profile()
    out = np.zeros_like(np.asarray(x, dtype=float))
    inside = (x >= xs[0]) & (x <= xs[-1])
    out[inside] = CubicSpline(xs, vs)(np.asarray(x)[inside])
    return out


def richardson_order(coarse, medium, fine, ratio=2.0):
    """Observed convergence order from three solutions with a constant refinement ratio."""
    return math.log(abs(coarse - medium) / abs(medium - fine)) / math.log(ratio)


__all__ = [
    "Grid",
    "FrontState",
    "Snapshot",
    "SolverOptions",
    "StepInfo",
    "Trajectory",
    "FrontFixSolver",
    "transform_coefficients",
    "boundary_slopes",
    "stefan_velocity",
    "run",
    "resample",
    "richardson_order",
]
