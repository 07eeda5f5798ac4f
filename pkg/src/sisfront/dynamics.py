"""Spreading/vanishing classification, the sharp threshold in mu, and speed fits."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketError, InconclusiveProbeError, NumericError, ValidationError, WindowError
from .frontfix import run, resample
from .model import check
from .spectral import r0_dirichlet_advection

SPREADING = "spreading"
VANISHING = "vanishing"
UNDETERMINED = "undetermined"


@dataclass
class Criteria:
    tol_front: float = 1.0e-6
    tol_mass: float = 1.0e-5
    tail_fraction: float = 0.2
    min_horizon: float = 0.0
    spectral_n: int = 200


@dataclass
class Outcome:
    verdict: str
    certificate: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"verdict": self.verdict, "certificate": self.certificate, "diagnostics": self.diagnostics}


class R0Monitor:
    """Hook that records ``R0`` on the current front interval at each output sample.

    With ``stop_on_spreading`` the run ends as soon as a value reaches 1.
    """

    def __init__(self, spec, n=200, stop_on_spreading=False):
        self.spec = spec
        self.n = n
        self.stop_on_spreading = stop_on_spreading

    def __call__(self, traj, snap):
        r0 = r0_dirichlet_advection((snap.g, snap.h), self.spec, self.n)
        traj.r0f_history.append((snap.t, r0))
        return self.stop_on_spreading and r0 >= 1.0


def _ensure_r0_series(traj, spec, n):
    if not traj.r0f_history:
        for snap in traj.snapshots:
            traj.r0f_history.append((snap.t, r0_dirichlet_advection((snap.g, snap.h), spec, n)))
    return traj.r0f_history


def classify(trajectory, spec, criteria=None):
    """Spreading if some sampled ``R0(t) >= 1``; vanishing if the trailing
    window shows stalled fronts, negligible mass and a terminal ``R0 < 1``;
    undetermined otherwise."""
    crit = criteria or Criteria()
    fh = trajectory.front_history
    t_end = float(fh[-1, 0])
    g_end, h_end = float(fh[-1, 1]), float(fh[-1, 2])
    diagnostics = {
        "final_sup_I": float(fh[-1, 5]),
        "final_g": g_end,
        "final_h": h_end,
        "horizon": t_end,
    }
    series = _ensure_r0_series(trajectory, spec, crit.spectral_n)
    for t, r0 in series:
        if r0 >= 1.0:
            snap = min(trajectory.snapshots, key=lambda s: abs(s.t - t))
            return Outcome(SPREADING, {"t0": t, "R0": r0, "g": snap.g, "h": snap.h}, diagnostics)

    if t_end < crit.min_horizon:
        diagnostics["advice"] = f"horizon {t_end:g} is below the minimum {crit.min_horizon:g}"
        return Outcome(UNDETERMINED, {}, diagnostics)

    tail = fh[fh[:, 0] >= (1.0 - crit.tail_fraction) * t_end]
    width = h_end - g_end
    right_advance = float(tail[-1, 2] - tail[0, 2])
    left_advance = float(tail[0, 1] - tail[-1, 1])
    sup_tail = float(np.max(tail[:, 5]))
    terminal_r0 = r0_dirichlet_advection((g_end, h_end), spec, crit.spectral_n)
    clauses = {
        "fronts_stalled": max(right_advance, left_advance) < crit.tol_front * width,
        "mass_decayed": sup_tail < crit.tol_mass * spec.n_star,
        "terminal_R0_below_one": terminal_r0 < 1.0,
    }
    evidence = {
        "right_advance": right_advance,
        "left_advance": left_advance,
        "tail_sup_I": sup_tail,
        "terminal_R0": terminal_r0,
        "window": [float(tail[0, 0]), t_end],
    }
    if all(clauses.values()):
        return Outcome(VANISHING, {**evidence, **clauses}, diagnostics)
    diagnostics.update(evidence)
    diagnostics["clauses"] = clauses
    diagnostics["advice"] = "extend t_end"
    return Outcome(UNDETERMINED, {}, diagnostics)


@dataclass
class ProbeSettings:
    dt: float = 0.01
    n: int = 200
    horizon: float = 40.0
    max_horizon: float = 320.0
    output_stride: int = 50
    criteria: Criteria = field(default_factory=Criteria)


def simulate_and_classify(spec, dt, n, t_end, output_stride=50, criteria=None, stop_on_spreading=True):
    crit = criteria or Criteria()
    monitor = R0Monitor(spec, crit.spectral_n, stop_on_spreading=stop_on_spreading)
    traj = run(spec, dt, n, t_end, hooks=[monitor], output_stride=output_stride)
    return traj, classify(traj, spec, crit)


def probe(spec, mu, settings):
    """Classify one value of mu, doubling the horizon while undetermined."""
    trial = spec.replace(mu=mu)
    horizon = settings.horizon
    while True:
        stride = max(1, int(round(settings.output_stride * horizon / settings.horizon)))
        _, outcome = simulate_and_classify(trial, settings.dt, settings.n, horizon, stride, settings.criteria)
        if outcome.verdict != UNDETERMINED:
            return outcome
        if horizon * 2 > settings.max_horizon:
            raise InconclusiveProbeError(
                f"classification at mu = {mu:g} undetermined up to t = {horizon:g}", mu)
        horizon *= 2


@dataclass
class ThresholdResult:
    mu_lo: float
    mu_hi: float
    probes: list = field(default_factory=list)

    @property
    def estimate(self):
        return 0.5 * (self.mu_lo + self.mu_hi)

    @property
    def width(self):
        return self.mu_hi - self.mu_lo

    @property
    def monotone(self):
        """No spreading verdict sits below a vanishing one along the probes."""
        ordered = sorted(self.probes, key=lambda p: p[0])
        seen_spreading = False
        for _, verdict, _ in ordered:
            if verdict == SPREADING:
                seen_spreading = True
            elif verdict == VANISHING and seen_spreading:
                return False
        return True


def _probe_task(args):
    spec, mu, settings = args
    return probe(spec, mu, settings)


def _run_probes(spec, mus, settings, workers):
    tasks = [(spec, mu, settings) for mu in mus]
    if workers <= 1 or len(tasks) == 1:
        return [_probe_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_probe_task, tasks))


def find_mu_star(spec, bracket=(1.0, 6.0), width=0.25, settings=None, workers=1):
    """Enclose the critical expanding capability by bisection on the verdict.

    With ``workers > 1`` each round probes ``workers`` evenly spaced interior
    points concurrently; results are merged in probe order.
    """
    check(spec)
    settings = settings or ProbeSettings()
    r0_initial = r0_dirichlet_advection((-spec.h0, spec.h0), spec, settings.criteria.spectral_n)
    if r0_initial >= 1.0:
        return ThresholdResult(0.0, 0.0, [(0.0, SPREADING, 0.0)])
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise BracketError(f"invalid bracket {bracket}")

    probes = []

    def record(mu, outcome):
        probes.append((mu, outcome.verdict, outcome.certificate.get("t0")))

    ends = _run_probes(spec, [lo, hi], settings, workers)
    for mu, outcome in zip((lo, hi), ends):
        record(mu, outcome)
    if ends[0].verdict != VANISHING or ends[1].verdict != SPREADING:
        raise BracketError(
            f"bracket ends classify as {ends[0].verdict} / {ends[1].verdict}; need vanishing / spreading")

    k = max(1, workers)
    while hi - lo > width:
        mus = [lo + (hi - lo) * (i + 1) / (k + 1) for i in range(k)]
        outcomes = _run_probes(spec, mus, settings, workers)
        for mu, outcome in zip(mus, outcomes):
            record(mu, outcome)
        new_lo, new_hi = lo, hi
        for mu, outcome in zip(mus, outcomes):
            if outcome.verdict == VANISHING:
                new_lo = max(new_lo, mu)
        for mu, outcome in zip(mus, outcomes):
            if outcome.verdict == SPREADING and mu > new_lo:
                new_hi = min(new_hi, mu)
        lo, hi = new_lo, new_hi
    return ThresholdResult(lo, hi, probes)


@dataclass
class SpeedEstimate:
    left_speed: float
    right_speed: float
    left_fit: tuple
    right_fit: tuple
    window: tuple


def _fit(t, y):
    (slope, intercept), res, *_ = np.polyfit(t, y, 1, full=True)
    resid = float(math.sqrt(res[0] / t.size)) if res.size else 0.0
    return float(slope), float(intercept), resid


def estimate_speeds(trajectory, x_far=10.0, fraction=0.5):
    """Least-squares front speeds over the trailing ``fraction`` of the horizon.

    Each fit is ``(slope, intercept, rms residual)``.
    """
    fh = trajectory.front_history
    t_end = fh[-1, 0]
    tail = fh[fh[:, 0] >= (1.0 - fraction) * t_end]
    if tail.shape[0] < 3:
        raise NumericError("not enough samples in the trailing window to fit speeds")
    if min(-tail[0, 1], tail[0, 2]) <= x_far:
        raise NumericError(
            f"fronts ({tail[0, 1]:.4g}, {tail[0, 2]:.4g}) have not left |x| <= {x_far:g} "
            "by the start of the fit window; extend t_end")
    t = tail[:, 0]
    right = _fit(t, tail[:, 2])
    left = _fit(t, -tail[:, 1])
    return SpeedEstimate(left[0], right[0], left, right, (float(t[0]), float(t[-1])))


@dataclass
class AttractorReport:
    window: tuple
    times: np.ndarray
    errors: np.ndarray
    max_error: float


def verify_attractor(trajectory, equilibrium, window=(-5.0, 5.0), fraction=0.1, outcome=None,
                     points=401):
    """Sup-norm distance to the equilibrium on ``window`` over the last
    ``fraction`` of the horizon.

    ``equilibrium`` is a callable of x (an :class:`EquilibriumProfile`) or a
    constant.
    """
    if outcome is not None and outcome.verdict != SPREADING:
        raise ValidationError(f"attractor check needs a spreading run, got {outcome.verdict}")
    lo, hi = window
    final = trajectory.final
    if not (final.g < lo and hi < final.h):
        raise WindowError(f"window {window} not inside final interval ({final.g:.4g}, {final.h:.4g})")
    xs = np.linspace(lo, hi, points)
    target = equilibrium(xs) if callable(equilibrium) else np.full(points, float(equilibrium))
    t_end = final.t
    times, errors = [], []
    for snap in trajectory.snapshots:
        if snap.t < (1.0 - fraction) * t_end or not (snap.g < lo and hi < snap.h):
            continue
        times.append(snap.t)
        errors.append(float(np.max(np.abs(resample(snap, xs) - target))))
    errors = np.array(errors)
    return AttractorReport(tuple(window), np.array(times), errors, float(errors.max()))


def error_history(trajectory, equilibrium, window=(-5.0, 5.0), points=401):
    """``(t, sup error)`` for every snapshot whose interval contains the window."""
    lo, hi = window
    xs = np.linspace(lo, hi, points)
    target = equilibrium(xs) if callable(equilibrium) else np.full(points, float(equilibrium))
    rows = []
    for snap in trajectory.snapshots:
        if snap.g < lo and hi < snap.h:
            rows.append((snap.t, float(np.max(np.abs(resample(snap, xs) - target)))))
    return rows
