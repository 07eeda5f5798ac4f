"""Model parameters, coefficient evaluation and validation.

The model is the SIS infected-class equation with advection on a moving
interval ``(g(t), h(t))``::

    I_t - d_I I_xx + alpha I_x = (beta(x) - gamma(x)) I - beta(x)/N* I**2
    I(g, t) = I(h, t) = 0,  g' = -mu I_x(g, t),  h' = -mu I_x(h, t)
    g(0) = -h0, h(0) = h0, I(x, 0) = I0(x)
"""

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionError, ValidationError
from .expr import Expression

MODEL_KEYS = (
    "d_I",
    "alpha",
    "mu",
    "n_star",
    "h0",
    "beta_expr",
    "gamma_expr",
    "beta_inf",
    "gamma_inf",
    "i0_expr",
)

#: far-field probe used to cross-check the declared limits
LIMIT_PROBE = 1.0e3
LIMIT_TOL = 1.0e-2
BOUNDARY_TOL = 1.0e-12


@dataclass(frozen=True)
class ModelSpec:
    d_I: float
    alpha: float
    mu: float
    n_star: float
    h0: float
    beta_expr: Expression
    gamma_expr: Expression
    beta_inf: float
    gamma_inf: float
    i0_expr: Expression

    def __post_init__(self):
        for name in ("beta_expr", "gamma_expr", "i0_expr"):
            object.__setattr__(self, name, Expression(getattr(self, name)))
        for name in ("d_I", "alpha", "mu", "n_star", "h0", "beta_inf", "gamma_inf"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def beta(self, x):
        return self.beta_expr(x)

    def gamma(self, x):
        return self.gamma_expr(x)

    def i0(self, x):
        return self.i0_expr(x)

    @property
    def a(self):
        """Far-field net growth rate ``beta_inf - gamma_inf``."""
        return self.beta_inf - self.gamma_inf

    @property
    def b(self):
        """Far-field crowding coefficient ``beta_inf / N*``."""
        return self.beta_inf / self.n_star

    @property
    def far_field_density(self):
        return self.a / self.b

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        out = {}
        for key in MODEL_KEYS:
            value = getattr(self, key)
            out[key] = value.source if isinstance(value, Expression) else value
        return out

    @classmethod
    def from_dict(cls, data):
        unknown = sorted(set(data) - set(MODEL_KEYS))
        missing = [k for k in MODEL_KEYS if k not in data]
        problems = [Violation(k, "unknown config key") for k in unknown]
        problems += [Violation(k, "missing required key") for k in missing]
        for key in MODEL_KEYS:
            if key in data and not key.endswith("_expr"):
                value = data[key]
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    problems.append(Violation(key, f"expected a number, got {value!r}"))
        if problems:
            raise ValidationError(_summary(problems), problems)
        try:
            return cls(**{k: data[k] for k in MODEL_KEYS})
        except ExpressionError as exc:
            raise ValidationError(str(exc), [Violation("expression", str(exc))]) from None


@dataclass(frozen=True)
class Violation:
    field: str
    reason: str

    def __str__(self):
        return f"{self.field}: {self.reason}"


def _summary(violations):
    return "; ".join(str(v) for v in violations)


def probe_grid(spec):
    """Points where positivity of the coefficients is checked."""
    core = np.linspace(-50.0, 50.0, 4001)
    tails = np.geomspace(50.0, LIMIT_PROBE, 200)
    return np.unique(np.concatenate([-tails, core, tails, [-spec.h0, spec.h0]]))


def validate(spec):
    """Return every violated model invariant; an empty list means valid.

    Raises :class:`ExpressionError` when a coefficient cannot be evaluated
    at a probe point.
    """
    out = []
    for name in ("d_I", "mu", "n_star", "h0"):
        if not getattr(spec, name) > 0:
            out.append(Violation(name, f"must be positive, got {getattr(spec, name)!r}"))
    if out:
        return out

    x = probe_grid(spec)
    beta = spec.beta(x)
    gamma = spec.gamma(x)
    if np.any(beta <= 0):
        out.append(Violation("beta_expr", f"beta must be positive; beta({x[np.argmin(beta)]:g}) = {beta.min():g}"))
    if np.any(gamma <= 0):
        out.append(Violation("gamma_expr", f"gamma must be positive; gamma({x[np.argmin(gamma)]:g}) = {gamma.min():g}"))
    for name, fn, limit in (("beta_inf", spec.beta, spec.beta_inf), ("gamma_inf", spec.gamma, spec.gamma_inf)):
        far = fn(np.array([-LIMIT_PROBE, LIMIT_PROBE]))
        if np.max(np.abs(far - limit)) > LIMIT_TOL:
            out.append(Violation(name, f"declared limit {limit:g} disagrees with values {far[0]:g}, {far[1]:g} at |x| = {LIMIT_PROBE:g}"))

    a = spec.a
    if not a > 0:
        out.append(Violation("far field", f"beta_inf - gamma_inf = {a:g} must be positive (far sites high-risk)"))
    else:
        c_fisher = 2.0 * math.sqrt(a * spec.d_I)
        if not abs(spec.alpha) < c_fisher:
            out.append(Violation("small advection", f"|alpha| = {abs(spec.alpha):g} >= 2 sqrt(a d_I) = {c_fisher:.6g}"))

    ends = spec.i0(np.array([-spec.h0, spec.h0]))
    if np.max(np.abs(ends)) > BOUNDARY_TOL * max(1.0, spec.n_star):
        out.append(Violation("i0_expr", f"I0(-h0) = {ends[0]:g}, I0(h0) = {ends[1]:g}; both must vanish"))
    xi = np.linspace(-spec.h0, spec.h0, 2001)[1:-1]
    i0 = spec.i0(xi)
    if np.any(i0 <= 0):
        out.append(Violation("i0_expr", f"I0 must be positive inside (-h0, h0); I0({xi[np.argmin(i0)]:g}) = {i0.min():g}"))
    if np.any(i0 > spec.n_star):
        out.append(Violation("i0_expr", f"I0 exceeds N* = {spec.n_star:g}; max = {i0.max():g}"))
    return out


def check(spec):
    """Raise :class:`ValidationError` unless ``spec`` is valid."""
    violations = validate(spec)
    if violations:
        raise ValidationError(_summary(violations), violations)
    return spec


def bulk_rates(spec):
    """Return ``(a, b, c_fisher)``: far-field growth, crowding and Fisher speed."""
    a = spec.a
    if not a > 0:
        raise ValidationError(
            f"beta_inf - gamma_inf = {a:g} must be positive",
            [Violation("far field", "a <= 0")],
        )
    return a, spec.b, 2.0 * math.sqrt(a * spec.d_I)


def velocity_bound(spec, samples=4001):
    """A-priori bound ``C1 = 2 M N* mu`` on the front speeds.

    ``M = max(|alpha|/d_I + sqrt(beta_max/(2 d_I)), 4 ||I0||_C1 / (3 N*))``
    with ``beta_max`` taken over the initial interval and the C1 norm
    approximated on a uniform sample.
    """
    x = np.linspace(-spec.h0, spec.h0, samples)
    beta_max = float(np.max(spec.beta(x)))
    i0 = spec.i0(x)
    c1_norm = float(np.max(np.abs(i0)) + np.max(np.abs(np.gradient(i0, x))))
    m = max(
        abs(spec.alpha) / spec.d_I + math.sqrt(beta_max / (2.0 * spec.d_I)),
        4.0 * c1_norm / (3.0 * spec.n_star),
    )
    return 2.0 * m * spec.n_star * spec.mu


def reference_example(mu=6.0, alpha=1.5):
    """The heterogeneous parameter set used for the illustrative runs."""
    return ModelSpec(
        d_I=4.0,
        alpha=alpha,
        mu=mu,
        n_star=2.0,
        h0=1.0,
        beta_expr="4 + 2*sin(x)/(1 + x^2)",
        gamma_expr="1 + cos(x)/(1 + x^2)",
        beta_inf=4.0,
        gamma_inf=1.0,
        i0_expr="cos(pi*x/2)",
    )


def constant_example(mu=6.0, alpha=1.5, beta=4.0, gamma=1.0, h0=1.0, d_I=4.0, n_star=2.0):
    """Constant coefficients with the cosine bump on ``(-h0, h0)``."""
    return ModelSpec(
        d_I=d_I,
        alpha=alpha,
        mu=mu,
        n_star=n_star,
        h0=h0,
        beta_expr=repr(float(beta)),
        gamma_expr=repr(float(gamma)),
        beta_inf=beta,
        gamma_inf=gamma,
        i0_expr=f"{min(1.0, n_star)!r}*cos(pi*x/(2*{float(h0)!r}))",
    )


def load_config(path):
    with open(path) as fh:
        return json.load(fh)


def split_config(data, numeric_keys=()):
    """Split a config mapping into model keys and numerics overrides.

    Any key that is neither a model key nor in ``numeric_keys`` is an error.
    """
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object", [Violation("config", "not an object")])
    unknown = sorted(set(data) - set(MODEL_KEYS) - set(numeric_keys))
    if unknown:
        problems = [Violation(k, "unknown config key") for k in unknown]
        raise ValidationError(_summary(problems), problems)
    model = {k: v for k, v in data.items() if k in MODEL_KEYS}
    numerics = {k: v for k, v in data.items() if k in numeric_keys}
    return ModelSpec.from_dict(model), numerics


__all__ = [
    "MODEL_KEYS",
    "ModelSpec",
    "Violation",
    "validate",
    "check",
    "bulk_rates",
    "velocity_bound",
    "reference_example",
    "constant_example",
    "load_config",
    "split_config",
]
