import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sisfront.errors import ExpressionError, ValidationError
from sisfront.model import (
    ModelSpec,
    bulk_rates,
    check,
    constant_example,
    reference_example,
    split_config,
    validate,
    velocity_bound,
)


def test_reference_set_is_valid(reference_spec):
    assert validate(reference_spec) == []


def test_large_advection_flagged(reference_spec):
    violations = validate(reference_spec.replace(alpha=8.0))
    assert [v.field for v in violations] == ["small advection"]
    # 2 sqrt(a d_I) with a = 3, d_I = 4
    assert "6.9282" in violations[0].reason


def test_nonvanishing_initial_data_flagged(reference_spec):
    violations = validate(reference_spec.replace(i0_expr="1"))
    assert any(v.field == "i0_expr" and "vanish" in v.reason for v in violations)


def test_initial_data_above_capacity_flagged(reference_spec):
    violations = validate(reference_spec.replace(i0_expr="3*cos(pi*x/2)"))
    assert any("exceeds" in v.reason for v in violations)


def test_negative_coefficient_flagged(reference_spec):
    violations = validate(reference_spec.replace(gamma_expr="1 - 3*cos(x)/(1 + x^2)"))
    assert any(v.field == "gamma_expr" for v in violations)


def test_wrong_declared_limit_flagged(reference_spec):
    violations = validate(reference_spec.replace(beta_inf=4.5))
    assert [v.field for v in violations] == ["beta_inf"]


def test_far_field_low_risk_flagged(reference_spec):
    spec = reference_spec.replace(beta_expr="1 + 0*x", beta_inf=1.0, gamma_expr="2 + 0*x", gamma_inf=2.0)
    assert any(v.field == "far field" for v in validate(spec))


def test_unevaluable_coefficient_raises(reference_spec):
    with pytest.raises(ExpressionError, match="x = 0"):
        validate(reference_spec.replace(beta_expr="4 + 1/x"))


def test_bulk_rates_reference_set(reference_spec):
    a, b, c = bulk_rates(reference_spec)
    assert a == 3.0
    assert b == 2.0
    assert c == pytest.approx(4.0 * math.sqrt(3.0), rel=1e-15)


def test_bulk_rates_rejects_degenerate_limit():
    spec = constant_example(beta=2.0, gamma=2.0)
    with pytest.raises(ValidationError):
        bulk_rates(spec)


@given(st.floats(0.1, 10), st.floats(0.5, 5))
def test_bulk_rates_constant_identity(gamma, n_star):
    spec = constant_example(beta=2 * gamma, gamma=gamma, n_star=n_star)
    a, b, _ = bulk_rates(spec)
    assert a == pytest.approx(gamma, rel=1e-15)
    assert b == pytest.approx(2 * gamma / n_star, rel=1e-15)


def test_far_field_limit_decay(reference_spec):
    x = np.linspace(-200, 200, 40001)
    assert np.all(np.abs(reference_spec.beta(x) - 4.0) <= 2.0 / (1.0 + x**2) + 1e-15)


def test_accessors_are_pure(reference_spec):
    x = np.linspace(-3, 3, 101)
    assert np.array_equal(reference_spec.beta(x), reference_spec.beta(x.copy()))
    assert bulk_rates(reference_spec) == bulk_rates(reference_spec)


def test_velocity_bound_reference_set(reference_spec):
    # M = max(alpha/d + sqrt(beta_max/(2d)), 4 (1 + pi/2) / (3 N*)), C1 = 2 M N* mu
    x = np.linspace(-1, 1, 4001)
    beta_max = np.max(4 + 2 * np.sin(x) / (1 + x**2))
    m = max(1.5 / 4 + math.sqrt(beta_max / 8), 4 * (1 + math.pi / 2) / 6)
    assert velocity_bound(reference_spec) == pytest.approx(2 * m * 2 * 6, rel=1e-5)


def test_config_roundtrip_and_strict_keys(reference_spec):
    data = reference_spec.to_dict()
    assert ModelSpec.from_dict(data) == reference_spec
    with pytest.raises(ValidationError, match="unknown"):
        split_config({**data, "colour": 1})
    spec, numerics = split_config({**data, "dt": 0.5}, ("dt",))
    assert numerics == {"dt": 0.5}
    with pytest.raises(ValidationError, match="missing"):
        ModelSpec.from_dict({k: v for k, v in data.items() if k != "mu"})
    with pytest.raises(ValidationError, match="number"):
        ModelSpec.from_dict({**data, "mu": "six"})


def test_check_raises_with_all_violations(reference_spec):
    with pytest.raises(ValidationError) as info:
        check(reference_spec.replace(alpha=8.0, i0_expr="1"))
    assert len(info.value.violations) == 2
