import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.linalg import eigh_tridiagonal

from sisfront.errors import InvariantViolation, ValidationError
from sisfront.model import constant_example, reference_example
from sisfront.spectral import (
    ResolutionError,
    analyze_interval,
    check_monotone_series,
    closed_form_lambda0,
    closed_form_r0,
    eigen_matrix,
    principal_eigenvalue,
    r0_dirichlet_advection,
    r0_properties_probe,
    rayleigh_quotient,
    smallest_eigenvalue,
    sturm_count,
    threshold_diffusion,
)


def dense_advective_eigenvalue(interval, spec, n):
    """Smallest real eigenvalue of the unsymmetrized advective operator (dense)."""
    g0, h0 = interval
    dx = (h0 - g0) / (n + 1)
    x = g0 + dx * np.arange(1, n + 1)
    d, a = spec.d_I, spec.alpha
    main = 2 * d / dx**2 + spec.gamma(x) - spec.beta(x)
    lower = -d / dx**2 - a / (2 * dx)
    upper = -d / dx**2 + a / (2 * dx)
    mat = np.diag(main) + np.diag(np.full(n - 1, upper), 1) + np.diag(np.full(n - 1, lower), -1)
    eig = np.linalg.eigvals(mat)
    return float(np.min(eig.real))


@pytest.mark.parametrize("h0,alpha", [(1.0, 0.0), (1.0, 1.5), (2.5, -1.0), (0.5, 3.0)])
def test_constant_coefficient_eigenvalue_closed_form(h0, alpha):
    spec = constant_example(alpha=alpha, h0=h0)
    lam, _, _ = principal_eigenvalue((-h0, h0), spec)
    expected = 4.0 * (math.pi / (2 * h0)) ** 2 + alpha**2 / 16 + 1.0 - 4.0
    assert lam == pytest.approx(expected, abs=1e-8)


def test_pure_laplacian_eigenvalue():
    spec = constant_example(alpha=0.0, beta=2.0, gamma=2.0)
    lam, _, _ = principal_eigenvalue((-1.0, 1.0), spec)
    assert lam == pytest.approx(4.0 * (math.pi / 2) ** 2, abs=1e-8)


def test_reference_coefficients_against_dense_oracle(reference_spec):
    lam, x, psi = principal_eigenvalue((-1.0, 1.0), reference_spec)
    dense = dense_advective_eigenvalue((-1.0, 1.0), reference_spec, 2001)
    assert lam == pytest.approx(dense, rel=1e-5)
    assert np.all(psi > 0)
    assert psi.max() == 1.0


def test_eigenfunction_solves_advective_problem(reference_spec):
    lam, x, psi = principal_eigenvalue((-2.0, 3.0), reference_spec, n=800, extrapolate=False)
    dx = x[1] - x[0]
    p = np.concatenate([[0.0], psi, [0.0]])
    op = (-reference_spec.d_I * (p[2:] - 2 * psi + p[:-2]) / dx**2
          + reference_spec.alpha * (p[2:] - p[:-2]) / (2 * dx)
          + (reference_spec.gamma(x) - reference_spec.beta(x)) * psi)
    # centred advection differs from the symmetrized form at O(dx^2)
    assert np.max(np.abs(op - lam * psi)) < 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 40), st.randoms(use_true_random=False))
def test_sturm_count_matches_lapack(n, rng):
    diag = np.array([rng.uniform(-5, 5) for _ in range(n)])
    off = np.array([rng.uniform(-2, 2) for _ in range(n - 1)])
    eig = np.linalg.eigvalsh(np.diag(diag) + np.diag(off, 1) + np.diag(off, -1))
    sigma = rng.uniform(-8, 8)
    assume(np.min(np.abs(eig - sigma)) > 1e-9)
    off2 = list(off * off) + [0.0]
    assert sturm_count(list(diag), off2, sigma) == int(np.sum(eig < sigma))
    assert smallest_eigenvalue(diag, off) == pytest.approx(eig[0], rel=1e-11, abs=1e-12)


def test_smallest_eigenvalue_large_matrix():
    diag, off, _ = eigen_matrix((-3.0, 3.0), reference_example(alpha=0.0), 1500)
    ref = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0][0]
    # both solvers are limited by rounding at the matrix scale
    scale = np.max(np.abs(diag)) + 2 * np.max(np.abs(off))
    assert smallest_eigenvalue(diag, off) == pytest.approx(ref, abs=1e-14 * scale)


def test_r0_closed_forms():
    spec = constant_example(alpha=0.0)
    assert r0_dirichlet_advection((-1, 1), spec) == pytest.approx(4 / (math.pi**2 + 1), abs=1e-6)
    spec = constant_example(alpha=1.5)
    assert r0_dirichlet_advection((-1, 1), spec) == pytest.approx(4 / (math.pi**2 + 1.5**2 / 16 + 1), abs=1e-6)
    assert r0_dirichlet_advection((-3, 1), spec) == pytest.approx(closed_form_r0((-3, 1), 4, 1, 4, 1.5), abs=1e-6)


def test_low_risk_sites_give_r0_below_one():
    spec = reference_example(alpha=0.0).replace(beta_expr="0.5 + 0.4*sin(x)^2", beta_inf=0.9,
                                            gamma_expr="1 + 0.5*cos(x)^2", gamma_inf=1.2)
    for iv in [(-1, 1), (-10, 10), (0, 40)]:
        assert r0_dirichlet_advection(iv, spec) < 1.0


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 8.0), st.floats(-3.0, 3.0), st.floats(-2.0, 2.0))
def test_sign_relation(length, alpha, shift):
    spec = reference_example(alpha=alpha)
    iv = (shift - length / 2, shift + length / 2)
    r0 = r0_dirichlet_advection(iv, spec, n=120)
    lam, _, _ = principal_eigenvalue(iv, spec, n=120)
    if abs(1 - r0) > 1e-8:
        assert np.sign(1 - r0) == np.sign(lam)
    assert (1 - r0) * lam >= -1e-8


def test_rayleigh_quotient_reproduces_r0(reference_spec):
    iv = (-2.0, 3.0)
    r0_grid, x, phi = r0_dirichlet_advection(iv, reference_spec, n=300, extrapolate=False, return_eigenfunction=True)
    assert rayleigh_quotient(iv, reference_spec, phi) == pytest.approx(r0_grid, rel=1e-10)
    r0_ext = r0_dirichlet_advection(iv, reference_spec, n=1500)
    _, _, phi_fine = r0_dirichlet_advection(iv, reference_spec, n=1500, extrapolate=False, return_eigenfunction=True)
    assert rayleigh_quotient(iv, reference_spec, phi_fine) == pytest.approx(r0_ext, rel=1e-6)


def test_eigenvalue_grid_convergence_is_second_order(reference_spec):
    iv = (-1.0, 2.0)
    ns = [49, 99, 199, 399]  # spacing halves each time
    lams = [principal_eigenvalue(iv, reference_spec, n, extrapolate=False)[0] for n in ns]
    orders = [math.log2(abs(lams[i] - lams[i + 1]) / abs(lams[i + 1] - lams[i + 2])) for i in range(2)]
    assert all(abs(p - 2.0) < 0.1 for p in orders)


def test_analyze_interval_invariants(reference_spec):
    res = analyze_interval((-3.0, 3.0), reference_spec)
    assert res.r0 > 1 and res.lambda0 < 0
    assert np.all(res.eigenfunction > 0)


def test_short_interval_rejected(reference_spec):
    with pytest.raises(ResolutionError):
        r0_dirichlet_advection((-1, 1), reference_spec, n=2)
    with pytest.raises(ValidationError):
        principal_eigenvalue((1, 1), reference_spec)


def test_monotone_series_check():
    check_monotone_series([(0, 0, 1, 0.5), (1, 0, 1, 0.5), (2, 0, 1, 0.6)])
    with pytest.raises(InvariantViolation):
        check_monotone_series([(0, 0, 1, 0.5), (1, 0, 1, 0.49)])


def test_properties_probe_passes_on_reference_set(reference_spec):
    report = r0_properties_probe(reference_spec)
    assert report.passed, report.table()
    alpha_rows = [r for r in report.rows if r[0] == "alpha"]
    assert [r[1] for r in alpha_rows] == [0.0, 0.5, 1.0, 1.5]


def test_far_field_floor_constant_coefficients():
    spec = constant_example(alpha=1.5)
    floor = 4.0 / (1.5**2 / 16 + 1.0)
    assert r0_dirichlet_advection((-50, 50), spec) >= 0.95 * floor


def test_threshold_diffusion_low_risk_is_zero():
    spec = constant_example(alpha=0.0, beta=2.0, gamma=2.0)
    assert threshold_diffusion(spec) == 0.0


def test_threshold_diffusion_constant_closed_form():
    spec = constant_example(alpha=0.0, h0=1.5)
    assert threshold_diffusion(spec) == pytest.approx(3.0 * (3.0 / math.pi) ** 2, rel=1e-6)


def test_threshold_diffusion_cross_checked_by_eigenvalue_sign():
    spec = reference_example(alpha=0.0)
    d_star = threshold_diffusion(spec, (-1.0, 1.0))
    below, _, _ = principal_eigenvalue((-1, 1), spec, d_I=d_star - 1e-4)
    above, _, _ = principal_eigenvalue((-1, 1), spec, d_I=d_star + 1e-4)
    assert below < 0 < above


def test_threshold_diffusion_requires_no_advection(reference_spec):
    with pytest.raises(ValidationError):
        threshold_diffusion(reference_spec)


def test_closed_form_helpers_agree():
    iv = (-1.0, 1.0)
    lam = closed_form_lambda0(iv, 4, 1, 4, 1.5)
    r0 = closed_form_r0(iv, 4, 1, 4, 1.5)
    assert np.sign(lam) == np.sign(1 - r0)
