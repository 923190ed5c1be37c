"""Discretized model operator: grid construction, exact matrix identities,
and frozen spectral regression values at production resolution.

The frozen numbers were produced by this code and cross-checked against the
closed-form asymptote quantities (counting index, resolvent asymptote trace);
they guard the discretization against silent drift.
"""

import numpy as np
import pytest

from wittenlab.model import (
    DiscretizedModel,
    ResourceCapExceeded,
    build_path,
    delta_r,
    delta_s,
    discretize,
    essential_spectrum_strips,
    fredholm_check,
    kernel_dims,
    resolvent_trace_check,
    ssf_H_discrete,
)


# ---------------------------------------------------------------------------
# path construction


def test_path_endpoints(tanh_path):
    assert np.allclose(tanh_path.A(-60.0), [[-1.0]], atol=1e-8)
    assert np.allclose(tanh_path.A(60.0), [[1.0]], atol=1e-8)
    assert np.allclose(tanh_path.A_plus, [[1.0]])


def test_path_midpoint_value(tanh_path):
    # s(0) = 1/2 for the logistic profile
    assert np.allclose(tanh_path.A(0.0), [[0.0]], atol=1e-15)


def test_path_a_many_matches_scalar(crossing_path):
    ts = np.array([-2.0, 0.0, 1.5])
    stack = crossing_path.A_many(ts)
    for k, t in enumerate(ts):
        assert np.allclose(stack[k], crossing_path.A(t), atol=1e-15)


def test_build_path_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        build_path(np.eye(2), np.eye(3))


def test_build_path_rejects_unknown_profile():
    with pytest.raises(ValueError, match="unknown profile"):
        build_path([[0.0]], [[1.0]], profile_name="sigmoidal")


def test_build_path_custom_sampled():
    ts = np.linspace(-10.0, 10.0, 41)
    ss = 0.5 * (1.0 + np.tanh(ts))
    p = build_path([[-1.0]], [[2.0]], profile_name="custom-sampled", samples=(ts, ss))
    assert abs(float(p.s(0.0)) - 0.5) < 1e-12
    assert float(p.s(-50.0)) == ss[0]
    assert float(p.s_prime(-50.0)) == 0.0


def test_build_path_custom_requires_samples():
    with pytest.raises(ValueError, match="custom-sampled"):
        build_path([[0.0]], [[1.0]], profile_name="custom-sampled")


def test_build_path_rejects_bad_limits():
    # a profile that tops out at 0.9 is not a valid interpolation to A_plus
    ts = np.array([-10.0, 0.0, 10.0])
    ss = np.array([0.0, 0.45, 0.9])
    with pytest.raises(ValueError, match="profile limits"):
        build_path([[0.0]], [[1.0]], profile_name="custom-sampled", samples=(ts, ss))


# ---------------------------------------------------------------------------
# discretization: exact structural identities


def test_discretize_validation(tanh_path):
    with pytest.raises(ValueError):
        discretize(tanh_path, 10.0, 100)  # even N
    with pytest.raises(ValueError):
        discretize(tanh_path, 10.0, 1)
    with pytest.raises(ValueError):
        discretize(tanh_path, -1.0, 101)


def test_dimension_cap(monkeypatch, tanh_path):
    monkeypatch.setenv("WITTENLAB_MAX_DIM", "100")
    with pytest.raises(ResourceCapExceeded):
        discretize(tanh_path, 10.0, 101)
    assert discretize(tanh_path, 10.0, 99).N == 99
    monkeypatch.setenv("WITTENLAB_MAX_DIM", "banana")
    with pytest.raises(ValueError):
        discretize(tanh_path, 10.0, 99)


def test_factors_reproduce_h1_h2(model_cache):
    m = model_cache("crossing", 6.0, 41)
    d, e = m.factors()
    assert np.allclose(d.T @ d, m.H1, atol=1e-11)
    assert np.allclose(e.T @ e, m.H2, atol=1e-11)


def test_banded_spectra_match_dense(model_cache):
    m = model_cache("crossing", 6.0, 41)
    m1, m2 = m.spectra()
    assert np.allclose(m1, np.linalg.eigvalsh(m.H1), atol=1e-10)
    assert np.allclose(m2, np.linalg.eigvalsh(m.H2), atol=1e-10)


def test_trace_identity_residual(model_cache):
    # tr H1 - tr H2 = (2/h) tr(A(tau_0) - A(tau_N)) exactly (roundoff only)
    for name, L, N in (("tanh", 8.0, 101), ("crossing", 6.0, 41)):
        m = model_cache(name, L, N)
        assert abs(m.trace_identity_residual()) < 1e-9


def test_reflection_swaps_spectra():
    # reversed symmetric-profile path <=> time reflection: spectra swap exactly
    fwd = build_path([[-1.0]], [[2.0]], profile_name="logistic")
    rev = build_path([[1.0]], [[-2.0]], profile_name="logistic")
    mf = discretize(fwd, 8.0, 101)
    mr = discretize(rev, 8.0, 101)
    f1, f2 = mf.spectra()
    r1, r2 = mr.spectra()
    assert np.allclose(f1, r2, atol=1e-10)
    assert np.allclose(f2, r1, atol=1e-10)


def test_free_path_has_equal_spectra():
    # B_plus = 0: D and E differ by a sign flip of the derivative only
    p = build_path([[1.5]], [[0.0]], profile_name="logistic")
    m = discretize(p, 8.0, 101)
    m1, m2 = m.spectra()
    assert np.allclose(m1, m2, atol=1e-10)


# ---------------------------------------------------------------------------
# frozen regression values (tanh model, production resolution)


@pytest.fixture(scope="module")
def tanh_prod(model_cache):
    return model_cache("tanh", 40.0, 2001)


def test_tanh_kernel_dims(tanh_prod):
    assert kernel_dims(tanh_prod, 1e-4) == (1, 0)


def test_tanh_zero_mode(tanh_prod):
    m1, m2 = tanh_prod.spectra()
    assert abs(m1[0]) < 1e-10  # exact zero mode up to roundoff
    assert m2[0] > 0.74


def test_tanh_low_spectrum_frozen(tanh_prod):
    m1, m2 = tanh_prod.spectra()
    assert np.allclose(m1[:3], [0.0, 0.749918326, 1.00178710], atol=2e-8)
    assert np.allclose(m2[:2], [0.74999833, 1.00169986], atol=2e-8)


def test_tanh_delta_r_frozen(tanh_prod):
    assert abs(delta_r(tanh_prod, -0.01) - 0.9950414) < 2e-6


def test_tanh_delta_s_frozen(tanh_prod):
    assert abs(delta_s(tanh_prod, 0.5) - 0.682861) < 2e-6
    assert abs(delta_s(tanh_prod, 1.0) - 0.842817) < 2e-6
    assert abs(delta_s(tanh_prod, 5.0) - 0.998446) < 2e-6


def test_tanh_resolvent_asymptote_agreement(tanh_prod):
    # mid-resolution discretization error against the exact asymptote form
    for z, cap in ((-1.0, 5e-4), (-0.25, 2e-4), (-4.0, 2e-3)):
        _, _, rel = resolvent_trace_check(tanh_prod, z)
        assert rel < cap, (z, rel)


def test_delta_r_argument_check(tanh_prod):
    with pytest.raises(ValueError):
        delta_r(tanh_prod, 0.5)
    with pytest.raises(ValueError):
        delta_s(tanh_prod, -1.0)


def test_resolvent_trace_check_rejects_positive_axis(tanh_prod):
    with pytest.raises(ValueError):
        resolvent_trace_check(tanh_prod, 2.0)


# ---------------------------------------------------------------------------
# Fredholm membership and spectral counting


def test_fredholm_check_tanh(tanh_path):
    out = fredholm_check(tanh_path, 1e-8)
    assert out["fredholm"] is True
    assert abs(out["gap_minus"] - 1.0) < 1e-14
    assert abs(out["gap_plus"] - 1.0) < 1e-14


def test_fredholm_check_half(half_path):
    out = fredholm_check(half_path, 1e-8)
    assert out["fredholm"] is False
    assert out["gap_minus"] == 0.0


def test_essential_strips(crossing_path):
    assert essential_spectrum_strips(crossing_path) == [-1.0, 0.0, 1.0]


def test_ssf_H_discrete_counts(model_cache):
    m = model_cache("tanh", 40.0, 2001)
    grid = np.array([0.3, 0.5, 0.7])
    out = ssf_H_discrete(m, grid)
    # one H1 state (the zero mode) below the essential edge, none for H2
    assert out.ordinates.tolist() == [1.0, 1.0, 1.0]
    assert out.metadata == {"L": 40.0, "N": 2001}


def test_ssf_H_discrete_validation(model_cache):
    m = model_cache("tanh", 40.0, 2001)
    with pytest.raises(ValueError):
        ssf_H_discrete(m, [-1.0, 0.5])
    with pytest.raises(ValueError):
        ssf_H_discrete(m, [0.5, 0.3])
