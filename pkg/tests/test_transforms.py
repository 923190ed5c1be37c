import math

import numpy as np
import pytest

from wittenlab.stepfun import StepFunction
from wittenlab.transforms import (
    abel_F,
    abel_Fprime,
    conj_poisson,
    hilbert_truncated,
    lebesgue_classify,
    op_S,
    op_T,
    op_T_complex,
    poisson,
    pushnitski_forward,
    trace_relation_check,
)


# ---------------------------------------------------------------------------
# arcsine-kernel average


def test_op_S_normalization():
    # constant input: the kernel integrates to exactly 1/2
    for lam in (1e-6, 0.3, 1.0, 50.0):
        assert abs(op_S(lambda nu: np.ones_like(nu), lam) - 0.5) < 1e-12


def test_op_S_quadratic_moment():
    # nu^2 averages to lam/4 under the arcsine kernel
    for lam in (0.5, 2.0, 9.0):
        assert abs(op_S(lambda nu: nu**2, lam) - lam / 4.0) < 1e-12


def test_op_S_validation():
    with pytest.raises(ValueError):
        op_S(lambda nu: nu, 0.0)
    with pytest.raises(ValueError):
        op_S(lambda nu: np.full_like(nu, np.nan), 1.0)


def test_pushnitski_forward_indicator_closed_form():
    xi = StepFunction.indicator(-1.0, 1.0)
    grid = np.geomspace(1e-3, 30.0, 40)
    out = pushnitski_forward(xi, grid)
    want = (2.0 / math.pi) * np.arcsin(np.minimum(1.0, 1.0 / np.sqrt(grid)))
    assert np.max(np.abs(out.ordinates - want)) < 1e-12


def test_pushnitski_forward_flat_inside():
    # for lam below the smallest breakpoint magnitude the average is exactly 1
    xi = StepFunction.indicator(-2.0, 3.0)
    out = pushnitski_forward(xi, np.array([0.25, 1.0, 3.9]))
    assert np.allclose(out.ordinates, 1.0, atol=1e-14)


def test_pushnitski_forward_asymmetric():
    # piece fully right of the window contributes nothing
    xi = StepFunction([5.0, 6.0], [0.0, 1.0, 0.0])
    out = pushnitski_forward(xi, np.array([1.0, 4.0]))
    assert np.allclose(out.ordinates, 0.0)


def test_pushnitski_forward_requires_tails():
    with pytest.raises(ValueError):
        pushnitski_forward(StepFunction([0.0], [0.0, 1.0]), [1.0])
    with pytest.raises(ValueError):
        pushnitski_forward(StepFunction.indicator(0.0, 1.0), [-1.0])


# ---------------------------------------------------------------------------
# concentrating average op_T and its complex continuation


def test_op_T_half_line_normalization():
    f = lambda nu: 1.0 if nu > 0 else 0.0
    for lam in (1.0, 0.01, 1e-4):
        assert abs(op_T(f, lam) - 1.0) < 1e-8


def test_op_T_full_line_normalization():
    assert abs(op_T(lambda nu: 1.0, 3.7) - 2.0) < 1e-10


def test_op_T_odd_input_vanishes():
    assert abs(op_T(lambda nu: nu * math.exp(-abs(nu)), 0.5)) < 1e-10


def test_op_T_concentrates_at_origin():
    # continuous f: op_T(f, lam) -> 2 f(0) as lam -> 0 (full-line mass is 2)
    got = op_T(math.cos, 1e-6)
    assert abs(got - 2.0) < 1e-4


def test_op_T_validation():
    with pytest.raises(ValueError):
        op_T(lambda nu: 1.0, -1.0)


def test_op_T_complex_matches_real_on_negative_axis():
    f = lambda nu: math.exp(-(nu * nu))
    for lam in (0.3, 2.0):
        a = op_T(f, lam)
        b = op_T_complex(f, complex(-lam, 0.0))
        assert abs(b - a) < 1e-10
        assert abs(b.imag) < 1e-10


def test_op_T_complex_half_line_normalization():
    # exact for every z off the cut, including genuinely complex ones
    f = lambda nu: 1.0 if nu > 0 else 0.0
    for z in (-0.1 + 0.0j, -1e-4 + 0.0j, -0.5 + 0.3j, 0.25 + 1.0j):
        assert abs(op_T_complex(f, z) - 1.0) < 1e-8, z


def test_op_T_complex_validation():
    with pytest.raises(ValueError):
        op_T_complex(lambda nu: 1.0, 1.0 + 0.0j)


# ---------------------------------------------------------------------------
# Abel pair


def test_abel_F_zero_at_origin():
    assert abel_F(lambda x: 1.0 / (x + 1.0), 0.0) == 0.0


def test_abel_F_resolvent_closed_form():
    # f(x) = (x - z)^{-1}  =>  F(nu) = nu / (2 z sqrt(nu^2 - z))
    for z in (-1.0, -4.0, -0.3):
        f = lambda x, z=z: 1.0 / (x - z)
        for nu in (-3.0, -0.5, 0.25, 1.0, 4.0):
            want = nu / (2.0 * z * math.sqrt(nu * nu - z))
            assert abs(abel_F(f, nu) - want) < 1e-10, (z, nu)


def test_abel_F_heat_closed_form():
    # f(x) = exp(-s x)  =>  F(nu) = -erf(sqrt(s) nu) / 2
    for s in (0.5, 1.0, 2.0):
        f = lambda x, s=s: math.exp(-s * x)
        for nu in (-2.0, -0.1, 0.7, 3.0):
            want = -0.5 * math.erf(math.sqrt(s) * nu)
            assert abs(abel_F(f, nu) - want) < 1e-10, (s, nu)


def test_abel_Fprime_heat_closed_form():
    # F'(nu) = -sqrt(s/pi) exp(-s nu^2) for the heat input
    s = 1.3
    fp = lambda x: -s * math.exp(-s * x)
    for nu in (0.0, -1.0, 2.0):
        want = -math.sqrt(s / math.pi) * math.exp(-s * nu * nu)
        assert abs(abel_Fprime(fp, nu) - want) < 1e-10


def test_abel_F_odd_symmetry():
    f = lambda x: 1.0 / (x + 2.0)
    assert abs(abel_F(f, 1.5) + abel_F(f, -1.5)) < 1e-12


# ---------------------------------------------------------------------------
# three-route trace comparison


def test_trace_relation_routes_agree(model_cache, tanh_path):
    m = model_cache("tanh", 40.0, 2001)
    lhs, mid, rhs = trace_relation_check(lambda x: 1.0 / (x + 1.0), tanh_path, m)
    # lhs and mid are the same sum organized differently: roundoff only
    assert abs(lhs - mid) < 1e-8
    # rhs comes from the asymptote closed form; h^2 discretization error
    assert abs(lhs - rhs) / abs(rhs) < 5e-4


def test_trace_relation_heat_route(model_cache, tanh_path):
    m = model_cache("tanh", 40.0, 2001)
    lhs, mid, rhs = trace_relation_check(lambda x: np.exp(-x), tanh_path, m)
    assert abs(lhs - mid) < 1e-8
    assert abs(rhs - (-math.erf(1.0))) < 1e-10  # -erf(1), exactly
    assert abs(lhs - rhs) / abs(rhs) < 5e-4


# ---------------------------------------------------------------------------
# truncated Hilbert / Poisson kernels


def test_poisson_indicator_arctan_oracle():
    a, b = -1.0, 2.0
    f = lambda nu: 1.0 if a < nu < b else 0.0
    for eps in (0.5, 0.05):
        for lam in (-2.0, 0.0, 1.0, 3.0):
            want = (
                math.atan((b - lam) / eps) - math.atan((a - lam) / eps)
            ) / math.pi
            got = poisson(f, eps, lam, support_points=(a, b))
            assert abs(got - want) < 1e-6


def test_conj_poisson_indicator_log_oracle():
    a, b = 0.0, 1.0
    f = lambda nu: 1.0 if a < nu < b else 0.0
    eps, lam = 0.1, 0.3
    want = 0.5 / math.pi * math.log(
        ((lam - a) ** 2 + eps**2) / ((lam - b) ** 2 + eps**2)
    )
    got = conj_poisson(f, eps, lam, support_points=(a, b))
    assert abs(got - want) < 1e-8


def test_hilbert_symmetric_point_vanishes():
    f = lambda nu: 1.0 if -1.0 < nu < 1.0 else 0.0
    assert abs(hilbert_truncated(f, 0.01, 0.0, support_points=(-1.0, 1.0))) < 1e-8


def test_hilbert_minus_conj_poisson_dominated_by_poisson():
    # pointwise kernel bound: |truncated Hilbert - conjugate Poisson| <= Poisson
    # applied to |f|; standard route to a.e. equality of the two limits
    f = lambda nu: math.exp(-((nu - 0.5) ** 2))
    af = lambda nu: abs(f(nu))
    for eps in (0.3, 0.03):
        for lam in (-1.0, 0.5, 2.0):
            h = hilbert_truncated(f, eps, lam)
            q = conj_poisson(f, eps, lam)
            p = poisson(af, eps, lam)
            assert abs(h - q) <= p + 1e-9, (eps, lam)


def test_kernel_validation():
    f = lambda nu: 0.0
    for fn in (hilbert_truncated, poisson, conj_poisson):
        with pytest.raises(ValueError):
            fn(f, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Lebesgue-point probe


def test_lebesgue_continuous_point():
    out = lebesgue_classify(math.sin, 0.7)
    assert out.is_right_lebesgue and out.is_left_lebesgue
    assert abs(out.right_value - math.sin(0.7)) < 1e-3
    assert abs(out.left_value - math.sin(0.7)) < 1e-3


def test_lebesgue_jump_has_two_onesided_values():
    f = lambda x: 1.0 if x >= 0 else 0.0
    out = lebesgue_classify(f, 0.0)
    assert out.is_right_lebesgue and out.is_left_lebesgue
    assert abs(out.right_value - 1.0) < 1e-3
    assert abs(out.left_value - 0.0) < 1e-3


def _comb(x):
    # alternating blocks of 0 and -1 (resp. 0 and +1) accumulating at 0; the
    # small-window averages hover near -1/2 while |f - alpha| stays ~1/2, so 0
    # is not a one-sided Lebesgue point from either side
    y = abs(x)
    if y == 0.0 or y > 1.0:
        return 0.0
    n = int(math.floor(1.0 / y))
    m = 0.5 * (1.0 / n + 1.0 / (n + 1))
    if x > 0:
        return -1.0 if y > m else 0.0
    return 1.0 if y > m else 0.0


def test_lebesgue_comb_is_not_a_lebesgue_point():
    out = lebesgue_classify(_comb, 0.0)
    assert not out.is_right_lebesgue
    assert not out.is_left_lebesgue
    assert out.right_value is None and out.left_value is None
    # the residual curve is recorded for diagnostics and stays O(1)
    assert out.residual_curve_right[-1][1] > 0.1


def test_lebesgue_h_sequence_validation():
    with pytest.raises(ValueError):
        lebesgue_classify(math.sin, 0.0, h_sequence=[0.1, 0.2])
    with pytest.raises(ValueError):
        lebesgue_classify(math.sin, 0.0, h_sequence=[-0.1])
