import math

import numpy as np
import pytest

from wittenlab.stepfun import (
    SampledFunction,
    StepFunction,
    merge_breakpoints,
    step_from_events,
)


def test_constructor_validation():
    with pytest.raises(ValueError):
        StepFunction([0.0, 1.0], [1.0, 2.0])  # wrong value count
    with pytest.raises(ValueError):
        StepFunction([1.0, 0.0], [0.0, 1.0, 0.0])  # not increasing
    with pytest.raises(ValueError):
        StepFunction([[0.0]], [0.0, 1.0])


def test_right_continuity_at_breakpoint():
    f = StepFunction.indicator(0.0, 1.0)
    assert f(0.0) == 1.0
    assert f(1.0) == 0.0
    assert f(-1e-300) == 0.0
    assert f(0.5) == 1.0


def test_call_vectorized():
    f = StepFunction([0.0, 2.0], [0.0, 3.0, 0.0])
    out = f(np.array([-1.0, 0.0, 1.0, 2.0, 3.0]))
    assert out.tolist() == [0.0, 3.0, 3.0, 0.0, 0.0]


def test_limits_at():
    f = StepFunction([0.0], [-1.0, 1.0])
    assert f.limits_at(0.0) == (-1.0, 1.0)
    assert f.limits_at(0.5) == (1.0, 1.0)
    assert f.limits_at(-0.5) == (-1.0, -1.0)


def test_simplified_drops_null_jumps():
    f = StepFunction([0.0, 1.0, 2.0], [0.0, 1.0, 1.0, 0.0])
    g = f.simplified()
    assert g.breakpoints.tolist() == [0.0, 2.0]
    assert g.values.tolist() == [0.0, 1.0, 0.0]


def test_simplified_to_constant():
    f = StepFunction([0.0], [0.5, 0.5])
    g = f.simplified()
    assert len(g.breakpoints) == 0 and g.values.tolist() == [0.5]


def test_integral():
    f = StepFunction([0.0, 1.0, 3.0], [0.0, 2.0, -1.0, 0.0])
    assert f.integral() == 2.0 * 1.0 + (-1.0) * 2.0
    with pytest.raises(ValueError):
        StepFunction([0.0], [1.0, 0.0]).integral()
    assert StepFunction.zero().integral() == 0.0


def test_pair_with_derivative_indicator():
    # integral over (a,b) of f' = f(b) - f(a), for any antiderivative
    f = StepFunction.indicator(-1.0, 2.0)
    got = f.pair_with_derivative(math.atan)
    assert abs(got - (math.atan(2.0) - math.atan(-1.0))) < 1e-15


def test_pair_with_derivative_two_levels():
    # xi = 1 on (0,1), 3 on (1,2): integral xi * f' with f = x^2
    f = StepFunction([0.0, 1.0, 2.0], [0.0, 1.0, 3.0, 0.0])
    got = f.pair_with_derivative(lambda x: x * x)
    want = 1.0 * (1.0 - 0.0) + 3.0 * (4.0 - 1.0)
    assert got == want


def test_pair_with_derivative_requires_tails():
    with pytest.raises(ValueError):
        StepFunction([0.0], [0.0, 1.0]).pair_with_derivative(math.exp)


def test_negation_and_equality():
    f = StepFunction.indicator(0.0, 1.0)
    assert (-f).values.tolist() == [0.0, -1.0, 0.0]
    assert f == StepFunction([0.0, 1.0], [0.0, 1.0, 0.0])
    assert f != -f


def test_csv_roundtrip():
    f = StepFunction([-0.5, 1e-7, 3.25], [0.25, -2.0, 0.0, 1.0 / 3.0])
    g = StepFunction.from_csv(f.to_csv())
    assert g == f  # 17 significant digits reproduce doubles exactly


def test_from_csv_rejects_missing_header():
    with pytest.raises(ValueError):
        StepFunction.from_csv("breakpoint,value\n0.0,1.0\n")


def test_merge_breakpoints():
    out = merge_breakpoints([3.0, 0.0, 3.0 + 1e-12, -1.0])
    assert out.tolist() == [-1.0, 0.0, 3.0]


def test_step_from_events_counts():
    # +1 at each of one spectrum, -1 at the other: counting-function difference
    f = step_from_events([(1.0, -1.0), (-2.0, 1.0), (0.5, 1.0), (2.0, -1.0)])
    assert f.breakpoints.tolist() == [-2.0, 0.5, 1.0, 2.0]
    assert f.values.tolist() == [0.0, 1.0, 2.0, 1.0, 0.0]


def test_step_from_events_coalesces_and_drops():
    f = step_from_events([(0.0, 1.0), (1e-12, -1.0), (1.0, 2.0)])
    assert f.breakpoints.tolist() == [1.0]
    assert f.values.tolist() == [0.0, 2.0]


def test_step_from_events_empty():
    f = step_from_events([])
    assert f == StepFunction.zero()


def test_sampled_function_validation():
    with pytest.raises(ValueError):
        SampledFunction(np.array([0.0, 1.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        SampledFunction(np.array([1.0, 0.0]), np.array([1.0, 2.0]))
    s = SampledFunction(np.array([0.0, 1.0]), np.array([5.0, 6.0]), {"eps": 1e-5})
    assert s.metadata["eps"] == 1e-5
