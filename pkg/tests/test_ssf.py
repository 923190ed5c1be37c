import math
from fractions import Fraction

import numpy as np
import pytest

from wittenlab.ssf import (
    index_counting,
    perturbation_determinant,
    ssf_pair,
    ssf_via_logdet,
    xi_left_right_at,
)
from wittenlab.stepfun import StepFunction


def test_scalar_pair_is_indicator():
    # a 1x1 pair with eigenvalues -1 and 2 shifts by exactly one state
    xi = ssf_pair([[2.0]], [[-1.0]])
    assert xi == StepFunction.indicator(-1.0, 2.0)


def test_ssf_antisymmetry(rng):
    for _ in range(10):
        m = rng.normal(size=(3, 3))
        a = 0.5 * (m + m.T)
        m = rng.normal(size=(3, 3))
        b = 0.5 * (m + m.T)
        xi = ssf_pair(a, b)
        assert -xi == ssf_pair(b, a)


def test_ssf_identical_pair_is_zero():
    a = np.diag([1.0, 2.0, 3.0])
    assert ssf_pair(a, a) == StepFunction.zero()


def test_ssf_integral_is_trace_difference(rng):
    # integral of xi = tr(A_plus) - tr(A_minus), the Krein trace formula at f=id
    for n in (1, 2, 5):
        m = rng.normal(size=(n, n))
        am = 0.5 * (m + m.T)
        m = rng.normal(size=(n, n))
        ap = 0.5 * (m + m.T)
        xi = ssf_pair(ap, am)
        assert abs(xi.integral() - (np.trace(ap) - np.trace(am))) < 1e-10


def test_ssf_merges_shared_eigenvalues():
    # shared eigenvalue at 1.0 must not produce a breakpoint
    xi = ssf_pair(np.diag([1.0, 3.0]), np.diag([1.0, -2.0]))
    assert xi == StepFunction.indicator(-2.0, 3.0)


def test_xi_left_right_at():
    xi = ssf_pair([[2.0]], [[-1.0]])
    assert xi_left_right_at(xi, -1.0) == (0.0, 1.0)
    assert xi_left_right_at(xi, 2.0) == (1.0, 0.0)
    assert xi_left_right_at(xi, 0.0) == (1.0, 1.0)


def test_ssf_dimension_mismatch():
    with pytest.raises(ValueError):
        ssf_pair(np.eye(2), np.eye(3))


def test_index_counting_scalar_flip():
    assert index_counting([[3.0]], [[-3.0]]) == Fraction(1)
    assert index_counting([[-3.0]], [[3.0]]) == Fraction(-1)
    assert index_counting([[3.0]], [[1.0]]) == Fraction(0)


def test_index_counting_half_integers():
    # an endpoint eigenvalue sitting exactly at zero contributes half
    assert index_counting([[1.0]], [[0.0]]) == Fraction(1, 2)
    assert index_counting([[0.0]], [[-1.0]]) == Fraction(1, 2)
    assert index_counting(np.diag([1.0, 2.0]), np.diag([0.0, -1.0])) == Fraction(3, 2)
    # one eigenvalue rising -2 -> 0 (half), one parked at 0 both ends (zero)
    assert index_counting(np.diag([0.0, 0.0]), np.diag([-2.0, 0.0])) == Fraction(1, 2)
    # an eigenvalue parked at 0 does not dilute a full crossing
    assert index_counting(np.diag([2.0, 0.0]), np.diag([-2.0, 0.0])) == Fraction(1)


def test_perturbation_determinant_scalar_oracle():
    # 1x1: det = 1 + b/(a - z) exactly
    a, b = -1.0, 3.0
    for z in (1j, -2.0 + 0.5j, 4.0 + 1e-3j):
        got = perturbation_determinant([[a + b]], [[a]], z)
        assert abs(got - (1.0 + b / (a - z))) < 1e-12


def test_perturbation_determinant_multiplicative_in_blocks():
    # block-diagonal pairs multiply
    ap = np.diag([2.0, 5.0])
    am = np.diag([-1.0, 3.0])
    z = 0.7 + 0.3j
    got = perturbation_determinant(ap, am, z)
    want = (1.0 + 3.0 / (-1.0 - z)) * (1.0 + 2.0 / (3.0 - z))
    assert abs(got - want) < 1e-12


def test_perturbation_determinant_rejects_z_on_spectrum():
    with pytest.raises(ValueError):
        perturbation_determinant([[1.0]], [[0.0]], 0.0 + 0.0j)


def test_boundary_values_approach_counting_ssf():
    ap = np.diag([2.0, 1.0])
    am = np.diag([-1.0, -1.0])
    xi = ssf_pair(ap, am)
    grid = np.linspace(-3.0, 3.0, 61)
    bv = ssf_via_logdet(ap, am, 1e-5, grid)
    # compare away from eigenvalues, where the eps-smoothed argument is close
    for lam, val in zip(bv.abscissae, bv.ordinates):
        if np.min(np.abs(np.array([-1.0, 1.0, 2.0]) - lam)) > 0.05:
            assert abs(val - xi(lam)) < 1e-3, lam


def test_boundary_values_track_multiple_windings():
    # widely split pair: the argument of D climbs through several pi
    ap = np.diag([5.0, 6.0, 7.0])
    am = np.diag([-5.0, -6.0, -7.0])
    bv = ssf_via_logdet(ap, am, 1e-6, np.array([0.0]))
    assert abs(bv.ordinates[0] - 3.0) < 1e-4


def test_ssf_via_logdet_validation():
    with pytest.raises(ValueError):
        ssf_via_logdet([[1.0]], [[0.0]], -1e-5, [0.5])
    with pytest.raises(ValueError):
        ssf_via_logdet([[1.0]], [[0.0]], 1e-5, [1.0, 0.0])


def test_ssf_via_logdet_metadata():
    bv = ssf_via_logdet([[1.0]], [[0.0]], 1e-4, [0.5])
    assert bv.metadata["eps"] == 1e-4
    assert bv.metadata["anchor_height"] == 10.0 * (1.0 + 1.0)
