"""Spectral shift functions and perturbation determinants for pairs of
finite-dimensional symmetric operators.

Ground truth in finite dimension is eigenvalue counting:

    xi(lam) = #{ eig(A_minus) < lam } - #{ eig(A_plus) < lam },

represented exactly as a StepFunction. The boundary-value route (argument of
the perturbation determinant, tracked continuously from high in the upper
half plane) converges to the same object and is kept as a cross-check.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .linalg import (
    BranchTrackingError,
    eigh,
    logdet_tracked,
    signed_counts,
    spectrum,
    validate_symmetric,
)
from .stepfun import MERGE_TOL, SampledFunction, StepFunction, merge_breakpoints


def ssf_pair(a_plus, a_minus) -> StepFunction:
    """Exact spectral shift function of the pair (A_plus, A_minus)."""
    ap = validate_symmetric(a_plus)
    am = validate_symmetric(a_minus)
    if ap.shape != am.shape:
        raise ValueError(f"dimension mismatch: {ap.shape} vs {am.shape}")
    ev_p = spectrum(ap)
    ev_m = spectrum(am)
    bp = merge_breakpoints(np.concatenate([ev_p, ev_m]), MERGE_TOL)
    if len(bp) == 0:
        return StepFunction.zero()
    # evaluate the counting difference on each open interval; midpoints are
    # safe because every eigenvalue lies within MERGE_TOL of some breakpoint
    probes = np.concatenate(
        [[bp[0] - 1.0], 0.5 * (bp[:-1] + bp[1:]), [bp[-1] + 1.0]]
    )
    vals = [
        float(np.searchsorted(ev_m, x) - np.searchsorted(ev_p, x)) for x in probes
    ]
    return StepFunction(bp, vals).simplified()


def xi_left_right_at(xi: StepFunction, nu: float) -> tuple[float, float]:
    """Both one-sided limits of a step function at nu (exact)."""
    return xi.limits_at(nu)


def index_counting(a_plus, a_minus, zero_tol: float | None = None) -> Fraction:
    """Half-integer index from signed eigenvalue counts of the endpoints.

    Returns (1/2)[#_>(A_plus) - #_>(A_minus)] - (1/2)[#_<(A_plus) - #_<(A_minus)]
    as an exact rational.
    """
    ap = validate_symmetric(a_plus)
    am = validate_symmetric(a_minus)
    if ap.shape != am.shape:
        raise ValueError(f"dimension mismatch: {ap.shape} vs {am.shape}")
    pos_p, neg_p, _ = signed_counts(eigh(ap), zero_tol)
    pos_m, neg_m, _ = signed_counts(eigh(am), zero_tol)
    return Fraction(pos_p - pos_m, 2) - Fraction(neg_p - neg_m, 2)


def perturbation_determinant(a_plus, a_minus, z: complex) -> complex:
    """det(I + (A_plus - A_minus) (A_minus - z)^{-1}) for z off spec(A_minus)."""
    ap = validate_symmetric(a_plus)
    am = validate_symmetric(a_minus)
    if ap.shape != am.shape:
        raise ValueError(f"dimension mismatch: {ap.shape} vs {am.shape}")
    dec = eigh(am)
    if np.min(np.abs(dec.eigenvalues - z)) <= 1e-12 * (
        1.0 + np.max(np.abs(dec.eigenvalues))
    ):
        raise ValueError(f"z = {z} is within 1e-12 of an eigenvalue of A_minus")
    resolvent = (dec.eigenvectors / (dec.eigenvalues - z)) @ dec.eigenvectors.T
    m = np.eye(ap.shape[0], dtype=complex) + (ap - am).astype(complex) @ resolvent
    sign, logabs = np.linalg.slogdet(m)
    return sign * np.exp(logabs)


def _tracked_argument(det, points, dets, anchor: float, depth: int = 0) -> float:
    """Final tracked argument along a polyline of determinant samples.

    points/dets must start at the anchored sample. Subdivides on
    BranchTrackingError by re-evaluating the determinant at midpoints,
    halving the step until every consecutive argument jump is < pi.
    """
    try:
        return logdet_tracked(dets, anchor=anchor)[-1].argument
    except BranchTrackingError:
        if depth >= 12:
            raise
        refined_pts = [points[0]]
        refined_dets = [dets[0]]
        for k in range(1, len(points)):
            mid = 0.5 * (points[k - 1] + points[k])
            refined_pts.extend([mid, points[k]])
            refined_dets.extend([det(mid), dets[k]])
        return _tracked_argument(det, refined_pts, refined_dets, anchor, depth + 1)


class _DetPath:
    """Callable determinant-of-z with the pair baked in (helper for tracking)."""

    def __init__(self, a_plus, a_minus):
        self.dec = eigh(validate_symmetric(a_minus))
        self.delta = (
            validate_symmetric(a_plus) - validate_symmetric(a_minus)
        ).astype(complex)
        self.n = self.delta.shape[0]

    def __call__(self, z: complex) -> complex:
        resolvent = (
            self.dec.eigenvectors / (self.dec.eigenvalues - z)
        ) @ self.dec.eigenvectors.T
        m = np.eye(self.n, dtype=complex) + self.delta @ resolvent
        sign, logabs = np.linalg.slogdet(m)
        return sign * np.exp(logabs)


def ssf_via_logdet(a_plus, a_minus, eps: float, grid) -> SampledFunction:
    """Boundary values pi^{-1} Im ln D(lam + i*eps) along an increasing grid.

    The branch is fixed by continuous tracking down a vertical segment from
    grid[0] + i*Y (Y = 10*(1 + max spectral radius), where the argument is
    anchored near 0) to grid[0] + i*eps, then horizontally along the grid.
    Converges to ssf_pair pointwise away from eigenvalues as eps drops.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    grid = np.asarray(grid, dtype=float)
    if len(grid) > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be increasing")
    det = _DetPath(a_plus, a_minus)
    radius = max(
        float(np.max(np.abs(det.dec.eigenvalues))),
        float(np.max(np.abs(spectrum(a_plus)))),
    )
    y_top = 10.0 * (1.0 + radius)

    # vertical leg: geometric descent keeps argument steps small near eps
    n_vert = 64
    ys = y_top * (eps / y_top) ** (np.arange(n_vert + 1) / n_vert)
    vert_pts = [complex(grid[0], y) for y in ys]
    vert_dets = [det(p) for p in vert_pts]
    arg = _tracked_argument(det, vert_pts, vert_dets, anchor=0.0)
    ordinates = [arg / np.pi]
    for k in range(1, len(grid)):
        seg_pts = [complex(grid[k - 1], eps), complex(grid[k], eps)]
        seg_dets = [det(seg_pts[0]), det(seg_pts[1])]
        arg = _tracked_argument(det, seg_pts, seg_dets, anchor=arg)
        ordinates.append(arg / np.pi)
    return SampledFunction(
        abscissae=grid,
        ordinates=np.array(ordinates),
        metadata={"eps": eps, "anchor_height": y_top},
    )
