"""Dense symmetric eigensolvers, matrix functions, spectral counting, and
branch-tracked complex logarithms.

All spectral calculus in the package funnels through `eigh`; complex values
only appear downstream (resolvents, perturbation determinants), never inside
an eigenproblem.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# dimension at or below which the hand-rolled Jacobi sweep is used; above it
# the LAPACK path takes over (Jacobi is O(n^3) per sweep with a large constant)
_JACOBI_MAX_N = 64

_JACOBI_SWEEP_CAP = 100


class ConvergenceError(RuntimeError):
    """Eigensolver failed to converge within its iteration cap."""


class BranchTrackingError(RuntimeError):
    """Argument continuation failed (path too coarse or determinant vanished)."""


def validate_symmetric(a) -> np.ndarray:
    """Return ``a`` as a float ndarray, raising if it is not square symmetric.

    Symmetry tolerance is 1e-12 relative to the largest entry.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix must have dimension >= 1")
    scale = np.max(np.abs(m)) if m.size else 0.0
    if np.max(np.abs(m - m.T)) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix is not symmetric within 1e-12 relative tolerance")
    return m


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with a paired orthogonal eigenvector matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class BranchedLogValue:
    """log of a complex value with the argument tracked continuously.

    ``argument`` is NOT reduced mod 2*pi; winding is preserved.
    """

    modulus_log: float
    argument: float

    @property
    def value(self) -> complex:
        return cmath.exp(complex(self.modulus_log, self.argument))


def _jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization. Returns (eigenvalues, eigenvectors).

    Converges when the off-diagonal Frobenius mass drops below
    1e-13 * ||A||_F; raises ConvergenceError after the sweep cap.
    """
    m = a.copy()
    n = m.shape[0]
    v = np.eye(n)
    fro = np.linalg.norm(m)
    if fro == 0.0:
        return np.zeros(n), v
    threshold = 1e-13 * fro
    for _sweep in range(_JACOBI_SWEEP_CAP):
        # sum the off-diagonal mass directly: the subtraction form
        # ||m||^2 - ||diag||^2 cancels catastrophically near convergence
        od = m.copy()
        np.fill_diagonal(od, 0.0)
        off = float(np.linalg.norm(od))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= 1e-20 * fro:
                    continue
                theta = 0.5 * (m[q, q] - m[p, p]) / apq
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(1.0 + theta * theta)
                )
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rp, rq = m[p, :].copy(), m[q, :].copy()
                m[p, :] = c * rp - s * rq
                m[q, :] = s * rp + c * rq
                cp, cq = m[:, p].copy(), m[:, q].copy()
                m[:, p] = c * cp - s * cq
                m[:, q] = s * cp + c * cq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ConvergenceError(
            f"Jacobi sweep cap ({_JACOBI_SWEEP_CAP}) reached; off-diagonal mass "
            f"{off:.3e} vs threshold {threshold:.3e}"
        )
    return np.diag(m).copy(), v


def eigh(a) -> EigenDecomposition:
    """Full eigendecomposition of a real symmetric matrix, ascending order.

    Dispatches to a cyclic Jacobi sweep for small matrices and to LAPACK
    above _JACOBI_MAX_N. Deterministic for a fixed input either way.
    """
    m = validate_symmetric(a)
    if m.shape[0] <= _JACOBI_MAX_N:
        w, v = _jacobi_eigh(m)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
    else:
        w, v = np.linalg.eigh(m)
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def spectrum(a) -> np.ndarray:
    """Ascending eigenvalues only (no vectors); cheaper for large matrices."""
    m = validate_symmetric(a)
    if m.shape[0] <= _JACOBI_MAX_N:
        return np.sort(_jacobi_eigh(m)[0])
    return np.linalg.eigvalsh(m)


def matrix_function(e: EigenDecomposition, f) -> np.ndarray:
    """Apply the scalar map f through the spectral decomposition: V f(mu) V^T."""
    fv = np.array([f(x) for x in e.eigenvalues], dtype=float)
    if not np.all(np.isfinite(fv)):
        bad = e.eigenvalues[~np.isfinite(fv)]
        raise ValueError(f"f is not finite at eigenvalue(s) {bad}")
    return (e.eigenvectors * fv) @ e.eigenvectors.T


def count_below(e: EigenDecomposition, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam``."""
    return int(np.searchsorted(e.eigenvalues, lam, side="left"))


def signed_counts(
    e: EigenDecomposition, zero_tol: float | None = None
) -> tuple[int, int, int]:
    """Counts (n_pos, n_neg, n_zero) split at +/- zero_tol.

    Default tolerance scales with the spectral radius: 1e-8 * (1 + max|mu|).
    """
    w = e.eigenvalues
    if zero_tol is None:
        zero_tol = 1e-8 * (1.0 + float(np.max(np.abs(w))) if len(w) else 1.0)
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    n_pos = int(np.sum(w > zero_tol))
    n_neg = int(np.sum(w < -zero_tol))
    return n_pos, n_neg, len(w) - n_pos - n_neg


def logdet_tracked(samples, anchor: float = 0.0) -> list[BranchedLogValue]:
    """Branch-tracked complex log along a path of (nonvanishing) values.

    ``samples`` is a sequence of complex numbers (e.g. determinants along a
    contour). The first argument is the representative of arg(samples[0])
    nearest the caller-supplied ``anchor``; subsequent arguments continue
    without 2*pi jumps. Raises BranchTrackingError if a sample vanishes or
    two consecutive samples differ in argument by >= pi (path too coarse).
    """
    vals = [complex(s) for s in samples]
    if not vals:
        return []
    out: list[BranchedLogValue] = []
    for k, z in enumerate(vals):
        if z == 0 or not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise BranchTrackingError(f"determinant vanished or overflowed at sample {k}")
        if k == 0:
            raw = cmath.phase(z)
            turns = round((anchor - raw) / (2.0 * math.pi))
            arg = raw + 2.0 * math.pi * turns
        else:
            step = cmath.phase(z / vals[k - 1])
            if abs(step) >= math.pi * (1.0 - 1e-9):
                raise BranchTrackingError(
                    f"argument jump {step:+.6f} at sample {k}; refine the path"
                )
            arg = out[-1].argument + step
        out.append(BranchedLogValue(modulus_log=math.log(abs(z)), argument=arg))
    return out
