"""The model operator d/dt + A(t) on a truncated time grid.

A path A(t) = A_minus + s(t) * B_plus interpolates between asymptotes A_minus
and A_plus = A_minus + B_plus. The derivative operator is discretized on a
staggered grid: solution values live on N nodes t_k spanning [-L, L], the
operator is evaluated on N+1 cell midpoints tau_j (one padding cell beyond
each wall, Dirichlet values outside), giving two rectangular factors

    (D u)_j = (u_j - u_{j-1})/h + A(tau_j) (u_j + u_{j-1})/2      (d/dt + A)
    (E u)_j = -(u_j - u_{j-1})/h + A(tau_j) (u_j + u_{j-1})/2     (-d/dt + A)

and the pair of nonnegative operators H1 = D^T D, H2 = E^T E of equal size.
Two different factors are essential: for any single square factor the two
products would be isospectral and every index quantity would vanish
identically. Reversing a symmetric-profile path is exactly equivalent to time
reflection, which swaps the spectra of H1 and H2 at the matrix level.

Both H's are block tridiagonal; spectra are computed through banded LAPACK
storage, so the desk-scale grids (N ~ 2000-4000) stay cheap.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.interpolate import PchipInterpolator
from scipy.special import expit

from .linalg import eigh, validate_symmetric
from .quadrature import gauss_legendre
from .stepfun import SampledFunction, merge_breakpoints

#: horizon used to validate profile limits and integrability
T_MAX = 50.0

#: default cap on the discretized dimension N*n, overridable via environment
DEFAULT_MAX_DIM = 6000

ENV_MAX_DIM = "WITTENLAB_MAX_DIM"


class ResourceCapExceeded(RuntimeError):
    """Requested grid is larger than the configured N*n cap."""


def _logistic(t):
    return expit(t)


def _logistic_prime(t):
    s = expit(t)
    return s * (1.0 - s)


def _tanh_rescaled(t):
    return 0.5 * (1.0 + np.tanh(t))


def _tanh_rescaled_prime(t):
    tc = np.clip(np.asarray(t, dtype=float), -350.0, 350.0)
    out = 0.5 / np.cosh(tc) ** 2
    return out if out.ndim else float(out)


PROFILES: dict[str, tuple[Callable, Callable]] = {
    "logistic": (_logistic, _logistic_prime),
    "tanh_rescaled": (_tanh_rescaled, _tanh_rescaled_prime),
}


@dataclass(frozen=True)
class OperatorPath:
    """A(t) = A_minus + s(t) * B_plus with s rising from 0 to 1."""

    dim: int
    A_minus: np.ndarray
    B_plus: np.ndarray
    profile_name: str
    s: Callable
    s_prime: Callable

    @property
    def A_plus(self) -> np.ndarray:
        return self.A_minus + self.B_plus

    def A(self, t):
        """Fiber matrix at time t (scalar t)."""
        return self.A_minus + float(self.s(t)) * self.B_plus

    def A_many(self, ts: np.ndarray) -> np.ndarray:
        """Stack of fiber matrices along a time array, shape (len(ts), n, n)."""
        sv = np.asarray(self.s(ts), dtype=float)
        return self.A_minus[None, :, :] + sv[:, None, None] * self.B_plus[None, :, :]


def build_path(
    a_minus,
    b_plus,
    profile_name: str = "logistic",
    samples: tuple | None = None,
) -> OperatorPath:
    """Construct and validate an operator path.

    ``profile_name`` is one of 'logistic', 'tanh_rescaled', 'custom-sampled'.
    The custom profile takes ``samples = (t_values, s_values)`` and is
    interpolated monotonically (PCHIP) with endpoint clamping.

    Raises ValueError if the profile limits are off (|s(+-T_MAX) - {1,0}|
    above 1e-8) or the integrability check of |s'| * ||B|| fails.
    """
    am = validate_symmetric(a_minus)
    bp = validate_symmetric(b_plus)
    if am.shape != bp.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bp.shape}")

    if profile_name in PROFILES:
        s, s_prime = PROFILES[profile_name]
    elif profile_name == "custom-sampled":
        if samples is None:
            raise ValueError("custom-sampled profile requires samples=(t, s)")
        ts, ss = (np.asarray(v, dtype=float) for v in samples)
        interp = PchipInterpolator(ts, ss, extrapolate=False)
        dinterp = interp.derivative()
        lo, hi = ts[0], ts[-1]
        lo_val, hi_val = float(ss[0]), float(ss[-1])

        def s(t, _i=interp):
            t = np.asarray(t, dtype=float)
            out = np.where(t <= lo, lo_val, np.where(t >= hi, hi_val, _i(np.clip(t, lo, hi))))
            return out if out.ndim else float(out)

        def s_prime(t, _d=dinterp):
            t = np.asarray(t, dtype=float)
            inside = (t > lo) & (t < hi)
            out = np.where(inside, _d(np.clip(t, lo, hi)), 0.0)
            return out if out.ndim else float(out)

    else:
        raise ValueError(
            f"unknown profile {profile_name!r}; expected one of "
            f"{sorted(PROFILES)} or 'custom-sampled'"
        )

    if abs(float(s(-T_MAX))) > 1e-8 or abs(float(s(T_MAX)) - 1.0) > 1e-8:
        raise ValueError(
            f"profile limits violated: s(-{T_MAX})={float(s(-T_MAX)):.3e}, "
            f"s(+{T_MAX})={float(s(T_MAX)):.3e} (need 0 and 1 within 1e-8)"
        )
    b_norm = float(np.linalg.norm(bp, 2)) if bp.size else 0.0
    total_variation = gauss_legendre(
        lambda t: np.abs(s_prime(t)), -T_MAX, T_MAX, n=400
    )
    if not np.isfinite(total_variation) or total_variation * b_norm > 1e6:
        raise ValueError("integrability check failed for |s'| * ||B_plus||")

    return OperatorPath(
        dim=am.shape[0],
        A_minus=am,
        B_plus=bp,
        profile_name=profile_name,
        s=s,
        s_prime=s_prime,
    )


def _band_from_blocks(diag_blocks: np.ndarray, upper_blocks: np.ndarray) -> np.ndarray:
    """LAPACK lower-banded storage of a symmetric block-tridiagonal matrix.

    diag_blocks: (N, n, n) symmetric; upper_blocks: (N-1, n, n) giving the
    (k, k+1) block. Returns ab with ab[i, j] = H[j + i, j].
    """
    nblk, n, _ = diag_blocks.shape
    dim = nblk * n
    ab = np.zeros((2 * n, dim))
    for a in range(n):
        for b in range(n):
            if a >= b:
                ab[a - b, b::n][:nblk] = diag_blocks[:, a, b]
            # block (k+1, k) entries: H[(k+1)n + a, kn + b] = upper[k][b, a]
            ab[n + a - b, b::n][: nblk - 1] = upper_blocks[:, b, a]
    return ab


class DiscretizedModel:
    """Truncated-grid realization of a path; immutable after construction.

    Spectra of H1 and H2 are computed once (banded LAPACK) and cached; the
    dense matrices are materialized only on demand.
    """

    def __init__(self, path: OperatorPath, L: float, N: int):
        self.path = path
        self.L = float(L)
        self.N = int(N)
        self.h = 2.0 * self.L / (self.N - 1)
        n = path.dim
        h = self.h
        tau = -self.L + (np.arange(self.N + 1) - 0.5) * h
        a_cells = path.A_many(tau)  # (N+1, n, n)
        eye = np.eye(n)
        p1 = eye / h + 0.5 * a_cells  # D coefficient of u_j in cell j
        m1 = -eye / h + 0.5 * a_cells  # D coefficient of u_{j-1}
        p2 = -eye / h + 0.5 * a_cells  # E coefficients
        m2 = eye / h + 0.5 * a_cells
        self._blocks = {}
        for tag, p, m in (("H1", p1, m1), ("H2", p2, m2)):
            diag = np.einsum("jab,jac->jbc", p[:-1], p[:-1]) + np.einsum(
                "jab,jac->jbc", m[1:], m[1:]
            )
            upper = np.einsum("jab,jac->jbc", m[1:-1], p[1:-1])
            self._blocks[tag] = (diag, upper)
        self._tau = tau
        self._spectra = None
        self._dense = {}

    # -- spectra and matrices ------------------------------------------------

    def spectra(self) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues of (H1, H2), cached."""
        if self._spectra is None:
            out = []
            for tag in ("H1", "H2"):
                ab = _band_from_blocks(*self._blocks[tag])
                w = scipy.linalg.eig_banded(
                    ab, lower=True, eigvals_only=True, check_finite=False
                )
                out.append(np.sort(w))
            self._spectra = tuple(out)
        return self._spectra

    def _dense_matrix(self, tag: str) -> np.ndarray:
        if tag not in self._dense:
            diag, upper = self._blocks[tag]
            nblk, n, _ = diag.shape
            dim = nblk * n
            m = np.zeros((dim, dim))
            for k in range(nblk):
                m[k * n : (k + 1) * n, k * n : (k + 1) * n] = diag[k]
                if k + 1 < nblk:
                    m[k * n : (k + 1) * n, (k + 1) * n : (k + 2) * n] = upper[k]
                    m[(k + 1) * n : (k + 2) * n, k * n : (k + 1) * n] = upper[k].T
            self._dense[tag] = m
        return self._dense[tag]

    @property
    def H1(self) -> np.ndarray:
        return self._dense_matrix("H1")

    @property
    def H2(self) -> np.ndarray:
        return self._dense_matrix("H2")

    def factors(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense rectangular factors (D, E) with H1 = D^T D, H2 = E^T E."""
        n, N, h = self.path.dim, self.N, self.h
        a_cells = self.path.A_many(self._tau)
        eye = np.eye(n)
        d = np.zeros(((N + 1) * n, N * n))
        e = np.zeros(((N + 1) * n, N * n))
        for j in range(N + 1):
            half = 0.5 * a_cells[j]
            rows = slice(j * n, (j + 1) * n)
            if j < N:
                d[rows, j * n : (j + 1) * n] = eye / h + half
                e[rows, j * n : (j + 1) * n] = -eye / h + half
            if j >= 1:
                d[rows, (j - 1) * n : j * n] = -eye / h + half
                e[rows, (j - 1) * n : j * n] = eye / h + half
        return d, e

    def trace_identity_residual(self) -> float:
        """tr H1 - tr H2 minus its exact boundary-cell value (should be ~0).

        The padding cells each carry a single node coefficient, so the +-1/h
        cross terms survive there: tr H1 - tr H2 = (2/h) tr(A(tau_0) - A(tau_N)).
        """
        d1, _ = self._blocks["H1"]
        d2, _ = self._blocks["H2"]
        lhs = float(np.einsum("jaa->", d1) - np.einsum("jaa->", d2))
        a0 = self.path.A(self._tau[0])
        aN = self.path.A(self._tau[-1])
        return lhs - (2.0 / self.h) * float(np.trace(a0 - aN))


def _max_dim() -> int:
    raw = os.environ.get(ENV_MAX_DIM, "")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{ENV_MAX_DIM} must be an integer, got {raw!r}")
    return DEFAULT_MAX_DIM


def discretize(path: OperatorPath, L: float, N: int) -> DiscretizedModel:
    """Build the truncated-grid model. N must be odd and >= 3; L > 0."""
    if not isinstance(N, (int, np.integer)) or N < 3 or N % 2 == 0:
        raise ValueError(f"N must be an odd integer >= 3, got {N}")
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    cap = _max_dim()
    if N * path.dim > cap:
        raise ResourceCapExceeded(
            f"N*n = {N * path.dim} exceeds the cap {cap} "
            f"(raise {ENV_MAX_DIM} to override)"
        )
    return DiscretizedModel(path, L, N)


def delta_r(model: DiscretizedModel, lam: float) -> float:
    """Resolvent-regularized index at spectral parameter lam < 0.

    (-lam) * sum_i [ 1/(mu_i^(1) - lam) - 1/(mu_i^(2) - lam) ] as a single
    index-paired sum over ascending eigenvalues (cancellation control).
    """
    if not lam < 0:
        raise ValueError(f"delta_r needs lam < 0, got {lam}")
    m1, m2 = model.spectra()
    return float((-lam) * np.sum(1.0 / (m1 - lam) - 1.0 / (m2 - lam)))


def delta_s(model: DiscretizedModel, t: float) -> float:
    """Semigroup-regularized index at time t > 0: sum of e^{-t mu1} - e^{-t mu2}."""
    if not t > 0:
        raise ValueError(f"delta_s needs t > 0, got {t}")
    m1, m2 = model.spectra()
    # clip the exponent: eigenvalues near the roundoff floor may dip to -1e-13
    return float(np.sum(np.exp(-t * np.maximum(m1, -1e-8)) - np.exp(-t * np.maximum(m2, -1e-8))))


def resolvent_trace_check(
    model: DiscretizedModel, z: complex
) -> tuple[complex, complex, float]:
    """Compare tr((H2-z)^-1 - (H1-z)^-1) against its closed asymptote form.

    The right-hand side is (1/(2z)) tr(g_z(A_plus) - g_z(A_minus)) with
    g_z(x) = x (x^2 - z)^{-1/2}, evaluated exactly on the n x n asymptotes.
    Returns (lhs, rhs, rel_err).
    """
    z = complex(z)
    if z.imag == 0.0 and z.real >= 0.0:
        raise ValueError(f"z must avoid [0, inf), got {z}")
    m1, m2 = model.spectra()
    lhs = complex(np.sum(1.0 / (m2 - z) - 1.0 / (m1 - z)))

    def g_trace(a) -> complex:
        mu = eigh(a).eigenvalues.astype(complex)
        return complex(np.sum(mu / np.sqrt(mu * mu - z)))

    rhs = (g_trace(model.path.A_plus) - g_trace(model.path.A_minus)) / (2.0 * z)
    rel = abs(lhs - rhs) / (abs(rhs) + 1e-30)
    return lhs, rhs, rel


def fredholm_check(path: OperatorPath, tol: float) -> dict:
    """Fredholm iff both asymptotes are invertible beyond tol.

    Returns {'fredholm': bool, 'gap_plus': float, 'gap_minus': float}.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    gap_plus = float(np.min(np.abs(eigh(path.A_plus).eigenvalues)))
    gap_minus = float(np.min(np.abs(eigh(path.A_minus).eigenvalues)))
    return {
        "fredholm": bool(gap_plus > tol and gap_minus > tol),
        "gap_plus": gap_plus,
        "gap_minus": gap_minus,
    }


def essential_spectrum_strips(path: OperatorPath) -> list[float]:
    """Sorted union of the asymptote spectra; each abscissa marks a vertical
    strip x + i*R of essential spectrum of the non-self-adjoint operator."""
    pts = np.concatenate(
        [eigh(path.A_plus).eigenvalues, eigh(path.A_minus).eigenvalues]
    )
    return merge_breakpoints(pts, 1e-10).tolist()


def kernel_dims(model: DiscretizedModel, tol: float) -> tuple[int, int]:
    """Eigenvalue counts of (H1, H2) below tol."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    m1, m2 = model.spectra()
    return int(np.sum(m1 < tol)), int(np.sum(m2 < tol))


def ssf_H_discrete(model: DiscretizedModel, lam_grid) -> SampledFunction:
    """Counting-difference estimate of the spectral shift of (H2, H1).

    At each grid point, #eig(H1) below lam minus #eig(H2) below lam.
    """
    grid = np.asarray(lam_grid, dtype=float)
    if np.any(grid <= 0) or (len(grid) > 1 and not np.all(np.diff(grid) > 0)):
        raise ValueError("lam_grid must be positive and increasing")
    m1, m2 = model.spectra()
    counts = np.searchsorted(m1, grid) - np.searchsorted(m2, grid)
    return SampledFunction(
        abscissae=grid,
        ordinates=counts.astype(float),
        metadata={"L": model.L, "N": model.N},
    )
