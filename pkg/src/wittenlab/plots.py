"""Figure rendering for the report path (Agg backend, files only).

Figures are companions to the delimited artifacts, never a data source:
regression tests compare CSV/JSON bytes and ignore the PNGs.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .stepfun import StepFunction


def _save(fig, out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return name


def _step_xy(xi: StepFunction, pad: float = 0.5):
    bp = xi.breakpoints
    if len(bp) == 0:
        return np.array([-1.0, 1.0]), np.array([xi.values[0]] * 2)
    xs = np.concatenate([[bp[0] - pad], np.repeat(bp, 2), [bp[-1] + pad]])
    ys = np.repeat(xi.values, 2)
    return xs, ys


def render_witten_figures(out_dir: str, report) -> list:
    """delta_r / delta_s sweeps and the two shift functions, as PNG files."""
    names = []

    for est, xlabel, fname in (
        (report.W_resolvent, "|lambda|", "delta_r.png"),
        (report.W_semigroup, "t", "delta_s.png"),
    ):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        rows = est.table
        for L, N in sorted({(r[0], r[1]) for r in rows}):
            pts = [(abs(r[2]), r[3]) for r in rows if (r[0], r[1]) == (L, N)]
            pts.sort()
            ax.semilogx(
                [p[0] for p in pts], [p[1] for p in pts], marker=".", label=f"L={L:g}, N={N}"
            )
        if est.converged:
            ax.axhline(est.estimate, color="k", lw=0.8, ls="--", label="extrapolated")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("regularized index")
        ax.legend(fontsize=8)
        ax.grid(True, alpha=0.3)
        names.append(_save(fig, out_dir, fname))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs, ys = _step_xy(report.xi_A)
    ax.plot(xs, ys, label="shift function of the asymptote pair")
    ax.plot(
        report.xi_H.abscissae,
        report.xi_H.ordinates,
        ".",
        ms=3,
        label="discrete pair, window counts",
    )
    ax.set_xlabel("spectral parameter")
    ax.set_ylabel("shift")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    names.append(_save(fig, out_dir, "xi.png"))
    return names


def render_curve(out_dir: str, name: str, x, y, xlabel: str, ylabel: str, logx=False) -> str:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    (ax.semilogx if logx else ax.plot)(np.asarray(x), np.asarray(y), marker=".", ms=3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return _save(fig, out_dir, name)


def render_step(out_dir: str, name: str, xi: StepFunction, xlabel: str, ylabel: str) -> str:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs, ys = _step_xy(xi)
    ax.plot(xs, ys)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return _save(fig, out_dir, name)
