"""Piecewise-constant functions with exact one-sided limits, and sampled
function carriers.

StepFunction is the exact representation used for finite-dimensional spectral
shift functions: n breakpoints, n+1 values, the first/last being the values on
the unbounded tails.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

#: breakpoints closer than this are merged into one jump
MERGE_TOL = 1e-10


class StepFunction:
    """Right-continuous piecewise-constant function on the real line.

    ``values[i]`` is the constant on (breakpoints[i-1], breakpoints[i]);
    values[0] and values[-1] are the two tail values. Evaluation at a
    breakpoint returns the right limit; `limits_at` gives both one-sided
    limits exactly.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        bp = np.asarray(breakpoints, dtype=float)
        vals = np.asarray(values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1:
            raise ValueError("breakpoints and values must be 1-d")
        if len(vals) != len(bp) + 1:
            raise ValueError(
                f"need len(values) == len(breakpoints)+1, got {len(vals)} vs {len(bp)}+1"
            )
        if len(bp) > 1 and not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        self.breakpoints = bp
        self.values = vals

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls([], [0.0])

    @classmethod
    def indicator(cls, a: float, b: float) -> "StepFunction":
        """Indicator of the open interval (a, b)."""
        if not b > a:
            raise ValueError("indicator: need a < b")
        return cls([a, b], [0.0, 1.0, 0.0])

    def __call__(self, x):
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float), side="right")
        out = self.values[idx]
        return float(out) if np.isscalar(x) or np.asarray(x).ndim == 0 else out

    def limits_at(self, nu: float) -> tuple[float, float]:
        """One-sided limits (left, right) at nu, exact."""
        left = int(np.searchsorted(self.breakpoints, nu, side="left"))
        right = int(np.searchsorted(self.breakpoints, nu, side="right"))
        return float(self.values[left]), float(self.values[right])

    def simplified(self) -> "StepFunction":
        """Drop breakpoints with no jump across them."""
        keep = [
            i
            for i in range(len(self.breakpoints))
            if self.values[i] != self.values[i + 1]
        ]
        return StepFunction(
            self.breakpoints[keep],
            np.concatenate(([self.values[0]], self.values[np.array(keep, int) + 1]))
            if keep
            else self.values[:1],
        )

    def integral(self) -> float:
        """Lebesgue integral over the line; requires both tails to vanish."""
        if len(self.breakpoints) == 0:
            if self.values[0] != 0.0:
                raise ValueError("integral diverges: nonzero tail value")
            return 0.0
        if self.values[0] != 0.0 or self.values[-1] != 0.0:
            raise ValueError("integral diverges: nonzero tail value")
        widths = np.diff(self.breakpoints)
        return float(np.sum(self.values[1:-1] * widths))

    def pair_with_derivative(self, f) -> float:
        """Exact value of  integral xi * f'  given the antiderivative f.

        Piecewise constancy makes this a telescoping sum of f at the
        breakpoints; no quadrature enters. Requires vanishing tails.
        """
        if self.values[0] != 0.0 or self.values[-1] != 0.0:
            raise ValueError("pair_with_derivative requires vanishing tails")
        total = 0.0
        for i in range(len(self.breakpoints) - 1):
            v = self.values[i + 1]
            if v != 0.0:
                total += v * (f(self.breakpoints[i + 1]) - f(self.breakpoints[i]))
        return total

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.breakpoints, -self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            len(self.breakpoints) == len(other.breakpoints)
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.breakpoints.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return f"StepFunction({self.breakpoints.tolist()}, {self.values.tolist()})"

    # -- serialization ------------------------------------------------------

    def to_csv(self) -> str:
        """CSV with a leading-tail header row, then breakpoint/right-value rows."""
        buf = io.StringIO()
        buf.write(f"# leading_tail_value = {self.values[0]:.17g}\n")
        buf.write("breakpoint,value_right_of_breakpoint\n")
        for b, v in zip(self.breakpoints, self.values[1:]):
            buf.write(f"{b:.17g},{v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "StepFunction":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing leading-tail header row")
        tail = float(lines[0].split("=", 1)[1])
        bps, vals = [], [tail]
        for ln in lines[2:]:
            b, v = ln.split(",")
            bps.append(float(b))
            vals.append(float(v))
        return cls(bps, vals)


def merge_breakpoints(points, tol: float = MERGE_TOL) -> np.ndarray:
    """Sort and cluster points, collapsing gaps below tol to one representative."""
    pts = np.sort(np.asarray(points, dtype=float))
    if len(pts) == 0:
        return pts
    out = [pts[0]]
    for p in pts[1:]:
        if p - out[-1] > tol:
            out.append(p)
    return np.array(out)


def step_from_events(events, tol: float = MERGE_TOL) -> StepFunction:
    """Step function from (position, jump) pairs, zero far to the left.

    Events closer than tol coalesce into one breakpoint carrying the summed
    jump; zero net jumps are dropped. The counting function of a spectral
    pair is the canonical use: jumps +1 at one spectrum, -1 at the other.
    """
    evs = sorted((float(p), float(j)) for p, j in events)
    positions: list[float] = []
    jumps: list[float] = []
    for p, j in evs:
        if positions and p - positions[-1] <= tol:
            jumps[-1] += j
        else:
            positions.append(p)
            jumps.append(j)
    bps, vals = [], [0.0]
    level = 0.0
    for p, j in zip(positions, jumps):
        if j == 0.0:
            continue
        level += j
        bps.append(p)
        vals.append(level)
    return StepFunction(bps, vals)


@dataclass
class SampledFunction:
    """Function known on a finite increasing grid, with optional provenance."""

    abscissae: np.ndarray
    ordinates: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissae = np.asarray(self.abscissae, dtype=float)
        self.ordinates = np.asarray(self.ordinates, dtype=float)
        if self.abscissae.shape != self.ordinates.shape:
            raise ValueError("abscissae and ordinates must have equal length")
        if len(self.abscissae) > 1 and not np.all(np.diff(self.abscissae) > 0):
            raise ValueError("abscissae must be strictly increasing")
