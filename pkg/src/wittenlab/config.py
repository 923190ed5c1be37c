"""Run configuration: one TOML file drives every subcommand.

Validation happens at load time and error messages name the offending key,
so a bad config never reaches the numerical layers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .linalg import validate_symmetric
from .model import build_path

DEFAULT_RESOLUTIONS = ((20.0, 1001), (40.0, 2001))
DEFAULT_FORMATS = ("csv", "json", "png")
KNOWN_FORMATS = {"csv", "json", "png"}


class ConfigError(ValueError):
    """Invalid run configuration; the message names the violated key."""


@dataclass
class RunConfig:
    """Validated configuration shared by all subcommands."""

    a_minus: np.ndarray | None = None
    b_plus: np.ndarray | None = None
    profile: str = "logistic"
    profile_samples: tuple | None = None
    resolutions: tuple = DEFAULT_RESOLUTIONS
    lambda_schedule: tuple | None = None  # shared across resolutions
    time_schedule: tuple | None = None
    window: tuple = (0.1, 0.9)
    gl_nodes: int = 200
    de_rtol: float = 1e-12
    out_dir: str = "out"
    formats: tuple = DEFAULT_FORMATS
    seed: int = 0
    threads: int | None = None
    extras: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def require_path(self):
        """The operator path, or a ConfigError naming the missing table."""
        if self.a_minus is None or self.b_plus is None:
            raise ConfigError("path: this subcommand requires a [path] table")
        try:
            return build_path(
                self.a_minus, self.b_plus, self.profile, self.profile_samples
            )
        except ValueError as exc:
            raise ConfigError(f"path: {exc}") from exc


def _matrix(table: dict, key: str, section: str) -> np.ndarray:
    if key not in table:
        raise ConfigError(f"{section}.{key}: required matrix missing")
    rows = table[key]
    try:
        m = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}: not a numeric row list ({exc})") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(
            f"{section}.{key}: must be a square row list, got shape {m.shape}"
        )
    try:
        return validate_symmetric(m)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: {exc}") from exc


def _resolutions(grid: dict) -> tuple:
    raw = grid.get("resolutions")
    if raw is None:
        return DEFAULT_RESOLUTIONS
    out = []
    for i, pair in enumerate(raw):
        try:
            L, N = float(pair[0]), int(pair[1])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(
                f"grid.resolutions[{i}]: expected [L, N] pair, got {pair!r}"
            ) from exc
        if not L > 0:
            raise ConfigError(f"grid.resolutions[{i}]: L must be positive, got {L}")
        if N < 3 or N % 2 == 0:
            raise ConfigError(
                f"grid.resolutions[{i}]: N must be odd and >= 3, got {N}"
            )
        out.append((L, N))
    if not out:
        raise ConfigError("grid.resolutions: must not be empty")
    if any(out[i + 1][0] <= out[i][0] for i in range(len(out) - 1)):
        raise ConfigError("grid.resolutions: L values must be strictly increasing")
    return tuple(out)


def _schedule(grid: dict, key: str, sign: int) -> tuple | None:
    raw = grid.get(key)
    if raw is None:
        return None
    try:
        vals = tuple(float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grid.{key}: not a numeric list ({exc})") from exc
    if sign < 0 and any(v >= 0 for v in vals):
        raise ConfigError(f"grid.{key}: all entries must be negative")
    if sign > 0 and any(v <= 0 for v in vals):
        raise ConfigError(f"grid.{key}: all entries must be positive")
    if len(vals) >= 2 and any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(f"grid.{key}: entries must be strictly increasing")
    return vals


def load_config(
    config_path: str,
    out_override: str | None = None,
    seed_override: int | None = None,
    threads_override: int | None = None,
) -> RunConfig:
    """Parse and validate a TOML run configuration.

    CLI flags override the corresponding file entries; the raw parsed table
    is retained for the manifest echo.
    """
    if not os.path.exists(config_path):
        raise ConfigError(f"config file not found: {config_path}")
    with open(config_path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"TOML parse error: {exc}") from exc

    a_minus = b_plus = None
    profile, samples = "logistic", None
    path_tbl = raw.get("path")
    if path_tbl is not None:
        if not isinstance(path_tbl, dict):
            raise ConfigError("path: must be a table")
        a_minus = _matrix(path_tbl, "A_minus", "path")
        b_plus = _matrix(path_tbl, "B_plus", "path")
        if a_minus.shape != b_plus.shape:
            raise ConfigError(
                f"path: A_minus {a_minus.shape} and B_plus {b_plus.shape} differ in shape"
            )
        profile = path_tbl.get("profile", "logistic")
        if not isinstance(profile, str):
            raise ConfigError(f"path.profile: must be a string, got {profile!r}")
        if "profile_t" in path_tbl or "profile_s" in path_tbl:
            if "profile_t" not in path_tbl or "profile_s" not in path_tbl:
                raise ConfigError("path.profile_t/profile_s: both lists are required")
            samples = (path_tbl["profile_t"], path_tbl["profile_s"])

    grid = raw.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("grid: must be a table")
    resolutions = _resolutions(grid)
    lam_schedule = _schedule(grid, "lambda_schedule", sign=-1)
    t_schedule = _schedule(grid, "time_schedule", sign=+1)

    transforms_tbl = raw.get("transforms", {})
    gl_nodes = transforms_tbl.get("gl_nodes", 200)
    if not isinstance(gl_nodes, int) or gl_nodes < 2:
        raise ConfigError(f"transforms.gl_nodes: need an integer >= 2, got {gl_nodes!r}")
    de_rtol = transforms_tbl.get("de_rtol", 1e-12)
    if not (isinstance(de_rtol, (int, float)) and 0 < de_rtol < 1e-2):
        raise ConfigError(f"transforms.de_rtol: need a float in (0, 1e-2), got {de_rtol!r}")

    output = raw.get("output", {})
    out_dir = out_override or output.get("directory", "out")
    formats = tuple(output.get("formats", list(DEFAULT_FORMATS)))
    unknown = set(formats) - KNOWN_FORMATS
    if unknown:
        raise ConfigError(f"output.formats: unknown entries {sorted(unknown)}")

    window = raw.get("window", [0.1, 0.9])
    try:
        lo, hi = float(window[0]), float(window[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"window: expected [lo, hi], got {window!r}") from exc
    if not (0 < lo < hi):
        raise ConfigError(f"window: need 0 < lo < hi, got [{lo}, {hi}]")

    seed = seed_override if seed_override is not None else raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"seed: must be an integer, got {seed!r}")

    extras = {
        k: v
        for k, v in raw.items()
        if k not in {"path", "grid", "transforms", "output", "window", "seed"}
    }

    cfg = RunConfig(
        a_minus=a_minus,
        b_plus=b_plus,
        profile=profile,
        profile_samples=samples,
        resolutions=resolutions,
        lambda_schedule=lam_schedule,
        time_schedule=t_schedule,
        window=(lo, hi),
        gl_nodes=gl_nodes,
        de_rtol=de_rtol,
        out_dir=out_dir,
        formats=formats,
        seed=seed,
        threads=threads_override,
        extras=extras,
        raw=raw,
    )
    if path_tbl is not None:
        cfg.require_path()  # surface path errors at load time, not mid-run
    return cfg
