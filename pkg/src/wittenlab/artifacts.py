"""Deterministic artifact emission: CSV and JSON writers shared by the CLI.

Floats are emitted with 17 significant digits ('%.17g'), enough to round-trip
any double bit-exactly, with '.' as the decimal separator regardless of
locale. JSON objects are written with sorted keys and no trailing whitespace;
non-finite floats become null (JSON has no spelling for them).
"""

from __future__ import annotations

import json
import math
import os
import platform
from fractions import Fraction

import numpy as np

from . import __version__
from .quadrature import MAX_LEVEL
from .stepfun import SampledFunction, StepFunction

FLOAT_FMT = "%.17g"


def format_float(x: float) -> str:
    """17-significant-digit decimal form; nan/inf spelled out for CSV."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FMT % x


def format_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if isinstance(v, (complex, np.complexfloating)):
        raise TypeError("emit complex values as separate re/im columns")
    return str(v)


def write_csv(path: str, header, rows) -> None:
    """Write rows of cells with a single header line and LF newlines."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")


def sanitize(obj):
    """Map an arbitrary result tree onto JSON-serializable primitives.

    Fractions become 'p/q' strings (exactness survives the round trip),
    numpy scalars/arrays collapse to Python numbers/lists, non-finite floats
    to None, tuples to lists, NamedTuples to objects.
    """
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": sanitize(obj.real), "im": sanitize(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if hasattr(obj, "_asdict"):  # NamedTuple
        return sanitize(obj._asdict())
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__} into an artifact")


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        json.dump(sanitize(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def step_function_csv(path: str, xi: StepFunction) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(xi.to_csv())


def sampled_csv(path: str, fn: SampledFunction, x_name: str, y_name: str) -> None:
    write_csv(path, [x_name, y_name], zip(fn.abscissae, fn.ordinates))


def report_payload(report) -> dict:
    """JSON view of a WittenReport: everything except the bulk tables."""

    def estimate_payload(est):
        return {
            "method": est.method,
            "estimate": est.estimate,
            "uncertainty": est.uncertainty,
            "converged": est.converged,
            "plateaus": [
                {
                    "L": p.L,
                    "N": p.N,
                    "value": p.value,
                    "spread": p.spread,
                    "x_last": p.x_last,
                    "found": p.found,
                }
                for p in est.plateaus
            ],
        }

    return {
        "path": report.path_summary,
        "W_xi": report.W_xi,
        "W_xi_float": float(report.W_xi),
        "W_resolvent": estimate_payload(report.W_resolvent),
        "W_semigroup": estimate_payload(report.W_semigroup),
        "fredholm": report.fredholm,
        "kernel_dimensions": [
            {"L": L, "N": N, "dim_ker_H1": k1, "dim_ker_H2": k2}
            for (L, N, k1, k2) in report.kernel_table
        ],
        "agreement": report.agreement,
        "quantization_residual": report.quantization_residual,
        "window_check": report.window_check,
        "laplace_residual": report.laplace_residual,
        "converged": report.converged,
    }


def build_manifest(command: str, cfg, timings: dict, artifact_names) -> dict:
    """Run provenance: config echo, versions, quadrature settings, timings."""
    import scipy

    try:
        import matplotlib

        mpl_version = matplotlib.__version__
    except ImportError:  # pragma: no cover - matplotlib is a hard dependency
        mpl_version = None
    return {
        "command": command,
        "config_echo": cfg.raw,
        "effective": {
            "out_dir": cfg.out_dir,
            "seed": cfg.seed,
            "threads": cfg.threads,
            "formats": list(cfg.formats),
        },
        "versions": {
            "wittenlab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "matplotlib": mpl_version,
            "python": platform.python_version(),
        },
        "quadrature": {
            "gl_nodes": cfg.gl_nodes,
            "de_rtol": cfg.de_rtol,
            "de_max_level": MAX_LEVEL,
        },
        "timings_seconds": timings,
        "artifacts": sorted(artifact_names),
    }


def ensure_out_dir(out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return out_dir
