"""Deterministic CSV/JSON writers and trace re-ingestion.

Floats are written with ``repr`` (shortest round-trip form), CSV is
RFC-4180 with '.' decimal and LF line endings, JSON keys are sorted:
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .domain import make_grid
from .errors import ConfigurationError
from .flow import FlowTrace


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, columns) -> None:
    """Write equal-length columns as CSV with LF endings."""
    columns = [np.asarray(c) for c in columns]
    n = columns[0].shape[0]
    if any(c.shape[0] != n for c in columns):
        raise ConfigurationError("CSV columns must have equal length")
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(c[i]) for c in columns) + "\n")


def write_json(path, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trace_csv(path, trace: FlowTrace) -> None:
    """Long-format trace: one row per (t, theta) with u and S."""
    nt, n = trace.u.shape
    t_col = np.repeat(trace.times, n)
    th_col = np.tile(trace.grid.nodes, nt)
    write_csv(
        path,
        ["t", "theta", "u", "S"],
        [t_col, th_col, trace.u.ravel(), trace.S.ravel()],
    )


def read_trace_csv(path, alpha: float) -> FlowTrace:
    """Rebuild a FlowTrace from a long-format trace CSV."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    t_col = np.atleast_1d(data["t"])
    th_col = np.atleast_1d(data["theta"])
    u_col = np.atleast_1d(data["u"])
    s_col = np.atleast_1d(data["S"])
    times = np.unique(t_col)
    n = th_col.size // times.size
    if times.size * n != th_col.size:
        raise ConfigurationError("trace CSV is not a complete (t, theta) product")
    grid = make_grid(n)
    nodes = th_col[:n]
    if not np.allclose(nodes, grid.nodes, rtol=0, atol=1e-12):
        raise ConfigurationError("trace CSV nodes are not a cell-centered grid")
    order = np.argsort(t_col, kind="stable")
    u = u_col[order].reshape(times.size, n)
    S = s_col[order].reshape(times.size, n)
    return FlowTrace(alpha=alpha, grid=grid, times=times, u=u, S=S)


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
