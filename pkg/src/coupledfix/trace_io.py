"""Lossless serialization of iteration traces.

The JSON schema is a bit-exact contract: every float is written with 17
significant digits, which round-trips double precision exactly, so a trace
parsed back from its JSON form compares equal (bitwise on coordinates) to
the in-memory original. Top-level fields:

    scheme, theta, tol, status, iterates (array of {n, x, y}),
    residuals, distances (array or null), operator_name, seed,
    max_iter, guard_domain, cycle_detected

CSV output has columns ``n, x0..x{d-1}, y0..y{d-1}, residual,
distance_to_target`` (the last column is empty when no reference point was
supplied).
"""

from __future__ import annotations

import io
import json

import numpy as np

from .iteration import IterationTrace, SchemeConfig
from .operators import CoupledPair

__all__ = ["format_float", "trace_to_json", "trace_from_json", "trace_to_csv"]


def format_float(v: float) -> str:
    """17-significant-digit decimal form; parses back to the identical double."""
    return format(float(v), ".17g")


def _vec(v: np.ndarray) -> str:
    return "[" + ", ".join(format_float(c) for c in v) + "]"


def trace_to_json(trace: IterationTrace) -> str:
    cfg = trace.scheme_config
    out = io.StringIO()
    out.write("{\n")
    out.write(f'  "scheme": {json.dumps(cfg.scheme)},\n')
    out.write(f'  "theta": {format_float(cfg.theta)},\n')
    out.write(f'  "tol": {format_float(cfg.tol)},\n')
    out.write(f'  "status": {json.dumps(trace.status)},\n')
    out.write('  "iterates": [\n')
    rows = []
    for n, pair in zip(trace.step_indices, trace.iterates):
        rows.append(f'    {{"n": {n}, "x": {_vec(pair.x)}, "y": {_vec(pair.y)}}}')
    out.write(",\n".join(rows))
    out.write("\n  ],\n")
    out.write('  "residuals": [' + ", ".join(format_float(r) for r in trace.residuals) + "],\n")
    if trace.distances_to_target is None:
        out.write('  "distances": null,\n')
    else:
        out.write(
            '  "distances": ['
            + ", ".join(format_float(d) for d in trace.distances_to_target)
            + "],\n"
        )
    out.write(f'  "operator_name": {json.dumps(trace.operator_name)},\n')
    out.write(f'  "seed": {int(cfg.seed)},\n')
    out.write(f'  "max_iter": {int(cfg.max_iter)},\n')
    out.write(f'  "guard_domain": {json.dumps(bool(cfg.guard_domain))},\n')
    out.write(f'  "cycle_detected": {json.dumps(bool(trace.cycle_detected))}\n')
    out.write("}\n")
    return out.getvalue()


def trace_from_json(text: str) -> IterationTrace:
    doc = json.loads(text)
    cfg = SchemeConfig(
        scheme=doc["scheme"],
        theta=float(doc["theta"]),
        tol=float(doc["tol"]),
        max_iter=int(doc["max_iter"]),
        guard_domain=bool(doc["guard_domain"]),
        seed=int(doc["seed"]),
    )
    iterates = [
        CoupledPair(np.asarray(e["x"], dtype=float), np.asarray(e["y"], dtype=float))
        for e in doc["iterates"]
    ]
    distances = doc["distances"]
    return IterationTrace(
        step_indices=[int(e["n"]) for e in doc["iterates"]],
        iterates=iterates,
        residuals=[float(r) for r in doc["residuals"]],
        distances_to_target=None if distances is None else [float(d) for d in distances],
        status=doc["status"],
        scheme_config=cfg,
        operator_name=doc["operator_name"],
        cycle_detected=bool(doc["cycle_detected"]),
    )


def trace_to_csv(trace: IterationTrace) -> str:
    d = trace.iterates[0].dim if trace.iterates else 0
    header = (
        ["n"]
        + [f"x{i}" for i in range(d)]
        + [f"y{i}" for i in range(d)]
        + ["residual", "distance_to_target"]
    )
    lines = [",".join(header)]
    dists = trace.distances_to_target
    for k, (n, pair) in enumerate(zip(trace.step_indices, trace.iterates)):
        cells = [str(n)]
        cells.extend(format_float(c) for c in pair.x)
        cells.extend(format_float(c) for c in pair.y)
        cells.append(format_float(trace.residuals[k]))
        cells.append("" if dists is None else format_float(dists[k]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
