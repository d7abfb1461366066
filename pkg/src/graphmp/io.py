"""Attribute files and JSON result documents."""
import csv
import io
import json
from dataclasses import asdict

import numpy as np

from .errors import ParseError, ValidationError
from .objectives import NodeData

__all__ = ["read_attrs", "write_attrs", "result_document", "dump_json"]

HEADERS = {("node", "feature"), ("node", "observed", "expected"),
           ("node", "feature", "observed", "expected")}


def read_attrs(text, ids):
    """Parse a node attribute CSV keyed by original node ids.

    The header is ``node,feature``, ``node,observed,expected`` or all four
    columns together. Every graph node needs exactly one row; ``ids`` maps
    dense to original ids.
    """
    reader = csv.reader(io.StringIO(text))
    rows = [(i, r) for i, r in enumerate(reader, start=1) if r and not r[0].startswith("#")]
    if not rows:
        raise ParseError("attribute file is empty")
    header = tuple(h.strip() for h in rows[0][1])
    if header not in HEADERS:
        raise ParseError(f"unknown header {','.join(header)!r}", rows[0][0])
    index = {int(x): i for i, x in enumerate(ids)}
    cols = np.full((len(header) - 1, len(ids)), np.nan)
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            node = int(row[0])
            vals = [float(v) for v in row[1:]]
        except ValueError:
            raise ParseError(f"cannot parse {','.join(row)!r}", lineno) from None
        if node not in index:
            raise ValidationError(f"line {lineno}: node {node} is not in the graph")
        i = index[node]
        if not np.isnan(cols[0, i]):
            raise ValidationError(f"line {lineno}: duplicate row for node {node}")
        cols[:, i] = vals
    missing = np.flatnonzero(np.isnan(cols[0]))
    if len(missing):
        raise ValidationError(f"no attributes for node {int(ids[missing[0]])}")
    named = dict(zip(header[1:], cols))
    return NodeData(**named)


def write_attrs(data, ids=None):
    """CSV text with whichever of feature and counts ``data`` carries."""
    ids = np.arange(data.n) if ids is None else ids
    names = [c for c in ("feature", "observed", "expected") if getattr(data, c) is not None]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["node"] + names)
    for i in range(data.n):
        w.writerow([int(ids[i])] + [repr(float(getattr(data, c)[i])) for c in names])
    return out.getvalue()


def result_document(result, detection, score, ids, stat, model, cfg,
                    warning=None, timing=True):
    """JSON-ready summary of a detection run in original node ids."""
    doc = {
        "statistic": stat,
        "k": model.k,
        "g": model.g,
        "support": [int(ids[i]) for i in detection],
        "score": score,
        "solver_support": [int(ids[i]) for i in result.support],
        "objective_trace": [float(v) for v in result.objective_history],
        "estimate_deltas": [float(v) for v in result.estimate_deltas],
        "iterations": result.iterations,
        "halting_reason": result.halting_reason,
        "wall_time": result.wall_time if timing else 0.0,
        "config": asdict(cfg),
    }
    if warning:
        doc["warning"] = warning
    return doc


def dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
