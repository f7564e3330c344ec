"""Operator-family files and bound-report files.

A family file is JSON::

    {"schema_version": 1, "dim": 2, "count": 1, "label": "...",
     "operators": [[[re, im], [re, im], [re, im], [re, im]]]}

Each operator is a row-major list of ``dim * dim`` ``[re, im]`` pairs. Reals
are written with Python's shortest round-trip ``repr`` so reading a written
file reproduces every entry bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .bounds import BoundReport, OperatorFamily
from .config import Tolerances

SCHEMA_VERSION = 1
_FAMILY_KEYS = ("schema_version", "dim", "count", "label", "operators")


class FamilyFileError(ValueError):
    """Malformed family file; the message names the offending line or field."""


def family_to_dict(f: OperatorFamily) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": f.dim,
        "count": f.n,
        "label": f.label,
        "operators": [
            [[float(z.real), float(z.imag)] for z in t.reshape(-1)] for t in f.members
        ],
    }


def dumps_family(f) -> str:
    """Render a family (or a family dict with extra keys) one operator per line."""
    d = family_to_dict(f) if isinstance(f, OperatorFamily) else f
    head = [f"  {json.dumps(k)}: {json.dumps(d[k])}" for k in ("schema_version", "dim", "count", "label")]
    head += [f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in d.items() if k not in _FAMILY_KEYS]
    ops = ",\n".join("    " + json.dumps(op, allow_nan=False) for op in d["operators"])
    return "{\n" + ",\n".join(head) + ',\n  "operators": [\n' + ops + "\n  ]\n}\n"


def write_family(f, path) -> None:
    Path(path).write_text(dumps_family(f), encoding="utf-8", newline="\n")


def _field(d: dict, name: str, kind):
    if name not in d:
        raise FamilyFileError(f"missing field {name!r}")
    v = d[name]
    if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise FamilyFileError(f"field {name!r} must be an integer, got {v!r}")
    if kind is str and not isinstance(v, str):
        raise FamilyFileError(f"field {name!r} must be a string, got {v!r}")
    if kind is list and not isinstance(v, list):
        raise FamilyFileError(f"field {name!r} must be a list")
    return v


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise FamilyFileError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def family_from_dict(d: Any) -> OperatorFamily:
    if not isinstance(d, dict):
        raise FamilyFileError("top level must be an object")
    version = _field(d, "schema_version", int)
    if version != SCHEMA_VERSION:
        raise FamilyFileError(f"field 'schema_version': unsupported version {version}")
    dim = _field(d, "dim", int)
    count = _field(d, "count", int)
    label = _field(d, "label", str)
    ops = _field(d, "operators", list)
    if dim < 1:
        raise FamilyFileError(f"field 'dim' must be positive, got {dim}")
    if count < 1:
        raise FamilyFileError(f"field 'count' must be positive, got {count}")
    if len(ops) != count:
        raise FamilyFileError(f"field 'operators' has {len(ops)} matrices, expected count={count}")
    members = []
    for k, op in enumerate(ops):
        where = f"operators[{k}]"
        if not isinstance(op, list) or len(op) != dim * dim:
            got = len(op) if isinstance(op, list) else type(op).__name__
            raise FamilyFileError(f"{where}: expected {dim * dim} entries, got {got}")
        entries = np.empty(dim * dim, dtype=np.complex128)
        for i, pair in enumerate(op):
            if not isinstance(pair, list) or len(pair) != 2:
                raise FamilyFileError(f"{where}[{i}]: expected an [re, im] pair, got {pair!r}")
            entries[i] = complex(_number(pair[0], f"{where}[{i}][0]"), _number(pair[1], f"{where}[{i}][1]"))
        members.append(entries.reshape(dim, dim))
    return OperatorFamily(tuple(members), label)


def loads_family(text: str) -> OperatorFamily:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FamilyFileError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return family_from_dict(d)


def read_family(path) -> OperatorFamily:
    return loads_family(Path(path).read_text(encoding="utf-8"))


def report_to_flat(
    report: BoundReport, label: str = "", seed: int = 0, tol: Tolerances | None = None
) -> dict[str, Any]:
    """Flat key/value view of a report, in a fixed key order."""
    tol = tol or Tolerances()
    flat: dict[str, Any] = {"tool_version": __version__, "label": label, "seed": int(seed)}
    flat.update({f"tol.{k}": v for k, v in tol.as_dict().items()})
    flat.update({k: float(v) for k, v in report.scalars().items()})
    flat["chain_ok"] = bool(report.chain_ok)
    for s in report.steps:
        flat[f"slack.{s.check_name}"] = s.rhs - s.lhs
    for name, m in (("a_matrix", report.a_matrix), ("b_matrix", report.b_matrix)):
        for (j, k), v in np.ndenumerate(m):
            flat[f"{name}[{j}][{k}]"] = float(v)
    return flat


def _render(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dumps_report(flat: dict[str, Any], fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(flat, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in flat.items():
            w.writerow([k, _render(v)])
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def write_report(flat: dict[str, Any], path, fmt: str = "json") -> None:
    Path(path).write_text(dumps_report(flat, fmt), encoding="utf-8", newline="\n")
