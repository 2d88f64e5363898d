"""JSON operator-family format.

::

    {"dom_dim": n,
     "members": [{"rows": m, "cols": n, "entries": [[re, im], ...]}, ...]}

``entries`` is row-major. Doubles are written with ``repr`` precision, so
finite values round-trip bit for bit.
"""

import json
from pathlib import Path

import numpy as np

from .core import GFrameFamily, as_operator
from .errors import FormatError


def operator_to_dict(op):
    op = np.asarray(op, dtype=complex)
    rows, cols = op.shape
    flat = op.reshape(-1)
    return {
        "rows": rows,
        "cols": cols,
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def operator_from_dict(d, where="operator"):
    try:
        rows, cols, entries = int(d["rows"]), int(d["cols"]), d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: expected rows/cols/entries ({exc})") from exc
    if len(entries) != rows * cols:
        raise FormatError(f"{where}: {len(entries)} entries for a {rows}x{cols} matrix")
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in entries], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: entries must be [re, im] pairs ({exc})") from exc
    return as_operator(arr.reshape(rows, cols), where)


def family_to_dict(family):
    return {
        "dom_dim": family.dom_dim,
        "members": [operator_to_dict(m) for m in family],
    }


def family_from_dict(d, where="family"):
    try:
        dom_dim, members = int(d["dom_dim"]), d["members"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: expected dom_dim/members ({exc})") from exc
    ops = [operator_from_dict(m, f"{where}: member {i}") for i, m in enumerate(members)]
    if not ops:
        raise FormatError(f"{where}: no members")
    for i, op in enumerate(ops):
        if op.shape[1] != dom_dim:
            raise FormatError(f"{where}: member {i} has {op.shape[1]} columns, dom_dim is {dom_dim}")
    return GFrameFamily(tuple(ops))


def dumps_family(family):
    return json.dumps(family_to_dict(family), allow_nan=False)


def loads_json(text, where="<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{where}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def loads_family(text, where="<string>"):
    return family_from_dict(loads_json(text, where), where)


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    return loads_json(text, str(path))


def read_family(path):
    return family_from_dict(read_json(path), str(path))


def write_family(family, path):
    Path(path).write_text(dumps_family(family), encoding="utf-8")
