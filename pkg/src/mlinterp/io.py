"""File formats: deterministic JSON output and loaders for input files."""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .errors import WorkbenchError
from .exponents import ExponentTuple, validate_tuple
from .forms import Kernel
from .spaces import MeasureSpace, SimpleFunction

__all__ = ["dumps", "parse_number", "parse_vector", "load_json", "load_space",
           "load_kernel", "load_claims", "load_function", "region_csv"]


class InputError(WorkbenchError):
    pass


def _encode(o: Any) -> str:
    if o is None:
        return "null"
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        x = float(o)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x + 0.0, ".17g")
    if isinstance(o, str):
        return json.dumps(o)
    if isinstance(o, dict):
        items = sorted((str(k), v) for k, v in o.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(o, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in o) + "]"
    raise TypeError(f"cannot encode {type(o).__name__}")


def dumps(obj: Any) -> str:
    """JSON with sorted keys and every float printed to 17 significant digits."""
    return _encode(obj) + "\n"


def parse_number(tok) -> float:
    if isinstance(tok, (int, float)):
        return float(tok)
    s = str(tok).strip().lower()
    if s in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        return float(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a number: {tok!r}") from exc


def parse_vector(text: str) -> list[float]:
    return [parse_number(t) for t in str(text).split(",") if t.strip()]


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc


def load_space(obj: dict) -> MeasureSpace:
    if not isinstance(obj, dict) or "weights" not in obj:
        raise InputError("space object needs a 'weights' list")
    return MeasureSpace.from_json(obj)


def load_kernel(obj: dict, spaces: dict[str, MeasureSpace] | None = None) -> Kernel:
    """Kernel JSON; spaces come from an embedded 'spaces' list or, failing
    that, from ``spaces`` keyed by id."""
    try:
        dims = [int(d) for d in obj["dims"]]
        ids = list(obj["space_ids"])
        re = np.asarray(obj["values_re"], dtype=float)
        im = np.asarray(obj.get("values_im", [0.0] * re.size), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed kernel object: {exc}") from exc
    if int(obj.get("arity", len(dims) - 1)) != len(dims) - 1 or len(ids) != len(dims):
        raise InputError("arity, dims and space_ids disagree")
    known = dict(spaces or {})
    for s in obj.get("spaces", []):
        sp = load_space(s)
        known.setdefault(sp.id, sp)
    try:
        sps = [known[i] for i in ids]
    except KeyError as exc:
        raise InputError(f"no space with id {exc.args[0]!r}") from exc
    if re.shape != im.shape:
        raise InputError("values_re and values_im differ in length")
    if [sp.size for sp in sps] != dims:
        raise InputError(f"dims {dims} disagree with the space sizes")
    return Kernel(tuple(sps), re + 1j * im)


def load_claims(obj) -> list[tuple[ExponentTuple, float | None]]:
    if not isinstance(obj, list) or not obj:
        raise InputError("claims file must be a non-empty JSON list")
    out = []
    for item in obj:
        if not isinstance(item, dict) or "alpha" not in item:
            raise InputError("each claim needs an 'alpha' entry")
        t = validate_tuple(parse_number(x) for x in item["alpha"])
        b = item.get("bound")
        out.append((t, None if b is None else parse_number(b)))
    return out


def load_function(obj: dict) -> SimpleFunction:
    if not isinstance(obj, dict) or "space" not in obj:
        raise InputError("function file needs 'space' and 'values_re'")
    s = load_space(obj["space"])
    re = np.asarray(obj.get("values_re", obj.get("values")), dtype=float)
    im = np.asarray(obj.get("values_im", np.zeros_like(re)), dtype=float)
    return SimpleFunction(s, re + 1j * im)


def region_csv(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header, *body = rows
    w.writerow(header)
    for r in body:
        w.writerow([format(x, ".17g") if isinstance(x, float) else x for x in r])
    return buf.getvalue()
