"""JSON set-description files.

Format::

    {"name": "circle", "ambient": 2,
     "cells": [{"kind": "graph",
                "base": {"kind": "band", "base": "point0", "lower": "-1", "upper": "1"},
                "f": ["sqrt(1 - x1^2)"], "vars": ["x1"]},
               {"kind": "point", "coords": [1, 0]}, ...],
     "metadata": {...}}

Cell kinds: ``point`` (``coords``), ``graph`` (``base``, ``f``), ``band``
(``base``, ``lower``, ``upper``; ``"-inf"`` / ``"+inf"`` for infinite bounds),
``chart`` (``params``, ``intervals``, ``f``, ``definable``) and ``linear``
(``base``, ``matrix``).  ``vars`` names the base coordinates and defaults to
``x1, x2, ...``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .cells import POINT0, Band, Cell, ChartCell, DefinableSet, Graph, LinearImage, Point0, point_cell
from .errors import InputError
from .expr import parse_expr

_INF = {"-inf": -math.inf, "+inf": math.inf, "inf": math.inf}


def default_vars(m: int) -> list[str]:
    return [f"x{i + 1}" for i in range(m)]


def _bound(text, variables):
    if text in ("-inf", "+inf", "inf", None):
        return None
    return parse_expr(str(text), variables)


def _interval_end(v):
    if isinstance(v, str):
        if v in _INF:
            return _INF[v]
        return float(parse_expr(v, []).eval([]))
    return float(v)


def cell_from_dict(spec) -> Cell:
    if spec == "point0":
        return POINT0
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError(f"cell description must be 'point0' or an object with 'kind': {spec!r}")
    kind = spec["kind"]
    if kind == "point":
        coords = spec.get("coords", [])
        return point_cell([float(c) for c in coords]) if coords else POINT0
    if kind == "chart":
        params = list(spec["params"])
        return ChartCell(
            params,
            [tuple(_interval_end(v) for v in iv) for iv in spec["intervals"]],
            [parse_expr(t, params) for t in spec["f"]],
            definable=bool(spec.get("definable", False)),
        )
    base = cell_from_dict(spec.get("base", "point0"))
    variables = list(spec.get("vars") or default_vars(base.ambient))
    if kind == "graph":
        return Graph(base, tuple(parse_expr(str(t), variables) for t in spec["f"]))
    if kind == "band":
        return Band(base, _bound(spec.get("lower"), variables), _bound(spec.get("upper"), variables))
    if kind == "linear":
        return LinearImage(base, np.array(spec["matrix"], dtype=float))
    raise InputError(f"unknown cell kind {kind!r}")


def cell_to_dict(c: Cell):
    if isinstance(c, Point0):
        return "point0"
    if isinstance(c, Graph) and isinstance(c.base, Point0) and all(e.is_constant() for e in c.f):
        return {"kind": "point", "coords": [e.eval([]) for e in c.f]}
    if isinstance(c, Graph):
        return {
            "kind": "graph",
            "base": cell_to_dict(c.base),
            "vars": list(c.f[0].variables),
            "f": [e.text for e in c.f],
        }
    if isinstance(c, Band):
        bounds = [b for b in (c.lower, c.upper) if b is not None]
        return {
            "kind": "band",
            "base": cell_to_dict(c.base),
            "vars": list(bounds[0].variables) if bounds else default_vars(c.base.ambient),
            "lower": "-inf" if c.lower is None else c.lower.text,
            "upper": "+inf" if c.upper is None else c.upper.text,
        }
    if isinstance(c, ChartCell):
        end = lambda v: "-inf" if v == -math.inf else "+inf" if v == math.inf else v  # noqa: E731
        return {
            "kind": "chart",
            "params": list(c.params),
            "intervals": [[end(a), end(b)] for a, b in c.intervals],
            "f": [e.text for e in c.f],
            "definable": c.definable,
        }
    if isinstance(c, LinearImage):
        return {"kind": "linear", "base": cell_to_dict(c.base), "matrix": c.matrix.tolist()}
    raise TypeError(f"cannot serialize {type(c).__name__}")


def set_from_dict(spec) -> DefinableSet:
    try:
        cells = [cell_from_dict(c) for c in spec["cells"]]
        ambient = int(spec.get("ambient", cells[0].ambient if cells else 0))
        return DefinableSet(
            spec.get("name", "unnamed"),
            ambient,
            cells,
            disjoint=bool(spec.get("disjoint", True)),
            metadata=dict(spec.get("metadata", {})),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed set description: {exc!r}") from exc


def set_to_dict(S: DefinableSet) -> dict:
    return {
        "name": S.name,
        "ambient": S.ambient,
        "disjoint": S.disjoint,
        "cells": [cell_to_dict(c) for c in S.cells],
        "metadata": S.metadata,
    }


def load_set(path) -> DefinableSet:
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"SyntaxError: {exc}") from exc
    except OSError as exc:
        raise InputError(str(exc)) from exc
    return set_from_dict(spec)


def dump_set(S: DefinableSet, path=None) -> str:
    text = json.dumps(set_to_dict(S), indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
