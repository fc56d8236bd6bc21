"""Built-in example sets, written in the JSON set-description format.

Each entry carries ``metadata`` with a short description and the behaviour
expected from the growth experiments.  ``definable: false`` marks the two
negative controls (Archimedean spiral, graph of the complex exponential).
"""

from __future__ import annotations

import re

from .cells import DefinableSet
from .errors import InputError
from .setfile import set_from_dict

_LINE = {"kind": "band", "base": "point0", "lower": "-inf", "upper": "+inf"}
_UNIT_INTERVAL = {"kind": "band", "base": "point0", "lower": "0", "upper": "1"}
_SYM_INTERVAL = {"kind": "band", "base": "point0", "lower": "-1", "upper": "1"}
_OPEN_DISK = {
    "kind": "band",
    "base": _SYM_INTERVAL,
    "lower": "-sqrt(1 - x1^2)",
    "upper": "sqrt(1 - x1^2)",
}
_PLANE2 = {"kind": "band", "base": _LINE, "lower": "-inf", "upper": "+inf"}


def _euclidean(d):
    cell = "point0"
    for _ in range(d):
        cell = {"kind": "band", "base": cell, "lower": "-inf", "upper": "+inf"}
    return cell


def _plane(d, n):
    if not 1 <= d <= n:
        raise InputError(f"plane({d},{n}) needs 1 <= d <= n")
    base = _euclidean(d)
    cells = [base] if d == n else [{"kind": "graph", "base": base, "f": ["0"] * (n - d)}]
    return {
        "name": f"plane({d},{n})",
        "ambient": n,
        "cells": cells,
        "metadata": {
            "description": f"coordinate {d}-plane in R^{n}",
            "expected": f"V(r) = vol of the {d}-ball of radius r; exponent {d}",
        },
    }


_ENTRIES = {
    "segment": {
        "name": "segment",
        "ambient": 2,
        "cells": [{"kind": "graph", "base": _UNIT_INTERVAL, "f": ["0"]}],
        "metadata": {"description": "unit segment (0,1) x {0}", "expected": "length 1 once r >= 1"},
    },
    "points5": {
        "name": "points5",
        "ambient": 2,
        "cells": [{"kind": "point", "coords": c} for c in ([0, 0], [1, 0], [0, 1], [-2, 1], [3, -3])],
        "metadata": {"description": "five isolated points", "expected": "counting measure; d = 0"},
    },
    "circle": {
        "name": "circle",
        "ambient": 2,
        "cells": [
            {"kind": "graph", "base": _SYM_INTERVAL, "f": ["sqrt(1 - x1^2)"]},
            {"kind": "graph", "base": _SYM_INTERVAL, "f": ["-sqrt(1 - x1^2)"]},
            {"kind": "point", "coords": [1, 0]},
            {"kind": "point", "coords": [-1, 0]},
        ],
        "metadata": {"description": "unit circle: two arcs and two points", "expected": "2*pi for r > 1"},
    },
    "sphere2": {
        "name": "sphere2",
        "ambient": 3,
        "cells": [
            {"kind": "graph", "base": _OPEN_DISK, "f": ["sqrt(1 - x1^2 - x2^2)"]},
            {"kind": "graph", "base": _OPEN_DISK, "f": ["-sqrt(1 - x1^2 - x2^2)"]},
            {"kind": "graph", "base": _SYM_INTERVAL, "f": ["sqrt(1 - x1^2)", "0"]},
            {"kind": "graph", "base": _SYM_INTERVAL, "f": ["-sqrt(1 - x1^2)", "0"]},
            {"kind": "point", "coords": [1, 0, 0]},
            {"kind": "point", "coords": [-1, 0, 0]},
        ],
        "metadata": {"description": "unit sphere S^2 in R^3", "expected": "4*pi for r > 1"},
    },
    "parabola": {
        "name": "parabola",
        "ambient": 2,
        "cells": [{"kind": "graph", "base": _LINE, "f": ["x1^2"]}],
        "metadata": {"description": "y = x^2", "expected": "V(r) ~ 2r; exponent 1"},
    },
    "paraboloid": {
        "name": "paraboloid",
        "ambient": 3,
        "cells": [{"kind": "graph", "base": _PLANE2, "f": ["x1^2 + x2^2"]}],
        "metadata": {"description": "z = x^2 + y^2", "expected": "V(r) ~ (4 pi / 3) r^(3/2); bounded by r^2"},
    },
    "archimedean-spiral": {
        "name": "archimedean-spiral",
        "ambient": 2,
        "cells": [
            {
                "kind": "chart",
                "params": ["s"],
                "intervals": [[0, "+inf"]],
                "f": ["s*cos(s)", "s*sin(s)"],
                "definable": False,
            }
        ],
        "metadata": {
            "description": "rho = theta spiral; not definable in any o-minimal structure",
            "expected": "V(r) ~ r^2 / 2; violates O(r)",
            "definable": False,
        },
    },
    "complex-line": {
        "name": "complex-line",
        "ambient": 4,
        "cells": [{"kind": "graph", "base": _PLANE2, "f": ["x1 - x2", "x1 + x2"]}],
        "metadata": {
            "description": "w = (1+i) z in C^2 = R^4",
            "expected": "V(r) = pi r^2; algebraic",
            "complex_dim": 1,
        },
    },
    "complex-parabola": {
        "name": "complex-parabola",
        "ambient": 4,
        "cells": [{"kind": "graph", "base": _PLANE2, "f": ["x1^2 - x2^2", "2*x1*x2"]}],
        "metadata": {
            "description": "w = z^2 in C^2 = R^4",
            "expected": "V(r) = pi (2 r^2 - s), s + s^2 = r^2; C_hat -> 2 pi; algebraic",
            "complex_dim": 1,
        },
    },
    "complex-exp": {
        "name": "complex-exp",
        "ambient": 4,
        "cells": [{"kind": "graph", "base": _PLANE2, "f": ["exp(x1)*cos(x2)", "exp(x1)*sin(x2)"]}],
        "metadata": {
            "description": "w = e^z in C^2 = R^4; analytic, not algebraic, not definable",
            "expected": "V(r) ~ (2/3) r^3; transcendental",
            "complex_dim": 1,
            "definable": False,
        },
    },
    # Lemma test suite: graphs whose tangent planes stay near the base plane.
    "flat-square": {
        "name": "flat-square",
        "ambient": 3,
        "cells": [{"kind": "graph", "base": {"kind": "band", "base": _UNIT_INTERVAL, "lower": "0", "upper": "1"}, "f": ["0"]}],
        "metadata": {"description": "f = 0 over (0,1)^2", "expected": "lemma ratio 1", "lemma": True},
    },
    "steep-line": {
        "name": "steep-line",
        "ambient": 2,
        "cells": [{"kind": "graph", "base": _UNIT_INTERVAL, "f": ["sqrt(3)*x1"]}],
        "metadata": {"description": "y = sqrt(3) x over (0,1)", "expected": "lemma ratio exactly 2", "lemma": True},
    },
    "polar-cap": {
        "name": "polar-cap",
        "ambient": 3,
        "cells": [
            {
                "kind": "graph",
                "base": {
                    "kind": "band",
                    "base": {"kind": "band", "base": "point0", "lower": "-sqrt(0.5)", "upper": "sqrt(0.5)"},
                    "lower": "-sqrt(0.5 - x1^2)",
                    "upper": "sqrt(0.5 - x1^2)",
                },
                "f": ["sqrt(1 - x1^2 - x2^2)"],
            }
        ],
        "metadata": {
            "description": "unit-sphere cap over the disk of radius 1/sqrt(2); |Df| <= 1",
            "expected": "lemma ratio <= 2",
            "lemma": True,
        },
    },
    "tilted-patch": {
        "name": "tilted-patch",
        "ambient": 3,
        "cells": [
            {
                "kind": "graph",
                "base": {"kind": "band", "base": _SYM_INTERVAL, "lower": "-1", "upper": "1"},
                "f": ["0.5*x1 + 0.25*x2^2"],
            }
        ],
        "metadata": {"description": "z = x/2 + y^2/4 over (-1,1)^2", "expected": "lemma ratio <= 2", "lemma": True},
    },
}

DEFINABLE = [
    "segment",
    "points5",
    "circle",
    "sphere2",
    "parabola",
    "paraboloid",
    "plane(1,2)",
    "plane(2,3)",
    "complex-line",
    "complex-parabola",
]
LEMMA_SUITE = ["flat-square", "steep-line", "polar-cap", "tilted-patch"]

_PLANE_RE = re.compile(r"^plane(?:\((\d+),\s*(\d+)\)|-(\d+)-(\d+))?$")


def names() -> list[str]:
    return sorted(_ENTRIES) + ["plane(d,n)", "line"]


def catalog_dict(name: str) -> dict:
    if name == "line":
        spec = _plane(1, 2)
        spec["name"] = "line"
        return spec
    m = _PLANE_RE.match(name)
    if m:
        d, n = (m.group(1) or m.group(3) or 2), (m.group(2) or m.group(4) or 3)
        return _plane(int(d), int(n))
    if name not in _ENTRIES:
        raise InputError(f"unknown catalog entry {name!r}; try one of {', '.join(names())}")
    return _ENTRIES[name]


def load(name: str) -> DefinableSet:
    return set_from_dict(catalog_dict(name))
