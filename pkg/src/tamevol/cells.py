"""Cells, definable sets, and their canonical charts.

A cell is built recursively from the unique point of R^0:

* ``Graph(base, f)`` appends coordinates ``f(x)`` to every point ``x`` of the
  base cell (dimension unchanged);
* ``Band(base, lower, upper)`` is the open region strictly between two
  functions on the base (dimension plus one); either bound may be infinite.

Every cell of dimension ``d`` carries a chart from the open unit box
``(0, 1)^d``.  Band coordinates interpolate between their bounds; infinite
bounds go through rational maps of the box coordinate with a caller-chosen
``scale`` so the same chart can be tuned to a ball radius.

Two non-grammar cell types support the verification machinery:
``ChartCell`` (an explicit parametrization, used for the non-definable spiral)
and ``LinearImage`` (a cell pushed through a linear map, for rotation and
scaling checks).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateCell, DomainError, EmptySet, InvalidCell, OverlapError
from .expr import Dual, Expression

# Box coordinates are kept this far from the faces of (0, 1)^d.
EDGE = 1e-12


def interval_map(t, lo, hi, scale=1.0):
    """Map ``t`` in (0, 1) onto the interval (lo, hi); ``None`` marks an infinite end."""
    if lo is not None and hi is not None:
        return lo + t * (hi - lo)
    if lo is not None:
        return lo + scale * (t / (1.0 - t))
    if hi is not None:
        return hi - scale * ((1.0 - t) / t)
    return scale * ((2.0 * t - 1.0) / (4.0 * t * (1.0 - t)))


def _full(x, n, k):
    """Broadcast a float / array / Dual result to length ``n`` (a Dual if ``k``)."""
    if isinstance(x, Dual):
        return x
    x = np.broadcast_to(np.asarray(x, dtype=float), (n,)).copy()
    if k is None:
        return x
    return Dual(x, np.zeros((n, k)))


def _values(coords):
    return [c.val if isinstance(c, Dual) else c for c in coords]


class Cell:
    """Common interface of all cells.

    Subclasses set ``ambient`` and ``dim`` and implement ``_coords``, which maps
    box coordinates ``T`` (shape ``(N, >= dim)``; only the first ``dim``
    columns are read) to a list of ``ambient`` coordinate arrays.  With ``k``
    given the entries are :class:`Dual` numbers differentiated with respect to
    the first ``k`` columns.
    """

    ambient: int
    dim: int
    definable: bool = True

    def _coords(self, T, scale, k):
        raise NotImplementedError

    def bounded_axes(self) -> tuple[bool, ...]:
        raise NotImplementedError

    def chart(self) -> "Parametrization":
        cached = self.__dict__.get("_chart")
        if cached is None:
            cached = Parametrization(self)
            cached.check_rank()
            object.__setattr__(self, "_chart", cached)
        return cached


@dataclass(frozen=True, eq=False)
class Point0(Cell):
    """The unique cell of R^0."""

    ambient: int = field(default=0, init=False)
    dim: int = field(default=0, init=False)

    def _coords(self, T, scale, k):
        return []

    def bounded_axes(self):
        return ()


POINT0 = Point0()


def _check_vars(exprs, base):
    for e in exprs:
        if len(e.variables) != base.ambient:
            raise InvalidCell(
                f"expression {e.text!r} declares {len(e.variables)} variables, "
                f"base cell lives in R^{base.ambient}"
            )


@dataclass(frozen=True, eq=False)
class Graph(Cell):
    """Graph of a vector of functions on ``base``, appended as trailing coordinates."""

    base: Cell
    f: tuple[Expression, ...]
    ambient: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        f = tuple(self.f)
        if not f:
            raise InvalidCell("graph needs at least one function")
        _check_vars(f, self.base)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "ambient", self.base.ambient + len(f))
        object.__setattr__(self, "dim", self.base.dim)
        object.__setattr__(self, "definable", self.base.definable)

    def _coords(self, T, scale, k):
        n = T.shape[0]
        xs = self.base._coords(T, scale, k)
        ys = [_full(e.evaluate(xs), n, k) for e in self.f]
        return xs + ys

    def bounded_axes(self):
        return self.base.bounded_axes()


@dataclass(frozen=True, eq=False)
class Band(Cell):
    """Open region ``lower(x) < y < upper(x)`` over ``base``; ``None`` is an infinite bound."""

    base: Cell
    lower: Expression | None
    upper: Expression | None
    ambient: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        bounds = [b for b in (self.lower, self.upper) if b is not None]
        _check_vars(bounds, self.base)
        object.__setattr__(self, "ambient", self.base.ambient + 1)
        object.__setattr__(self, "dim", self.base.dim + 1)
        object.__setattr__(self, "definable", self.base.definable)
        if self.lower is not None and self.upper is not None:
            self._check_order()

    def _check_order(self, samples=64):
        rng = np.random.default_rng(7)
        T = rng.uniform(0.02, 0.98, size=(samples, self.base.dim))
        try:
            xs = _values(self.base._coords(T, 1.0, None))
            lo = _full(self.lower.evaluate(xs), samples, None)
            hi = _full(self.upper.evaluate(xs), samples, None)
        except DomainError as exc:
            raise InvalidCell(f"band bound undefined on its base: {exc}") from exc
        if not np.all(lo < hi):
            raise InvalidCell("band requires lower < upper on the base")

    def _coords(self, T, scale, k):
        n = T.shape[0]
        xs = self.base._coords(T, scale, k)
        col = self.base.dim
        t = np.clip(T[:, col], EDGE, 1.0 - EDGE)
        if k is not None:
            t = Dual.seed(t, k, col)
        lo = None if self.lower is None else _full(self.lower.evaluate(xs), n, k)
        hi = None if self.upper is None else _full(self.upper.evaluate(xs), n, k)
        return xs + [interval_map(t, lo, hi, scale)]

    def bounded_axes(self):
        return self.base.bounded_axes() + (self.lower is not None and self.upper is not None,)


@dataclass(frozen=True, eq=False)
class ChartCell(Cell):
    """An explicitly parametrized piece: ``params`` range over ``intervals``.

    Infinite interval ends are written as ``float('inf')``.  Used for sets
    outside the cell grammar, such as the Archimedean spiral.
    """

    params: tuple[str, ...]
    intervals: tuple[tuple[float, float], ...]
    f: tuple[Expression, ...]
    definable: bool = False
    ambient: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "intervals", tuple((float(a), float(b)) for a, b in self.intervals))
        object.__setattr__(self, "f", tuple(self.f))
        if len(self.intervals) != len(self.params):
            raise InvalidCell("one interval per parameter required")
        for a, b in self.intervals:
            if not a < b:
                raise InvalidCell("chart intervals must satisfy lo < hi")
        for e in self.f:
            if tuple(e.variables) != self.params:
                raise InvalidCell("chart expressions must be over the chart parameters")
        object.__setattr__(self, "ambient", len(self.f))
        object.__setattr__(self, "dim", len(self.params))

    def _coords(self, T, scale, k):
        n = T.shape[0]
        ps = []
        for j, (a, b) in enumerate(self.intervals):
            t = np.clip(T[:, j], EDGE, 1.0 - EDGE)
            if k is not None:
                t = Dual.seed(t, k, j)
            ps.append(interval_map(t, a if np.isfinite(a) else None, b if np.isfinite(b) else None, scale))
        return [_full(e.evaluate(ps), n, k) for e in self.f]

    def bounded_axes(self):
        return tuple(bool(np.isfinite(a) and np.isfinite(b)) for a, b in self.intervals)


@dataclass(frozen=True, eq=False)
class LinearImage(Cell):
    """Image of ``base`` under ``x -> matrix @ x``; the matrix must be injective."""

    base: Cell
    matrix: np.ndarray
    ambient: int = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[1] != self.base.ambient:
            raise InvalidCell("matrix columns must match the base ambient dimension")
        if np.linalg.matrix_rank(M) < M.shape[1]:
            raise InvalidCell("linear map must be injective")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "ambient", M.shape[0])
        object.__setattr__(self, "dim", self.base.dim)
        object.__setattr__(self, "definable", self.base.definable)

    def _coords(self, T, scale, k):
        n = T.shape[0]
        xs = self.base._coords(T, scale, k)
        out = []
        for row in self.matrix:
            acc = _full(0.0, n, k)
            for coef, x in zip(row, xs):
                if coef != 0.0:
                    acc = acc + coef * x
            out.append(acc)
        return out

    def bounded_axes(self):
        return self.base.bounded_axes()


def point_cell(coords: Sequence[float]) -> Cell:
    """The 0-dimensional cell ``{coords}``."""
    from .expr import constant

    return Graph(POINT0, tuple(constant(c) for c in coords))


def scaled(cell: Cell, factor: float) -> Cell:
    return LinearImage(cell, factor * np.eye(cell.ambient))


def rotated(cell: Cell, Q) -> Cell:
    return LinearImage(cell, np.asarray(Q, dtype=float))


class Parametrization:
    """Chart of a cell: ``Phi: (0, 1)^d -> R^n`` with its Jacobian.

    ``scale`` only affects axes with an infinite bound; it stretches the
    rational reparametrization so that box coordinates near 1/2 cover a
    region of size about ``scale``.
    """

    def __init__(self, cell: Cell):
        self.cell = cell
        self.d = cell.dim
        self.n = cell.ambient
        self.bounded = cell.bounded_axes()

    def points(self, T, scale=1.0) -> np.ndarray:
        T = np.atleast_2d(np.asarray(T, dtype=float))
        if self.d == 0:
            T = np.zeros((T.shape[0], 0))
        cols = _values(self.cell._coords(T, scale, None))
        if not cols:
            return np.zeros((T.shape[0], 0))
        return np.stack([_full(c, T.shape[0], None) for c in cols], axis=1)

    def jet(self, T, scale=1.0):
        """Points ``(N, n)`` and Jacobians ``(N, n, d)`` at box coordinates ``T``."""
        T = np.atleast_2d(np.asarray(T, dtype=float))
        N = T.shape[0]
        cols = self.cell._coords(T, scale, self.d)
        X = np.stack([c.val for c in cols], axis=1)
        J = np.stack([c.der for c in cols], axis=1)
        return X, J

    def check_rank(self, samples=64, rtol=1e-10):
        if self.d == 0:
            return
        rng = np.random.default_rng(11)
        T = rng.uniform(0.05, 0.95, size=(samples, self.d))
        try:
            _, J = self.jet(T)
        except DomainError as exc:
            raise DegenerateCell(f"chart undefined at interior points: {exc}") from exc
        sv = np.linalg.svd(J, compute_uv=False)
        if not np.all(np.isfinite(sv)) or np.any(sv[:, -1] <= rtol * np.maximum(1.0, sv[:, 0])):
            raise DegenerateCell("chart Jacobian is rank deficient at sampled points")


def chart(c: Cell) -> Parametrization:
    return c.chart()


def cell_dim(c: Cell) -> int:
    return c.dim


@dataclass(frozen=True, eq=False)
class DefinableSet:
    """A finite list of pairwise disjoint cells in a common R^n."""

    name: str
    ambient: int
    cells: tuple[Cell, ...]
    disjoint: bool = True
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        for c in self.cells:
            if c.ambient != self.ambient:
                raise InvalidCell(f"cell in R^{c.ambient} does not belong to R^{self.ambient}")

    @property
    def definable(self) -> bool:
        return bool(self.metadata.get("definable", True)) and all(c.definable for c in self.cells)

    @property
    def dim(self) -> int:
        return set_dim(self)


def set_dim(S: DefinableSet) -> int:
    if not S.cells:
        raise EmptySet(f"set {S.name!r} has no cells")
    return max(c.dim for c in S.cells)


# Nearest-point search on charts.


def cluster(u):
    """Boundary-clustering substitution t = sin^2(pi u / 2) and its derivative."""
    s = np.sin(0.5 * np.pi * u)
    return s * s, 0.5 * np.pi * np.sin(np.pi * u)


def _seed_grid(d, bounded):
    per_axis = {1: 2001, 2: 61, 3: 17}.get(d, 7)
    u = (np.arange(per_axis) + 0.5) / per_axis
    grids = np.meshgrid(*([u] * d), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    T = U.copy()
    for j, b in enumerate(bounded):
        if b:
            T[:, j] = cluster(U[:, j])[0]
    return T


def cell_distance(c: Cell, P, iterations=60) -> np.ndarray:
    """Distance from each row of ``P`` to the cell (local chart inversion)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    par = c.chart()
    if par.d == 0:
        x = par.points(np.zeros((1, 0)))[0]
        return np.linalg.norm(P - x, axis=1)
    scale = max(1.0, float(np.max(np.abs(P))) if P.size else 1.0)
    lo, hi = 1e-9, 1.0 - 1e-9
    seeds = np.clip(_seed_grid(par.d, par.bounded), lo, hi)
    with np.errstate(over="ignore", invalid="ignore"):
        Xs = par.points(seeds, scale)
    dist2 = ((P[:, None, :] - Xs[None, :, :]) ** 2).sum(axis=2)
    dist2 = np.where(np.isfinite(dist2), dist2, np.inf)
    n_start = min(3, seeds.shape[0])
    best = np.argsort(dist2, axis=1)[:, :n_start]
    S = seeds[best].reshape(-1, par.d)
    Q = np.repeat(P, n_start, axis=0)

    def residual(S):
        X, J = par.jet(S, scale)
        return X - Q, J

    R, J = residual(S)
    f = (R**2).sum(axis=1)
    for _ in range(iterations):
        step = np.einsum("kij,kj->ki", np.linalg.pinv(J), R)
        alpha = np.ones(len(S))
        improved = np.zeros(len(S), dtype=bool)
        S_new = S.copy()
        for _ in range(8):
            cand = np.clip(S - alpha[:, None] * step, lo, hi)
            Rc, Jc = residual(cand)
            fc = (Rc**2).sum(axis=1)
            ok = (fc < f) & ~improved
            S_new[ok] = cand[ok]
            R[ok], J[ok], f[ok] = Rc[ok], Jc[ok], fc[ok]
            improved |= ok
            if improved.all():
                break
            alpha = np.where(improved, alpha, alpha * 0.5)
        S = S_new
        if not improved.any() or np.all(f < 1e-30):
            break
    f = np.minimum(f, np.take_along_axis(dist2, best, axis=1).ravel())
    return np.sqrt(f.reshape(-1, n_start).min(axis=1))


def membership_test(S: DefinableSet, p, tol: float) -> bool:
    """True iff ``p`` lies within ``tol`` of some cell of ``S``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = np.asarray(p, dtype=float).reshape(1, -1)
    return any(float(cell_distance(c, p)[0]) <= tol for c in S.cells)


def verify_disjoint(S: DefinableSet, samples=16, tol=1e-9, seed=0):
    """Spot-check pairwise disjointness; raises :class:`OverlapError` on a hit."""
    rng = np.random.default_rng(seed)
    for i, c in enumerate(S.cells):
        par = c.chart()
        T = rng.uniform(0.05, 0.95, size=(samples, par.d))
        X = par.points(T) if par.d else par.points(np.zeros((1, 0)))
        for j, other in enumerate(S.cells):
            if i == j:
                continue
            hits = cell_distance(other, X) <= tol
            if np.any(hits):
                raise OverlapError(f"cells {i} and {j} of {S.name!r} share the point {X[hits][0]}")
