"""Measure engines: covering-based Hausdorff estimates and chart quadrature.

All reported numbers use the volume normalization
``vol_d = pi^(d/2) / Gamma(d/2 + 1) * H_d``, where ``H_d`` is the Hausdorff
measure built from sums of ``(diam / 2)^d``.  On smooth d-dimensional pieces
``vol_d`` is the ordinary d-dimensional volume.

``covering_measure`` is the brute-force oracle: it never looks at Jacobians.
``cell_volume_in_ball`` integrates the Gram determinant of a chart and is the
engine used by the growth experiments.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .cells import Cell, DefinableSet, cluster, set_dim
from .errors import BudgetExceeded, DomainError, NonFiniteIntegrand

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(x: float) -> float:
    """Gamma function by the Lanczos approximation (relative error ~1e-15)."""
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * lanczos_gamma(1.0 - x))
    x -= 1.0
    a = _LANCZOS_COEF[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, _LANCZOS_G + 2):
        a += _LANCZOS_COEF[i] / (x + i)
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


def vol_normalization(d: float) -> float:
    """``pi^(d/2) / Gamma(d/2 + 1)``, the volume of the unit d-ball."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return math.pi ** (d / 2.0) / lanczos_gamma(d / 2.0 + 1.0)


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    error_bound: float
    method: str
    samples_or_eps: float

    def __post_init__(self):
        if self.value < 0 or self.error_bound < 0:
            raise ValueError("measure estimates are nonnegative")


@dataclass(frozen=True)
class BallRestriction:
    """The open ball ``{|x| < radius}`` centred at the origin."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def contains(self, X) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.linalg.norm(X, axis=-1) < self.radius


@dataclass(frozen=True)
class QuadratureConfig:
    """Quadrature settings.

    ``strata`` is the number of strata per chart axis; ``None`` picks the
    largest count leaving at least four samples per stratum.  ``error_sigmas``
    converts the standard error into the reported ``error_bound``.  ``pilot``
    is the size of the midpoint grid used to locate the preimage of the ball
    before sampling (0 disables the pilot).
    """

    samples: int = 1 << 15
    strata: int | None = None
    seed: int = 0
    mode: str = "mc"
    workers: int = 1
    error_sigmas: float = 3.0
    pilot: int = 4096

    def __post_init__(self):
        if self.mode not in ("mc", "grid"):
            raise ValueError(f"unknown quadrature mode {self.mode!r}")
        if self.samples < 8:
            raise ValueError("need at least 8 samples")


def _rng(cfg, key):
    return np.random.default_rng([cfg.seed, *[int(k) for k in key]])


def _stratified_u(d, cfg, rng):
    if cfg.strata is not None:
        K = cfg.strata
    else:
        K = max(1, int((cfg.samples / 4) ** (1.0 / d)))
    m = max(2, cfg.samples // K**d)
    grids = np.meshgrid(*([np.arange(K)] * d), indexing="ij")
    corners = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    U = (np.repeat(corners, m, axis=0) + rng.random((corners.shape[0] * m, d))) / K
    return U, K**d, m


def _grid_u(d, n):
    u = (np.arange(n) + 0.5) / n
    grids = np.meshgrid(*([u] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _clustered(par, U):
    """Apply the boundary-clustering substitution on bounded axes."""
    T = U.copy()
    weight = np.ones(len(U))
    for j, bounded in enumerate(par.bounded):
        if bounded:
            T[:, j], dt = cluster(U[:, j])
            weight *= dt
    return T, weight


def sample_box(par, cfg: "QuadratureConfig", key=(), box=None):
    """Stratified chart samples: box points ``T``, weights, strata count, samples per stratum.

    ``weight`` is the Jacobian of the sampling substitution, so the integral of
    ``g`` over the chart domain is estimated by ``mean(g(T) * weight)``.
    """
    U, n_strata, m = _stratified_u(par.d, cfg, _rng(cfg, key))
    scale = 1.0
    if box is not None:
        lo, hi = box
        U = lo + U * (hi - lo)
        scale = float(np.prod(hi - lo))
    T, weight = _clustered(par, U)
    return T, weight * scale, n_strata, m


def stratified_estimate(values, n_strata, m):
    """Mean and standard error of an equal-volume stratified sample."""
    v = np.asarray(values, dtype=float).reshape(n_strata, m)
    value = float(v.mean(axis=1).mean())
    se = float(math.sqrt(v.var(axis=1, ddof=1).sum() / m) / n_strata)
    return value, se


def area_element(par, T, r):
    """``1[|Phi| < r] * sqrt(det(J^T J))`` at box points ``T`` (infinite axes scaled by r)."""
    scale = float(r)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            X = par.points(T, scale)
            inside = BallRestriction(r).contains(X)
        f = np.zeros(len(T))
        if inside.any():
            _, J = par.jet(T[inside], scale)
            G = np.einsum("kia,kib->kab", J, J)
            f[inside] = np.sqrt(np.clip(np.linalg.det(G), 0.0, None))
    except DomainError as exc:
        raise NonFiniteIntegrand(f"integrand undefined inside the sampled region: {exc}") from exc
    if not np.all(np.isfinite(f)):
        raise NonFiniteIntegrand("non-finite area element inside the ball")
    return f


def _pilot_box(par, r, n):
    """Bounding box (in unclustered box coordinates) of the preimage of B(r).

    Found on a deterministic midpoint grid and padded by two grid cells.
    Returns None (use the whole cube) when the grid sees no point of the ball
    or the box would be nearly the whole cube anyway.
    """
    d = par.d
    per_axis = max(2, int(round(n ** (1.0 / d))))
    U = _grid_u(d, per_axis)
    T, _ = _clustered(par, U)
    hit = area_element(par, T, r) > 0
    if not hit.any():
        return None
    pad = 2.0 / per_axis
    lo = np.clip(U[hit].min(axis=0) - pad, 0.0, 1.0)
    hi = np.clip(U[hit].max(axis=0) + pad, 0.0, 1.0)
    if np.all(hi - lo > 0.9):
        return None
    return lo, hi


def _labels(labeler, T, f, r):
    lab = np.zeros(len(T), dtype=int)
    nz = f > 0
    if labeler is not None and nz.any():
        lab[nz] = labeler(T[nz], float(r))
    return lab


def integrate_chart(
    par,
    r: float,
    cfg: "QuadratureConfig",
    key: Sequence[int] = (),
    labeler: Callable | None = None,
    n_labels: int = 1,
) -> list[tuple[float, float]]:
    """Integrate the area element of ``par`` over the preimage of ``B(r)``.

    Returns ``(value, standard_error)`` per label.  ``labeler(T, scale)`` maps
    in-ball box points to integer labels in ``range(n_labels)``; splitting the
    integrand by label restricts the integral to the corresponding pieces.
    """
    d = par.d
    box = _pilot_box(par, r, cfg.pilot) if cfg.pilot else None
    if cfg.mode == "grid":
        if d > 2:
            raise ValueError("grid mode supports charts of dimension 1 and 2")
        n = max(2, int(round(cfg.samples ** (1.0 / d))))
        n -= n % 2
        out = []
        for_levels = []
        for level in (n, n // 2):
            U = _grid_u(d, level)
            w = 1.0
            if box is not None:
                U = box[0] + U * (box[1] - box[0])
                w = float(np.prod(box[1] - box[0]))
            T, weight = _clustered(par, U)
            f = area_element(par, T, r) * weight * w
            for_levels.append((f, _labels(labeler, T, f, r)))
        (fine, lab), (coarse, labc) = for_levels
        for k in range(n_labels):
            qf = float(np.mean(np.where(lab == k, fine, 0.0)))
            qc = float(np.mean(np.where(labc == k, coarse, 0.0)))
            out.append((qf, abs(qf - qc) / cfg.error_sigmas))
        return out
    T, weight, n_strata, m = sample_box(par, cfg, key, box)
    f = area_element(par, T, r) * weight
    lab = _labels(labeler, T, f, r)
    return [stratified_estimate(np.where(lab == k, f, 0.0), n_strata, m) for k in range(n_labels)]


def cell_volume_in_ball(c: Cell, r: float, cfg: QuadratureConfig | None = None, key=()) -> MeasureEstimate:
    """``vol_d`` of ``c`` intersected with the open ball of radius ``r``."""
    cfg = cfg or QuadratureConfig()
    BallRestriction(r)
    par = c.chart()
    if par.d == 0:
        x = par.points(np.zeros((1, 0)))[0]
        return MeasureEstimate(float(np.linalg.norm(x) < r), 0.0, "exact", 1)
    ((value, se),) = integrate_chart(par, r, cfg, key)
    return MeasureEstimate(value, cfg.error_sigmas * se, f"quadrature-{cfg.mode}", cfg.samples)


def _map_ordered(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def set_volume_in_ball(
    S: DefinableSet, d: int | None, r: float, cfg: QuadratureConfig | None = None, key=()
) -> MeasureEstimate:
    """Sum of cell volumes over the cells of dimension exactly ``d``.

    Cells of smaller dimension have zero d-dimensional measure and are skipped.
    """
    cfg = cfg or QuadratureConfig()
    top = set_dim(S)
    d = top if d is None else d
    if d < top:
        raise ValueError(f"{S.name!r} has dimension {top}; its {d}-volume is infinite")
    idx = [i for i, c in enumerate(S.cells) if c.dim == d]
    parts = _map_ordered(
        lambda i: cell_volume_in_ball(S.cells[i], r, cfg, (*key, i)), idx, cfg.workers
    )
    value = math.fsum(p.value for p in parts)
    err = math.sqrt(math.fsum(p.error_bound**2 for p in parts))
    method = parts[0].method if parts else "exact"
    return MeasureEstimate(value, err, method, cfg.samples)


# Covering oracle


def _dense_cell_points(c: Cell, r, side, ratio, max_points):
    """Points of ``c`` inside ``B(r)`` with neighbour spacing at most ``side / ratio``."""
    par = c.chart()
    if par.d == 0:
        X = par.points(np.zeros((1, 0)))
        return X[np.linalg.norm(X, axis=1) < r], 0.0
    target = side / ratio
    per_axis = 64
    while True:
        if per_axis**par.d > max_points:
            raise BudgetExceeded(f"covering needs more than {max_points} sample points")
        U = _grid_u(par.d, per_axis)
        T = U.copy()
        for j, bounded in enumerate(par.bounded):
            if bounded:
                T[:, j] = cluster(U[:, j])[0]
        with np.errstate(over="ignore", invalid="ignore"):
            X = par.points(T, r)
        shape = (per_axis,) * par.d + (par.n,)
        grid = X.reshape(shape)
        inside = (np.linalg.norm(X, axis=1) < r).reshape(shape[:-1])
        gap = 0.0
        for ax in range(par.d):
            a = np.take(grid, range(per_axis - 1), axis=ax)
            b = np.take(grid, range(1, per_axis), axis=ax)
            both = np.take(inside, range(per_axis - 1), axis=ax) & np.take(inside, range(1, per_axis), axis=ax)
            if both.any():
                gap = max(gap, float(np.linalg.norm(a - b, axis=-1)[both].max()))
        if gap <= target:
            flat = inside.ravel()
            return X[flat], gap
        per_axis *= 2


def _face_crossings(X, B, side, gap):
    """Points where a densely sampled curve leaves one grid cube for the next.

    ``X`` is ordered along the curve.  Between consecutive samples in different
    cubes the curve is replaced by its chord; every face crossing on the chord
    is returned once for each of the two cubes it separates, so that piece
    diameters reach the cube faces instead of stopping one sample short.
    """
    step = np.linalg.norm(np.diff(X, axis=0), axis=1)
    jump = np.flatnonzero(np.any(B[1:] != B[:-1], axis=1) & (step <= 1.5 * gap + 1e-300))
    pts, lab = [], []
    for i in jump:
        a, b = X[i], X[i + 1]
        diff = b - a
        cross = []
        for ax in np.flatnonzero(B[i + 1] != B[i]):
            lo, hi = sorted((B[i, ax], B[i + 1, ax]))
            for face in range(lo + 1, hi + 1):
                cross.append((face * side - a[ax]) / diff[ax])
        s = np.clip(np.sort(np.asarray(cross)), 0.0, 1.0)
        edges = np.concatenate([[0.0], s, [1.0]])
        mids = a + 0.5 * (edges[:-1] + edges[1:])[:, None] * diff
        cubes = np.floor(mids / side).astype(np.int64)
        P = a + s[:, None] * diff
        for j in range(len(s)):
            pts += [P[j], P[j]]
            lab += [cubes[j], cubes[j + 1]]
    if not pts:
        return np.zeros((0, X.shape[1])), np.zeros((0, X.shape[1]), dtype=np.int64)
    return np.array(pts), np.array(lab, dtype=np.int64)


def _piece_diameter(P):
    if len(P) < 2:
        return 0.0
    if len(P) > 400:
        rng = np.random.default_rng(0)
        dirs = rng.normal(size=(32, P.shape[1]))
        proj = P @ dirs.T
        keep = np.unique(np.concatenate([proj.argmax(axis=0), proj.argmin(axis=0)]))
        P = P[keep]
    return float(pdist(P).max())


def covering_measure(
    S: DefinableSet,
    d: float,
    eps: float,
    r: float,
    max_points: int = 4_000_000,
    max_cubes: int = 2_000_000,
) -> MeasureEstimate:
    """Covering estimate of ``vol_d(S(r))`` from a cube grid of diameter ``eps``.

    The covering sets are the pieces ``S(r) ∩ Q`` for grid cubes ``Q`` of side
    ``eps / sqrt(n)``.  Each piece is sampled densely through the charts and its
    diameter measured directly; ``sum(diam^d) / 2^d`` is then rescaled by
    :func:`vol_normalization`.  For curves this converges to arc length as
    ``eps -> 0``; for d >= 2 cube pieces are not isodiametric and the estimate
    stays biased upward.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    BallRestriction(r)
    side = eps / math.sqrt(S.ambient)
    ratio = {0: 1, 1: 200, 2: 8}.get(int(math.ceil(d)), 4)
    chunks, labels, gap = [], [], 0.0
    for c in S.cells:
        X, g = _dense_cell_points(c, r, side, ratio, max_points)
        gap = max(gap, g)
        B = np.floor(X / side).astype(np.int64)
        chunks.append(X)
        labels.append(B)
        if c.dim == 1 and len(X) > 1:
            P, PB = _face_crossings(X, B, side, g)
            chunks.append(P)
            labels.append(PB)
    X = np.concatenate(chunks) if chunks else np.zeros((0, S.ambient))
    if len(X) == 0:
        return MeasureEstimate(0.0, 0.0, "covering", eps)
    bins = np.concatenate(labels)
    _, inverse = np.unique(bins, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    n_cubes = int(inverse.max()) + 1
    if n_cubes > max_cubes:
        raise BudgetExceeded(f"covering uses {n_cubes} cubes, cap is {max_cubes}")
    if d == 0:
        return MeasureEstimate(float(n_cubes), 0.0, "covering", eps)
    order = np.argsort(inverse, kind="stable")
    splits = np.flatnonzero(np.diff(inverse[order])) + 1
    total = 0.0
    for group in np.split(order, splits):
        total += _piece_diameter(X[group]) ** d
    scale = vol_normalization(d) / 2.0**d
    err = n_cubes * d * eps ** max(d - 1, 0) * 2 * gap
    return MeasureEstimate(total * scale, err * scale, "covering", eps)
