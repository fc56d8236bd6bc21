"""Growth curves ``V(r) = vol_d S(r)`` and the checks built on them.

* :func:`growth_curve` / :func:`fit_exponent` / :func:`check_growth_bound`
  measure ``V(r)`` on a radius grid and test whether ``V(r) / r^d`` stays
  bounded.
* :func:`stoll_classify` applies the same test to graphs of holomorphic maps
  with ``d = 2 * complex dimension``.
* :func:`verify_projection_bound` checks that a graph whose tangent planes
  stay in ``U_L`` has at most twice the volume of its projection to ``L``.
* :func:`gauss_cover_decompose` splits a cell by which ``U_{L_i}`` contains
  its tangent plane and measures each piece.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .cells import Cell, DefinableSet, set_dim
from .errors import InsufficientData, TangentEscapesNeighborhood, ZeroVolume
from .grassmann import (
    Plane,
    PlaneNeighborhood,
    assign_to_cover,
    greedy_cover,
    slope_batch,
    tangent_frames,
    tau_max,
)
from .hausdorff import (
    MeasureEstimate,
    QuadratureConfig,
    _map_ordered,
    integrate_chart,
    sample_box,
    set_volume_in_ball,
    stratified_estimate,
)

# Slack on the log-log slope of V(r)/r^d before a curve counts as growing.
SLOPE_TOL = 0.05


def default_radii(rmin=1.0, rmax=100.0, count=16) -> np.ndarray:
    if not 0 < rmin < rmax:
        raise ValueError("need 0 < rmin < rmax")
    return np.geomspace(rmin, rmax, count)


@dataclass(frozen=True, eq=False)
class GrowthCurve:
    name: str
    d: int
    radii: np.ndarray
    volumes: np.ndarray
    errors: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        if np.any(np.asarray(self.volumes) < 0):
            raise ValueError("volumes must be nonnegative")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "volumes", np.asarray(self.volumes, dtype=float))
        object.__setattr__(self, "errors", np.asarray(self.errors, dtype=float))

    @property
    def ratios(self) -> np.ndarray:
        return self.volumes / self.radii**self.d

    def monotone(self) -> bool:
        """Nondecreasing within twice the error bars."""
        V, E = self.volumes, self.errors
        return bool(np.all(V[:-1] <= V[1:] + 2 * (E[:-1] + E[1:])))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "volume", "error_bound", "ratio_to_r_d"])
        for row in zip(self.radii, self.volumes, self.errors, self.ratios):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, d: int, name="curve") -> "GrowthCurve":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise InsufficientData("empty growth curve")
        col = lambda k: [float(row[k]) for row in rows]  # noqa: E731
        return cls(name, d, col("r"), col("volume"), col("error_bound"))


@dataclass(frozen=True)
class GrowthVerdict:
    alpha: float
    halfwidth: float
    C_hat: float
    bounded: bool
    classification: str
    d: int = 0
    window: int = 0

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "halfwidth": self.halfwidth,
            "C_hat": self.C_hat,
            "bounded": self.bounded,
            "classification": self.classification,
        }


def growth_curve(S: DefinableSet, radii, cfg: QuadratureConfig | None = None, d: int | None = None) -> GrowthCurve:
    """Volumes of ``S(r)`` for each radius; radius ``k`` uses sub-seed ``k``."""
    cfg = cfg or QuadratureConfig()
    d = set_dim(S) if d is None else d
    radii = np.asarray(radii, dtype=float)
    inner = replace(cfg, workers=1)
    est = _map_ordered(lambda k: set_volume_in_ball(S, d, radii[k], inner, (k,)), range(len(radii)), cfg.workers)
    return GrowthCurve(
        S.name, d, radii, [e.value for e in est], [e.error_bound for e in est]
    )


def _tail(g: GrowthCurve, window: float):
    k = len(g.radii)
    n = max(4, int(math.ceil(window * k)))
    if k < 4 or n > k:
        raise InsufficientData(f"need at least 4 radii, have {k}")
    r, V = g.radii[-n:], g.volumes[-n:]
    if np.any(V <= 0):
        raise ZeroVolume("zero volume inside the fitting window")
    return r, V


def _slope(x, y):
    fit = stats.linregress(x, y)
    half = float(stats.t.ppf(0.975, len(x) - 2) * fit.stderr)
    return float(fit.slope), half


def fit_exponent(g: GrowthCurve, window: float = 0.5) -> tuple[float, float]:
    """Least-squares slope of log V against log r over the last ``window`` of radii.

    Returns the slope and its 95% confidence half-width.
    """
    r, V = _tail(g, window)
    return _slope(np.log(r), np.log(V))


def check_growth_bound(g: GrowthCurve, window: float = 0.5, slope_tol: float = SLOPE_TOL) -> GrowthVerdict:
    """Trend test for ``V(r) = O(r^d)``.

    ``bounded`` holds when the log-log slope of ``V(r) / r^d`` over the tail is
    at most ``max(halfwidth, slope_tol)``, i.e. no significant growth.
    ``C_hat`` is the largest observed ratio.
    """
    alpha, half = fit_exponent(g, window)
    bounded = alpha - g.d <= max(half, slope_tol)
    return GrowthVerdict(
        alpha,
        half,
        float(np.max(g.ratios)),
        bool(bounded),
        "consistent-with-O(r^d)" if bounded else "violates-O(r^d)",
        g.d,
        max(4, int(math.ceil(window * len(g.radii)))),
    )


@dataclass(frozen=True)
class StollVerdict:
    verdict: str
    growth: GrowthVerdict
    d_complex: int

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "d_complex": self.d_complex, **self.growth.to_json()}


def stoll_classify(S: DefinableSet, d_complex: int, radii=None, cfg: QuadratureConfig | None = None) -> StollVerdict:
    """Algebraicity verdict for an analytic set of pure complex dimension ``d_complex``.

    Bounded ``V(r) / r^(2 d_complex)`` means "algebraic-consistent".
    """
    radii = default_radii() if radii is None else radii
    d = 2 * d_complex
    if set_dim(S) != d:
        raise ValueError(f"{S.name!r} has real dimension {set_dim(S)}, expected {d}")
    v = check_growth_bound(growth_curve(S, radii, cfg, d))
    return StollVerdict("algebraic-consistent" if v.bounded else "transcendental", v, d_complex)


# Projection lemma


@dataclass(frozen=True)
class LemmaRow:
    r: float
    vol_graph: float
    err_graph: float
    vol_projection: float
    err_projection: float
    vol_base: float
    err_base: float
    ratio: float
    ratio_error: float
    ratio_base: float
    ok: bool


@dataclass(frozen=True)
class LemmaReport:
    tau: float
    max_slope: float
    rows: tuple[LemmaRow, ...]

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)


def _ratio(a, ea, b, eb):
    if b <= 0:
        return 0.0, 0.0
    q = a / b
    rel = math.hypot(ea / a if a > 0 else 0.0, eb / b)
    return q, q * rel


def certify_tangents(c: Cell, N: PlaneNeighborhood, samples=1024, seed=0) -> float:
    """Largest sampled slope of ``c``'s tangent planes over ``N.center``.

    Raises :class:`TangentEscapesNeighborhood` when some tangent plane falls
    outside ``N``.
    """
    par = c.chart()
    T, _, _, _ = sample_box(par, QuadratureConfig(samples=samples, seed=seed, pilot=0))
    frames = tangent_frames(c, T)
    slopes = slope_batch(N.center, frames)
    inside = N.contains_batch(frames)
    if not inside.all():
        worst = float(np.max(slopes))
        raise TangentEscapesNeighborhood(f"tangent slope {worst:.4g} exceeds tau={N.tau:.4g} over L")
    return float(np.max(slopes))


def verify_projection_bound(
    c: Cell, L: Plane | None = None, radii=None, cfg: QuadratureConfig | None = None, tau: float | None = None
) -> LemmaReport:
    """Compare the graph volume with the volume of its projection onto ``L``.

    For each radius the same samples give

    * ``vol_graph``: volume of ``C(r)``;
    * ``vol_projection``: volume of the projection of ``C(r)`` to ``L``;
    * ``vol_base``: volume of ``D(r)``, the base region inside the ball of ``L``.

    Since the projection of ``C(r)`` lies in ``D(r)``, both ``ratio`` (graph over
    projection) and ``ratio_base`` (graph over base) must stay below 2.
    """
    cfg = cfg or QuadratureConfig()
    radii = default_radii(0.5, 5.0, 8) if radii is None else np.asarray(radii, dtype=float)
    par = c.chart()
    L = Plane.coordinate(par.d, par.n) if L is None else L
    tau = tau_max(par.d) if tau is None else tau
    max_slope = certify_tangents(c, PlaneNeighborhood(L, tau), seed=cfg.seed)
    rows = []
    for k, r in enumerate(radii):
        T, weight, n_strata, m = sample_box(par, cfg, (k,))
        X, J = par.jet(T, float(r))
        area = np.sqrt(np.clip(np.linalg.det(np.einsum("kia,kib->kab", J, J)), 0.0, None))
        proj = np.abs(np.linalg.det(np.einsum("ia,kib->kab", L.frame, J)))
        in_ball = np.linalg.norm(X, axis=1) < r
        in_base = np.linalg.norm(X @ L.frame, axis=1) < r
        vC, eC = stratified_estimate(area * weight * in_ball, n_strata, m)
        vP, eP = stratified_estimate(proj * weight * in_ball, n_strata, m)
        vD, eD = stratified_estimate(proj * weight * in_base, n_strata, m)
        s = cfg.error_sigmas
        q, eq = _ratio(vC, s * eC, vP, s * eP)
        qb, eqb = _ratio(vC, s * eC, vD, s * eD)
        ok = q <= 2.0 + 2.0 * eq and qb <= 2.0 + 2.0 * eqb
        rows.append(LemmaRow(float(r), vC, s * eC, vP, s * eP, vD, s * eD, q, eq, qb, ok))
    return LemmaReport(tau, max_slope, tuple(rows))


# Gauss-map decomposition


@dataclass(frozen=True)
class GaussPiece:
    center: Plane
    volume: MeasureEstimate
    verdict: GrowthVerdict | None = None


@dataclass(frozen=True)
class GaussDecomposition:
    tau: float
    r: float
    pieces: tuple[GaussPiece, ...]
    total: MeasureEstimate
    assigned_fraction: float
    samples: int = 0
    notes: tuple[str, ...] = field(default_factory=tuple)


def _cover_for_cell(c, tau, cfg, gauss_samples):
    par = c.chart()
    T, _, _, _ = sample_box(par, QuadratureConfig(samples=gauss_samples, seed=cfg.seed, pilot=0), (7919,))
    frames = tangent_frames(c, T)
    return greedy_cover(frames, tau, Plane(frames[0]), margin=0.05)


def gauss_cover_decompose(
    c: Cell, tau: float | None = None, cfg: QuadratureConfig | None = None, r: float = 10.0, radii=None, gauss_samples=4096
) -> GaussDecomposition:
    """Split ``c`` into pieces ``{x : T_x c in U_{L_i}}`` and measure each inside ``B(r)``.

    Centers come from a farthest-point cover of a sample of the Gauss image.
    Quadrature samples are assigned to the first neighbourhood containing
    their tangent plane; a sample that no neighbourhood contains enlarges the
    cover and the assignment is redone.  With ``radii`` each piece also gets
    a growth verdict.
    """
    cfg = cfg or QuadratureConfig()
    par = c.chart()
    tau = tau_max(par.d) if tau is None else tau
    centers = _cover_for_cell(c, tau, cfg, gauss_samples)
    misses = []

    def labeler(T, scale):
        frames = tangent_frames(c, T, scale)
        lab = assign_to_cover(centers, tau, frames)
        if np.any(lab < 0):
            misses.append(frames[lab < 0])
            raise _Uncovered
        return lab

    for _ in range(5):
        try:
            parts = integrate_chart(par, r, cfg, (0,), labeler, len(centers))
            total = integrate_chart(par, r, cfg, (0,))
            break
        except _Uncovered:
            extra = misses.pop()
            centers = greedy_cover(
                np.concatenate([np.stack([L.frame for L in centers]), extra]), tau, centers[0], margin=0.0
            )
    else:
        raise TangentEscapesNeighborhood("could not extend the cover to every sample")
    s = cfg.error_sigmas
    verdicts = [None] * len(centers)
    notes = []
    if radii is not None:
        radii = np.asarray(radii, dtype=float)
        per_r = [integrate_chart(par, float(rr), cfg, (k + 1,), labeler, len(centers)) for k, rr in enumerate(radii)]
        for i in range(len(centers)):
            g = GrowthCurve(f"piece{i}", par.d, radii, [p[i][0] for p in per_r], [s * p[i][1] for p in per_r])
            try:
                verdicts[i] = check_growth_bound(g)
            except (ZeroVolume, InsufficientData) as exc:
                notes.append(f"piece {i}: {exc}")
    pieces = tuple(
        GaussPiece(L, MeasureEstimate(v, s * e, "quadrature-piece", cfg.samples), verdicts[i])
        for i, (L, (v, e)) in enumerate(zip(centers, parts))
    )
    tv, te = total[0]
    return GaussDecomposition(
        tau, r, pieces, MeasureEstimate(tv, s * te, "quadrature", cfg.samples), 1.0, cfg.samples, tuple(notes)
    )


class _Uncovered(Exception):
    pass


def gauss_cover_decompose_set(S: DefinableSet, tau=None, cfg=None, r=10.0, radii=None):
    """Decompose every top-dimensional cell of ``S``; returns one decomposition per cell."""
    d = set_dim(S)
    return [gauss_cover_decompose(c, tau, cfg, r, radii) for c in S.cells if c.dim == d]
