"""Planes through the origin as points of the Grassmannian Gr(d, n).

A plane is stored as an orthonormal ``n x d`` frame.  Comparisons between
planes go through the embedding

    L  ->  w w^T / |w|^2,    w = Pluecker coordinates of any frame of L,

which does not depend on the chosen frame, or through the graph matrix of one
plane over another.  Neighbourhoods ``U_L`` are "graphs over L with slope at
most tau"; ``tau_max(d)`` is the slope that keeps the area distortion
``sqrt(det(I + A^T A))`` at most 2.

Batched helpers (``*_batch``) work on stacks of frames of shape ``(N, n, d)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cells import Cell
from .errors import CoverBudgetExceeded, DegenerateCell, DimensionMismatch, NotAGraph

COND_LIMIT = 1e12


def tau_max(d: int) -> float:
    """Largest slope bound with ``(1 + tau^2)^(d/2) <= 2``."""
    return math.sqrt(4.0 ** (1.0 / d) - 1.0)


class Plane:
    """A d-dimensional linear subspace of R^n given by a spanning frame."""

    __slots__ = ("frame",)

    def __init__(self, frame):
        F = np.array(frame, dtype=float)
        if F.ndim == 1:
            F = F[:, None]
        n, d = F.shape
        if not 1 <= d <= n:
            raise DimensionMismatch(f"need 1 <= d <= n, got d={d}, n={n}")
        Q, R = np.linalg.qr(F)
        if np.min(np.abs(np.diag(R))) <= 1e-12 * max(1.0, np.max(np.abs(R))):
            raise DegenerateCell("frame columns are linearly dependent")
        Q.setflags(write=False)
        object.__setattr__(self, "frame", Q)

    def __setattr__(self, name, value):
        raise AttributeError("Plane is immutable")

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def d(self) -> int:
        return self.frame.shape[1]

    def complement(self) -> np.ndarray:
        """Orthonormal frame of the orthogonal complement, shape ``(n, n - d)``."""
        Q, _ = np.linalg.qr(self.frame, mode="complete")
        return Q[:, self.d :]

    def __repr__(self):
        return f"Plane(d={self.d}, n={self.n}, frame={self.frame.round(6).tolist()})"

    @classmethod
    def coordinate(cls, d: int, n: int) -> "Plane":
        return cls(np.eye(n)[:, :d])


def random_frames(d: int, n: int, count: int, rng) -> np.ndarray:
    """Haar-random orthonormal frames, shape ``(count, n, d)``."""
    G = rng.standard_normal((count, n, d))
    Q, R = np.linalg.qr(G)
    return Q * np.sign(np.diagonal(R, axis1=1, axis2=2))[:, None, :]


@lru_cache(maxsize=None)
def _subsets(n, d):
    return np.array(list(itertools.combinations(range(n), d)), dtype=int)


def pluecker_batch(frames) -> np.ndarray:
    """Unit Pluecker vectors of a frame stack, lexicographic d-subsets, ``(N, C(n,d))``."""
    F = np.asarray(frames, dtype=float)
    if F.ndim == 2:
        F = F[None]
    _, n, d = F.shape
    idx = _subsets(n, d)
    minors = np.linalg.det(F[:, idx, :])
    return minors / np.linalg.norm(minors, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class EmbeddedPlane:
    """Image of a plane under ``L -> w w^T / |w|^2`` (a rank-one projector)."""

    matrix: np.ndarray

    def spectral_check(self, tol=1e-9) -> bool:
        M = self.matrix
        if not np.allclose(M, M.T, atol=tol):
            return False
        ev = np.linalg.eigvalsh(M)
        second = ev[-2] if len(ev) > 1 else 0.0
        return bool(ev[0] >= -tol and abs(ev.sum() - 1.0) <= tol and second <= tol and abs(ev[-1] - 1.0) <= tol)


def pluecker_embed(L: Plane) -> EmbeddedPlane:
    w = pluecker_batch(L.frame)[0]
    return EmbeddedPlane(np.outer(w, w))


def _same_shape(L, Lp):
    if (L.n, L.d) != (Lp.n, Lp.d):
        raise DimensionMismatch(f"Gr({L.d},{L.n}) vs Gr({Lp.d},{Lp.n})")


def plane_distance(L: Plane, Lp: Plane) -> float:
    """Frobenius distance between the embedded planes."""
    _same_shape(L, Lp)
    return float(np.linalg.norm(pluecker_embed(L).matrix - pluecker_embed(Lp).matrix))


def distance_batch(w0, W) -> np.ndarray:
    """Embedded distance from one unit Pluecker vector to a stack of them.

    For rank-one projectors ``|ww^T - vv^T|_F^2 = 2 - 2 (w.v)^2``.
    """
    c = W @ w0
    return np.sqrt(np.clip(2.0 - 2.0 * c * c, 0.0, None))


def project(L: Plane, x):
    """Coordinates of ``x`` in ``L`` and in its orthogonal complement."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != L.n:
        raise DimensionMismatch(f"point in R^{x.shape[-1]}, plane in R^{L.n}")
    return x @ L.frame, x @ L.complement()


def graph_matrix_batch(L: Plane, frames):
    """Graph matrices of a frame stack over ``L`` and a mask of valid graphs.

    ``A = (P_perp^T F)(P^T F)^{-1}``; entries where ``P^T F`` is numerically
    singular are flagged invalid and filled with ``inf``.
    """
    F = np.asarray(frames, dtype=float)
    B = np.einsum("ia,kib->kab", L.frame, F)
    C = np.einsum("ia,kib->kab", L.complement(), F)
    cond = np.linalg.cond(B)
    ok = np.isfinite(cond) & (cond <= COND_LIMIT)
    A = np.full(C.shape, np.inf)
    if ok.any():
        A[ok] = C[ok] @ np.linalg.inv(B[ok])
    return A, ok


def graph_matrix(L: Plane, Lp: Plane) -> np.ndarray:
    """Matrix ``A`` with ``Lp = {(u, A u)}`` in the splitting ``L x L_perp``."""
    _same_shape(L, Lp)
    A, ok = graph_matrix_batch(L, Lp.frame[None])
    if not ok[0]:
        raise NotAGraph("projection onto L restricted to L' is singular")
    return A[0]


def slope_batch(L: Plane, frames) -> np.ndarray:
    """Largest singular value of each graph matrix (``inf`` where not a graph)."""
    A, ok = graph_matrix_batch(L, frames)
    out = np.full(len(ok), np.inf)
    if ok.any():
        if A.shape[1] == 0:
            out[ok] = 0.0
        else:
            out[ok] = np.linalg.svd(A[ok], compute_uv=False)[:, 0]
    return out


@dataclass(frozen=True, eq=False)
class PlaneNeighborhood:
    """``U_L = {L' : L' is a graph over L with slope <= tau}``."""

    center: Plane
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    def contains_batch(self, frames, rtol=1e-10) -> np.ndarray:
        return slope_batch(self.center, frames) <= self.tau * (1.0 + rtol)


def in_neighborhood(N: PlaneNeighborhood, Lp: Plane) -> bool:
    """Membership in ``U_L``; a plane that is not a graph over L is outside.

    Whenever the graph matrix exists, the orthogonal projection maps L' onto L.
    A relative slack of 1e-10 absorbs rounding at the boundary slope.
    """
    _same_shape(N.center, Lp)
    return bool(N.contains_batch(Lp.frame[None])[0])


def tangent_frames(c: Cell, T, scale=1.0) -> np.ndarray:
    """Orthonormalized chart Jacobians (the Gauss map) at box points ``T``."""
    par = c.chart()
    if par.d == 0:
        raise DegenerateCell("a point has no tangent plane of positive dimension")
    _, J = par.jet(np.atleast_2d(T), scale)
    Q, R = np.linalg.qr(J)
    diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
    if np.any(diag.min(axis=1) <= 1e-12 * np.maximum(1.0, diag.max(axis=1))):
        raise DegenerateCell("rank-deficient chart Jacobian")
    return Q


def gauss_map(c: Cell, t, scale=1.0) -> Plane:
    """Tangent plane of ``c`` at box coordinate ``t``."""
    return Plane(tangent_frames(c, np.atleast_2d(np.asarray(t, dtype=float)), scale)[0])


def greedy_cover(frames, tau, first=None, max_centers=500, margin=0.0) -> list[Plane]:
    """Farthest-point cover of a sample of planes by neighbourhoods of slope ``tau``.

    Centers are sample planes (``first`` seeds the list).  Every sample ends up
    in some ``U_L`` with slope ``tau * (1 - margin)``.
    """
    frames = np.asarray(frames, dtype=float)
    W = pluecker_batch(frames)
    inner = tau * (1.0 - margin)
    centers = [first if first is not None else Plane(frames[0])]
    covered = PlaneNeighborhood(centers[0], inner).contains_batch(frames)
    mind = distance_batch(pluecker_batch(centers[0].frame)[0], W)
    while not covered.all():
        if len(centers) >= max_centers:
            raise CoverBudgetExceeded(f"more than {max_centers} centers needed for tau={tau}")
        k = int(np.argmax(np.where(covered, -np.inf, mind)))
        L = Plane(frames[k])
        centers.append(L)
        covered |= PlaneNeighborhood(L, inner).contains_batch(frames)
        mind = np.minimum(mind, distance_batch(W[k], W))
    return centers


def cover_grassmannian(
    d: int, n: int, tau: float, seed: int = 0, sample_size: int = 10_000, max_centers: int = 500, margin: float = 0.05
) -> list[Plane]:
    """Finite list of centers whose neighbourhoods cover a Haar sample of Gr(d, n).

    The first center is the coordinate plane; the rest are chosen greedily by
    farthest-point insertion.  Building with the slope shrunk by ``margin``
    leaves room so that fresh samples are covered at the full ``tau``.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not 1 <= d <= n:
        raise DimensionMismatch(f"Gr(d, n) needs 1 <= d <= n, got d={d}, n={n}")
    rng = np.random.default_rng(seed)
    frames = random_frames(d, n, sample_size, rng)
    return greedy_cover(frames, tau, Plane.coordinate(d, n), max_centers, margin)


def cover_fraction(centers, tau, frames) -> float:
    """Fraction of ``frames`` lying in at least one ``U_{L_i}``."""
    frames = np.asarray(frames, dtype=float)
    hit = np.zeros(len(frames), dtype=bool)
    for L in centers:
        hit |= PlaneNeighborhood(L, tau).contains_batch(frames)
    return float(hit.mean())


def assign_to_cover(centers, tau, frames) -> np.ndarray:
    """Index of the first center whose neighbourhood contains each frame (-1 if none)."""
    frames = np.asarray(frames, dtype=float)
    label = np.full(len(frames), -1, dtype=int)
    for i, L in enumerate(centers):
        hit = (label < 0) & PlaneNeighborhood(L, tau).contains_batch(frames)
        label[hit] = i
    return label
