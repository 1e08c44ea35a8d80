"""Exact j-th nearest-neighbor distances and power-weighted sums.

Every distance is computed as an exact squared distance with a single
square root at the end, and the squared distances are accumulated
coordinate by coordinate in both the brute-force path and the kd-tree
path. The two paths therefore return bitwise-identical values, which the
test suite checks at scale.

The central statistic is the sum over the sample of (n^{1/d} D_j)^alpha,
where D_j is the distance from a point to its j-th nearest other point;
D_j is defined as 0 when the set has at most j points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateStatistic
from .points import PointSet

# kd-tree: median split on the widest-spread coordinate, leaf size 16.
_LEAF_SIZE = 16
# Below this size a vectorized O(n^2) scan beats building the tree.
_BRUTE_FORCE_LIMIT = 1024


@dataclass(frozen=True)
class NeighborQuery:
    """Which neighbor rank (j) of which point of the set to measure."""

    j: int
    index: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError(f"neighbor rank j must be >= 1, got {self.j}")
        if self.index < 0:
            raise IndexError(f"query index must be >= 0, got {self.index}")


@dataclass(frozen=True)
class PowerWeight:
    """The exponent applied to normalized neighbor distances."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha}")


def _sq_dists_to(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    # Coordinate-by-coordinate accumulation; matches the kd-tree's distance
    # kernel op for op so both paths round identically.
    acc = np.zeros(points.shape[0])
    for c in range(points.shape[1]):
        t = points[:, c] - q[c]
        acc += t * t
    return acc


def _pairwise_sq_dists(points: np.ndarray) -> np.ndarray:
    n = points.shape[0]
    acc = np.zeros((n, n))
    for c in range(points.shape[1]):
        t = points[:, c, None] - points[None, :, c]
        acc += t * t
    return acc


def _check_query(xs: PointSet, q: NeighborQuery) -> None:
    if q.index >= len(xs):
        raise IndexError(f"query index {q.index} out of range for set of {len(xs)} points")


def nn_distance_bruteforce(xs: PointSet, q: NeighborQuery) -> float:
    """Distance from point ``q.index`` to its j-th nearest other point.

    Returns 0 when the set has at most j points. Total function: never
    raises on valid queries, ties and duplicates included.
    """
    _check_query(xs, q)
    n = len(xs)
    if n <= q.j:
        return 0.0
    sq = _sq_dists_to(xs.coords, xs.coords[q.index])
    # The query point contributes one zero distance, shifting the rank of
    # every other point by exactly one.
    return float(np.sqrt(np.partition(sq, q.j)[q.j]))


class NeighborIndex:
    """kd-tree built once over a point set, reusable across queries."""

    def __init__(self, xs: PointSet):
        self._xs = xs
        self._tree = (
            cKDTree(xs.coords, leafsize=_LEAF_SIZE, balanced_tree=True, compact_nodes=True)
            if len(xs)
            else None
        )

    @property
    def points(self) -> PointSet:
        return self._xs

    def nn_distance(self, q: NeighborQuery) -> float:
        _check_query(self._xs, q)
        n = len(self._xs)
        if n <= q.j:
            return 0.0
        dists, _ = self._tree.query(self._xs.coords[q.index], k=q.j + 1)
        return float(dists[q.j])

    def knn_distances(self, j: int) -> np.ndarray:
        """j-th neighbor distance for every point of the set at once."""
        n = len(self._xs)
        if n <= j:
            return np.zeros(n)
        dists, _ = self._tree.query(self._xs.coords, k=j + 1)
        return np.ascontiguousarray(dists[:, j])


def build_index(xs: PointSet) -> NeighborIndex:
    return NeighborIndex(xs)


def nn_distance_indexed(xs: PointSet, q: NeighborQuery, index: NeighborIndex | None = None) -> float:
    """kd-tree accelerated version of :func:`nn_distance_bruteforce`.

    Bitwise-equal to the brute-force result for the same inputs. Pass a
    prebuilt ``index`` when issuing many queries against one set.
    """
    if index is None:
        index = NeighborIndex(xs)
    elif index.points is not xs:
        raise ValueError("index was built over a different point set")
    return index.nn_distance(q)


def knn_distances(xs: PointSet, j: int, index: NeighborIndex | None = None) -> np.ndarray:
    """j-th neighbor distances for all points, exact, fastest available path."""
    if j < 1:
        raise ValueError(f"neighbor rank j must be >= 1, got {j}")
    n = len(xs)
    if n <= j:
        return np.zeros(n)
    if index is not None:
        return index.knn_distances(j)
    if n <= _BRUTE_FORCE_LIMIT:
        sq = _pairwise_sq_dists(xs.coords)
        return np.sqrt(np.partition(sq, j, axis=1)[:, j])
    return NeighborIndex(xs).knn_distances(j)


def _normalized_distances(xs: PointSet, j: int, index: NeighborIndex | None) -> np.ndarray:
    n = len(xs)
    return float(n) ** (1.0 / xs.dim) * knn_distances(xs, j, index=index)


def statistic_power(
    xs: PointSet,
    j: int,
    alpha: float | PowerWeight,
    index: NeighborIndex | None = None,
) -> float:
    """Sum over the sample of (n^{1/d} D_j)^alpha.

    Defined as 0 when the set has at most j points (all D_j are 0 by
    convention, so the sum degenerates). For alpha < 0 a zero neighbor
    distance (tied points) would make a summand infinite; that raises
    :class:`DegenerateStatistic` so the caller can resample.
    """
    if isinstance(alpha, PowerWeight):
        alpha = alpha.alpha
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    n = len(xs)
    if n <= j:
        return 0.0
    if alpha == 0.0:
        # each summand is (n^{1/d} D_j)^0 = 1, including at ties
        return float(n)
    scaled = _normalized_distances(xs, j, index)
    if alpha < 0.0:
        zeros = int(np.count_nonzero(scaled == 0.0))
        if zeros:
            raise DegenerateStatistic(
                f"{zeros} zero j-th neighbor distance(s) with alpha={alpha} < 0"
            )
    total = float(np.sum(scaled**alpha))
    if not math.isfinite(total):
        raise DegenerateStatistic(f"power sum overflowed for alpha={alpha}")
    return total


def statistic_phi(xs: PointSet, j: int, phi, index: NeighborIndex | None = None) -> float:
    """Sum over the sample of phi(n^{1/d} D_j) for a weight function phi.

    Agrees with :func:`statistic_power` for phi(t) = t**alpha wherever both
    are defined. Non-finite phi values raise :class:`DegenerateStatistic`.
    """
    n = len(xs)
    if n <= j:
        return 0.0
    scaled = _normalized_distances(xs, j, index)
    try:
        vals = np.asarray(phi(scaled), dtype=float)
        if vals.shape != scaled.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.fromiter((float(phi(t)) for t in scaled), dtype=float, count=n)
    if not np.all(np.isfinite(vals)):
        raise DegenerateStatistic("weight function returned a non-finite value")
    return float(np.sum(vals))
