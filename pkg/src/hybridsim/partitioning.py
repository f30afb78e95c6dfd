"""Static partition plans: K-means (Voronoi ownership) and regular grid regions."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np


class Placement(str, Enum):
    LOCAL = "local"
    CLOUD = "cloud"


@dataclass(frozen=True)
class GridRegions:
    width: int
    height: int
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid needs rows, cols >= 1, got {self.rows}x{self.cols}")
        if self.cols > self.width or self.rows > self.height:
            raise ValueError("more grid regions than cells along an axis")

    @property
    def k(self) -> int:
        return self.rows * self.cols

    @property
    def x_bounds(self) -> np.ndarray:
        return np.array([i * self.width // self.cols for i in range(self.cols)], dtype=np.int64)

    @property
    def y_bounds(self) -> np.ndarray:
        return np.array([j * self.height // self.rows for j in range(self.rows)], dtype=np.int64)

    def owners(self, positions: np.ndarray) -> np.ndarray:
        positions = np.asarray(positions).reshape(-1, 2)
        # largest i with bound_i <= x; boundaries are half-open on the right
        col = np.searchsorted(self.x_bounds, positions[:, 0], side="right") - 1
        row = np.searchsorted(self.y_bounds, positions[:, 1], side="right") - 1
        return (row * self.cols + col).astype(np.int64)

    def to_dict(self) -> dict:
        return {"type": "grid", "width": self.width, "height": self.height, "rows": self.rows, "cols": self.cols}


@dataclass(frozen=True)
class VoronoiCells:
    centroids: tuple[tuple[float, float], ...]

    @property
    def k(self) -> int:
        return len(self.centroids)

    def owners(self, positions: np.ndarray) -> np.ndarray:
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        return nearest_centroid(positions, np.array(self.centroids, dtype=np.float64))

    def to_dict(self) -> dict:
        return {"type": "voronoi", "centroids": [list(c) for c in self.centroids]}


OwnershipMap = Union[GridRegions, VoronoiCells]


def ownership_from_dict(d: dict) -> OwnershipMap:
    if d["type"] == "grid":
        return GridRegions(d["width"], d["height"], d["rows"], d["cols"])
    if d["type"] == "voronoi":
        return VoronoiCells(tuple((float(x), float(y)) for x, y in d["centroids"]))
    raise ValueError(f"unknown ownership map type {d['type']!r}")


@dataclass(frozen=True)
class PartitionPlan:
    k: int
    assignment: np.ndarray  # assignment[agent_id] -> partition index
    ownership: OwnershipMap
    placement: tuple[Placement, ...]
    algorithm: str = ""

    def __post_init__(self):
        if self.ownership.k != self.k or len(self.placement) != self.k:
            raise ValueError("ownership map and placement must both cover k partitions")

    @property
    def cloud_partitions(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.placement) if p is Placement.CLOUD)

    def partition_sizes(self) -> list[int]:
        return np.bincount(self.assignment, minlength=self.k).tolist()

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "k": self.k,
            "ownership": self.ownership.to_dict(),
            "placement": [p.value for p in self.placement],
            "assignment": self.assignment.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PartitionPlan":
        return cls(
            k=d["k"],
            assignment=np.array(d["assignment"], dtype=np.int64),
            ownership=ownership_from_dict(d["ownership"]),
            placement=tuple(Placement(p) for p in d["placement"]),
            algorithm=d.get("algorithm", ""),
        )


@dataclass(frozen=True)
class MigrationEvent:
    tick: int
    agent: int
    source: int
    target: int


def _default_placement(k: int) -> tuple[Placement, ...]:
    return tuple(Placement.CLOUD if i == k - 1 else Placement.LOCAL for i in range(k))


def nearest_centroid(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d = points[:, None, :] - centroids[None, :, :]
    return np.argmin((d * d).sum(axis=2), axis=1)


def sse(points: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    d = points - centroids[labels]
    return float((d * d).sum())


def reseed_empty(points: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Move each memberless centroid onto the point farthest from its nearest centroid.

    Empty clusters are handled in index order, each seeing earlier repairs.
    """
    centroids = centroids.copy()
    for c in range(centroids.shape[0]):
        if not (labels == c).any():
            gap = ((points - centroids[nearest_centroid(points, centroids)]) ** 2).sum(axis=1)
            centroids[c] = points[int(np.argmax(gap))]
    return centroids


@dataclass
class LloydResult:
    centroids: np.ndarray
    labels: np.ndarray
    sse_history: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def lloyd(
    points: np.ndarray,
    k: int,
    rng: np.random.Generator,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> LloydResult:
    """Lloyd's iteration with Forgy initialisation.

    ``sse_history[i]`` is the objective after the i-th centroid update (entry
    0 is the initial Forgy configuration).
    """
    points = np.asarray(points, dtype=np.float64)
    if k < 1:
        raise ValueError("k must be >= 1")
    if points.shape[0] == 0:
        raise ValueError("cannot cluster an empty point set")

    distinct = np.unique(points, axis=0)
    if distinct.shape[0] >= k:
        centroids = distinct[rng.choice(distinct.shape[0], size=k, replace=False)].copy()
    else:
        # fewer distinct positions than clusters: surplus centroids own nothing
        pick = rng.choice(points.shape[0], size=k, replace=points.shape[0] < k)
        centroids = points[pick].copy()

    labels = nearest_centroid(points, centroids)
    result = LloydResult(centroids, labels, [sse(points, centroids, labels)])
    for it in range(1, max_iters + 1):
        new_centroids = centroids.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new_centroids[c] = points[members].mean(axis=0)
        new_centroids = reseed_empty(points, new_centroids, labels)
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        new_labels = nearest_centroid(points, centroids)
        result.sse_history.append(sse(points, centroids, labels))
        result.iterations = it
        changed = not np.array_equal(new_labels, labels)
        labels = new_labels
        if not changed or shift < tol:
            result.converged = True
            break

    result.centroids = centroids
    result.labels = labels  # always nearest-centroid w.r.t. the returned centroids
    return result


def kmeans_partition(
    positions: np.ndarray,
    k: int = 4,
    seed: int = 0,
    max_iters: int = 100,
    tol: float = 1e-6,
    cloud_index: Optional[int] = None,
) -> PartitionPlan:
    positions = np.asarray(positions)
    if positions.size == 0:
        raise ValueError("cannot cluster an empty point set")
    res = lloyd(positions, k, np.random.default_rng(seed), max_iters=max_iters, tol=tol)
    plan = PartitionPlan(
        k=k,
        assignment=res.labels.astype(np.int64),
        ownership=VoronoiCells(tuple((float(x), float(y)) for x, y in res.centroids)),
        placement=_default_placement(k),
        algorithm="kmeans",
    )
    return plan if cloud_index is None else assign_cloud(plan, cloud_index)


def grid_partition(
    env,
    rows: int = 2,
    cols: int = 2,
    positions: Optional[np.ndarray] = None,
    cloud_index: Optional[int] = None,
) -> PartitionPlan:
    regions = GridRegions(env.width, env.height, rows, cols)
    pts = np.empty((0, 2), dtype=np.int64) if positions is None else np.asarray(positions)
    plan = PartitionPlan(
        k=regions.k,
        assignment=regions.owners(pts),
        ownership=regions,
        placement=_default_placement(regions.k),
        algorithm="grid",
    )
    return plan if cloud_index is None else assign_cloud(plan, cloud_index)


def ownership(plan: PartitionPlan, pos: Sequence[float]) -> int:
    return int(plan.ownership.owners(np.array([pos]))[0])


def detect_migrations(
    plan: PartitionPlan, moves: Iterable, tick: int
) -> tuple[PartitionPlan, list[MigrationEvent]]:
    """Move agents whose new cell is owned by another partition.

    ``moves`` holds ``(agent, old, new)`` triples. The ownership map itself
    never changes.
    """
    moves = list(moves)
    if not moves:
        return plan, []
    ids = np.array([m[0] for m in moves], dtype=np.int64)
    owners = plan.ownership.owners(np.array([m[2] for m in moves]))
    current = plan.assignment[ids]
    crossed = np.flatnonzero(owners != current)
    if crossed.size == 0:
        return plan, []
    events = [MigrationEvent(tick, int(ids[i]), int(current[i]), int(owners[i])) for i in crossed]
    assignment = plan.assignment.copy()
    assignment[ids[crossed]] = owners[crossed]
    return replace(plan, assignment=assignment), events


def assign_cloud(plan: PartitionPlan, cloud_index: int) -> PartitionPlan:
    if not 0 <= cloud_index < plan.k:
        raise IndexError(f"cloud partition {cloud_index} out of range for k={plan.k}")
    placement = tuple(Placement.CLOUD if i == cloud_index else Placement.LOCAL for i in range(plan.k))
    return replace(plan, placement=placement)
