"""Per-run counters for cross-partition traffic and migrations."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable, Optional

import numpy as np

from hybridsim.partitioning import MigrationEvent, PartitionPlan, Placement


@dataclass(frozen=True)
class SimulationMetrics:
    ticks: int = 0
    msgs_total: int = 0
    msgs_total_cross: int = 0
    msgs_cloud_to_local: int = 0
    msgs_local_to_cloud: int = 0
    msgs_local_to_local_cross: int = 0
    migrations_total: int = 0
    migrations_cloud_to_local: int = 0
    t_exec: Optional[float] = None  # seconds; None until finalized

    def counters(self) -> dict:
        d = asdict(self)
        d.pop("t_exec")
        return d

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationMetrics":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown metrics keys: {sorted(unknown)}")
        return cls(**d)


def partition_traffic(messages: np.ndarray, plan: PartitionPlan) -> np.ndarray:
    """k x k matrix of message counts, indexed [sender partition, receiver partition]."""
    k = plan.k
    if messages.shape[0] == 0:
        return np.zeros((k, k), dtype=np.int64)
    s = plan.assignment[messages[:, 0]]
    r = plan.assignment[messages[:, 1]]
    return np.bincount(s * k + r, minlength=k * k).reshape(k, k)


def record_tick(
    metrics: SimulationMetrics,
    n_messages: int,
    traffic: np.ndarray,
    migrations: Iterable[MigrationEvent],
    plan: PartitionPlan,
) -> SimulationMetrics:
    """Fold one tick into ``metrics``.

    ``traffic`` must be built from the partitions agents held when the
    messages were sent (post-move, before that tick's migrations are applied);
    ``plan`` only supplies the placement.
    """
    cloud = np.array([p is Placement.CLOUD for p in plan.placement])
    off_diag = ~np.eye(plan.k, dtype=bool)
    c2l = cloud[:, None] & ~cloud[None, :]
    l2c = ~cloud[:, None] & cloud[None, :]
    l2l = ~cloud[:, None] & ~cloud[None, :] & off_diag

    migrations = list(migrations)
    return replace(
        metrics,
        ticks=metrics.ticks + 1,
        msgs_total=metrics.msgs_total + int(n_messages),
        msgs_total_cross=metrics.msgs_total_cross + int(traffic[off_diag].sum()),
        msgs_cloud_to_local=metrics.msgs_cloud_to_local + int(traffic[c2l].sum()),
        msgs_local_to_cloud=metrics.msgs_local_to_cloud + int(traffic[l2c].sum()),
        msgs_local_to_local_cross=metrics.msgs_local_to_local_cross + int(traffic[l2l].sum()),
        migrations_total=metrics.migrations_total + len(migrations),
        migrations_cloud_to_local=metrics.migrations_cloud_to_local
        + sum(1 for m in migrations if cloud[m.source] and not cloud[m.target]),
    )


def finalize(
    metrics: SimulationMetrics, wall_clock: float, override: Optional[float] = None
) -> SimulationMetrics:
    if metrics.ticks == 0:
        raise ValueError("cannot finalize metrics before any tick was recorded")
    if wall_clock <= 0:
        raise ValueError(f"wall clock must be positive, got {wall_clock}")
    if override is not None and override <= 0:
        raise ValueError(f"t_exec override must be positive, got {override}")
    return replace(metrics, t_exec=float(override if override is not None else wall_clock))
