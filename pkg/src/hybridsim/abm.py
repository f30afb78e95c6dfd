"""Discrete-time evacuation kernel.

Rescuers walk toward their nearest exit; victims follow the nearest alive
rescuer. Agents living on a grid exchange one directed message per tick with
every other alive agent inside their square area of interest.

All distance comparisons are done on squared integer distances so tie-breaks
are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import NamedTuple, Optional, Sequence

import numpy as np

Coord = tuple[int, int]


class Role(IntEnum):
    RESCUER = 0
    VICTIM = 1


@dataclass(frozen=True)
class GridEnvironment:
    width: int
    height: int
    exits: tuple[Coord, ...]

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"environment must be non-empty, got {self.width}x{self.height}")
        exits = tuple((int(x), int(y)) for x, y in self.exits)
        if not exits:
            raise ValueError("environment needs at least one exit")
        if len(set(exits)) != len(exits):
            raise ValueError(f"duplicate exits in {exits}")
        for x, y in exits:
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise ValueError(f"exit {(x, y)} outside {self.width}x{self.height} grid")
        object.__setattr__(self, "exits", exits)

    @classmethod
    def with_corner_exits(cls, width: int = 100, height: int = 100) -> "GridEnvironment":
        return cls(width, height, ((0, 0), (width - 1, 0), (0, height - 1), (width - 1, height - 1)))

    def contains(self, pos: Sequence[int]) -> bool:
        return 0 <= pos[0] < self.width and 0 <= pos[1] < self.height


@dataclass(frozen=True)
class SimParams:
    aoi_range: int = 5
    message_size: int = 1000  # bytes
    agent_size: int = 10_000  # bytes
    max_ticks: int = 2000
    spawn_radius: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.aoi_range < 0:
            raise ValueError("aoi_range must be >= 0")
        if self.message_size <= 0 or self.agent_size <= 0:
            raise ValueError("message_size and agent_size must be positive")
        if self.max_ticks <= 0:
            raise ValueError("max_ticks must be positive")
        if self.spawn_radius < 0:
            raise ValueError("spawn_radius must be >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    total_agents: int
    rescuer_count: int
    group_count: int
    environment: GridEnvironment = field(default_factory=GridEnvironment.with_corner_exits)
    params: SimParams = field(default_factory=SimParams)
    name: str = "custom"

    def __post_init__(self):
        if self.group_count < 1:
            raise ValueError("group_count must be >= 1")
        if self.total_agents < self.group_count:
            raise ValueError(
                f"total_agents ({self.total_agents}) < group_count ({self.group_count})"
            )
        if not 0 <= self.rescuer_count <= self.total_agents:
            raise ValueError("rescuer_count must lie in [0, total_agents]")

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, params=replace(self.params, seed=seed))

    def group_sizes(self) -> list[int]:
        """Equal groups; the last one absorbs the remainder."""
        base = self.total_agents // self.group_count
        sizes = [base] * self.group_count
        sizes[-1] += self.total_agents - base * self.group_count
        return sizes


@dataclass(frozen=True)
class AgentState:
    id: int
    role: Role
    position: Coord
    partition: int
    alive: bool


class Move(NamedTuple):
    agent: int
    old: Coord
    new: Coord


@dataclass
class TickEvents:
    tick: int
    moves: list[Move]
    messages: Optional[np.ndarray]  # (m, 2) (sender, receiver) pairs; None when not materialized
    exits_reached: list[int]


@dataclass(frozen=True)
class WorldState:
    """Immutable snapshot of the population. Agent ids are array indices."""

    env: GridEnvironment
    params: SimParams
    roles: np.ndarray  # (n,) int8, Role values
    positions: np.ndarray  # (n, 2) int64
    alive: np.ndarray  # (n,) bool
    groups: np.ndarray  # (n,) int, spawn group of each agent
    tick: int = 0

    @property
    def n_agents(self) -> int:
        return int(self.roles.shape[0])

    @property
    def n_alive(self) -> int:
        return int(self.alive.sum())

    def agent(self, agent_id: int, partition: int = -1) -> AgentState:
        x, y = self.positions[agent_id]
        return AgentState(
            id=agent_id,
            role=Role(int(self.roles[agent_id])),
            position=(int(x), int(y)),
            partition=partition,
            alive=bool(self.alive[agent_id]),
        )


def group_seed_points(env: GridEnvironment, group_count: int) -> list[Coord]:
    """Centers of the cells of a regular ceil(sqrt(g)) x ceil(sqrt(g)) grid, row-major."""
    n = math.ceil(math.sqrt(group_count))
    points = []
    for j in range(n):
        for i in range(n):
            points.append((int((2 * i + 1) * env.width // (2 * n)), int((2 * j + 1) * env.height // (2 * n))))
    return points[:group_count]


def init_world(config: ScenarioConfig) -> WorldState:
    """Spawn ``group_count`` clustered groups around regular seed points.

    Agent ids are group-major. Within a group, its rescuers come first; the
    group's first rescuer sits on the seed point and everyone else is drawn
    uniformly from the Chebyshev ball of radius ``spawn_radius`` around it,
    clamped to the grid. Rescuer ``j`` belongs to group ``j % group_count``.

    RNG stream: one ``numpy.random.Generator(PCG64(seed))``; per group in
    order, a single ``integers(-r, r + 1, size=(m, 2))`` draw for the ``m``
    non-seed agents.
    """
    env, params = config.environment, config.params
    rng = np.random.default_rng(params.seed)
    seeds = group_seed_points(env, config.group_count)
    sizes = config.group_sizes()
    rescuers_per_group = [0] * config.group_count
    for j in range(config.rescuer_count):
        rescuers_per_group[j % config.group_count] += 1
    r = params.spawn_radius

    roles, positions, groups = [], [], []
    for g, (size, seed) in enumerate(zip(sizes, seeds)):
        n_resc = min(rescuers_per_group[g], size)
        offsets = rng.integers(-r, r + 1, size=(size - 1, 2))
        pts = np.vstack([np.array([seed]), np.array(seed) + offsets])
        roles.extend([Role.RESCUER] * n_resc + [Role.VICTIM] * (size - n_resc))
        positions.append(pts)
        groups.extend([g] * size)

    pos = np.vstack(positions).astype(np.int64)
    pos[:, 0] = np.clip(pos[:, 0], 0, env.width - 1)
    pos[:, 1] = np.clip(pos[:, 1], 0, env.height - 1)
    n = config.total_agents
    return WorldState(
        env=env,
        params=params,
        roles=np.array(roles, dtype=np.int8),
        positions=pos,
        alive=np.ones(n, dtype=bool),
        groups=np.array(groups, dtype=np.int64),
    )


def _argmin_sq_dist(points: np.ndarray, targets: np.ndarray) -> np.ndarray:
    d = points[:, None, :] - targets[None, :, :]
    # argmin returns the first minimum: lowest target index wins ties
    return np.argmin((d * d).sum(axis=2), axis=1)


def nearest_exit(pos: Sequence[int], env: GridEnvironment) -> Coord:
    exits = np.array(env.exits, dtype=np.int64)
    idx = _argmin_sq_dist(np.array([pos], dtype=np.int64), exits)[0]
    return env.exits[int(idx)]


def nearest_rescuer(victim: int | AgentState, world: WorldState) -> Optional[int]:
    agent_id = victim.id if isinstance(victim, AgentState) else int(victim)
    candidates = np.flatnonzero(world.alive & (world.roles == Role.RESCUER))
    if candidates.size == 0:
        return None
    idx = _argmin_sq_dist(world.positions[agent_id : agent_id + 1], world.positions[candidates])[0]
    return int(candidates[idx])


def aoi_pairs(positions: np.ndarray, ids: np.ndarray, aoi_range: int) -> np.ndarray:
    """Ordered pairs (a, b), a != b, of ``ids`` within Chebyshev distance ``aoi_range``."""
    if ids.size < 2:
        return np.empty((0, 2), dtype=np.int64)
    p = positions[ids]
    cheb = np.abs(p[:, None, :] - p[None, :, :]).max(axis=2)
    within = cheb <= aoi_range
    np.fill_diagonal(within, False)
    a, b = np.nonzero(within)
    return np.column_stack([ids[a], ids[b]]).astype(np.int64)


def aoi_traffic(
    positions: np.ndarray,
    alive: np.ndarray,
    partitions: np.ndarray,
    k: int,
    aoi_range: int,
    width: int,
    height: int,
) -> np.ndarray:
    """Count in-range ordered pairs by (sender partition, receiver partition).

    Same predicate as :func:`aoi_pairs` but never materializes the pairs:
    per-partition occupancy grids are box-summed through integral images, so
    the cost is O(k * width * height + n * k) per call.
    """
    ids = np.flatnonzero(alive)
    traffic = np.zeros((k, k), dtype=np.int64)
    if ids.size < 2:
        return traffic
    x, y, part = positions[ids, 0], positions[ids, 1], partitions[ids]
    occ = np.zeros((k, width, height), dtype=np.int64)
    np.add.at(occ, (part, x, y), 1)
    integral = np.zeros((k, width + 1, height + 1), dtype=np.int64)
    integral[:, 1:, 1:] = occ.cumsum(axis=1).cumsum(axis=2)
    x0 = np.clip(x - aoi_range, 0, width)
    x1 = np.clip(x + aoi_range + 1, 0, width)
    y0 = np.clip(y - aoi_range, 0, height)
    y1 = np.clip(y + aoi_range + 1, 0, height)
    # (k, n): agents of each partition inside each alive agent's window
    window = integral[:, x1, y1] - integral[:, x0, y1] - integral[:, x1, y0] + integral[:, x0, y0]
    np.add.at(traffic, part, window.T)
    # every agent sees itself once
    traffic[np.diag_indices(k)] -= np.bincount(part, minlength=k)
    return traffic


def step(world: WorldState, with_messages: bool = True) -> tuple[WorldState, TickEvents]:
    """Advance one tick.

    Targets are computed from pre-move positions, so the result does not
    depend on the order agents are visited in; events are reported in
    ascending id order. With ``with_messages=False`` the message pairs are
    left to the caller (see :func:`aoi_traffic`).
    """
    env = world.env
    pos = world.positions
    alive = world.alive
    exits = np.array(env.exits, dtype=np.int64)

    targets = pos.copy()
    live = np.flatnonzero(alive)
    live_resc = live[world.roles[live] == Role.RESCUER]
    live_vict = live[world.roles[live] == Role.VICTIM]

    if live_resc.size:
        targets[live_resc] = exits[_argmin_sq_dist(pos[live_resc], exits)]
    if live_vict.size:
        if live_resc.size:
            targets[live_vict] = pos[live_resc[_argmin_sq_dist(pos[live_vict], pos[live_resc])]]
        else:
            targets[live_vict] = exits[_argmin_sq_dist(pos[live_vict], exits)]

    new_pos = pos.copy()
    new_pos[live] += np.sign(targets[live] - pos[live])

    moved = live[np.any(new_pos[live] != pos[live], axis=1)]
    moves = [
        Move(int(i), (int(pos[i, 0]), int(pos[i, 1])), (int(new_pos[i, 0]), int(new_pos[i, 1])))
        for i in moved
    ]

    on_exit = np.zeros(world.n_agents, dtype=bool)
    for ex, ey in env.exits:
        on_exit |= (new_pos[:, 0] == ex) & (new_pos[:, 1] == ey)
    exited = live[on_exit[live]]
    new_alive = alive.copy()
    new_alive[exited] = False

    messages = aoi_pairs(new_pos, np.flatnonzero(new_alive), world.params.aoi_range) if with_messages else None
    next_world = replace(world, positions=new_pos, alive=new_alive, tick=world.tick + 1)
    return next_world, TickEvents(world.tick + 1, moves, messages, [int(i) for i in exited])
