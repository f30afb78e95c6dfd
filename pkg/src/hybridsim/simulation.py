"""Single-run driver: step the world, detect migrations, accumulate metrics."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from hybridsim import abm, metrics as m
from hybridsim.abm import Move, ScenarioConfig, WorldState
from hybridsim.partitioning import MigrationEvent, PartitionPlan, detect_migrations


@dataclass
class TickRecord:
    tick: int
    moves: list[Move]
    exits_reached: list[int]
    n_messages: int
    migrations: list[MigrationEvent]


@dataclass
class SimulationTrace:
    config: ScenarioConfig
    initial: WorldState
    initial_plan: PartitionPlan
    final_plan: PartitionPlan
    ticks: list[TickRecord] = field(default_factory=list)
    metrics: m.SimulationMetrics = field(default_factory=m.SimulationMetrics)
    truncated: bool = False
    wall_clock: float = 0.0


def run(
    config: ScenarioConfig,
    plan: PartitionPlan,
    t_exec_override: Optional[float] = None,
    keep_ticks: bool = True,
    world: Optional[WorldState] = None,
) -> SimulationTrace:
    """Simulate until everyone has exited or ``max_ticks`` is reached.

    ``keep_ticks=False`` drops per-tick records (metrics are unaffected).
    """
    start = time.perf_counter()
    world = abm.init_world(config) if world is None else world
    if plan.assignment.shape[0] != world.n_agents:
        raise ValueError(
            f"plan covers {plan.assignment.shape[0]} agents, world has {world.n_agents}"
        )
    env, params = world.env, world.params
    trace = SimulationTrace(config=config, initial=world, initial_plan=plan, final_plan=plan)
    metrics = m.SimulationMetrics()

    while world.n_alive and world.tick < params.max_ticks:
        world, events = abm.step(world, with_messages=False)
        # billing direction uses partitions held at send time, before migrations
        traffic = abm.aoi_traffic(
            world.positions, world.alive, plan.assignment, plan.k, params.aoi_range, env.width, env.height
        )
        new_plan, migrations = detect_migrations(plan, events.moves, events.tick)
        metrics = m.record_tick(metrics, int(traffic.sum()), traffic, migrations, plan)
        plan = new_plan
        if keep_ticks:
            trace.ticks.append(
                TickRecord(events.tick, events.moves, events.exits_reached, int(traffic.sum()), migrations)
            )

    trace.truncated = world.n_alive > 0
    trace.final_plan = plan
    trace.wall_clock = max(time.perf_counter() - start, 1e-9)
    trace.metrics = m.finalize(metrics, trace.wall_clock, t_exec_override)
    return trace
