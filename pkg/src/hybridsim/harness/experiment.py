"""Experiment matrix: simulate each (scenario, algorithm, seed) once, price it many ways."""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from hybridsim import abm
from hybridsim.costmodel import CostParams, CostReport, ProviderProfile, deployment_cost
from hybridsim.harness.config import ExperimentSpec, Scenario
from hybridsim.metrics import SimulationMetrics
from hybridsim.partitioning import PartitionPlan, grid_partition, kmeans_partition
from hybridsim.simulation import SimulationTrace, run

log = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    scenario: str
    algorithm: str
    provider: str
    mu: int
    seed: int
    metrics: SimulationMetrics
    cost: CostReport
    truncated: bool
    agents_local: int = 0
    agents_cloud: int = 0

    def sort_key(self) -> tuple:
        return (self.scenario, self.algorithm, self.provider, self.mu, self.seed)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "scenario": self.scenario,
            "algorithm": self.algorithm,
            "provider": self.provider,
            "mu": self.mu,
            "seed": self.seed,
            "truncated": self.truncated,
            "agents_local": self.agents_local,
            "agents_cloud": self.agents_cloud,
            "metrics": self.metrics.to_dict(),
            "cost": self.cost.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            run_id=d["run_id"],
            scenario=d["scenario"],
            algorithm=d["algorithm"],
            provider=d["provider"],
            mu=int(d["mu"]),
            seed=int(d["seed"]),
            metrics=SimulationMetrics.from_dict(d["metrics"]),
            cost=CostReport.from_dict(d["cost"]),
            truncated=bool(d["truncated"]),
            agents_local=int(d.get("agents_local", 0)),
            agents_cloud=int(d.get("agents_cloud", 0)),
        )


def make_run_id(scenario: str, algorithm: str, provider: str, mu: int, seed: int) -> str:
    return f"{scenario}/{algorithm}/{provider}/mu{mu}/seed{seed}"


def build_plan(algorithm: str, world: abm.WorldState, seed: int, cloud_index: int = 3) -> PartitionPlan:
    if algorithm == "kmeans":
        return kmeans_partition(world.positions, k=4, seed=seed, cloud_index=cloud_index)
    if algorithm == "grid":
        return grid_partition(world.env, 2, 2, world.positions, cloud_index=cloud_index)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def simulate(
    scenario: Scenario,
    algorithm: str,
    seed: int,
    t_exec_override: Optional[float] = None,
    keep_ticks: bool = False,
) -> SimulationTrace:
    config = scenario.config.with_seed(seed)
    world = abm.init_world(config)
    plan = build_plan(algorithm, world, seed, scenario.cloud_partition_index)
    return run(config, plan, t_exec_override=t_exec_override, keep_ticks=keep_ticks, world=world)


def price(
    trace: SimulationTrace,
    scenario: Scenario,
    algorithm: str,
    seed: int,
    providers: Iterable[ProviderProfile],
    mu_values: Iterable[int],
) -> list[RunRecord]:
    params = trace.config.params
    sizes = trace.initial_plan.partition_sizes()
    cloud = set(trace.initial_plan.cloud_partitions)
    n_cloud = sum(s for i, s in enumerate(sizes) if i in cloud)
    records = []
    for provider in providers:
        for mu in mu_values:
            cost_params = CostParams(mu, params.message_size, params.agent_size, scenario.round_up_billing)
            records.append(
                RunRecord(
                    run_id=make_run_id(scenario.name, algorithm, provider.name, mu, seed),
                    scenario=scenario.name,
                    algorithm=algorithm,
                    provider=provider.name,
                    mu=mu,
                    seed=seed,
                    metrics=trace.metrics,
                    cost=deployment_cost(trace.metrics, cost_params, provider),
                    truncated=trace.truncated,
                    agents_local=sum(sizes) - n_cloud,
                    agents_cloud=n_cloud,
                )
            )
    return records


def _job(args) -> list[RunRecord]:
    scenario, algorithm, seed, providers, mu_values = args
    try:
        trace = simulate(scenario, algorithm, seed, scenario.t_exec_override_s)
    except Exception as exc:
        raise RuntimeError(f"run failed for ({scenario.name}, {algorithm}, seed={seed}): {exc}") from exc
    if trace.truncated:
        log.warning("%s/%s seed=%d hit max_ticks with agents still alive", scenario.name, algorithm, seed)
    return price(trace, scenario, algorithm, seed, providers, mu_values)


def run_experiment(spec: ExperimentSpec, workers: int = 1, persist: bool = True) -> list[RunRecord]:
    """Run the full matrix; records come back in canonical tuple order."""
    jobs = [
        (scenario, algorithm, seed, spec.providers, spec.mu_values)
        for scenario in spec.scenarios
        for algorithm in spec.algorithms
        for seed in spec.seeds
    ]
    log.info("running %d simulations", len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_job, jobs))
    else:
        batches = [_job(j) for j in jobs]
    records = sorted((r for batch in batches for r in batch), key=RunRecord.sort_key)
    if persist:
        write_records(records, spec.output_dir / RECORDS_FILE)
    return records


def write_records(records: Iterable[RunRecord], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
    return path


def read_records(path) -> list[RunRecord]:
    with Path(path).open() as fh:
        return [RunRecord.from_dict(json.loads(line)) for line in fh if line.strip()]
