"""Scenario presets and YAML experiment configuration."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml

from hybridsim.abm import GridEnvironment, ScenarioConfig, SimParams
from hybridsim.costmodel import ProviderProfile, get_provider, provider_catalog

ALGORITHMS = ("kmeans", "grid")

# one billed hour; keeps experiment output independent of host speed
DEFAULT_T_EXEC_S = 3600.0


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    cloud_partition_index: int = 3
    t_exec_override_s: Optional[float] = DEFAULT_T_EXEC_S
    round_up_billing: bool = False

    @property
    def name(self) -> str:
        return self.config.name


def _preset(name: str, agents: int) -> Scenario:
    return Scenario(ScenarioConfig(agents, 4, 4, GridEnvironment.with_corner_exits(100, 100), SimParams(), name))


PRESETS: dict[str, Scenario] = {
    f"config{i}": _preset(f"config{i}", 200 * i) for i in range(1, 6)
}


@dataclass(frozen=True)
class ExperimentSpec:
    scenarios: tuple[Scenario, ...]
    algorithms: tuple[str, ...]
    providers: tuple[ProviderProfile, ...]
    mu_values: tuple[int, ...] = (0,)
    repetitions: int = 10
    base_seed: int = 0
    output_dir: Path = field(default_factory=lambda: Path("results"))

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.scenarios or not self.algorithms or not self.providers or not self.mu_values:
            raise ValueError("scenarios, algorithms, providers and mu_values must be non-empty")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ValueError(f"unknown algorithm(s) {sorted(bad)}; expected a subset of {ALGORITHMS}")
        if set(self.mu_values) - {0, 1}:
            raise ValueError(f"mu_values must be a subset of {{0, 1}}, got {list(self.mu_values)}")
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate scenario names in {names}")
        for s in self.scenarios:
            if not 0 <= s.cloud_partition_index < 4:
                raise ValueError(f"{s.name}: cloud_partition_index must lie in [0, 4)")

    @property
    def seeds(self) -> list[int]:
        return [self.base_seed + r for r in range(self.repetitions)]


TOP_LEVEL_KEYS = {"scenarios", "algorithms", "providers", "mu_values", "repetitions", "base_seed", "output_dir"}
SCENARIO_KEYS = {
    "name", "base", "agents", "rescuers", "groups", "env_width", "env_height", "aoi_range",
    "message_size_bytes", "agent_size_bytes", "max_ticks", "spawn_radius", "exits",
    "cloud_partition_index", "t_exec_override_s", "round_up_billing",
}


def build_scenario(entry) -> Scenario:
    """A preset name, or a mapping of overrides on top of ``base`` (default: the preset named ``name``)."""
    if isinstance(entry, str):
        if entry not in PRESETS:
            raise ValueError(f"unknown scenario preset {entry!r} (known: {', '.join(PRESETS)})")
        return PRESETS[entry]
    if not isinstance(entry, dict) or "name" not in entry:
        raise ValueError(f"scenario entry must be a preset name or a mapping with 'name': {entry!r}")
    unknown = set(entry) - SCENARIO_KEYS
    if unknown:
        raise ValueError(f"unknown scenario key(s) {sorted(unknown)}")

    name = str(entry["name"])
    base_name = entry.get("base", name if name in PRESETS else "config1")
    if base_name not in PRESETS:
        raise ValueError(f"unknown base preset {base_name!r}")
    base = PRESETS[base_name]
    cfg, env, params = base.config, base.config.environment, base.config.params

    width = int(entry.get("env_width", env.width))
    height = int(entry.get("env_height", env.height))
    if "exits" in entry:
        exits = tuple(tuple(e) for e in entry["exits"])
    elif (width, height) != (env.width, env.height):
        exits = GridEnvironment.with_corner_exits(width, height).exits
    else:
        exits = env.exits
    params = replace(
        params,
        aoi_range=int(entry.get("aoi_range", params.aoi_range)),
        message_size=int(entry.get("message_size_bytes", params.message_size)),
        agent_size=int(entry.get("agent_size_bytes", params.agent_size)),
        max_ticks=int(entry.get("max_ticks", params.max_ticks)),
        spawn_radius=int(entry.get("spawn_radius", params.spawn_radius)),
    )
    config = ScenarioConfig(
        total_agents=int(entry.get("agents", cfg.total_agents)),
        rescuer_count=int(entry.get("rescuers", cfg.rescuer_count)),
        group_count=int(entry.get("groups", cfg.group_count)),
        environment=GridEnvironment(width, height, exits),
        params=params,
        name=name,
    )
    t_exec = entry.get("t_exec_override_s", base.t_exec_override_s)
    return Scenario(
        config=config,
        cloud_partition_index=int(entry.get("cloud_partition_index", base.cloud_partition_index)),
        t_exec_override_s=None if t_exec is None else float(t_exec),
        round_up_billing=bool(entry.get("round_up_billing", base.round_up_billing)),
    )


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def parse_config(data: dict, catalog: Optional[dict] = None) -> ExperimentSpec:
    if not isinstance(data, dict):
        raise ValueError("experiment config must be a mapping")
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ValueError(f"unknown config key(s) {sorted(unknown)}")
    for key in ("scenarios", "algorithms", "providers"):
        if key not in data:
            raise ValueError(f"missing required key {key!r}")
    catalog = provider_catalog() if catalog is None else catalog
    return ExperimentSpec(
        scenarios=tuple(build_scenario(e) for e in _as_list(data["scenarios"])),
        algorithms=tuple(str(a) for a in _as_list(data["algorithms"])),
        providers=tuple(get_provider(str(p), catalog) for p in _as_list(data["providers"])),
        mu_values=tuple(int(v) for v in _as_list(data.get("mu_values", [0]))),
        repetitions=int(data.get("repetitions", 10)),
        base_seed=int(data.get("base_seed", 0)),
        output_dir=Path(data.get("output_dir", "results")),
    )


def load_config(path, catalog: Optional[dict] = None) -> ExperimentSpec:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ValueError(f"{path}: parse error{where}: {exc}") from exc
    try:
        return parse_config(data, catalog)
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: {exc}") from exc
