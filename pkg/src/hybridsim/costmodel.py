"""Monetary cost of running a partitioned simulation on a hybrid cloud.

Only cloud-to-local transfers are billed. A transferred item (message or
migrating agent) of ``size`` bytes costs

    size / d_unit * cost_d_unit  +  mu * transfer_time(size) / t_unit * cost_t_unit

where ``transfer_time(size) = 8 * size / bandwidth + latency``. Keeping the
cloud VM for the whole run costs ``t_exec / t_unit * cost_t_unit``.
"""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import yaml

from hybridsim.metrics import SimulationMetrics

CATALOG_ENV = "HYBRIDSIM_PROVIDER_CATALOG"


@dataclass(frozen=True)
class ProviderProfile:
    name: str
    cost_t_unit: float  # USD per t_unit of VM time
    t_unit: float  # seconds
    cost_d_unit: float  # USD per d_unit, cloud -> local
    d_unit: float  # bytes
    latency: float  # seconds
    bandwidth: float  # bits per second
    ingress_cost: float = 0.0  # USD per d_unit, local -> cloud

    def __post_init__(self):
        if min(self.cost_t_unit, self.cost_d_unit, self.ingress_cost) < 0:
            raise ValueError(f"{self.name}: prices must be non-negative")
        if self.t_unit <= 0 or self.d_unit <= 0 or self.bandwidth <= 0:
            raise ValueError(f"{self.name}: t_unit, d_unit and bandwidth must be positive")
        if self.latency < 0:
            raise ValueError(f"{self.name}: latency must be non-negative")


EC2 = ProviderProfile("ec2", 0.19, 3600.0, 0.12, 1e9, 0.1241, 1e8, 0.0)
AZURE = ProviderProfile("azure", 0.324, 3600.0, 0.12, 1e9, 0.1636, 1e8, 0.0)
BUILTIN_PROVIDERS = {p.name: p for p in (EC2, AZURE)}

_CATALOG_KEYS = {
    "name": "name",
    "cost_t_unit_usd": "cost_t_unit",
    "t_unit_s": "t_unit",
    "cost_d_unit_usd": "cost_d_unit",
    "d_unit_bytes": "d_unit",
    "latency_s": "latency",
    "bandwidth_bps": "bandwidth",
    "ingress_cost_usd": "ingress_cost",
}


def load_catalog(path) -> dict[str, ProviderProfile]:
    """Read a YAML list of provider entries using the catalog key names."""
    path = Path(path)
    try:
        entries = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    if isinstance(entries, dict):
        entries = entries.get("providers", [])
    providers = {}
    for entry in entries or []:
        unknown = set(entry) - set(_CATALOG_KEYS)
        if unknown:
            raise ValueError(f"{path}: unknown provider key(s) {sorted(unknown)}")
        kwargs = {_CATALOG_KEYS[k]: v for k, v in entry.items()}
        for k, v in kwargs.items():
            if k != "name":
                kwargs[k] = float(v)
        p = ProviderProfile(**kwargs)
        providers[p.name] = p
    return providers


def provider_catalog(path=None) -> dict[str, ProviderProfile]:
    """Built-in presets, extended/overridden by ``path`` or $HYBRIDSIM_PROVIDER_CATALOG."""
    catalog = dict(BUILTIN_PROVIDERS)
    path = path or os.environ.get(CATALOG_ENV)
    if path:
        catalog.update(load_catalog(path))
    return catalog


def get_provider(name: str, catalog: Optional[dict] = None) -> ProviderProfile:
    catalog = provider_catalog() if catalog is None else catalog
    try:
        return catalog[name]
    except KeyError:
        raise KeyError(f"unknown provider {name!r} (known: {', '.join(sorted(catalog))})") from None


@dataclass(frozen=True)
class CostParams:
    mu: int = 0
    message_size: float = 1000.0
    agent_size: float = 10_000.0
    round_up_billing: bool = False

    def __post_init__(self):
        if self.mu not in (0, 1):
            raise ValueError(f"mu must be 0 or 1, got {self.mu!r}")
        if self.message_size <= 0 or self.agent_size <= 0:
            raise ValueError("message and agent sizes must be positive")


@dataclass(frozen=True)
class CostReport:
    provider: str
    mu: int
    billed_messages: int
    billed_migrations: int
    t_exec: float
    comm_cost: float
    migration_cost: float
    exec_cost: float
    total_cost: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CostReport":
        return cls(**{f.name: d[f.name] for f in fields(cls)})


def transfer_time(size: float, provider: ProviderProfile) -> float:
    if size <= 0:
        raise ValueError("transfer size must be positive")
    return 8.0 * size / provider.bandwidth + provider.latency


def unit_transfer_cost(size: float, provider: ProviderProfile, mu: int, egress: bool = True) -> float:
    """Price of moving one item of ``size`` bytes; ``egress=False`` prices local -> cloud."""
    if mu not in (0, 1):
        raise ValueError(f"mu must be 0 or 1, got {mu!r}")
    rate = provider.cost_d_unit if egress else provider.ingress_cost
    data = size / provider.d_unit * rate
    return data + mu * transfer_time(size, provider) / provider.t_unit * provider.cost_t_unit


def comm_cost(n_msgs: int, params: CostParams, provider: ProviderProfile) -> float:
    if n_msgs < 0:
        raise ValueError("message count must be non-negative")
    return n_msgs * unit_transfer_cost(params.message_size, provider, params.mu)


def migration_cost(n_migrations: int, params: CostParams, provider: ProviderProfile) -> float:
    if n_migrations < 0:
        raise ValueError("migration count must be non-negative")
    return n_migrations * unit_transfer_cost(params.agent_size, provider, params.mu)


def exec_cost(t_exec: float, provider: ProviderProfile, round_up: bool = False) -> float:
    if t_exec <= 0:
        raise ValueError("execution time must be positive")
    units = t_exec / provider.t_unit
    if round_up:
        units = math.ceil(units)
    return units * provider.cost_t_unit


def deployment_cost(
    metrics: SimulationMetrics, params: CostParams, provider: ProviderProfile
) -> CostReport:
    if metrics.t_exec is None:
        raise ValueError("metrics must be finalized (t_exec set) before pricing")
    comm = comm_cost(metrics.msgs_cloud_to_local, params, provider)
    mig = migration_cost(metrics.migrations_cloud_to_local, params, provider)
    exe = exec_cost(metrics.t_exec, provider, params.round_up_billing)
    return CostReport(
        provider=provider.name,
        mu=params.mu,
        billed_messages=metrics.msgs_cloud_to_local,
        billed_migrations=metrics.migrations_cloud_to_local,
        t_exec=metrics.t_exec,
        comm_cost=comm,
        migration_cost=mig,
        exec_cost=exe,
        total_cost=comm + mig + exe,
    )
