"""Exit criteria for the build; one test per criterion.

Run alone with ``pytest tests/test_acceptance.py`` (or ``python tests/test_acceptance.py``);
a PASS/FAIL line per criterion is printed at the end of the session.
"""
import csv
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np
import pytest

from hybridsim.costmodel import AZURE, EC2, CostParams, deployment_cost, exec_cost, transfer_time, unit_transfer_cost
from hybridsim.harness.config import PRESETS, ExperimentSpec, build_scenario
from hybridsim.harness.experiment import run_experiment, simulate
from hybridsim.harness.report import emit_report
from hybridsim.harness.traces import read_trace, write_trace
from hybridsim.metrics import SimulationMetrics
from hybridsim.partitioning import kmeans_partition, lloyd
from oracles import best_two_partition, replay_counts

pytestmark = pytest.mark.acceptance

CONFIGS = [f"config{i}" for i in range(1, 6)]
PROVIDERS = {"ec2": EC2, "azure": AZURE}


def matrix_spec(output_dir):
    return ExperimentSpec(
        scenarios=tuple(PRESETS[c] for c in CONFIGS),
        algorithms=("kmeans", "grid"),
        providers=(EC2, AZURE),
        mu_values=(0, 1),
        repetitions=10,
        base_seed=0,
        output_dir=Path(output_dir),
    )


@pytest.fixture(scope="module")
def matrix_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("matrix")
    spec = matrix_spec(out)
    records = run_experiment(spec)
    paths = emit_report(records, out)
    return spec, records, paths


def billed_means(records):
    """(scenario, algorithm, provider) -> (mean billed messages, mean billed migrations) at mu=0."""
    acc = defaultdict(list)
    for r in records:
        if r.mu == 0:
            acc[(r.scenario, r.algorithm, r.provider)].append(
                (r.metrics.msgs_cloud_to_local, r.metrics.migrations_cloud_to_local)
            )
    return {k: tuple(np.mean(v, axis=0)) for k, v in acc.items()}


def test_c1_formula_exactness():
    rel = 1e-9
    assert transfer_time(1000, EC2) == pytest.approx(0.12418, rel=rel)
    assert unit_transfer_cost(1000, EC2, 0) == pytest.approx(1.2e-7, rel=rel)
    assert exec_cost(3600, EC2) == pytest.approx(0.19, rel=rel)
    assert exec_cost(3600, AZURE) == pytest.approx(0.324, rel=rel)


def test_c2_kmeans_beats_grid_on_billed_traffic(matrix_run):
    _, records, _ = matrix_run
    means = billed_means(records)
    failures = []
    for provider in PROVIDERS:
        for scen in CONFIGS:
            km, gr = means[(scen, "kmeans", provider)], means[(scen, "grid", provider)]
            for label, a, b in (("messages", km[0], gr[0]), ("migrations", km[1], gr[1])):
                if not a < b:
                    failures.append(f"{scen}/{provider} {label}: kmeans {a:.1f} !< grid {b:.1f}")
    assert not failures, "\n".join(failures)


def test_c3_monotone_scaling(matrix_run):
    _, records, _ = matrix_run
    means = billed_means(records)
    failures = []
    for algorithm in ("kmeans", "grid"):
        series = [means[(c, algorithm, "ec2")] for c in CONFIGS]
        for idx, label in ((0, "messages"), (1, "migrations")):
            values = [s[idx] for s in series]
            if any(b < a for a, b in zip(values, values[1:])):
                failures.append(f"{algorithm} {label}: {[round(v, 1) for v in values]}")
    assert not failures, "\n".join(failures)


def test_c4_mu_and_provider_surcharge(matrix_run):
    _, records, _ = matrix_run
    totals = {(r.scenario, r.algorithm, r.provider, r.seed, r.mu): r for r in records}
    for (scen, alg, prov, seed, mu), r in totals.items():
        if mu != 1:
            continue
        r0 = totals[(scen, alg, prov, seed, 0)]
        assert r.cost.total_cost >= r0.cost.total_cost
        if r.metrics.msgs_cloud_to_local + r.metrics.migrations_cloud_to_local > 0:
            assert r.cost.total_cost > r0.cost.total_cost
    for size in (1000, 10_000):
        surcharge = {p.name: unit_transfer_cost(size, p, 1) - unit_transfer_cost(size, p, 0) for p in (EC2, AZURE)}
        assert surcharge["azure"] > surcharge["ec2"] > 0


@pytest.mark.parametrize("algorithm", ["grid", "kmeans"])
def test_c5_streaming_counters_equal_trace_recount(tmp_path, algorithm):
    scenario = build_scenario({"name": "n40", "agents": 40, "env_width": 40, "env_height": 40,
                               "spawn_radius": 8, "aoi_range": 5, "exits": [[0, 20], [39, 0]]})
    for seed in range(20):
        trace = simulate(scenario, algorithm, 1000 + seed, keep_ticks=True)
        data = read_trace(write_trace(trace, tmp_path / f"{seed}.jsonl"))
        oracle = replay_counts(data)
        counters = trace.metrics.counters()
        assert {k: oracle[k] for k in counters} == counters, f"seed {1000 + seed}"
        logged = [(t.tick, e.agent, e.source, e.target) for t in trace.ticks for e in t.migrations]
        assert logged == oracle["_migrations"]


def test_c6_kmeans_fixpoint_and_monotone_sse():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        n = int(rng.integers(1, 101))
        k = int(rng.integers(1, 6))
        pts = rng.integers(0, 100, size=(n, 2)).astype(float)
        res = lloyd(pts, k, np.random.default_rng(int(rng.integers(2**32))))
        d = ((pts[:, None, :] - res.centroids[None, :, :]) ** 2).sum(axis=2)
        assert (d[np.arange(n), res.labels] == d.min(axis=1)).all()
        h = res.sse_history
        assert all(b <= a * (1 + 1e-12) + 1e-9 for a, b in zip(h, h[1:]))


def test_c6_kmeans_four_point_optimum():
    pts = [(0, 0), (0, 1), (10, 0), (10, 1)]
    _, a, b = best_two_partition(pts)
    optimum = sorted([a, b])
    mismatches = []
    for seed in range(10):
        plan = kmeans_partition(np.array(pts), k=2, seed=seed)
        got = sorted(sorted(p for p, lbl in zip(pts, plan.assignment) if lbl == c) for c in range(2))
        if got != optimum:
            mismatches.append(f"seed {seed}: {got}")
    assert not mismatches, "optimum " + str(optimum) + " not reached for " + "; ".join(mismatches)


def test_c7_deterministic_canonical_output(matrix_run, tmp_path):
    spec, _, paths = matrix_run
    again = matrix_spec(tmp_path)
    again_paths = emit_report(run_experiment(again, workers=4), tmp_path)
    for name in ("runs", "summary"):
        assert paths[name].read_bytes() == again_paths[name].read_bytes(), name


def test_c8_cross_product_and_csv_roundtrip(matrix_run):
    spec, records, paths = matrix_run
    expected = len(spec.scenarios) * len(spec.algorithms) * len(spec.providers) * len(spec.mu_values) * spec.repetitions
    assert len(records) == expected == 400
    keys = {(r.scenario, r.algorithm, r.provider, r.mu, r.seed) for r in records}
    assert len(keys) == expected

    with open(paths["runs"], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == expected
    for row in rows:
        metrics = SimulationMetrics(
            ticks=int(row["ticks"]),
            msgs_cloud_to_local=int(row["msgs_cloud_to_local"]),
            migrations_cloud_to_local=int(row["migrations_cloud_to_local"]),
            t_exec=float(row["t_exec_s"]),
        )
        report = deployment_cost(metrics, CostParams(mu=int(row["mu"])), PROVIDERS[row["provider"]])
        for col, value in (("comm_cost_usd", report.comm_cost), ("migration_cost_usd", report.migration_cost),
                           ("exec_cost_usd", report.exec_cost), ("total_cost_usd", report.total_cost)):
            assert float(row[col]) == pytest.approx(value, rel=1e-9, abs=0), (row["run_id"], col)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
