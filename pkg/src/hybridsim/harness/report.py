"""CSV reports and bar-chart series from run records."""
from __future__ import annotations

import csv
import statistics
from pathlib import Path
from typing import Iterable, Sequence

from hybridsim.harness.experiment import RunRecord

RUN_COLUMNS = [
    "run_id", "scenario", "algorithm", "provider", "mu", "seed", "ticks", "truncated",
    "msgs_total_cross", "msgs_cloud_to_local", "migrations_total", "migrations_cloud_to_local",
    "t_exec_s", "comm_cost_usd", "migration_cost_usd", "exec_cost_usd", "total_cost_usd",
]
COST_COLUMNS = ["comm_cost_usd", "migration_cost_usd", "exec_cost_usd", "total_cost_usd"]
COUNT_COLUMNS = ["msgs_total_cross", "msgs_cloud_to_local", "migrations_total", "migrations_cloud_to_local"]
GROUP_COLUMNS = ["scenario", "algorithm", "provider", "mu"]

# figure name -> (cost column, algorithms shown (None = all), mu values shown)
FIGURES = {
    "fig1_comm": ("comm_cost_usd", None, (0,)),
    "fig2_mig": ("migration_cost_usd", None, (0,)),
    "fig3_exec": ("exec_cost_usd", None, (0,)),
    "fig4_comm_delay": ("comm_cost_usd", ("kmeans",), (0, 1)),
    "fig5_mig_delay": ("migration_cost_usd", ("kmeans",), (0, 1)),
}


def fmt(x: float) -> str:
    return format(x, ".10g")


def run_row(r: RunRecord) -> dict:
    m, c = r.metrics, r.cost
    return {
        "run_id": r.run_id,
        "scenario": r.scenario,
        "algorithm": r.algorithm,
        "provider": r.provider,
        "mu": r.mu,
        "seed": r.seed,
        "ticks": m.ticks,
        "truncated": int(r.truncated),
        "msgs_total_cross": m.msgs_total_cross,
        "msgs_cloud_to_local": m.msgs_cloud_to_local,
        "migrations_total": m.migrations_total,
        "migrations_cloud_to_local": m.migrations_cloud_to_local,
        "t_exec_s": fmt(m.t_exec),
        "comm_cost_usd": fmt(c.comm_cost),
        "migration_cost_usd": fmt(c.migration_cost),
        "exec_cost_usd": fmt(c.exec_cost),
        "total_cost_usd": fmt(c.total_cost),
    }


def _stats(values: Sequence[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def summarize(records: Iterable[RunRecord]) -> list[dict]:
    """Mean and sample stddev over seeds per (scenario, algorithm, provider, mu)."""
    groups: dict[tuple, list[dict]] = {}
    for r in records:
        row = run_row(r)
        groups.setdefault(tuple(row[k] for k in GROUP_COLUMNS), []).append(row)
    out = []
    for key, rows in groups.items():
        summary = dict(zip(GROUP_COLUMNS, key))
        summary["n_runs"] = len(rows)
        for col in COUNT_COLUMNS + COST_COLUMNS:
            mean, std = _stats([float(row[col]) for row in rows])
            summary[f"{col}_mean"] = mean
            summary[f"{col}_std"] = std
        out.append(summary)
    return out


def summary_columns() -> list[str]:
    cols = GROUP_COLUMNS + ["n_runs"]
    for col in COUNT_COLUMNS + COST_COLUMNS:
        cols += [f"{col}_mean", f"{col}_std"]
    return cols


def _write_csv(path: Path, columns: list[str], rows: Iterable[dict]) -> None:
    try:
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: fmt(v) if isinstance(v, float) else v for k, v in row.items()})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def plot_series(summary: list[dict]) -> dict[str, list[dict]]:
    series = {}
    for name, (col, algorithms, mus) in FIGURES.items():
        series[name] = [
            {
                "scenario": s["scenario"],
                "algorithm": s["algorithm"],
                "provider": s["provider"],
                "mu": s["mu"],
                "mean_usd": s[f"{col}_mean"],
            }
            for s in summary
            if (algorithms is None or s["algorithm"] in algorithms) and s["mu"] in mus
        ]
    return series


def emit_report(records: Sequence[RunRecord], output_dir) -> dict[str, Path]:
    records = list(records)
    if not records:
        raise ValueError("no run records to report")
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "plotdata").mkdir(exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc}") from exc

    paths = {"runs": out / "runs.csv", "summary": out / "summary.csv"}
    _write_csv(paths["runs"], RUN_COLUMNS, (run_row(r) for r in records))
    summary = summarize(records)
    _write_csv(paths["summary"], summary_columns(), summary)
    for name, rows in plot_series(summary).items():
        paths[name] = out / "plotdata" / f"{name}.csv"
        _write_csv(paths[name], ["scenario", "algorithm", "provider", "mu", "mean_usd"], rows)
    return paths
