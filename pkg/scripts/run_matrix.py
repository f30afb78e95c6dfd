"""Run an experiment config and print mean billed traffic per (scenario, algorithm).

    python scripts/run_matrix.py scripts/experiment.yaml --workers 4
"""
import argparse
import statistics
from collections import defaultdict

from hybridsim.harness.config import load_config
from hybridsim.harness.experiment import run_experiment
from hybridsim.harness.report import emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    spec = load_config(args.config)
    records = run_experiment(spec, workers=args.workers)
    paths = emit_report(records, spec.output_dir)

    table = defaultdict(list)
    for r in records:
        if r.mu == spec.mu_values[0] and r.provider == spec.providers[0].name:
            table[(r.scenario, r.algorithm)].append(r)
    print(f"{'scenario':<10} {'algorithm':<8} {'msgs c->l':>10} {'migr c->l':>10} {'local/cloud':>12} truncated")
    for (scen, alg), rs in table.items():
        msgs = statistics.fmean(r.metrics.msgs_cloud_to_local for r in rs)
        migs = statistics.fmean(r.metrics.migrations_cloud_to_local for r in rs)
        split = f"{statistics.fmean(r.agents_local for r in rs):.0f}/{statistics.fmean(r.agents_cloud for r in rs):.0f}"
        print(f"{scen:<10} {alg:<8} {msgs:>10.1f} {migs:>10.2f} {split:>12} {sum(r.truncated for r in rs)}")
    print(f"wrote {paths['runs']} and {paths['summary']}")


if __name__ == "__main__":
    main()
