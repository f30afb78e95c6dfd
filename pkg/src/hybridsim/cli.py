"""Command line entry point: ``hybridsim {simulate,experiment,cost,report}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from hybridsim.costmodel import CostParams, deployment_cost, get_provider, provider_catalog
from hybridsim.harness.config import ALGORITHMS, PRESETS, load_config
from hybridsim.harness.experiment import (
    RECORDS_FILE,
    price,
    read_records,
    run_experiment,
    simulate,
)
from hybridsim.harness.report import emit_report
from hybridsim.harness.traces import write_trace
from hybridsim.metrics import SimulationMetrics


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_simulate(args) -> int:
    provider = get_provider(args.provider, provider_catalog(args.catalog))
    scenario = PRESETS[args.scenario]
    trace = simulate(scenario, args.algorithm, args.seed, args.t_exec, keep_ticks=args.trace_out is not None)
    (record,) = price(trace, scenario, args.algorithm, args.seed, [provider], [args.mu])
    if args.trace_out:
        write_trace(trace, args.trace_out)
    if args.metrics_out:
        Path(args.metrics_out).write_text(json.dumps(trace.metrics.to_dict(), indent=2, sort_keys=True) + "\n")
    _print_json(record.to_dict())
    return 0


def cmd_experiment(args) -> int:
    spec = load_config(args.config, provider_catalog(args.catalog))
    if args.output_dir:
        spec = type(spec)(**{**spec.__dict__, "output_dir": Path(args.output_dir)})
    records = run_experiment(spec, workers=args.workers)
    paths = emit_report(records, spec.output_dir)
    print(f"{len(records)} records -> {spec.output_dir / RECORDS_FILE}")
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _load_metrics(path) -> SimulationMetrics:
    data = json.loads(Path(path).read_text())
    if "t_exec_s" in data:
        data["t_exec"] = data.pop("t_exec_s")
    return SimulationMetrics.from_dict(data)


def cmd_cost(args) -> int:
    provider = get_provider(args.provider, provider_catalog(args.catalog))
    metrics = _load_metrics(args.metrics)
    if args.t_exec is not None:
        metrics = SimulationMetrics(**{**metrics.to_dict(), "t_exec": args.t_exec})
    params = CostParams(args.mu, args.message_size, args.agent_size, args.round_up)
    _print_json(deployment_cost(metrics, params, provider).to_dict())
    return 0


def cmd_report(args) -> int:
    records = read_records(args.records)
    out = Path(args.output_dir) if args.output_dir else Path(args.records).parent
    for name, path in emit_report(records, out).items():
        print(f"{name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--catalog", help="provider catalog YAML (default: $HYBRIDSIM_PROVIDER_CATALOG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one simulation and print its record")
    p.add_argument("--scenario", choices=sorted(PRESETS), default="config1")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="kmeans")
    p.add_argument("--provider", default="ec2")
    p.add_argument("--mu", type=int, choices=(0, 1), default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-exec", type=float, help="priced execution time in seconds (default: wall clock)")
    p.add_argument("--trace-out", help="write the JSONL trace here")
    p.add_argument("--metrics-out", help="write the metrics JSON here (input for `cost`)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a full experiment matrix from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output-dir", help="override output_dir from the config")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("cost", help="price a stored metrics file")
    p.add_argument("--metrics", required=True)
    p.add_argument("--provider", default="ec2")
    p.add_argument("--mu", type=int, choices=(0, 1), default=0)
    p.add_argument("--t-exec", type=float, help="override the stored execution time (seconds)")
    p.add_argument("--message-size", type=float, default=1000.0, help="bytes")
    p.add_argument("--agent-size", type=float, default=10_000.0, help="bytes")
    p.add_argument("--round-up", action="store_true", help="bill whole time units")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("report", help="regenerate CSV reports from stored records")
    p.add_argument("--records", required=True, help=f"path to {RECORDS_FILE}")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (KeyError, ValueError, OSError, RuntimeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hybridsim {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
