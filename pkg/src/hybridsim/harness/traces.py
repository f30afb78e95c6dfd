"""Line-delimited JSON trace files.

Layout: one ``header`` line (scenario, roles, initial positions, initial
plan), one ``tick`` line per tick, one ``footer`` line (counters and
truncation flag). Message pairs are not stored: they are a pure function of
the replayed positions. Wall-clock time is left out so equal runs give equal
bytes.
"""
from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Iterator

from hybridsim.simulation import SimulationTrace


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def trace_lines(trace: SimulationTrace) -> Iterator[str]:
    cfg, world = trace.config, trace.initial
    yield _dumps(
        {
            "type": "header",
            "scenario": {
                "name": cfg.name,
                "total_agents": cfg.total_agents,
                "rescuer_count": cfg.rescuer_count,
                "group_count": cfg.group_count,
                "width": cfg.environment.width,
                "height": cfg.environment.height,
                "exits": [list(e) for e in cfg.environment.exits],
                "params": asdict(cfg.params),
            },
            "roles": world.roles.tolist(),
            "positions": world.positions.tolist(),
            "plan": trace.initial_plan.to_dict(),
        }
    )
    for t in trace.ticks:
        yield _dumps(
            {
                "type": "tick",
                "tick": t.tick,
                "moves": [[mv.agent, *mv.old, *mv.new] for mv in t.moves],
                "exits": t.exits_reached,
                "n_messages": t.n_messages,
                "migrations": [[e.agent, e.source, e.target] for e in t.migrations],
            }
        )
    yield _dumps({"type": "footer", "truncated": trace.truncated, "counters": trace.metrics.counters()})


def write_trace(trace: SimulationTrace, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in trace_lines(trace)))
    return path


def read_trace(path) -> dict:
    """Parse a trace file into ``{"header": ..., "ticks": [...], "footer": ...}``."""
    out = {"header": None, "ticks": [], "footer": None}
    with Path(path).open() as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            kind = rec.get("type")
            if kind == "tick":
                out["ticks"].append(rec)
            elif kind in ("header", "footer"):
                out[kind] = rec
            else:
                raise ValueError(f"{path}:{n}: unknown record type {kind!r}")
    if out["header"] is None or out["footer"] is None:
        raise ValueError(f"{path}: truncated trace (missing header or footer)")
    return out
