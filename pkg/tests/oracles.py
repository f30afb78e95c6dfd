"""Brute-force reference computations, deliberately free of numpy and of the package's code paths."""
from __future__ import annotations

import itertools


def grid_owner(x, y, width, height, rows, cols):
    col = max(i for i in range(cols) if (i * width) // cols <= x)
    row = max(j for j in range(rows) if (j * height) // rows <= y)
    return row * cols + col


def voronoi_owner(x, y, centroids):
    best, best_d = 0, None
    for i, (cx, cy) in enumerate(centroids):
        d = (x - cx) ** 2 + (y - cy) ** 2
        if best_d is None or d < best_d:
            best, best_d = i, d
    return best


def owner_fn(plan_dict):
    own = plan_dict["ownership"]
    if own["type"] == "grid":
        return lambda x, y: grid_owner(x, y, own["width"], own["height"], own["rows"], own["cols"])
    centroids = [tuple(c) for c in own["centroids"]]
    return lambda x, y: voronoi_owner(x, y, centroids)


def replay_counts(trace: dict) -> dict:
    """Recount every counter of a serialized trace from positions alone.

    Messages: every ordered pair of distinct alive agents within Chebyshev
    ``aoi_range`` after the tick's moves. Billing direction uses partitions
    before the tick's migrations. Migrations: ownership recomputed for every
    move.
    """
    header = trace["header"]
    scen = header["scenario"]
    aoi = scen["params"]["aoi_range"]
    exits = {tuple(e) for e in scen["exits"]}
    plan = header["plan"]
    owner = owner_fn(plan)
    cloud = {i for i, p in enumerate(plan["placement"]) if p == "cloud"}

    pos = [tuple(p) for p in header["positions"]]
    alive = [True] * len(pos)
    part = list(plan["assignment"])
    c = dict.fromkeys(
        ["ticks", "msgs_total", "msgs_total_cross", "msgs_cloud_to_local", "msgs_local_to_cloud",
         "msgs_local_to_local_cross", "migrations_total", "migrations_cloud_to_local"], 0)
    migration_log = []
    for tick in trace["ticks"]:
        c["ticks"] += 1
        moved = []
        for agent, ox, oy, nx, ny in tick["moves"]:
            assert pos[agent] == (ox, oy)
            assert max(abs(nx - ox), abs(ny - oy)) == 1
            pos[agent] = (nx, ny)
            moved.append(agent)
        for i in range(len(pos)):
            if alive[i] and pos[i] in exits:
                alive[i] = False
        live = [i for i in range(len(pos)) if alive[i]]
        for a in live:
            for b in live:
                if a == b:
                    continue
                if max(abs(pos[a][0] - pos[b][0]), abs(pos[a][1] - pos[b][1])) > aoi:
                    continue
                c["msgs_total"] += 1
                pa, pb = part[a], part[b]
                if pa == pb:
                    continue
                c["msgs_total_cross"] += 1
                if pa in cloud and pb not in cloud:
                    c["msgs_cloud_to_local"] += 1
                elif pa not in cloud and pb in cloud:
                    c["msgs_local_to_cloud"] += 1
                else:
                    c["msgs_local_to_local_cross"] += 1
        for agent in moved:
            new = owner(*pos[agent])
            if new != part[agent]:
                migration_log.append((tick["tick"], agent, part[agent], new))
                c["migrations_total"] += 1
                if part[agent] in cloud and new not in cloud:
                    c["migrations_cloud_to_local"] += 1
                part[agent] = new
    c["_migrations"] = migration_log
    c["_alive"] = sum(alive)
    return c


def best_two_partition(points):
    """Minimum-SSE split of ``points`` into two non-empty clusters by enumeration."""
    best = None
    n = len(points)
    for mask in range(1, 2 ** (n - 1)):
        a = [p for i, p in enumerate(points) if mask >> i & 1]
        b = [p for i, p in enumerate(points) if not mask >> i & 1]
        cost = _sse(a) + _sse(b)
        if best is None or cost < best[0]:
            best = (cost, sorted(a), sorted(b))
    return best


def _sse(pts):
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    return sum((p[0] - mx) ** 2 + (p[1] - my) ** 2 for p in pts)


def pair_count(points, aoi):
    return sum(
        1
        for a, b in itertools.permutations(range(len(points)), 2)
        if max(abs(points[a][0] - points[b][0]), abs(points[a][1] - points[b][1])) <= aoi
    )
