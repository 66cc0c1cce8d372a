"""Command-line entry points.

Subcommands: `metrics` (inspect one map), `rank` (Copeland-order
candidate maps against a target list), `bench` (single seeded
optimisation run against a target map), `tune` (parameter sweep),
`simulate` (scripted headless sessions), `stats` (Welch's t-test on
two value files), and `serve` (run the HTTP service).
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import random
import statistics
import sys
from dataclasses import dataclass
from pathlib import Path

from .evolution import GAParams, run_optimisation, history_to_csv, random_suggestions
from .grid import GridMap, MapError, TileKind, parse_map, serialize_map
from .metrics import analyze
from .ranking import TargetSet, copeland_rank, copeland_scores, fitness
from .session import (
    Decision,
    Session,
    SessionMode,
    assign_mode,
    export_log,
    iterate,
    new_session,
    submit_initial,
)

METRIC_COUNT = 31


class StatsError(ValueError):
    pass


class TooFewSamplesError(StatsError):
    pass


class ZeroVarianceError(StatsError):
    pass


@dataclass(frozen=True)
class WelchResult:
    t: float
    dof: float
    mean_a: float
    mean_b: float
    sd_a: float
    sd_b: float


def welch_t(group_a: list[float], group_b: list[float]) -> WelchResult:
    """Welch's unequal-variance t statistic with Welch-Satterthwaite dof."""
    if len(group_a) < 2 or len(group_b) < 2:
        raise TooFewSamplesError("each group needs at least two values")
    mean_a, mean_b = statistics.fmean(group_a), statistics.fmean(group_b)
    var_a, var_b = statistics.variance(group_a), statistics.variance(group_b)
    if var_a == 0 and var_b == 0:
        raise ZeroVarianceError("both groups have zero variance; t is undefined")
    q_a, q_b = var_a / len(group_a), var_b / len(group_b)
    t = (mean_a - mean_b) / math.sqrt(q_a + q_b)
    dof = (q_a + q_b) ** 2 / (
        q_a**2 / (len(group_a) - 1) + q_b**2 / (len(group_b) - 1)
    )
    return WelchResult(t, dof, mean_a, mean_b, math.sqrt(var_a), math.sqrt(var_b))


# ---------------------------------------------------------------------------
# shared helpers


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_map(path: str) -> GridMap:
    return parse_map(Path(path).read_text(encoding="utf-8"))


def _load_feasible(path: str) -> tuple[GridMap, tuple[float, ...]]:
    grid = _load_map(path)
    report, vector = analyze(grid)
    if not report.feasible:
        raise MapError(f"{path}: no passable path from entrance to exit")
    return grid, vector


def _target_set(paths: list[str]) -> TargetSet:
    return TargetSet(tuple(_load_feasible(p)[1] for p in paths))


# ---------------------------------------------------------------------------
# metrics


def cmd_metrics(args: argparse.Namespace) -> int:
    try:
        _, vector = _load_feasible(args.map)
    except (OSError, MapError) as exc:
        return _fail(str(exc))
    print(",".join(f"M{i}" for i in range(1, METRIC_COUNT + 1)))
    print(",".join(f"{value:.9g}" for value in vector))
    return 0


# ---------------------------------------------------------------------------
# rank


def cmd_rank(args: argparse.Namespace) -> int:
    try:
        target_paths = [
            line.strip()
            for line in Path(args.targets).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        if not target_paths:
            return _fail(f"{args.targets}: no target map paths")
        targets = _target_set(target_paths)
        candidates = []
        for path in args.candidates:
            _, vector = _load_feasible(path)
            candidates.append(fitness(vector, targets, True))
    except (OSError, MapError) as exc:
        return _fail(str(exc))
    scores = copeland_scores(candidates)
    for index in copeland_rank(candidates):
        print(f"{args.candidates[index]} copeland={scores[index]}")
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        _, vector = _load_feasible(args.target)
    except (OSError, MapError) as exc:
        return _fail(str(exc))
    targets = TargetSet((vector,))
    params = GAParams(evaluation_budget=args.evals)
    population, history = run_optimisation(targets, params, random.Random(args.seed))
    if args.history:
        Path(args.history).write_text(history_to_csv(history), encoding="utf-8")
    pool = population.feasible or population.infeasible
    order = copeland_rank([member.fitness for member in pool])
    best = pool[order[0]]
    if args.out:
        Path(args.out).write_text(serialize_map(best.grid) + "\n", encoding="utf-8")
    print(f"target={args.target} seed={args.seed} evals={args.evals}")
    print(f"final_best_fitness_sum={history[-1].best_fitness_sum:.9g}")
    if not population.feasible:
        print("warning: no feasible individuals; wrote the best infeasible map", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# tune


_TUNABLE = {
    "mutation_rate": float,
    "tournament_size": int,
    "elite_count": int,
    "population_size": int,
    "generations": int,
}


def _parse_grid(spec: str) -> list[dict]:
    axes: list[tuple[str, list]] = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        name, _, raw = part.partition("=")
        name = name.strip()
        if name == "evaluation_budget":
            raise ValueError("the evaluation budget is fixed at 10,000 per run")
        if name not in _TUNABLE:
            raise ValueError(f"unknown parameter {name!r}")
        values = [_TUNABLE[name](v.strip()) for v in raw.split(",") if v.strip()]
        if not values:
            raise ValueError(f"no values for parameter {name!r}")
        axes.append((name, values))
    if not axes:
        raise ValueError("empty parameter grid")
    names = [name for name, _ in axes]
    return [
        dict(zip(names, combo))
        for combo in itertools.product(*(values for _, values in axes))
    ]


def cmd_tune(args: argparse.Namespace) -> int:
    try:
        combos = _parse_grid(args.grid)
        _, vector = _load_feasible(args.target)
    except (OSError, MapError, ValueError) as exc:
        return _fail(str(exc))
    targets = TargetSet((vector,))
    rows = []
    for combo in combos:
        params = GAParams(**combo, evaluation_budget=10_000)
        finals = []
        for seed in range(args.seeds):
            _, history = run_optimisation(targets, params, random.Random(seed))
            finals.append(history[-1].best_fitness_sum)
        finals.sort()
        mean = statistics.fmean(finals)
        sd = statistics.stdev(finals) if len(finals) > 1 else 0.0
        label = " ".join(f"{name}={combo[name]}" for name in sorted(combo))
        rows.append((mean, sd, label))
    rows.sort(key=lambda row: (math.isnan(row[0]), row[0], row[2]))
    for mean, sd, label in rows:
        print(f"{label} mean={mean:.6f} sd={sd:.6f}")
    return 0


# ---------------------------------------------------------------------------
# simulate


def _forced_user_id(mode: str, ordinal: int) -> str:
    if mode == "byid":
        return f"sim-user-{ordinal:05d}"
    wanted = SessionMode.GA if mode == "ga" else SessionMode.CONTROL
    attempt = 0
    while True:
        candidate = f"sim-{mode}-{ordinal:05d}-{attempt}"
        if assign_mode(candidate) is wanted:
            return candidate
        attempt += 1


def _random_edit(grid: GridMap, rng: random.Random) -> GridMap:
    """Flip a few Floor tiles to Treasure or Enemy; feasibility survives."""
    floor = [i for i, t in enumerate(grid.tiles) if t is TileKind.FLOOR]
    if not floor:
        return grid
    count = min(len(floor), rng.randint(1, 4))
    tiles = list(grid.tiles)
    for index in rng.sample(floor, count):
        tiles[index] = rng.choice((TileKind.TREASURE, TileKind.ENEMY))
    return GridMap(tuple(tiles))


def _policy_decisions(
    policy: str,
    k: int,
    suggestions: list[GridMap],
    targets: TargetSet,
    rng: random.Random,
) -> list[Decision]:
    if policy == "keep-everything":
        return [
            Decision(index=i, edited=grid, liked=True, kept=True)
            for i, grid in enumerate(suggestions)
        ]
    if policy == "keep-best-k":
        totals = [
            fitness(analyze(grid)[1], targets, True).total() for grid in suggestions
        ]
        order = sorted(range(len(suggestions)), key=lambda i: (totals[i], i))
        return [
            Decision(index=i, edited=suggestions[i], liked=True, kept=True)
            for i in sorted(order[:k])
        ]
    decisions = []
    for i, grid in enumerate(suggestions):
        liked = rng.random() < 0.35
        kept = rng.random() < 0.25
        if not (liked or kept):
            continue
        edited = _random_edit(grid, rng) if rng.random() < 0.5 else grid
        decisions.append(Decision(index=i, edited=edited, liked=liked, kept=kept))
    return decisions


_MAX_SIMULATED_ROUNDS = 200


def _run_scripted_session(
    user_id: str, seed: int, policy: str, k: int, params: GAParams, rng: random.Random
) -> Session:
    session = new_session(user_id, seed, params=params)
    initial = random_suggestions(1, rng)[0]
    targets = TargetSet((analyze(initial)[1],))
    suggestions = submit_initial(session, initial)
    for _ in range(_MAX_SIMULATED_ROUNDS):
        if session.complete:
            return session
        decisions = _policy_decisions(policy, k, suggestions, targets, rng)
        suggestions = iterate(session, decisions)
    raise RuntimeError(f"session {user_id} did not complete; policy {policy!r} too shy")


def _aggregate(logs: list[dict]) -> dict:
    iterations = [record for log in logs for record in log["iterations"]]
    likes = sorted(record["likes"] for record in iterations)
    keeps = sorted(record["keeps"] for record in iterations)
    edits_liked = sorted(e for record in iterations for e in record["edits_of_liked"])
    edits_kept = sorted(e for record in iterations for e in record["edits_of_kept"])
    rounds = sorted(1 + len(log["iterations"]) for log in logs)
    blanks = sorted(log["blank_creations"] for log in logs)

    def mean(values: list) -> float:
        return statistics.fmean(values) if values else 0.0

    return {
        "sessions": len(logs),
        "mean_iterations_to_complete": mean(rounds),
        "mean_likes_per_iteration": mean(likes),
        "mean_keeps_per_iteration": mean(keeps),
        "mean_edits_of_liked": mean(edits_liked),
        "mean_edits_of_kept": mean(edits_kept),
        "mean_blank_creations": mean(blanks),
    }


def cmd_simulate(args: argparse.Namespace) -> int:
    policy, _, suffix = args.policy.partition(":")
    if policy not in ("keep-everything", "keep-best-k", "random-tagger"):
        return _fail(f"unknown policy {args.policy!r}")
    k = int(suffix) if suffix else 2
    if k < 1:
        return _fail("keep-best-k needs k >= 1")
    params = (
        GAParams(evaluation_budget=args.budget) if args.budget else GAParams()
    )
    master = random.Random(args.seed)
    sessions = []
    for ordinal in range(args.sessions):
        user_id = _forced_user_id(args.mode, ordinal)
        session_seed = master.getrandbits(63)
        policy_rng = random.Random(master.getrandbits(63))
        session = _run_scripted_session(
            user_id, session_seed, policy, k, params, policy_rng
        )
        sessions.append(session)
    by_group: dict[str, list[dict]] = {}
    documents = []
    for session in sessions:
        log = export_log(session)
        documents.append({"user_id": session.user_id, "log": log})
        by_group.setdefault(log["group"], []).append(log)
    aggregates = {
        group: _aggregate(logs) for group, logs in sorted(by_group.items())
    }
    print(
        json.dumps(
            {"sessions": documents, "aggregates": aggregates},
            indent=2,
            sort_keys=True,
        )
    )
    return 0


# ---------------------------------------------------------------------------
# stats


def _read_values(path: str) -> list[float]:
    values = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            continue  # header or annotation line
    return values


def cmd_stats(args: argparse.Namespace) -> int:
    try:
        result = welch_t(_read_values(args.a), _read_values(args.b))
    except (OSError, StatsError) as exc:
        return _fail(str(exc))
    print(
        f"mean_a={result.mean_a:.6f} mean_b={result.mean_b:.6f} "
        f"sd_a={result.sd_a:.6f} sd_b={result.sd_b:.6f} "
        f"t={result.t:.6f} dof={result.dof:.6f}"
    )
    return 0


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args: argparse.Namespace) -> int:
    import socket

    import uvicorn

    from .service import ServiceConfig, create_app

    host, _, port_text = args.addr.rpartition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text)
    except ValueError:
        return _fail(f"invalid address {args.addr!r}")
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        return _fail(f"cannot bind {args.addr}: {exc}")
    app = create_app(
        ServiceConfig(
            data_dir=Path(args.data),
            budget=args.budget,
            default_seed=args.default_seed,
        )
    )
    server = uvicorn.Server(
        uvicorn.Config(app, host=host, port=port, log_level="warning")
    )
    server.run(sockets=[sock])
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levelforge")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="print the 31 metrics of one map as CSV")
    p.add_argument("map")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("rank", help="order candidate maps against target maps")
    p.add_argument("--targets", required=True, help="file listing target map paths")
    p.add_argument("candidates", nargs="+")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("bench", help="one seeded optimisation run against a target")
    p.add_argument("--target", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--evals", type=int, default=10_000)
    p.add_argument("--out", help="write the best map here")
    p.add_argument("--history", help="write the per-generation CSV here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("tune", help="sweep a parameter grid")
    p.add_argument("--target", required=True)
    p.add_argument("--grid", required=True, help="e.g. 'mutation_rate=0.3,0.5;elite_count=1,2'")
    p.add_argument("--seeds", type=int, default=30)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("simulate", help="run scripted sessions headlessly")
    p.add_argument("--policy", required=True,
                   help="keep-everything | keep-best-k[:k] | random-tagger")
    p.add_argument("--sessions", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("ga", "control", "byid"), default="byid")
    p.add_argument("--budget", type=int, help="evaluation budget per optimisation")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stats", help="Welch's t-test between two value files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.add_argument("--data", required=True, help="journal directory")
    p.add_argument("--budget", type=int, help="evaluation budget per optimisation")
    p.add_argument("--default-seed", type=int, dest="default_seed")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
