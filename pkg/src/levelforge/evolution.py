"""Two-population evolutionary search over dungeon maps.

Feasible and infeasible candidates evolve side by side: infeasible maps
compete on every metric except path length, so partial progress toward
connectivity is not thrown away.  Parents come from the sub-population
a child is drawn for, selection pressure is pairwise majority voting,
and replacement merges children with survivors and keeps the
Copeland-best until the population is back to size.

Per sub-population the protected elites are the Copeland-best members
plus the member with the smallest fitness total, which keeps the
best-total history series non-increasing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .grid import (
    NEIGHBORS,
    TOTAL_TILES,
    GridMap,
    TileKind,
    entrance_of,
    exit_of,
    feasibility,
    random_map,
)
from .metrics import MetricVector, analyze
from .ranking import FitnessVector, TargetSet, copeland_rank, fitness


class BudgetExhaustedError(RuntimeError):
    pass


class EmptySubpopulationError(ValueError):
    pass


class PaddingExhaustedError(RuntimeError):
    """Rejection sampling could not find enough feasible maps."""


@dataclass(frozen=True)
class GAParams:
    mutation_rate: float = 0.5
    tournament_size: int = 2
    elite_count: int = 1
    population_size: int = 20
    generations: int = 500
    evaluation_budget: int = 10_000


@dataclass(frozen=True)
class Individual:
    grid: GridMap
    metrics: MetricVector
    fitness: FitnessVector

    @property
    def feasible(self) -> bool:
        return self.fitness.feasible


@dataclass
class Population:
    feasible: list[Individual] = field(default_factory=list)
    infeasible: list[Individual] = field(default_factory=list)

    def size(self) -> int:
        return len(self.feasible) + len(self.infeasible)


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness_sum: float
    mean_fitness_sum: float
    feasible_count: int


OptimisationHistory = list[GenerationRecord]


class Budget:
    """Counts metric evaluations against a hard cap."""

    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def consume(self) -> None:
        if self.used >= self.limit:
            raise BudgetExhaustedError(f"evaluation budget of {self.limit} spent")
        self.used += 1


def evaluate(grid: GridMap, targets: TargetSet, budget: Budget | None = None) -> Individual:
    if budget is not None:
        budget.consume()
    report, vector = analyze(grid)
    return Individual(grid, vector, fitness(vector, targets, report.feasible))


def _routed(pop: Population, individual: Individual) -> None:
    (pop.feasible if individual.feasible else pop.infeasible).append(individual)


def init_population(
    targets: TargetSet, params: GAParams, rng: random.Random, budget: Budget | None = None
) -> Population:
    pop = Population()
    for _ in range(params.population_size):
        _routed(pop, evaluate(random_map(rng), targets, budget))
    return pop


# ---------------------------------------------------------------------------
# operators


def tournament_select(subpop: list[Individual], k: int, rng: random.Random) -> Individual:
    """Draw k contestants uniformly with replacement; majority vote wins."""
    if not subpop:
        raise EmptySubpopulationError("cannot select from an empty sub-population")
    draws = [rng.randrange(len(subpop)) for _ in range(k)]
    best = copeland_rank([subpop[i].fitness for i in draws])[0]
    return subpop[draws[best]]


def crossover(a: GridMap, b: GridMap, rng: random.Random) -> GridMap:
    """Uniform crossover that preserves single Entrance and Exit tiles.

    The child's Entrance comes from either parent, the Exit likewise;
    an Exit colliding with the chosen Entrance falls back to the other
    parent's Exit and then to a random free cell.  Donated Entrance or
    Exit tiles landing anywhere else become Floor.
    """
    ent_a = entrance_of(a)
    ent_b = entrance_of(b)
    ext_a = exit_of(a)
    ext_b = exit_of(b)
    entrances = (ent_a.row * 12 + ent_a.col, ent_b.row * 12 + ent_b.col)
    exits = (ext_a.row * 12 + ext_a.col, ext_b.row * 12 + ext_b.col)
    ent = entrances[rng.randrange(2)]
    pick = rng.randrange(2)
    ext = exits[pick]
    if ext == ent:
        ext = exits[1 - pick]
        if ext == ent:
            slot = rng.randrange(TOTAL_TILES - 1)
            ext = slot if slot < ent else slot + 1
    floor = TileKind.FLOOR
    entrance_kind = TileKind.ENTRANCE
    exit_kind = TileKind.EXIT
    ta, tb = a.tiles, b.tiles
    tiles: list[TileKind] = []
    for i in range(TOTAL_TILES):
        if i == ent:
            tiles.append(entrance_kind)
        elif i == ext:
            tiles.append(exit_kind)
        else:
            t = ta[i] if rng.random() < 0.5 else tb[i]
            tiles.append(floor if t is entrance_kind or t is exit_kind else t)
    return GridMap(tuple(tiles))


def mutate(grid: GridMap, mutation_rate: float, rng: random.Random) -> GridMap:
    """With probability mutation_rate, swap a random cell with a random neighbour."""
    if rng.random() >= mutation_rate:
        return grid
    i = rng.randrange(TOTAL_TILES)
    neighbours = NEIGHBORS[i]
    j = neighbours[rng.randrange(len(neighbours))]
    if grid.tiles[i] is grid.tiles[j]:
        return grid
    tiles = list(grid.tiles)
    tiles[i], tiles[j] = tiles[j], tiles[i]
    return GridMap(tuple(tiles))


# ---------------------------------------------------------------------------
# generations


def _elite_indices(subpop: list[Individual], elite_count: int) -> set[int]:
    if not subpop or elite_count <= 0:
        return set()
    order = copeland_rank([ind.fitness for ind in subpop])
    protected = set(order[: min(elite_count, len(subpop))])
    best_total = min(
        range(len(subpop)), key=lambda i: (subpop[i].fitness.total(), i)
    )
    protected.add(best_total)
    return protected


def _truncate(
    old: list[Individual], children: list[Individual], elites: set[int], target: int
) -> list[Individual]:
    kept = [old[i] for i in sorted(elites)]
    pool = [ind for i, ind in enumerate(old) if i not in elites] + children
    order = copeland_rank([ind.fitness for ind in pool])
    kept.extend(pool[i] for i in order[: max(0, target - len(kept))])
    return kept


def step_generation(
    pop: Population,
    targets: TargetSet,
    params: GAParams,
    rng: random.Random,
    budget: Budget | None = None,
) -> Population:
    """One generation: breed population_size children, merge, truncate."""
    if budget is not None and budget.remaining < params.population_size:
        raise BudgetExhaustedError(
            f"{budget.remaining} evaluations left, {params.population_size} needed"
        )
    weight_f = len(pop.feasible) if len(pop.feasible) >= 2 else 0
    weight_i = len(pop.infeasible) if len(pop.infeasible) >= 2 else 0
    children_f: list[Individual] = []
    children_i: list[Individual] = []
    for _ in range(params.population_size):
        if weight_f == 0 and weight_i == 0:
            child_grid = random_map(rng)
        else:
            if weight_f and weight_i:
                use_feasible = rng.random() * (weight_f + weight_i) < weight_f
            else:
                use_feasible = weight_f > 0
            subpop = pop.feasible if use_feasible else pop.infeasible
            first = tournament_select(subpop, params.tournament_size, rng)
            second = tournament_select(subpop, params.tournament_size, rng)
            child_grid = mutate(crossover(first.grid, second.grid, rng), params.mutation_rate, rng)
        child = evaluate(child_grid, targets, budget)
        (children_f if child.feasible else children_i).append(child)

    merged_f = len(pop.feasible) + len(children_f)
    merged_i = len(pop.infeasible) + len(children_i)
    total = merged_f + merged_i
    size = params.population_size
    elites_f = _elite_indices(pop.feasible, params.elite_count)
    elites_i = _elite_indices(pop.infeasible, params.elite_count)
    target_f = int(size * merged_f / total + 0.5)
    target_f = min(max(target_f, len(elites_f)), merged_f)
    target_i = size - target_f
    if target_i < len(elites_i):
        target_i = len(elites_i)
        target_f = size - target_i
    if target_i > merged_i:
        target_i = merged_i
        target_f = size - target_i
    assert len(elites_f) <= target_f <= merged_f
    assert len(elites_i) <= target_i <= merged_i
    return Population(
        feasible=_truncate(pop.feasible, children_f, elites_f, target_f),
        infeasible=_truncate(pop.infeasible, children_i, elites_i, target_i),
    )


def _record(generation: int, pop: Population) -> GenerationRecord:
    totals = [ind.fitness.total() for ind in pop.feasible]
    if totals:
        best = min(totals)
        mean = sum(totals) / len(totals)
    else:
        best = mean = float("nan")
    return GenerationRecord(generation, best, mean, len(pop.feasible))


def run_optimisation(
    targets: TargetSet, params: GAParams, rng: random.Random
) -> tuple[Population, OptimisationHistory]:
    """Fresh run: initial population counts as generation zero."""
    budget = Budget(params.evaluation_budget)
    if budget.remaining < params.population_size:
        raise BudgetExhaustedError("budget cannot cover the initial population")
    pop = init_population(targets, params, rng, budget)
    history = [_record(0, pop)]
    for generation in range(1, params.generations):
        if budget.remaining < params.population_size:
            break
        pop = step_generation(pop, targets, params, rng, budget)
        history.append(_record(generation, pop))
    return pop, history


def history_to_csv(history: OptimisationHistory) -> str:
    lines = ["generation,best_fitness_sum,mean_fitness_sum,feasible_count"]
    for row in history:
        lines.append(
            f"{row.generation},{row.best_fitness_sum!r},{row.mean_fitness_sum!r},{row.feasible_count}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# suggestion picking

_PADDING_ATTEMPTS = 10_000


def _feasible_random_map(rng: random.Random) -> GridMap:
    for _ in range(_PADDING_ATTEMPTS):
        grid = random_map(rng)
        if feasibility(grid).feasible:
            return grid
    raise PaddingExhaustedError(f"no feasible map in {_PADDING_ATTEMPTS} attempts")


def select_suggestions(
    feasible_pop: list[Individual], count: int, rng: random.Random
) -> list[GridMap]:
    """Copeland-best feasible maps, padded with fresh feasible random maps."""
    order = copeland_rank([ind.fitness for ind in feasible_pop])
    picks = [feasible_pop[i].grid for i in order[:count]]
    while len(picks) < count:
        picks.append(_feasible_random_map(rng))
    return picks


def random_suggestions(count: int, rng: random.Random) -> list[GridMap]:
    """Feasible random maps with no fitness evaluation at all."""
    return [_feasible_random_map(rng) for _ in range(count)]
