"""Fitness and comparison of candidate maps against liked exemplars.

Fitness is goal-programming style: per metric component, the distance
to the nearest exemplar.  Feasible maps are scored on all 31
components; infeasible maps drop the path-length component and are
only ever compared among themselves.

Pairwise preference uses majority voting over components: a beats b
when strictly more components are strictly lower.  Populations are
ordered by Copeland score (wins minus losses over the all-pairs
tournament), which keeps every dominance relation intact: a dominating
vector loses no component vote, so it beats everything it dominates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .metrics import METRIC_COUNT, MetricVector


class EmptyTargetSetError(ValueError):
    pass


class IndexSetMismatchError(ValueError):
    """Feasible and infeasible fitness vectors are not comparable."""


@dataclass(frozen=True)
class TargetSet:
    """Metric vectors of the liked exemplar maps; never empty."""

    exemplars: tuple[MetricVector, ...]

    def __post_init__(self) -> None:
        if not self.exemplars:
            raise EmptyTargetSetError("a target set needs at least one exemplar")
        for ex in self.exemplars:
            if len(ex) != METRIC_COUNT:
                raise ValueError(f"exemplar has {len(ex)} components, expected {METRIC_COUNT}")

    def extended(self, exemplar: MetricVector) -> TargetSet:
        return TargetSet(self.exemplars + (exemplar,))


class Preference(Enum):
    BETTER = "better"
    WORSE = "worse"
    TIE = "tie"


@dataclass(frozen=True)
class FitnessVector:
    """Per-component distances to the nearest exemplar; lower is better."""

    values: tuple[float, ...]
    feasible: bool

    def total(self) -> float:
        return sum(self.values)


def fitness(metrics: MetricVector, targets: TargetSet, feasible: bool) -> FitnessVector:
    start = 0 if feasible else 1
    values = tuple(
        min(abs(metrics[i] - ex[i]) for ex in targets.exemplars)
        for i in range(start, METRIC_COUNT)
    )
    return FitnessVector(values, feasible)


def _check_comparable(a: FitnessVector, b: FitnessVector) -> None:
    if a.feasible != b.feasible or len(a.values) != len(b.values):
        raise IndexSetMismatchError("cannot compare feasible with infeasible fitness")


def dominates(a: FitnessVector, b: FitnessVector) -> bool:
    """True when a is no worse everywhere and strictly better somewhere."""
    _check_comparable(a, b)
    strict = False
    for x, y in zip(a.values, b.values):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def majority_prefers(a: FitnessVector, b: FitnessVector) -> Preference:
    """Majority vote over components; strict wins only, so ties are common."""
    _check_comparable(a, b)
    lower = greater = 0
    for x, y in zip(a.values, b.values):
        if x < y:
            lower += 1
        elif x > y:
            greater += 1
    if lower > greater:
        return Preference.BETTER
    if greater > lower:
        return Preference.WORSE
    return Preference.TIE


def copeland_scores(population: Sequence[FitnessVector]) -> list[int]:
    """Wins minus losses for every member, over all pairwise votes."""
    n = len(population)
    if n == 0:
        return []
    first = population[0]
    for other in population[1:]:
        _check_comparable(first, other)
    if n == 1:
        return [0]
    if n <= 8:
        scores = [0] * n
        for i in range(n):
            vi = population[i].values
            for j in range(i + 1, n):
                vj = population[j].values
                lower = greater = 0
                for x, y in zip(vi, vj):
                    if x < y:
                        lower += 1
                    elif x > y:
                        greater += 1
                if lower > greater:
                    scores[i] += 1
                    scores[j] -= 1
                elif greater > lower:
                    scores[i] -= 1
                    scores[j] += 1
        return scores
    matrix = np.array([p.values for p in population])
    lower = (matrix[:, None, :] < matrix[None, :, :]).sum(axis=2)
    beats = lower > lower.T
    return (beats.sum(axis=1) - beats.sum(axis=0)).tolist()


def copeland_rank(population: Sequence[FitnessVector]) -> list[int]:
    """Indices of the population, best first.

    Copeland score is wins minus losses over all pairwise majority
    votes.  Ties break by ascending fitness total, then input order,
    making the result a deterministic permutation.
    """
    scores = copeland_scores(population)
    totals = [p.total() for p in population]
    return sorted(range(len(population)), key=lambda i: (-scores[i], totals[i], i))
