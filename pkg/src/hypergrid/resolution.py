"""Conflict resolution: maximal consistent interpretations and their ranking.

An interpretation of a level is a maximal set of pairwise non-conflicting
hypotheses.  Interpretations are scored by the product of their members'
accrued probabilities, normalized over all interpretations of the level, and
compared against a cheap greedy baseline that repeatedly grabs the strongest
remaining hypothesis.  The winning interpretation extends downward through
support into a hypothesis tree whose unclaimed evidence is read as false
alarms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InternalError, ResolutionError
from .space import HypothesisSpace

# Below this, per-member factors are multiplied in log space to dodge
# underflow on long interpretations.
_LOG_PRODUCT_THRESHOLD = 1e-12


@dataclass(frozen=True)
class Interpretation:
    """A maximal consistent set of same-level hypotheses, possibly scored."""

    members: tuple[str, ...]
    raw: float | None = None
    normalized: float | None = None
    rank: int | None = None


@dataclass(frozen=True)
class RankedInterpretations:
    items: tuple[Interpretation, ...]
    k: float  # sum of raw products, the normalization constant


@dataclass(frozen=True)
class HypothesisTree:
    """Downward closure of a winning interpretation.

    ``selected`` maps each level to the chosen ids, ``claimed`` maps each
    claimed evidence node to the level-1 hypothesis claiming it, and
    ``unassociated`` lists the evidence nothing claims (false alarms).
    """

    root: Interpretation
    selected: dict[int, tuple[str, ...]]
    claimed: dict[str, str]
    unassociated: tuple[str, ...]


@dataclass(frozen=True)
class StrategyComparison:
    greedy: Interpretation
    global_best: Interpretation
    agree: bool


def enumerate_interpretations(space: HypothesisSpace, level: int) -> list[Interpretation]:
    """All maximal independent sets of the level's conflict graph.

    Deterministic: the result is ordered lexicographically by sorted member
    ids, independent of discovery order.
    """
    ids = space.level_ids(level)
    if not ids:
        raise ResolutionError(f"level {level} is empty or absent")
    adj = space.conflict_neighbors(level)
    universe = set(ids)
    compat = {v: universe - {v} - adj[v] for v in ids}
    found: list[tuple[str, ...]] = []

    # Maximal cliques of the compatibility graph, Bron-Kerbosch style with a
    # deterministic max-degree pivot (ties fall to id order).
    def expand(partial: set[str], candidates: set[str], excluded: set[str]) -> None:
        if not candidates and not excluded:
            found.append(tuple(sorted(partial)))
            return
        pivot = max(sorted(candidates | excluded), key=lambda v: len(compat[v] & candidates))
        for v in sorted(candidates - compat[pivot]):
            expand(partial | {v}, candidates & compat[v], excluded & compat[v])
            candidates = candidates - {v}
            excluded = excluded | {v}

    expand(set(), set(ids), set())
    return [Interpretation(members) for members in sorted(found)]


def rank_interpretations(
    interpretations: Iterable[Interpretation], accrued: Mapping[str, float]
) -> RankedInterpretations:
    """Score interpretations by product probability, normalized over all.

    Ties break lexicographically by sorted member ids, so the ranking is a
    total deterministic order.
    """
    items = list(interpretations)
    if not items:
        raise ResolutionError("nothing to rank")
    raws: list[float] = []
    for interp in items:
        missing = sorted(m for m in interp.members if m not in accrued)
        if missing:
            raise ResolutionError(f"no accrued probability for {missing}")
        raws.append(_product([accrued[m] for m in interp.members]))
    k = math.fsum(raws)
    if k == 0.0:
        raise ResolutionError("every interpretation has zero probability, cannot normalize")
    order = sorted(range(len(items)), key=lambda i: (-raws[i] / k, items[i].members))
    ranked = tuple(
        Interpretation(
            members=items[i].members,
            raw=raws[i],
            normalized=raws[i] / k,
            rank=pos + 1,
        )
        for pos, i in enumerate(order)
    )
    return RankedInterpretations(items=ranked, k=k)


def greedy_strongest_first(space: HypothesisSpace, level: int) -> Interpretation:
    """Baseline: repeatedly take the highest-accrued survivor (ties by id),
    discarding everything it conflicts with."""
    ids = space.level_ids(level)
    if not ids:
        raise ResolutionError(f"level {level} is empty or absent")
    accrued: dict[str, float] = {}
    for hid in ids:
        value = space.node(hid).accrued
        if value is None:
            raise ResolutionError(f"accrued value for {hid!r} is not yet computed")
        accrued[hid] = value
    adj = space.conflict_neighbors(level)
    chosen: list[str] = []
    remaining = list(ids)
    while remaining:
        pick = min(remaining, key=lambda h: (-accrued[h], h))
        chosen.append(pick)
        remaining = [h for h in remaining if h != pick and h not in adj[pick]]
    return Interpretation(members=tuple(sorted(chosen)))


def extract_best_tree(space: HypothesisSpace, ranked: RankedInterpretations) -> HypothesisTree:
    """Close the rank-1 interpretation downward through support.

    Each level's selection is the union of supports one level up.  A
    conflicting pair inside a selection means propagation missed an edge or
    some single hypothesis claims two conflicting children; either way the
    tree cannot close consistently, which surfaces as an internal error.
    """
    if not ranked.items:
        raise ResolutionError("ranking is empty")
    if space.fan_out is None:
        raise ResolutionError("space is not validated; run validate() first")
    best = ranked.items[0]
    if not best.members:
        raise ResolutionError("winning interpretation has no members")
    top = space.node(best.members[0]).level
    selected: dict[int, tuple[str, ...]] = {}
    current: tuple[str, ...] = tuple(sorted(best.members))
    for level in range(top, -1, -1):
        _check_consistent(space, current, level)
        selected[level] = current
        if level == 0:
            break
        below: set[str] = set()
        for hid in current:
            below |= space.node(hid).support
        current = tuple(sorted(below))

    claimed: dict[str, str] = {}
    if top > 0:
        for hid in selected[1]:
            for eid in sorted(space.node(hid).support):
                if eid in claimed:
                    raise InternalError(
                        f"evidence {eid!r} claimed by both {claimed[eid]!r} and {hid!r} "
                        f"inside one consistent selection"
                    )
                claimed[eid] = hid
    unassociated = tuple(sorted(set(space.level_ids(0)) - set(selected[0])))
    return HypothesisTree(root=best, selected=selected, claimed=claimed, unassociated=unassociated)


def compare_strategies(space: HypothesisSpace, level: int) -> StrategyComparison:
    """Greedy pick versus the product-ranked winner at one level."""
    greedy = greedy_strongest_first(space, level)
    accrued = {hid: space.node(hid).accrued for hid in space.level_ids(level)}
    ranked = rank_interpretations(enumerate_interpretations(space, level), accrued)
    best = ranked.items[0]
    return StrategyComparison(
        greedy=greedy,
        global_best=best,
        agree=set(greedy.members) == set(best.members),
    )


def _product(values: list[float]) -> float:
    if any(v == 0.0 for v in values):
        return 0.0
    if min(values) < _LOG_PRODUCT_THRESHOLD:
        return math.exp(math.fsum(math.log(v) for v in values))
    out = 1.0
    for v in values:
        out *= v
    return out


def _check_consistent(space: HypothesisSpace, ids: tuple[str, ...], level: int) -> None:
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            if space.in_conflict(a, b):
                raise InternalError(
                    f"selection at level {level} contains conflicting pair ({a!r}, {b!r}); "
                    f"conflict propagation was not at fixpoint, or one hypothesis "
                    f"claims conflicting children"
                )
