"""Upward probability accrual over a validated space.

A hypothesis with n observed support nodes out of a model of size n+k, at a
level whose nodes are each claimed by a_m hypotheses above, accrues

    raw = (n / (n + k)) * (1 / a_m) * sum(child probabilities)

Raw values are normalized over the whole level and the normalized values are
what feed the next level up.  Levels must be computed bottom-up; level 0 is
seeded by the evidence priors at insertion time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import AccrualError
from .space import Hypothesis, HypothesisSpace


@dataclass(frozen=True)
class AccrualResult:
    """Raw and normalized values for one target level."""

    level: int
    raw: dict[str, float]
    normalized: dict[str, float]
    divisor: float


def accrue_one(h: Hypothesis, child_probs: Mapping[str, float], a_m: int) -> float:
    """Raw accrual for a single hypothesis from its support probabilities.

    On a rule-conformant space the result is a probability; nothing is
    clamped, so inconsistent inputs can push it outside [0, 1].
    """
    if a_m < 1:
        raise AccrualError(f"fan-out must be >= 1, got {a_m}")
    n = h.observed
    if n < 1:
        raise AccrualError(f"{h.hid!r} has no observed support to accrue from")
    missing = sorted(sid for sid in h.support if sid not in child_probs)
    if missing:
        raise AccrualError(f"missing child probabilities for {missing}")
    for sid in sorted(h.support):
        p = child_probs[sid]
        if not 0.0 <= p <= 1.0:
            raise AccrualError(f"child probability {sid!r}={p} outside [0, 1]")
    total = math.fsum(child_probs[sid] for sid in sorted(h.support))
    return (n / h.model_size) * (1.0 / a_m) * total


def accrue_level(space: HypothesisSpace, m: int) -> AccrualResult:
    """Accrue level m+1 from the already-computed values at level m.

    Requires a fully validated space (strict mode: a level with non-constant
    claim counts never gets this far because validation withholds fan-out).
    Normalized values are written back onto the level m+1 nodes.
    """
    if space.fan_out is None:
        raise AccrualError("space is not validated; run validate() first")
    levels = space.levels()
    if m not in levels:
        raise AccrualError(f"no level {m} in this space")
    if m + 1 not in levels:
        raise AccrualError(f"no level above {m} to accrue into")
    a_m = space.fan_out[m]

    child_probs: dict[str, float] = {}
    for hid in space.level_ids(m):
        value = space.node(hid).accrued
        if value is None:
            raise AccrualError(f"level {m} value for {hid!r} is not yet computed")
        child_probs[hid] = value

    target_ids = space.level_ids(m + 1)
    raw = {hid: accrue_one(space.node(hid), child_probs, a_m) for hid in target_ids}
    divisor = math.fsum(raw[hid] for hid in target_ids)
    if divisor == 0.0:
        raise AccrualError(f"all raw accruals at level {m + 1} are zero, cannot normalize")
    normalized = {hid: raw[hid] / divisor for hid in target_ids}
    for hid in target_ids:
        space.node(hid).accrued = normalized[hid]
    return AccrualResult(level=m + 1, raw=raw, normalized=normalized, divisor=divisor)


def accrue_all(space: HypothesisSpace) -> list[AccrualResult]:
    """Accrue every level bottom-up; empty for an evidence-only space."""
    return [accrue_level(space, m) for m in space.levels()[:-1]]
