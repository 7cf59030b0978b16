"""End-to-end orchestration: scenario in, scored run report out.

``run_pipeline`` chains the whole machine: build the space, generate reduced
alternatives, propagate conflicts upward, validate, accrue probabilities
level by level, enumerate and rank top-level interpretations, compare the
greedy strategy against the ranked winner, close the winner downward into a
tree, and bound the winner's evidence set.  Engine errors surface as
``PipelineError`` carrying the stage name.

``emit_report`` renders a run either for people (aligned tables, 3 decimals)
or for machines (flat ``key = value`` lines, keys sorted lexicographically,
6-decimal fixed point, LF endings).  Machine output is byte-identical across
runs of the same scenario and seed.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import TypeVar

from .accrual import AccrualResult, accrue_all
from .bound import BoundReport, suboptimality_bound, with_monte_carlo
from .errors import HypergridError, PipelineError, SpaceError
from .resolution import (
    HypothesisTree,
    RankedInterpretations,
    StrategyComparison,
    compare_strategies,
    enumerate_interpretations,
    extract_best_tree,
    rank_interpretations,
)
from .scenario import Scenario
from .space import HypothesisSpace, ValidationReport

_T = TypeVar("_T")


@dataclass(frozen=True)
class RunReport:
    """Everything one pipeline run produced, stage by stage."""

    scenario: Scenario
    space: HypothesisSpace
    validation: ValidationReport
    alternatives: tuple[str, ...]
    propagated_edges: int
    accrual: tuple[AccrualResult, ...]
    ranked: RankedInterpretations
    comparison: StrategyComparison
    tree: HypothesisTree
    bound: BoundReport


def build_space(scenario: Scenario) -> HypothesisSpace:
    """Space holding the scenario's nodes and declared conflicts, nothing more."""
    space = HypothesisSpace()
    for ev in scenario.evidence:
        space.add_hypothesis(level=0, model_size=1, prior=ev.prior, hid=ev.eid)
    # Stable sort: file order within a level, lower levels first so support
    # targets always exist.
    for hyp in sorted(scenario.hypotheses, key=lambda h: h.level):
        space.add_hypothesis(
            level=hyp.level,
            model_size=hyp.model_size,
            support=hyp.support,
            hid=hyp.hid,
        )
    for a, b in scenario.declared_conflicts:
        space.declare_conflict(a, b)
    return space


def prepare_space(scenario: Scenario) -> tuple[HypothesisSpace, tuple[str, ...], int]:
    """Build plus closure: reduced alternatives (when enabled) and upward
    conflict propagation.  Returns (space, created alternative ids, edges added)."""
    space = _stage("build", build_space, scenario)
    created: tuple[str, ...] = ()
    if scenario.options.auto_alternatives:
        created = tuple(sorted(_stage("alternatives", space.generate_all_alternatives)))
    propagated = _stage("propagate", space.propagate_conflicts_upward)
    return space, created, propagated


def run_pipeline(
    scenario: Scenario,
    mc_samples: int | None = None,
    seed: int | None = None,
) -> RunReport:
    """Run every stage over a scenario.

    ``mc_samples`` and ``seed`` override the scenario's options when given.
    The Monte Carlo stage runs only when the effective sample count is
    positive and the winning evidence set has at least two members (with one
    member the sampled region is empty by construction).
    """
    space, created, propagated = prepare_space(scenario)
    validation = _stage("validate", lambda: space.validate())
    if not validation.ok:
        detail = "; ".join(f"[{v.rule}] {v.message}" for v in validation.violations)
        raise PipelineError("validate", SpaceError(detail))
    accrual = tuple(_stage("accrue", accrue_all, space))
    top = space.top_level()

    def _rank() -> RankedInterpretations:
        accrued = {}
        for hid in space.level_ids(top):
            value = space.node(hid).accrued
            if value is not None:
                accrued[hid] = value
        return rank_interpretations(enumerate_interpretations(space, top), accrued)

    ranked = _stage("resolve", _rank)
    comparison = _stage("resolve", compare_strategies, space, top)
    tree = _stage("tree", extract_best_tree, space, ranked)
    probs = [space.node(eid).prior or 0.0 for eid in tree.selected[0]]
    bound = _stage("bound", suboptimality_bound, probs)

    samples = scenario.options.bound_mc_samples if mc_samples is None else mc_samples
    mc_seed = scenario.options.seed if seed is None else seed
    if samples > 0 and bound.n >= 2:
        bound = _stage("bound", with_monte_carlo, bound, samples, mc_seed)

    return RunReport(
        scenario=scenario,
        space=space,
        validation=validation,
        alternatives=created,
        propagated_edges=propagated,
        accrual=accrual,
        ranked=ranked,
        comparison=comparison,
        tree=tree,
        bound=bound,
    )


def emit_report(report: RunReport, fmt: str = "machine") -> str:
    """Render a run report as text; ``fmt`` is ``machine`` or ``human``."""
    if fmt == "machine":
        pairs = sorted(_machine_pairs(report))
        return "".join(f"{key} = {value}\n" for key, value in pairs)
    if fmt == "human":
        return "".join(line + "\n" for line in _human_lines(report))
    raise HypergridError(f"unknown report format {fmt!r}")


# ----------------------------------------------------------------------
# machine format
# ----------------------------------------------------------------------


def _machine_pairs(r: RunReport) -> list[tuple[str, str]]:
    space = r.space
    out = [
        ("scenario.name", r.scenario.name),
        ("options.auto_alternatives", _bool(r.scenario.options.auto_alternatives)),
        ("options.bound_mc_samples", str(r.scenario.options.bound_mc_samples)),
        ("options.seed", str(r.scenario.options.seed)),
        ("space.levels", str(len(space.levels()))),
        ("space.nodes", str(len(space))),
        ("space.evidence", str(len(space.level_ids(0)))),
        ("space.conflicts", str(len(space.conflicts()))),
        ("alternatives.generated", _ids(r.alternatives)),
        ("propagation.edges_added", str(r.propagated_edges)),
        ("validation.ok", _bool(r.validation.ok)),
        ("interpretations.level", str(space.top_level())),
        ("interpretations.count", str(len(r.ranked.items))),
        ("interpretations.k", _num(r.ranked.k)),
        ("greedy.members", _ids(r.comparison.greedy.members)),
        ("strategies.agree", _bool(r.comparison.agree)),
        ("tree.unassociated", _ids(r.tree.unassociated)),
        ("bound.n", str(r.bound.n)),
        ("bound.sum", _num(r.bound.prob_sum)),
        ("bound.product", _num(r.bound.prob_product)),
        ("bound.value", _num(r.bound.value)),
        ("bound.worst_case", _num(r.bound.worst_case)),
    ]
    for level, claim_count in sorted(r.validation.fan_out.items()):
        out.append((f"validation.fan_out.{level}", str(claim_count)))
    for result in r.accrual:
        out.append((f"accrual.{result.level}.divisor", _num(result.divisor)))
        for hid in sorted(result.raw):
            out.append((f"accrual.{result.level}.{hid}.raw", _num(result.raw[hid])))
            out.append(
                (f"accrual.{result.level}.{hid}.normalized", _num(result.normalized[hid]))
            )
    for item in r.ranked.items:
        out.append((f"interpretation.{item.rank}.members", _ids(item.members)))
        out.append((f"interpretation.{item.rank}.raw", _num(item.raw or 0.0)))
        out.append(
            (f"interpretation.{item.rank}.normalized", _num(item.normalized or 0.0))
        )
    for level, ids in sorted(r.tree.selected.items()):
        out.append((f"tree.level.{level}", _ids(ids)))
    for eid, hid in sorted(r.tree.claimed.items()):
        out.append((f"tree.claimed.{eid}", hid))
    if r.bound.mc is not None:
        mc = r.bound.mc
        out += [
            ("bound.mc.samples", str(mc.samples)),
            ("bound.mc.hits", str(mc.hits)),
            ("bound.mc.rate", _num(mc.rate)),
            ("bound.mc.std_error", _num(mc.std_error)),
            ("bound.mc.seed", str(mc.seed)),
        ]
    return out


# ----------------------------------------------------------------------
# human format
# ----------------------------------------------------------------------


def _human_lines(r: RunReport) -> list[str]:
    space = r.space
    top = space.top_level()
    lines = [
        f"scenario: {r.scenario.name}",
        f"space: {len(space.levels())} levels, {len(space)} nodes "
        f"({len(space.level_ids(0))} evidence), {len(space.conflicts())} conflicts",
        f"alternatives generated: {_human_ids(r.alternatives)}",
        f"conflict edges propagated upward: {r.propagated_edges}",
        "",
        "validation: ok",
    ]
    for level, claim_count in sorted(r.validation.fan_out.items()):
        lines.append(f"  level {level} fan-out: {claim_count}")
    for result in r.accrual:
        lines += ["", f"accrual at level {result.level} (divisor {_num3(result.divisor)})"]
        width = max(len(hid) for hid in result.raw)
        for hid in sorted(result.raw):
            lines.append(
                f"  {hid:<{width}}  raw {_num3(result.raw[hid])}  "
                f"normalized {_num3(result.normalized[hid])}"
            )
    lines += ["", f"interpretations at level {top} (k = {_num3(r.ranked.k)})"]
    for item in r.ranked.items:
        lines.append(
            f"  rank {item.rank}  p = {_num3(item.normalized or 0.0)}  "
            f"{{{', '.join(item.members)}}}"
        )
    agree = "yes" if r.comparison.agree else "no"
    lines += [
        "",
        f"greedy pick: {{{', '.join(r.comparison.greedy.members)}}}",
        f"greedy agrees with ranked winner: {agree}",
        "",
        "winning tree",
    ]
    for level in sorted(r.tree.selected, reverse=True):
        lines.append(f"  level {level}: {_human_ids(r.tree.selected[level])}")
    for eid in sorted(r.tree.claimed):
        lines.append(f"  {eid} claimed by {r.tree.claimed[eid]}")
    lines.append(f"  unassociated evidence: {_human_ids(r.tree.unassociated)}")
    lines += [
        "",
        "bound on missing a better same-size interpretation",
        f"  n = {r.bound.n}, sum = {_num3(r.bound.prob_sum)}, "
        f"product = {_num3(r.bound.prob_product)}",
        f"  value = {_num3(r.bound.value)}, worst case = {_num3(r.bound.worst_case)}",
    ]
    if r.bound.mc is not None:
        mc = r.bound.mc
        lines.append(
            f"  measured region rate = {_num3(mc.rate)} "
            f"({mc.hits}/{mc.samples} hits, std error {_num3(mc.std_error)}, seed {mc.seed})"
        )
    return lines


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------


def _stage(name: str, fn: Callable[..., _T], *args: object) -> _T:
    try:
        return fn(*args)
    except PipelineError:
        raise
    except HypergridError as exc:
        raise PipelineError(name, exc) from exc


def _num(value: float) -> str:
    text = f"{value:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _num3(value: float) -> str:
    text = f"{value:.3f}"
    return "0.000" if text == "-0.000" else text


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _ids(ids: tuple[str, ...]) -> str:
    return ",".join(sorted(ids)) if ids else "(none)"


def _human_ids(ids: tuple[str, ...]) -> str:
    return ", ".join(sorted(ids)) if ids else "(none)"
