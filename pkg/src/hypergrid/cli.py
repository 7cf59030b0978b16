"""Command line front end.

Four subcommands: ``run`` executes the full pipeline over a scenario and
prints the report (optionally also writing the report plus rendered figures
into a directory), ``validate`` checks a scenario's space and reports rule
violations, ``bound`` computes the suboptimality bound for a bare probability
list, and ``gen`` emits a random rule-conformant scenario.

Scenario arguments are file paths; a bare name with no matching file falls
back to the bundled scenarios (``hypergrid run figure1``).  Seeds resolve in
the order: ``--seed`` flag, then the ``HYPERGRID_SEED`` environment variable,
then the scenario's own options.

Exit codes: 0 success, 1 validation failure or engine error, 2 parse or I/O
error (argparse uses 2 for bad invocations as well).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bound import BoundReport, suboptimality_bound, with_monte_carlo
from .errors import HypergridError, ScenarioError
from .pipeline import _num, _num3, emit_report, prepare_space, run_pipeline
from .scenario import (
    Scenario,
    bundled_scenario_names,
    generate_random_scenario,
    load_bundled_scenario,
    load_scenario,
    serialize_scenario,
)

_ENV_SEED = "HYPERGRID_SEED"


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HypergridError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypergrid",
        description="Conflict resolution over leveled hypothesis spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline over a scenario")
    run.add_argument("scenario", help="scenario file path or bundled name")
    run.add_argument(
        "--format", choices=("human", "machine"), default="human", dest="fmt"
    )
    run.add_argument(
        "--mc-samples",
        type=int,
        default=None,
        help="Monte Carlo samples for the bound (overrides the scenario option)",
    )
    run.add_argument("--seed", type=int, default=None)
    run.add_argument(
        "--out",
        default=None,
        metavar="DIR",
        help="also write report.txt and rendered figures into DIR",
    )
    run.set_defaults(handler=_cmd_run)

    validate = sub.add_parser("validate", help="check a scenario's space")
    validate.add_argument("scenario", help="scenario file path or bundled name")
    validate.set_defaults(handler=_cmd_validate)

    bound = sub.add_parser("bound", help="suboptimality bound for a probability list")
    bound.add_argument(
        "--probs", required=True, help="comma-separated probabilities, e.g. 0.2,0.3"
    )
    bound.add_argument("--mc-samples", type=int, default=0)
    bound.add_argument("--seed", type=int, default=None)
    bound.add_argument(
        "--format", choices=("human", "machine"), default="human", dest="fmt"
    )
    bound.set_defaults(handler=_cmd_bound)

    gen = sub.add_parser("gen", help="emit a random rule-conformant scenario")
    gen.add_argument("--levels", type=int, required=True)
    gen.add_argument("--count", type=int, required=True, help="evidence node count")
    gen.add_argument("--density", type=float, required=True, help="conflict density in [0,1]")
    gen.add_argument("--seed", type=int, default=None)
    gen.set_defaults(handler=_cmd_gen)

    return parser


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    report = run_pipeline(scenario, mc_samples=args.mc_samples, seed=_seed(args.seed))
    text = emit_report(report, fmt=args.fmt)
    print(text, end="")
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / "report.txt"
        report_path.write_text(text, encoding="utf-8")
        # File list goes to stderr so stdout stays a clean report.
        from .figures import render_run_figures

        written = [report_path] + render_run_figures(report, out_dir)
        for path in written:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    space, created, propagated = prepare_space(scenario)
    result = space.validate()
    if result.ok:
        fan = ", ".join(f"level {m}: {a}" for m, a in sorted(result.fan_out.items()))
        print(f"ok: {len(space)} nodes, {len(space.conflicts())} conflicts"
              + (f", fan-out {fan}" if fan else ""))
        if created:
            print(f"generated alternatives: {', '.join(created)}")
        if propagated:
            print(f"propagated conflict edges: {propagated}")
        return 0
    for violation in result.violations:
        print(f"violation [{violation.rule}]: {violation.message}")
    return 1


def _cmd_bound(args: argparse.Namespace) -> int:
    try:
        probs = [float(tok) for tok in args.probs.split(",") if tok.strip()]
    except ValueError:
        raise ScenarioError(f"--probs must be comma-separated numbers, got {args.probs!r}") from None
    report = suboptimality_bound(probs)
    if args.mc_samples > 0:
        report = with_monte_carlo(report, args.mc_samples, _seed(args.seed) or 0)
    print(_format_bound(report, args.fmt), end="")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    seed = _seed(args.seed)
    scenario = generate_random_scenario(
        levels=args.levels,
        per_level_count=args.count,
        conflict_density=args.density,
        seed=0 if seed is None else seed,
    )
    print(serialize_scenario(scenario), end="")
    return 0


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------


def _load(name_or_path: str) -> Scenario:
    path = Path(name_or_path)
    if path.exists():
        return load_scenario(path)
    if "/" not in name_or_path and name_or_path in bundled_scenario_names():
        return load_bundled_scenario(name_or_path)
    raise ScenarioError(
        f"no such scenario file or bundled name: {name_or_path!r} "
        f"(bundled: {', '.join(bundled_scenario_names())})"
    )


def _seed(flag_value: int | None) -> int | None:
    """--seed beats HYPERGRID_SEED beats whatever the scenario carries."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(_ENV_SEED)
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise ScenarioError(f"{_ENV_SEED} must be an integer, got {env!r}") from None


def _format_bound(report: BoundReport, fmt: str) -> str:
    if fmt == "machine":
        pairs = [
            ("bound.n", str(report.n)),
            ("bound.product", _num(report.prob_product)),
            ("bound.sum", _num(report.prob_sum)),
            ("bound.value", _num(report.value)),
            ("bound.worst_case", _num(report.worst_case)),
        ]
        if report.mc is not None:
            mc = report.mc
            pairs += [
                ("bound.mc.hits", str(mc.hits)),
                ("bound.mc.rate", _num(mc.rate)),
                ("bound.mc.samples", str(mc.samples)),
                ("bound.mc.seed", str(mc.seed)),
                ("bound.mc.std_error", _num(mc.std_error)),
            ]
        return "".join(f"{k} = {v}\n" for k, v in sorted(pairs))
    lines = [
        f"n = {report.n}, sum = {_num3(report.prob_sum)}, "
        f"product = {_num3(report.prob_product)}",
        f"bound = {_num3(report.value)}, worst case = {_num3(report.worst_case)}",
    ]
    if report.mc is not None:
        mc = report.mc
        lines.append(
            f"measured region rate = {_num3(mc.rate)} "
            f"({mc.hits}/{mc.samples} hits, std error {_num3(mc.std_error)}, seed {mc.seed})"
        )
    return "".join(line + "\n" for line in lines)


if __name__ == "__main__":
    raise SystemExit(main())
