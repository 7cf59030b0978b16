"""Static PNG renderings of a pipeline run.

Everything draws through the object-oriented matplotlib API onto an Agg
canvas, so rendering works headless and never touches a display.  Three
views: the leveled space with its support and conflict edges, the ranked
interpretations as a bar chart, and the suboptimality bound against the
worst-case curve.
"""

from __future__ import annotations

from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .bound import BoundReport, worst_case_bound
from .pipeline import RunReport
from .resolution import RankedInterpretations
from .space import PROPAGATED, SHARED_SUPPORT, HypothesisSpace

_ASSERTED = "#4878cf"
_ALTERNATIVE = "#9ecae9"
_EVIDENCE = "#7f7f7f"
_CONFLICT = "#d65f5f"
_SUPPORT = "#bbbbbb"


def render_space(space: HypothesisSpace, path: str | Path) -> Path:
    """Draw the leveled graph: support edges solid, conflicts dashed arcs."""
    fig = Figure(figsize=(8, 1.8 + 1.6 * len(space.levels())))
    ax = fig.add_subplot(111)

    pos: dict[str, tuple[float, float]] = {}
    for level in space.levels():
        ids = space.level_ids(level)
        for i, hid in enumerate(ids):
            pos[hid] = ((i + 1) / (len(ids) + 1), float(level))

    for node in space.hypotheses():
        x, y = pos[node.hid]
        for sid in sorted(node.support):
            sx, sy = pos[sid]
            ax.plot([x, sx], [y, sy], color=_SUPPORT, linewidth=1.0, zorder=1)

    for edge in space.conflicts():
        (ax1, ay1), (ax2, ay2) = pos[edge.a], pos[edge.b]
        style = "--" if edge.reason == SHARED_SUPPORT else ":"
        alpha = 0.5 if edge.reason == PROPAGATED else 0.9
        ax.annotate(
            "",
            xy=(ax2, ay2),
            xytext=(ax1, ay1),
            arrowprops={
                "arrowstyle": "-",
                "connectionstyle": "arc3,rad=0.25",
                "color": _CONFLICT,
                "linestyle": style,
                "alpha": alpha,
            },
            zorder=2,
        )

    for node in space.hypotheses():
        x, y = pos[node.hid]
        if node.level == 0:
            color = _EVIDENCE
        elif node.is_alternative:
            color = _ALTERNATIVE
        else:
            color = _ASSERTED
        ax.scatter([x], [y], s=420, color=color, zorder=3)
        ax.annotate(
            node.hid, (x, y), ha="center", va="center", color="white", zorder=4
        )
        if node.accrued is not None:
            ax.annotate(
                f"{node.accrued:.3f}",
                (x, y),
                xytext=(0, -18),
                textcoords="offset points",
                ha="center",
                fontsize=8,
                color="#444444",
                zorder=4,
            )

    ax.set_xlim(0, 1)
    ax.set_ylim(-0.6, max(space.levels()) + 0.6)
    ax.set_yticks(space.levels())
    ax.set_yticklabels([f"level {m}" for m in space.levels()])
    ax.set_xticks([])
    for spine in ("top", "right", "bottom"):
        ax.spines[spine].set_visible(False)
    ax.set_title("hypothesis space")
    return _save(fig, path)


def render_interpretations(ranked: RankedInterpretations, path: str | Path) -> Path:
    """Ranked interpretations as horizontal bars of normalized probability."""
    fig = Figure(figsize=(8, 1.2 + 0.5 * len(ranked.items)))
    ax = fig.add_subplot(111)
    items = list(ranked.items)
    ys = range(len(items))
    values = [item.normalized or 0.0 for item in items]
    labels = [f"#{item.rank} {{{', '.join(item.members)}}}" for item in items]
    ax.barh(list(ys), values, color=_ASSERTED)
    for y, value in zip(ys, values):
        ax.annotate(f"{value:.3f}", (value, y), xytext=(4, 0),
                    textcoords="offset points", va="center", fontsize=8)
    ax.set_yticks(list(ys))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlim(0, 1)
    ax.set_xlabel("normalized probability")
    ax.set_title("ranked interpretations")
    return _save(fig, path)


def render_bound(report: BoundReport, path: str | Path) -> Path:
    """The worst-case curve over n with this run's bound marked on it."""
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot(111)
    # Start at n=2: the n=1 worst case is exactly zero, which a log axis
    # cannot show.
    ns = list(range(2, max(12, report.n) + 1))
    ax.plot(
        ns,
        [worst_case_bound(n) for n in ns],
        marker="o",
        markersize=3,
        color=_EVIDENCE,
        label="worst case over n",
    )
    if report.value > 0.0:
        ax.scatter([report.n], [report.value], color=_CONFLICT, zorder=3,
                   label=f"this run (n={report.n})")
    if report.mc is not None and report.mc.rate > 0.0:
        ax.scatter([report.n], [report.mc.rate], color=_ASSERTED, marker="x",
                   zorder=3, label="measured region rate")
    ax.set_yscale("log")
    ax.set_xlabel("interpretation size n")
    ax.set_ylabel("bound")
    ax.set_title("suboptimality bound")
    ax.legend()
    return _save(fig, path)


def render_run_figures(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write the three standard figures for a run; returns the paths."""
    out = Path(out_dir)
    return [
        render_space(report.space, out / "space.png"),
        render_interpretations(report.ranked, out / "interpretations.png"),
        render_bound(report.bound, out / "bound.png"),
    ]


def _save(fig: Figure, path: str | Path) -> Path:
    target = Path(path)
    FigureCanvasAgg(fig)
    fig.savefig(target, dpi=120, bbox_inches="tight")
    return target
