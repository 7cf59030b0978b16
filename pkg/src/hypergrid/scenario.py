"""Scenario files: the line-oriented input format, its parser, and a generator.

A scenario is plain UTF-8 text.  The first non-blank line must be the
versioned header ``hypergrid-scenario v1``.  ``#`` starts a comment; blank
lines are ignored.  Content is grouped into sections:

    hypergrid-scenario v1

    [scenario]
    name = figure1

    [evidence]
    # id prior
    h1 0.7

    [hypotheses]
    # id level=<m> size=<model-size> support=<id,id,...>
    H1 level=1 size=2 support=h1,h2

    [conflicts]
    # a b  (one declared same-level incompatibility per line)
    H1 H2

    [options]
    auto_alternatives = true
    bound_mc_samples = 0
    seed = 0

``[scenario]`` with a name and a nonempty ``[evidence]`` section are
required; the other sections may be omitted.  Ids match
``[A-Za-z0-9_.+~-]+``.  Hypothesis levels must cover 1..max contiguously and
each support id must live exactly one level below its hypothesis.  The format
round-trips: parsing serialized text reproduces the scenario field for field.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import ScenarioError

HEADER = "hypergrid-scenario v1"

_ID = re.compile(r"[A-Za-z0-9_.+~-]+\Z")
_SECTIONS = ("scenario", "evidence", "hypotheses", "conflicts", "options")
_OPTION_KEYS = ("auto_alternatives", "bound_mc_samples", "seed")

# Generated levels use one of two claim patterns: disjoint partition blocks
# (fan-out 1, no conflicts) or an overlap ring with one reduced alternative
# per node (fan-out 3).  The ring needs at least this many nodes below it.
_RING_MIN = 3


@dataclass(frozen=True)
class EvidenceItem:
    eid: str
    prior: float


@dataclass(frozen=True)
class HypothesisItem:
    hid: str
    level: int
    model_size: int
    support: tuple[str, ...]


@dataclass(frozen=True)
class ScenarioOptions:
    auto_alternatives: bool = True
    bound_mc_samples: int = 0
    seed: int = 0


@dataclass(frozen=True)
class Scenario:
    name: str
    evidence: tuple[EvidenceItem, ...]
    hypotheses: tuple[HypothesisItem, ...] = ()
    declared_conflicts: tuple[tuple[str, str], ...] = ()
    options: ScenarioOptions = field(default_factory=ScenarioOptions)


# ----------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------


def load_scenario(path: str | Path) -> Scenario:
    """Read and parse a scenario file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text)


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text, reporting the offending line on any error."""
    name: str | None = None
    evidence: list[EvidenceItem] = []
    hypotheses: list[HypothesisItem] = []
    conflicts: list[tuple[str, str]] = []
    conflict_lines: list[int] = []
    options: dict[str, object] = {}
    item_lines: dict[str, int] = {}

    section: str | None = None
    header_seen = False
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != HEADER:
                raise ScenarioError(
                    f"expected header {HEADER!r}, got {line!r}", lineno
                )
            header_seen = True
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ScenarioError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise ScenarioError(f"content outside any section: {line!r}", lineno)
        if section == "scenario":
            key, value = _split_kv(line, lineno)
            if key != "name":
                raise ScenarioError(f"unknown scenario field {key!r}", lineno)
            _require_id(value, "scenario name", lineno)
            name = value
        elif section == "evidence":
            parts = line.split()
            if len(parts) != 2:
                raise ScenarioError(
                    f"evidence lines are '<id> <prior>', got {line!r}", lineno
                )
            eid, prior_text = parts
            _require_id(eid, "evidence id", lineno)
            _require_unused(eid, item_lines, lineno)
            prior = _parse_float(prior_text, "prior", lineno)
            if not 0.0 <= prior <= 1.0:
                raise ScenarioError(f"prior {prior} outside [0, 1]", lineno)
            evidence.append(EvidenceItem(eid, prior))
            item_lines[eid] = lineno
        elif section == "hypotheses":
            hypotheses.append(_parse_hypothesis(line, lineno, item_lines))
        elif section == "conflicts":
            parts = line.split()
            if len(parts) != 2:
                raise ScenarioError(
                    f"conflict lines are '<id> <id>', got {line!r}", lineno
                )
            conflicts.append((parts[0], parts[1]))
            conflict_lines.append(lineno)
        else:  # options
            key, value = _split_kv(line, lineno)
            if key not in _OPTION_KEYS:
                raise ScenarioError(f"unknown option {key!r}", lineno)
            if key in options:
                raise ScenarioError(f"option {key!r} given twice", lineno)
            options[key] = _parse_option(key, value, lineno)

    if not header_seen:
        raise ScenarioError(f"missing header {HEADER!r}", 1)
    if name is None:
        raise ScenarioError("missing [scenario] section with a name")
    if not evidence:
        raise ScenarioError("scenario has no evidence")

    scenario = Scenario(
        name=name,
        evidence=tuple(evidence),
        hypotheses=tuple(hypotheses),
        declared_conflicts=tuple(conflicts),
        options=ScenarioOptions(**options),  # type: ignore[arg-type]
    )
    _cross_validate(scenario, item_lines, conflict_lines)
    return scenario


def _parse_hypothesis(line: str, lineno: int, item_lines: dict[str, int]) -> HypothesisItem:
    parts = line.split()
    if len(parts) != 4:
        raise ScenarioError(
            "hypothesis lines are '<id> level=<m> size=<s> support=<id,...>', "
            f"got {line!r}",
            lineno,
        )
    hid = parts[0]
    _require_id(hid, "hypothesis id", lineno)
    _require_unused(hid, item_lines, lineno)
    fields: dict[str, str] = {}
    for part in parts[1:]:
        if "=" not in part:
            raise ScenarioError(f"expected key=value, got {part!r}", lineno)
        key, value = part.split("=", 1)
        fields[key] = value
    if sorted(fields) != ["level", "size", "support"]:
        raise ScenarioError(
            f"hypothesis needs exactly level=, size=, support=, got {sorted(fields)}",
            lineno,
        )
    level = _parse_int(fields["level"], "level", lineno)
    size = _parse_int(fields["size"], "size", lineno)
    if level < 1:
        raise ScenarioError(f"hypothesis level must be >= 1, got {level}", lineno)
    if size < 1:
        raise ScenarioError(f"size must be >= 1, got {size}", lineno)
    support = tuple(s for s in fields["support"].split(",") if s)
    if not support:
        raise ScenarioError("hypothesis support must be nonempty", lineno)
    for sid in support:
        _require_id(sid, "support id", lineno)
    if len(set(support)) != len(support):
        raise ScenarioError(f"duplicate ids in support {support}", lineno)
    if len(support) > size:
        raise ScenarioError(
            f"support has {len(support)} ids, exceeding size {size}", lineno
        )
    item_lines[hid] = lineno
    return HypothesisItem(hid, level, size, support)


def _cross_validate(
    scenario: Scenario, item_lines: dict[str, int], conflict_lines: list[int]
) -> None:
    level_of = {ev.eid: 0 for ev in scenario.evidence}
    for hyp in scenario.hypotheses:
        level_of[hyp.hid] = hyp.level
    declared_levels = sorted({h.level for h in scenario.hypotheses})
    if declared_levels and declared_levels != list(range(1, declared_levels[-1] + 1)):
        raise ScenarioError(
            f"hypothesis levels must cover 1..{declared_levels[-1]} contiguously, "
            f"got {declared_levels}"
        )
    for hyp in scenario.hypotheses:
        for sid in hyp.support:
            if sid not in level_of:
                raise ScenarioError(
                    f"unknown support id {sid!r}", item_lines[hyp.hid]
                )
            if level_of[sid] != hyp.level - 1:
                raise ScenarioError(
                    f"support {sid!r} lives at level {level_of[sid]}, "
                    f"but {hyp.hid!r} needs level {hyp.level - 1}",
                    item_lines[hyp.hid],
                )
    for (a, b), lineno in zip(scenario.declared_conflicts, conflict_lines):
        for cid in (a, b):
            if cid not in level_of:
                raise ScenarioError(f"unknown id {cid!r} in conflict", lineno)
        if a == b:
            raise ScenarioError(f"conflict pairs a node with itself ({a!r})", lineno)
        if level_of[a] != level_of[b]:
            raise ScenarioError(
                f"conflict joins different levels ({a!r} at {level_of[a]}, "
                f"{b!r} at {level_of[b]})",
                lineno,
            )


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical text for a scenario; parsing it back is the identity."""
    lines = [HEADER, "", "[scenario]", f"name = {scenario.name}", "", "[evidence]"]
    for ev in scenario.evidence:
        lines.append(f"{ev.eid} {ev.prior!r}")
    if scenario.hypotheses:
        lines += ["", "[hypotheses]"]
        for hyp in scenario.hypotheses:
            support = ",".join(hyp.support)
            lines.append(
                f"{hyp.hid} level={hyp.level} size={hyp.model_size} support={support}"
            )
    if scenario.declared_conflicts:
        lines += ["", "[conflicts]"]
        for a, b in scenario.declared_conflicts:
            lines.append(f"{a} {b}")
    opts = scenario.options
    lines += [
        "",
        "[options]",
        f"auto_alternatives = {'true' if opts.auto_alternatives else 'false'}",
        f"bound_mc_samples = {opts.bound_mc_samples}",
        f"seed = {opts.seed}",
        "",
    ]
    return "\n".join(lines)


# ----------------------------------------------------------------------
# generation
# ----------------------------------------------------------------------


def generate_random_scenario(
    levels: int, per_level_count: int, conflict_density: float, seed: int
) -> Scenario:
    """Random rule-conformant scenario, deterministic for a fixed seed.

    ``levels`` counts all levels including evidence, ``per_level_count`` is
    the evidence count (higher levels grow or shrink with the pattern drawn),
    and ``conflict_density`` in [0, 1] drives both the chance of an
    overlap-ring level and the chance of declared top-level conflicts.
    Every generated scenario passes validation after the standard pipeline
    preparation and runs through the whole pipeline: no hypothesis ever
    claims two conflicting children, so the winning interpretation always
    closes into a consistent tree.  Evidence priors are strictly positive
    and sum to 1.
    """
    if levels < 1:
        raise ScenarioError(f"levels must be >= 1, got {levels}")
    if per_level_count < 1:
        raise ScenarioError(f"per_level_count must be >= 1, got {per_level_count}")
    if not 0.0 <= conflict_density <= 1.0:
        raise ScenarioError(
            f"conflict_density must lie in [0, 1], got {conflict_density}"
        )
    if conflict_density > 0 and levels >= 2 and per_level_count < _RING_MIN:
        raise ScenarioError(
            f"conflict_density {conflict_density} needs at least {_RING_MIN} "
            f"evidence nodes, got {per_level_count}"
        )
    rng = np.random.Generator(np.random.PCG64(seed))

    weights = rng.uniform(0.05, 1.0, size=per_level_count)
    priors = weights / weights.sum()
    evidence = tuple(
        EvidenceItem(f"e{i + 1}", float(priors[i])) for i in range(per_level_count)
    )

    hypotheses: list[HypothesisItem] = []
    current = [ev.eid for ev in evidence]
    # Pairs of current-level ids that conflict (shared support below, or a
    # conflict propagated from further down).  Blocks drawn one level up
    # must never span such a pair, or the best tree cannot close.
    clashes: set[frozenset[str]] = set()
    for level in range(1, levels):
        # Rings stack overlapping supports, which only stays rule-clean
        # over a conflict-free level.
        use_ring = (
            not clashes
            and len(current) >= _RING_MIN
            and rng.random() < conflict_density
        )
        if use_ring:
            current, clashes = _ring_level(level, current, hypotheses)
        else:
            current, clashes = _partition_level(
                level, current, clashes, hypotheses, rng
            )

    conflicts: list[tuple[str, str]] = []
    if levels >= 2 and conflict_density > 0:
        support_of = {h.hid: set(h.support) for h in hypotheses}
        top = [h.hid for h in hypotheses if h.level == levels - 1]
        for i, a in enumerate(top):
            for b in top[i + 1 :]:
                if support_of[a] & support_of[b]:
                    continue
                if rng.random() < conflict_density * 0.25:
                    conflicts.append((a, b))

    name = f"random-L{levels}-C{per_level_count}-D{conflict_density!r}-S{seed}"
    return Scenario(
        name=name,
        evidence=evidence,
        hypotheses=tuple(hypotheses),
        declared_conflicts=tuple(conflicts),
        options=ScenarioOptions(auto_alternatives=True, bound_mc_samples=0, seed=seed),
    )


def _partition_level(
    level: int,
    below: list[str],
    below_clashes: set[frozenset[str]],
    out: list[HypothesisItem],
    rng: np.random.Generator,
) -> tuple[list[str], set[frozenset[str]]]:
    # Disjoint consecutive blocks: every node below is claimed exactly once.
    # A block stops early rather than swallow two conflicting nodes.
    created: list[str] = []
    claimant: dict[str, str] = {}
    i = 0
    j = 1
    while i < len(below):
        size = int(rng.integers(1, 4))
        block = [below[i]]
        i += 1
        while (
            i < len(below)
            and len(block) < size
            and all(frozenset((below[i], b)) not in below_clashes for b in block)
        ):
            block.append(below[i])
            i += 1
        hid = f"n{level}_{j}"
        out.append(HypothesisItem(hid, level, len(block), tuple(block)))
        created.append(hid)
        for child in block:
            claimant[child] = hid
        j += 1
    clashes = {
        frozenset((claimant[x], claimant[y]))
        for x, y in map(tuple, below_clashes)
        if claimant[x] != claimant[y]
    }
    return created, clashes


def _ring_level(
    level: int, below: list[str], out: list[HypothesisItem]
) -> tuple[list[str], set[frozenset[str]]]:
    # Overlap ring plus one reduced alternative per node below: each node is
    # claimed by two ring hypotheses and its own singleton, so the claim
    # count is a constant 3 and every reduced support already exists.
    created: list[str] = []
    r = len(below)
    for i in range(r):
        hid = f"n{level}_{i + 1}"
        out.append(HypothesisItem(hid, level, 2, (below[i], below[(i + 1) % r])))
        created.append(hid)
    for i in range(r):
        hid = f"n{level}_{r + i + 1}"
        out.append(HypothesisItem(hid, level, 2, (below[i],)))
        created.append(hid)
    # Shared support decides the clashes here; the level underneath a ring
    # is always conflict-free, so nothing propagates into it.
    support_of = {h.hid: set(h.support) for h in out if h.level == level}
    clashes = {
        frozenset((a, b))
        for a, b in combinations(created, 2)
        if support_of[a] & support_of[b]
    }
    return created, clashes


# ----------------------------------------------------------------------
# bundled scenarios
# ----------------------------------------------------------------------


def bundled_scenario_names() -> list[str]:
    """Names of the scenarios shipped inside the package."""
    root = resources.files(__package__) / "scenarios"
    return sorted(
        entry.name.removesuffix(".scenario")
        for entry in root.iterdir()
        if entry.name.endswith(".scenario")
    )


def load_bundled_scenario(name: str) -> Scenario:
    """Parse a scenario shipped inside the package, by bare name."""
    resource = resources.files(__package__) / "scenarios" / f"{name}.scenario"
    try:
        text = resource.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as exc:
        raise ScenarioError(f"no bundled scenario named {name!r}") from exc
    return parse_scenario(text)


# ----------------------------------------------------------------------
# small parse helpers
# ----------------------------------------------------------------------


def _split_kv(line: str, lineno: int) -> tuple[str, str]:
    if "=" not in line:
        raise ScenarioError(f"expected 'key = value', got {line!r}", lineno)
    key, value = line.split("=", 1)
    return key.strip(), value.strip()


def _require_id(token: str, what: str, lineno: int) -> None:
    if not _ID.fullmatch(token):
        raise ScenarioError(f"bad {what} {token!r}", lineno)


def _require_unused(token: str, item_lines: dict[str, int], lineno: int) -> None:
    if token in item_lines:
        raise ScenarioError(
            f"id {token!r} already used on line {item_lines[token]}", lineno
        )


def _parse_float(token: str, what: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ScenarioError(f"bad {what} {token!r}", lineno) from None


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ScenarioError(f"bad {what} {token!r}", lineno) from None


def _parse_option(key: str, value: str, lineno: int) -> object:
    if key == "auto_alternatives":
        if value not in ("true", "false"):
            raise ScenarioError(
                f"auto_alternatives must be true or false, got {value!r}", lineno
            )
        return value == "true"
    number = _parse_int(value, key, lineno)
    if key == "bound_mc_samples" and number < 0:
        raise ScenarioError(f"bound_mc_samples must be >= 0, got {number}", lineno)
    return number
