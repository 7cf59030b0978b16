"""Leveled hypothesis graph with explicit conflict bookkeeping.

Level 0 holds raw evidence nodes carrying prior probabilities; every higher
level holds hypotheses whose support comes from nodes exactly one level below.
Three structural rules govern the graph:

1. two same-level hypotheses that claim a common support node are in
   conflict, and the conflict edge is recorded the moment it appears;
2. for every such conflict between directly asserted hypotheses, reduced
   alternatives claiming only the unshared support must exist, so that every
   consistent reading of the evidence is representable;
3. no two hypotheses at one level may claim identical support sets.

Conflicts may also be declared outright (incompatibilities that have nothing
to do with shared support), and all conflicts are propagated upward so that a
consistent top level implies consistency at every level below it.

Construction is single-writer.  Once ``validate`` has succeeded the space is
treated as read-only by every downstream module; any mutation clears the
recorded per-level fan-out and forces revalidation.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass, field

from .errors import SpaceError

# Conflict edge reasons.
SHARED_SUPPORT = "shared-support"
DOMAIN_DECLARED = "domain-declared"
PROPAGATED = "propagated"

_TRAILING_DIGITS = re.compile(r"(.*?)(\d+)\Z")


@dataclass
class Hypothesis:
    """One node of the space: evidence at level 0, a hypothesis above it.

    ``model_size`` is the number of support slots the underlying model has;
    ``len(support)`` of them are observed.  ``accrued`` is the node's current
    probability: the prior for evidence, and the normalized accrual once the
    corresponding level has been computed.  ``alternative_of`` records the
    parent id when the node was generated as a reduced alternative.
    """

    hid: str
    level: int
    model_size: int
    support: frozenset[str]
    prior: float | None = None
    accrued: float | None = None
    alternative_of: str | None = None

    @property
    def observed(self) -> int:
        return len(self.support)

    @property
    def is_alternative(self) -> bool:
        return self.alternative_of is not None


@dataclass(frozen=True)
class ConflictEdge:
    """Unordered same-level conflict between ``a`` and ``b`` (a < b).

    ``source`` carries the lower-level pair an upward-propagated edge came
    from; it is None for the other two reasons.
    """

    a: str
    b: str
    level: int
    reason: str
    source: tuple[str, str] | None = None

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass(frozen=True)
class RuleViolation:
    rule: str
    message: str


@dataclass
class ValidationReport:
    ok: bool
    fan_out: dict[int, int] = field(default_factory=dict)
    violations: list[RuleViolation] = field(default_factory=list)


class HypothesisSpace:
    """Mutable container for the leveled graph and its conflict edges."""

    def __init__(self) -> None:
        self._nodes: dict[str, Hypothesis] = {}
        self._levels: dict[int, list[str]] = {}
        self._conflicts: dict[tuple[str, str], ConflictEdge] = {}
        # Per-level claim count a_m, recorded by a fully successful validate().
        self.fan_out: dict[int, int] | None = None

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def __contains__(self, hid: str) -> bool:
        return hid in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def node(self, hid: str) -> Hypothesis:
        try:
            return self._nodes[hid]
        except KeyError:
            raise SpaceError(f"unknown hypothesis id {hid!r}") from None

    def levels(self) -> list[int]:
        return sorted(self._levels)

    def top_level(self) -> int:
        if not self._levels:
            raise SpaceError("space is empty")
        return max(self._levels)

    def level_ids(self, level: int) -> list[str]:
        """Ids at a level, sorted for deterministic downstream iteration."""
        return sorted(self._levels.get(level, ()))

    def hypotheses(self) -> list[Hypothesis]:
        return [self._nodes[hid] for hid in sorted(self._nodes)]

    def conflicts(self) -> list[ConflictEdge]:
        return [self._conflicts[k] for k in sorted(self._conflicts)]

    def conflicts_at(self, level: int) -> list[ConflictEdge]:
        return [e for e in self.conflicts() if e.level == level]

    def conflict_edge(self, a: str, b: str) -> ConflictEdge | None:
        return self._conflicts.get((a, b) if a < b else (b, a))

    def in_conflict(self, a: str, b: str) -> bool:
        return self.conflict_edge(a, b) is not None

    def conflict_neighbors(self, level: int) -> dict[str, set[str]]:
        """Same-level conflict adjacency, one entry per node at the level."""
        adj: dict[str, set[str]] = {hid: set() for hid in self._levels.get(level, ())}
        for edge in self._conflicts.values():
            if edge.level == level:
                adj[edge.a].add(edge.b)
                adj[edge.b].add(edge.a)
        return adj

    def claimants(self, hid: str) -> list[str]:
        """Ids one level up whose support includes ``hid``, sorted."""
        node = self.node(hid)
        above = self._levels.get(node.level + 1, ())
        return sorted(p for p in above if hid in self._nodes[p].support)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def add_hypothesis(
        self,
        level: int,
        model_size: int,
        support: Iterable[str] = (),
        prior: float | None = None,
        hid: str | None = None,
        alternative_of: str | None = None,
    ) -> str:
        """Insert a node, auto-recording shared-support conflicts (rule 1).

        Evidence (level 0) must carry a prior and no support; everything above
        must carry nonempty support drawn from the level below and no prior.
        Returns the node id (generated when ``hid`` is omitted).  Ids are
        never reused.
        """
        if level < 0:
            raise SpaceError(f"level must be >= 0, got {level}")
        if model_size < 1:
            raise SpaceError(f"model_size must be >= 1, got {model_size}")
        support_set = frozenset(support)  # type: ignore[arg-type]
        if level == 0:
            if support_set:
                raise SpaceError("evidence nodes (level 0) take no support")
            if prior is None:
                raise SpaceError("evidence nodes require a prior probability")
            if not 0.0 <= prior <= 1.0:
                raise SpaceError(f"prior must lie in [0, 1], got {prior}")
        else:
            if prior is not None:
                raise SpaceError("only evidence nodes (level 0) take a prior")
            if not support_set:
                raise SpaceError(f"a hypothesis at level {level} needs nonempty support")
            for sid in sorted(support_set):
                if sid not in self._nodes:
                    raise SpaceError(f"unknown support id {sid!r}")
                found = self._nodes[sid].level
                if found != level - 1:
                    raise SpaceError(
                        f"support {sid!r} lives at level {found}, expected level {level - 1}"
                    )
            if len(support_set) > model_size:
                raise SpaceError(
                    f"support has {len(support_set)} nodes, exceeding model_size {model_size}"
                )
            if self.find_by_support(level, support_set) is not None:
                raise SpaceError(
                    f"a hypothesis at level {level} already claims exactly "
                    f"{sorted(support_set)}"
                )
        if hid is None:
            hid = self._fresh_id("n")
        elif hid in self._nodes:
            raise SpaceError(f"hypothesis id {hid!r} already in use")
        elif not hid or hid != hid.strip():
            raise SpaceError(f"bad hypothesis id {hid!r}")

        node = Hypothesis(
            hid=hid,
            level=level,
            model_size=model_size,
            support=support_set,
            prior=prior,
            accrued=prior if level == 0 else None,
            alternative_of=alternative_of,
        )
        self._nodes[hid] = node
        self._levels.setdefault(level, []).append(hid)
        # Rule 1: claiming a node someone else already claims is a conflict.
        if support_set:
            for peer_id in self._levels[level]:
                if peer_id == hid:
                    continue
                if support_set & self._nodes[peer_id].support:
                    self._add_edge(hid, peer_id, level, SHARED_SUPPORT)
        self.fan_out = None
        return hid

    def declare_conflict(self, a: str, b: str) -> ConflictEdge:
        """Record a domain incompatibility between two same-level nodes.

        Idempotent: if any edge already joins the pair it is returned
        unchanged, whatever its reason.
        """
        na, nb = self.node(a), self.node(b)
        if a == b:
            raise SpaceError(f"a hypothesis cannot conflict with itself ({a!r})")
        if na.level != nb.level:
            raise SpaceError(
                f"conflicts join same-level nodes; {a!r} is at level {na.level}, "
                f"{b!r} at level {nb.level}"
            )
        existing = self.conflict_edge(a, b)
        if existing is not None:
            return existing
        edge = self._add_edge(a, b, na.level, DOMAIN_DECLARED)
        self.fan_out = None
        return edge

    def generate_alternatives(self, edge: ConflictEdge) -> set[str]:
        """Apply rule 2 to one shared-support conflict.

        For each endpoint, the reduced support (its own support minus the
        shared part) must be represented: an existing node with exactly that
        support is reused (rule 3), otherwise a new alternative is created
        with the endpoint's model_size.  An empty reduced set contributes
        nothing.  Returns the created-or-reused ids.
        """
        current = self._conflicts.get(edge.pair)
        if current is None:
            raise SpaceError(f"edge {edge.pair} is not part of this space")
        if current.reason != SHARED_SUPPORT:
            raise SpaceError(
                f"alternatives are generated for shared-support conflicts only, "
                f"edge {edge.pair} is {current.reason}"
            )
        na, nb = self.node(current.a), self.node(current.b)
        shared = na.support & nb.support
        out: set[str] = set()
        for parent in (na, nb):
            reduced = parent.support - shared
            if not reduced:
                continue
            existing = self.find_by_support(parent.level, reduced)
            if existing is not None:
                out.add(existing)
                continue
            new_id = self.add_hypothesis(
                level=parent.level,
                model_size=parent.model_size,
                support=reduced,
                hid=self._alternative_id(parent.hid),
                alternative_of=parent.hid,
            )
            out.add(new_id)
        return out

    def generate_all_alternatives(self) -> set[str]:
        """Run rule 2 over every shared-support conflict between asserted nodes.

        Alternatives never spawn further alternatives: only edges whose two
        endpoints are directly asserted are processed, in (level, pair) order,
        and the pass repeats until neither a node nor an edge is added.
        Returns the ids of the nodes this call created.
        """
        preexisting = set(self._nodes)
        created: set[str] = set()
        while True:
            before_nodes = len(self._nodes)
            before_edges = len(self._conflicts)
            pending = sorted(
                (e.level, e.a, e.b)
                for e in self._conflicts.values()
                if e.reason == SHARED_SUPPORT
                and not self._nodes[e.a].is_alternative
                and not self._nodes[e.b].is_alternative
            )
            for _, a, b in pending:
                edge = self._conflicts[(a, b)]
                for hid in self.generate_alternatives(edge):
                    if hid not in preexisting:
                        created.add(hid)
            if len(self._nodes) == before_nodes and len(self._conflicts) == before_edges:
                return created

    def propagate_conflicts_upward(self) -> int:
        """Lift every conflict to all claiming pairs one level up, to fixpoint.

        A level-m edge (a, b) induces an edge between every distinct pair
        (A, B) above with a in support(A) and b in support(B).  One ascending
        sweep reaches the fixpoint because new edges always land one level
        higher than the edge that produced them.  Returns the number of edges
        added; running again on an unchanged space returns 0.
        """
        added = 0
        for m in self.levels()[:-1]:
            edges_here = [e for e in self.conflicts() if e.level == m]
            for edge in edges_here:
                for pa in self.claimants(edge.a):
                    for pb in self.claimants(edge.b):
                        if pa == pb or self.conflict_edge(pa, pb) is not None:
                            continue
                        self._add_edge(pa, pb, m + 1, PROPAGATED, source=edge.pair)
                        added += 1
        if added:
            self.fan_out = None
        return added

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Check rules 1-3 and per-level claim-count constancy.

        Violations are report entries, never exceptions.  On full success the
        per-level fan-out a_m is recorded on the space, which is what arms the
        accrual module; any failure leaves the space unvalidated.
        """
        violations: list[RuleViolation] = []
        fan: dict[int, int] = {}
        levels = self.levels()

        for level in levels:
            ids = self.level_ids(level)
            # Rule 3: support sets are unique within a level (above level 0,
            # where every node has the same empty support by construction).
            if level > 0:
                seen: dict[frozenset[str], str] = {}
                for hid in ids:
                    sup = self._nodes[hid].support
                    if sup in seen:
                        violations.append(
                            RuleViolation(
                                "rule3",
                                f"{seen[sup]!r} and {hid!r} at level {level} claim "
                                f"identical support {sorted(sup)}",
                            )
                        )
                    else:
                        seen[sup] = hid
            # Rule 1: overlapping support without a recorded conflict.
            for i, a in enumerate(ids):
                for b in ids[i + 1 :]:
                    if self._nodes[a].support & self._nodes[b].support:
                        if self.conflict_edge(a, b) is None:
                            violations.append(
                                RuleViolation(
                                    "rule1",
                                    f"{a!r} and {b!r} share support but no conflict "
                                    f"edge is recorded",
                                )
                            )

        # Rule 2: reduced alternatives exist for every shared-support conflict
        # between asserted nodes (alternatives are themselves exempt).
        for edge in self.conflicts():
            if edge.reason != SHARED_SUPPORT:
                continue
            na, nb = self._nodes[edge.a], self._nodes[edge.b]
            if na.is_alternative or nb.is_alternative:
                continue
            shared = na.support & nb.support
            for parent in (na, nb):
                reduced = parent.support - shared
                if reduced and self.find_by_support(parent.level, reduced) is None:
                    violations.append(
                        RuleViolation(
                            "rule2",
                            f"no hypothesis at level {parent.level} claims the reduced "
                            f"support {sorted(reduced)} of {parent.hid!r} "
                            f"(conflict {edge.pair})",
                        )
                    )

        # Claim counts: every node of a level must be claimed by the same
        # number of nodes above (the level's fan-out a_m).
        for m in levels[:-1]:
            counts = {hid: len(self.claimants(hid)) for hid in self.level_ids(m)}
            distinct = sorted(set(counts.values()))
            if len(distinct) != 1:
                detail = ", ".join(f"{h}:{c}" for h, c in sorted(counts.items()))
                violations.append(
                    RuleViolation(
                        "fan-out",
                        f"claim counts at level {m} are not constant ({detail})",
                    )
                )
            else:
                fan[m] = distinct[0]

        ok = not violations
        self.fan_out = dict(fan) if ok else None
        return ValidationReport(ok=ok, fan_out=fan, violations=violations)

    # ------------------------------------------------------------------
    # internals
    # ------------------------------------------------------------------

    def find_by_support(self, level: int, support: frozenset[str]) -> str | None:
        """Id of the level's node claiming exactly ``support``, if any."""
        for hid in self._levels.get(level, ()):
            if self._nodes[hid].support == support:
                return hid
        return None

    def _add_edge(
        self,
        a: str,
        b: str,
        level: int,
        reason: str,
        source: tuple[str, str] | None = None,
    ) -> ConflictEdge:
        key = (a, b) if a < b else (b, a)
        existing = self._conflicts.get(key)
        if existing is not None:
            return existing
        edge = ConflictEdge(key[0], key[1], level, reason, source)
        self._conflicts[key] = edge
        return edge

    def _fresh_id(self, stem: str) -> str:
        k = 1
        while f"{stem}{k}" in self._nodes:
            k += 1
        return f"{stem}{k}"

    def _alternative_id(self, parent_hid: str) -> str:
        # Continue the parent's numeric naming (H1, H2 -> H3) so generated
        # alternatives slot into the same id family; digitless parents get a
        # dash-separated counter.
        m = _TRAILING_DIGITS.fullmatch(parent_hid)
        stem = m.group(1) if m else parent_hid + "-"
        return self._fresh_id(stem)


def validate_space(space: HypothesisSpace) -> ValidationReport:
    """Module-level alias for :meth:`HypothesisSpace.validate`."""
    return space.validate()
