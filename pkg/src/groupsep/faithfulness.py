"""Group-level faithfulness: criteria, violation search, and classification.

With the micro graph itself serving as the ground-truth independence oracle
(two groups count as independent given conditioning groups S when every
cross pair of their members is separated given the union of S's blocks), a
faithfulness violation is a pair of groups that stays connected in the coarse
graph given S while the oracle calls it independent.

Violations are classified by how visible they are to constraint-based
discovery: ADJACENCY when the offending pair shares a coarse edge (provably
impossible under this oracle, kept as a checked class), LOCAL when a
two-edge coarse path through a middle group exhibits the independence pattern
that breaks collider/non-collider orientation, and NONLOCAL otherwise.

The two sufficient criteria certify, ahead of any search, that a grouping
produces no sigma-faithfulness violations. Both are stated for graphs without
undirected edges; the checks evaluate their conditions literally on any mixed
graph, but only directed/bidirected graphs carry the guarantee. Criterion 1
additionally forces the coarse graph to be acyclic; criterion 2 does not.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import AbstractSet, Mapping, Sequence

from .errors import NoSuchMacroEdge
from .graphs import EdgeKind, MixedGraph, NodeId
from .grouping import (
    GroupId,
    Partition,
    apparent_cause,
    coarsen,
    true_cause,
)
from .separation import SeparationKind, separated

__all__ = [
    "EdgeBoundary",
    "Violation",
    "ViolationClass",
    "FaithfulnessReport",
    "CriterionFailure",
    "CriterionReport",
    "edge_boundary",
    "check_criterion1",
    "check_criterion2",
    "find_faithfulness_violations",
    "classify_violation",
    "group_ci",
    "apparent_cause",
    "true_cause",
]

MacroEdge = tuple[GroupId, EdgeKind, GroupId]


@dataclass(frozen=True)
class EdgeBoundary:
    """The micro edges realizing one coarse edge, with their endpoint sets.

    ``micro_edges`` are (source-side, target-side) node pairs of the same
    type as the macro edge; the boundaries are their projections into the
    source and target groups.
    """

    macro_edge: MacroEdge
    micro_edges: frozenset[tuple[NodeId, NodeId]]
    source_boundary: frozenset[NodeId]
    target_boundary: frozenset[NodeId]


def edge_boundary(g: MixedGraph, p: Partition,
                  macro_edge: MacroEdge) -> EdgeBoundary:
    """Resolve a coarse edge to its crossing micro edges and boundaries."""
    p.require_partition_of(g)
    src_group, kind, dst_group = macro_edge
    kind = EdgeKind(kind) if not isinstance(kind, EdgeKind) else kind
    p.require_group(src_group)
    p.require_group(dst_group)
    if src_group == dst_group:
        raise NoSuchMacroEdge("coarse graphs have no self-edges")
    src, dst = p.block(src_group), p.block(dst_group)

    micro: set[tuple[NodeId, NodeId]] = set()
    if kind is EdgeKind.DIRECTED:
        micro = {(a, b) for a, b in g.directed if a in src and b in dst}
    else:
        pairs = g.bidirected if kind is EdgeKind.BIDIRECTED else g.undirected
        for a, b in pairs:
            if a in src and b in dst:
                micro.add((a, b))
            elif b in src and a in dst:
                micro.add((b, a))
    if not micro:
        raise NoSuchMacroEdge(
            f"no {kind.value} edge from {src_group!r} to {dst_group!r}")
    return EdgeBoundary(
        (src_group, kind, dst_group), frozenset(micro),
        frozenset(a for a, _ in micro), frozenset(b for _, b in micro))


# --- the independence oracle ----------------------------------------------

def group_ci(g: MixedGraph, p: Partition, kind: SeparationKind,
             group_y: GroupId, group_z: GroupId,
             cond: AbstractSet[GroupId]) -> bool:
    """Oracle independence of two groups given a set of conditioning groups.

    True iff every pair (y, z) across the two blocks is separated in the
    micro graph given the union of the conditioning blocks.
    """
    t = p.union(cond)
    return all(separated(g, y, z, t, kind)
               for y in g.sort_nodes(p.block(group_y))
               for z in g.sort_nodes(p.block(group_z)))


# --- faithfulness violation search ------------------------------------------

class ViolationClass(enum.Enum):
    ADJACENCY = "ADJACENCY"
    LOCAL = "LOCAL"
    NONLOCAL = "NONLOCAL"


@dataclass(frozen=True)
class Violation:
    """One faithfulness violation: the pair is macro-connected given the
    conditioning groups, yet the oracle declares it independent."""

    pair: tuple[GroupId, GroupId]
    conditioning: frozenset[GroupId]
    kind_used: SeparationKind
    category: ViolationClass


@dataclass(frozen=True)
class FaithfulnessReport:
    violations: tuple[Violation, ...]
    kind: SeparationKind
    max_cond_groups: int

    @property
    def is_empty(self) -> bool:
        return not self.violations


def _conditioning_sets(labels: Sequence[GroupId], skip: AbstractSet[GroupId],
                       max_size: int) -> list[frozenset[GroupId]]:
    rest = [l for l in labels if l not in skip]
    out: list[frozenset[GroupId]] = []
    for size in range(max_size + 1):
        out.extend(frozenset(c) for c in itertools.combinations(rest, size))
    return out


def find_faithfulness_violations(g: MixedGraph, p: Partition,
                                 kind: SeparationKind,
                                 max_cond_groups: int, *,
                                 jobs: int = 1) -> FaithfulnessReport:
    """Exhaustive violation search over group pairs and conditioning sets.

    Covers every unordered pair (Y, Z) and every S of at most
    ``max_cond_groups`` other groups; ``max_cond_groups`` may not exceed the
    group count minus two. Cells are independent, so ``jobs`` > 1 fans the
    scan out across threads; results merge in deterministic order either way.
    """
    p.require_partition_of(g)
    labels = p.labels
    if max_cond_groups < 0 or max_cond_groups > len(labels) - 2:
        raise ValueError(
            f"max_cond_groups must be between 0 and {len(labels) - 2}")
    coarse = coarsen(g, p)

    cells: list[tuple[GroupId, GroupId, frozenset[GroupId]]] = []
    for group_y, group_z in itertools.combinations(labels, 2):
        for cond in _conditioning_sets(labels, {group_y, group_z},
                                       max_cond_groups):
            cells.append((group_y, group_z, cond))

    def scan(cell: tuple[GroupId, GroupId, frozenset[GroupId]]
             ) -> Violation | None:
        group_y, group_z, cond = cell
        if separated(coarse, group_y, group_z, cond, kind):
            return None
        if not group_ci(g, p, kind, group_y, group_z, cond):
            return None
        category = _classify(g, p, coarse, kind, group_y, group_z)
        return Violation((group_y, group_z), cond, kind, category)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            found = list(pool.map(scan, cells))
    else:
        found = [scan(cell) for cell in cells]
    return FaithfulnessReport(tuple(v for v in found if v is not None),
                              kind, max_cond_groups)


def _classify(g: MixedGraph, p: Partition, coarse: MixedGraph,
              kind: SeparationKind, group_y: GroupId,
              group_z: GroupId) -> ViolationClass:
    if coarse.has_any_edge(group_y, group_z):
        return ViolationClass.ADJACENCY
    middles = [m for m in coarse.nodes
               if m not in (group_y, group_z)
               and coarse.has_any_edge(group_y, m)
               and coarse.has_any_edge(m, group_z)]
    for middle in middles:
        for s in _conditioning_sets(p.labels, {group_y, group_z, middle},
                                    len(p.labels) - 3):
            if (group_ci(g, p, kind, group_y, group_z, s)
                    and group_ci(g, p, kind, group_y, group_z,
                                 s | {middle})):
                return ViolationClass.LOCAL
    return ViolationClass.NONLOCAL


def classify_violation(g: MixedGraph, p: Partition,
                       violation: Violation) -> ViolationClass:
    """Classify a violation by the visibility of its footprint.

    ADJACENCY: the pair shares a coarse edge. LOCAL: some two-edge coarse
    path (Y, M, Z) admits a conditioning set S, disjoint from the triple,
    with the pair oracle-independent both given S and given S plus M.
    NONLOCAL: everything else.
    """
    group_y, group_z = violation.pair
    return _classify(g, p, coarsen(g, p), violation.kind_used,
                     group_y, group_z)


# --- sufficient criteria ---------------------------------------------------

@dataclass(frozen=True)
class CriterionFailure:
    """Locates the first condition a grouping fails.

    ``condition`` names the clause; for edge-pair clauses the witness holds
    the two coarse edges and, where applicable, the boundary node with no
    valid partner.
    """

    condition: str
    edges: tuple[MacroEdge, MacroEdge] | None = None
    node: NodeId | None = None


@dataclass(frozen=True)
class CriterionReport:
    passed: bool
    failing_condition: CriterionFailure | None = None


def _scc_containment_failure(g: MixedGraph,
                             p: Partition) -> CriterionFailure | None:
    """Condition (ii) of both criteria: no micro SCC straddles two blocks."""
    grp = p.group_of
    for comp in g.scc.components:
        groups = {grp[n] for n in comp}
        if len(groups) > 1:
            return CriterionFailure("ii", node=g.sort_nodes(comp)[0])
    return None


def _incident_edges(coarse: MixedGraph, group: GroupId
                    ) -> list[tuple[MacroEdge, str]]:
    """Coarse edges touching a group, each tagged with its mark at the group:
    'head' (arrow in, or bidirected), 'tail' (arrow out), 'none' (undirected).
    """
    out: list[tuple[MacroEdge, str]] = []
    for a, kind, b in coarse.typed_edges():
        if group not in (a, b):
            continue
        if kind is EdgeKind.DIRECTED:
            out.append(((a, kind, b), "head" if b == group else "tail"))
        elif kind is EdgeKind.BIDIRECTED:
            out.append(((a, kind, b), "head"))
        else:
            out.append(((a, kind, b), "none"))
    return out


def _boundary_at(g: MixedGraph, p: Partition, edge: MacroEdge,
                 group: GroupId) -> frozenset[NodeId]:
    bd = edge_boundary(g, p, edge)
    return bd.source_boundary if edge[0] == group else bd.target_boundary


def check_criterion1(g: MixedGraph, p: Partition) -> CriterionReport:
    """First sufficient condition for sigma-faithfulness of the coarse graph.

    (ii) every micro SCC sits inside one block; (iii) at every group Y, for
    each ordered pair of incident coarse edges, every boundary node of the
    first shares its SCC with some boundary node of the second. Passing
    additionally forces the coarse graph to be acyclic.
    """
    p.require_partition_of(g)
    failure = _scc_containment_failure(g, p)
    if failure is not None:
        return CriterionReport(False, failure)
    coarse = coarsen(g, p)
    for group in p.labels:
        incident = _incident_edges(coarse, group)
        for (e, _), (e2, _) in itertools.permutations(incident, 2):
            bd_first = _boundary_at(g, p, e, group)
            bd_second = _boundary_at(g, p, e2, group)
            second_sccs = {g.scc.assignment[n] for n in bd_second}
            for y in g.sort_nodes(bd_first):
                if g.scc.assignment[y] not in second_sccs:
                    return CriterionReport(
                        False, CriterionFailure("iii", (e, e2), y))
    assert coarse.is_acyclic, \
        "criterion 1 passed on a grouping with a cyclic coarse graph"
    return CriterionReport(True, None)


def _within_block_reach(g: MixedGraph, block: AbstractSet[NodeId]
                        ) -> Mapping[NodeId, frozenset[NodeId]]:
    """Directed reachability (including trivially) restricted to one block."""
    reach: dict[NodeId, frozenset[NodeId]] = {}
    for start in block:
        seen = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for child in g._children[node]:
                if child in block and child not in seen:
                    seen.add(child)
                    frontier.append(child)
        reach[start] = frozenset(seen)
    return reach


def check_criterion2(g: MixedGraph, p: Partition) -> CriterionReport:
    """Second sufficient condition, tuned for acyclic micro graphs.

    Incident coarse edge pairs at each group are split by their marks there:
    mediators (one arrow in, one out) need a within-block directed path from
    every entry boundary node to some exit boundary node, possibly trivial
    (iii-a right-directed, iii-b left-directed); confounders (both out) need
    a within-block common source with directed paths to the two boundaries
    (iii-c); colliders (both in) need a shared boundary node (iii-d).
    Undirected coarse edges fit none of the cases and fail as unclassifiable.
    Unlike criterion 1, passing does not make the coarse graph acyclic.
    """
    p.require_partition_of(g)
    failure = _scc_containment_failure(g, p)
    if failure is not None:
        return CriterionReport(False, failure)
    coarse = coarsen(g, p)
    for group in p.labels:
        incident = _incident_edges(coarse, group)
        reach = _within_block_reach(g, p.block(group))
        for (e, mark), (e2, mark2) in itertools.permutations(incident, 2):
            if mark == "none" or mark2 == "none":
                return CriterionReport(
                    False, CriterionFailure("iii", (e, e2)))
            bd_first = _boundary_at(g, p, e, group)
            bd_second = _boundary_at(g, p, e2, group)
            if mark == "head" and mark2 == "tail":
                witness = _mediator_gap(g, reach, bd_first, bd_second)
                if witness is not None:
                    return CriterionReport(
                        False, CriterionFailure("iii-a", (e, e2), witness))
            elif mark == "tail" and mark2 == "head":
                witness = _mediator_gap(g, reach, bd_second, bd_first)
                if witness is not None:
                    return CriterionReport(
                        False, CriterionFailure("iii-b", (e, e2), witness))
            elif mark == "tail" and mark2 == "tail":
                witness = _confounder_gap(g, reach, bd_first, bd_second)
                if witness is not None:
                    return CriterionReport(
                        False, CriterionFailure("iii-c", (e, e2), witness))
            else:
                if not bd_first & bd_second:
                    return CriterionReport(
                        False, CriterionFailure("iii-d", (e, e2)))
    return CriterionReport(True, None)


def _mediator_gap(g: MixedGraph, reach: Mapping[NodeId, frozenset[NodeId]],
                  entries: AbstractSet[NodeId],
                  exits: AbstractSet[NodeId]) -> NodeId | None:
    """First entry node with no within-block directed path to any exit."""
    for y in g.sort_nodes(entries):
        if not reach[y] & exits:
            return y
    return None


def _confounder_gap(g: MixedGraph, reach: Mapping[NodeId, frozenset[NodeId]],
                    bd_first: AbstractSet[NodeId],
                    bd_second: AbstractSet[NodeId]) -> NodeId | None:
    """First node of the first boundary with no within-block common source
    reaching it and the second boundary; trivial path legs count."""
    sources_hitting_second = [v for v, r in reach.items() if r & bd_second]
    for y in g.sort_nodes(bd_first):
        if not any(y in reach[v] for v in sources_hitting_second):
            return y
    return None
