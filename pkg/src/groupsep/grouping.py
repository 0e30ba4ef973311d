"""Partitions of a graph's nodes and the induced coarse (quotient) graphs.

A partition's blocks become the nodes of the coarse graph; a typed edge joins
two distinct blocks exactly when some micro edge of that type crosses them,
and within-block edges vanish. Walks project block-wise: maximal same-block
subwalks collapse to single coarse nodes and the crossing edges survive with
their types and orientations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import AbstractSet, Iterable, Mapping

from .errors import (
    NodeSetMismatch,
    NotAPartition,
    SelfEdge,
    SelfParent,
    UnknownEndpoint,
    UnknownGroup,
)
from .graphs import MixedGraph, NodeId, Walk, WalkStep, relatives
from .separation import SeparationKind, acyclify, separated

GroupId = str


@dataclass(frozen=True)
class Partition:
    """Ordered, disjoint, non-empty node blocks keyed by group label."""

    blocks: tuple[tuple[GroupId, frozenset[NodeId]], ...]

    def __post_init__(self) -> None:
        seen_groups: set[GroupId] = set()
        seen_nodes: set[NodeId] = set()
        for label, members in self.blocks:
            if label in seen_groups:
                raise NotAPartition(f"group label {label!r} repeats")
            seen_groups.add(label)
            if not members:
                raise NotAPartition(f"group {label!r} is empty")
            overlap = seen_nodes & members
            if overlap:
                raise NotAPartition(
                    f"node {min(overlap)!r} appears in more than one group")
            seen_nodes |= members

    @classmethod
    def from_mapping(cls, blocks: Mapping[GroupId, Iterable[NodeId]]
                     ) -> "Partition":
        return cls(tuple((label, frozenset(members))
                         for label, members in blocks.items()))

    @cached_property
    def labels(self) -> tuple[GroupId, ...]:
        return tuple(label for label, _ in self.blocks)

    @cached_property
    def as_dict(self) -> Mapping[GroupId, frozenset[NodeId]]:
        return dict(self.blocks)

    @cached_property
    def group_of(self) -> Mapping[NodeId, GroupId]:
        return {node: label for label, members in self.blocks
                for node in members}

    @cached_property
    def covered_nodes(self) -> frozenset[NodeId]:
        return frozenset(self.group_of)

    def block(self, label: GroupId) -> frozenset[NodeId]:
        try:
            return self.as_dict[label]
        except KeyError:
            raise UnknownGroup(f"no group {label!r} in partition") from None

    def require_group(self, label: GroupId) -> None:
        if label not in self.as_dict:
            raise UnknownGroup(f"no group {label!r} in partition")

    def require_partition_of(self, g: MixedGraph) -> None:
        if self.covered_nodes != frozenset(g.nodes):
            extra = self.covered_nodes - frozenset(g.nodes)
            missing = frozenset(g.nodes) - self.covered_nodes
            detail = []
            if extra:
                detail.append(f"covers unknown nodes {sorted(extra)}")
            if missing:
                detail.append(f"misses nodes {sorted(missing)}")
            raise NotAPartition("; ".join(detail))

    def union(self, groups: Iterable[GroupId]) -> frozenset[NodeId]:
        """All member nodes of the named groups."""
        out: set[NodeId] = set()
        for label in groups:
            out |= self.block(label)
        return frozenset(out)


def singleton_partition(g: MixedGraph) -> Partition:
    return Partition(tuple((n, frozenset((n,))) for n in g.nodes))


def coarsen(g: MixedGraph, p: Partition) -> MixedGraph:
    """The quotient graph of g under p.

    Coarse nodes are p's blocks in partition order; a typed edge joins two
    distinct blocks iff a crossing micro edge of that type exists.
    """
    p.require_partition_of(g)
    grp = p.group_of
    directed = {(grp[a], grp[b]) for a, b in g.directed if grp[a] != grp[b]}
    bidirected = {(grp[a], grp[b]) for a, b in g.bidirected
                  if grp[a] != grp[b]}
    undirected = {(grp[a], grp[b]) for a, b in g.undirected
                  if grp[a] != grp[b]}
    return MixedGraph(p.labels, frozenset(directed), frozenset(bidirected),
                      frozenset(undirected))


@dataclass(frozen=True)
class SegmentRepresentation:
    """A walk cut into maximal same-group subwalks.

    Consecutive segments belong to different groups and the connecting steps
    are exactly the walk's group-crossing edges, in walk order; concatenating
    segments and connectors reproduces the walk.
    """

    segments: tuple[tuple[GroupId, Walk], ...]
    connecting_steps: tuple[WalkStep, ...]


def segment_representation(g: MixedGraph, p: Partition,
                           walk: Walk) -> SegmentRepresentation:
    g.validate_walk(walk)
    p.require_partition_of(g)
    grp = p.group_of

    segments: list[tuple[GroupId, Walk]] = []
    connectors: list[WalkStep] = []
    start = 0
    for i, step in enumerate(walk.steps):
        if grp[step.start] != grp[step.end]:
            seg_nodes = walk.nodes[start:i + 1]
            seg_steps = walk.steps[start:i]
            segments.append((grp[seg_nodes[0]], Walk(seg_nodes, seg_steps)))
            connectors.append(step)
            start = i + 1
    seg_nodes = walk.nodes[start:]
    seg_steps = walk.steps[start:]
    segments.append((grp[seg_nodes[0]], Walk(seg_nodes, seg_steps)))
    return SegmentRepresentation(tuple(segments), tuple(connectors))


def coarsen_walk(g: MixedGraph, p: Partition, walk: Walk) -> Walk:
    """Project a micro walk onto the coarse graph, one node per segment."""
    rep = segment_representation(g, p, walk)
    grp = p.group_of
    coarse_nodes = tuple(label for label, _ in rep.segments)
    coarse_steps = tuple(
        WalkStep(step.kind, grp[step.start], grp[step.end], step.forward)
        for step in rep.connecting_steps)
    return Walk(coarse_nodes, coarse_steps)


def is_acyclic_partition(g: MixedGraph, p: Partition) -> bool:
    """True iff the coarse graph has no directed cycle."""
    return coarsen(g, p).is_acyclic


def maximally_acyclic_partition(g: MixedGraph) -> Partition:
    """The partition into strongly connected components.

    Its coarse graph is the condensation, hence acyclic; any refinement that
    splits an SCC would put a directed cycle into the coarse graph. Each block
    is labeled by its earliest-inserted member.
    """
    blocks = tuple((g.sort_nodes(comp)[0], comp)
                   for comp in g.scc.components)
    return Partition(blocks)


def graphs_equal(g1: MixedGraph, g2: MixedGraph) -> bool:
    """Same node set and identical typed edge sets, label for label."""
    return (frozenset(g1.nodes) == frozenset(g2.nodes)
            and g1.directed == g2.directed
            and frozenset(map(frozenset, g1.bidirected))
            == frozenset(map(frozenset, g2.bidirected))
            and frozenset(map(frozenset, g1.undirected))
            == frozenset(map(frozenset, g2.undirected)))


def p_equivalent(g1: MixedGraph, g2: MixedGraph, p: Partition) -> bool:
    """Do two graphs over one node set coarsen to the same graph under p?"""
    if frozenset(g1.nodes) != frozenset(g2.nodes):
        raise NodeSetMismatch("graphs are over different node sets")
    return graphs_equal(coarsen(g1, p), coarsen(g2, p))


@dataclass(frozen=True)
class CommuteReport:
    """Whether coarsening commutes with acyclification on one (g, p) pair.

    ``lhs`` is coarsen(acyclify(g), p), ``rhs`` is coarsen(g, p). The two are
    guaranteed equal whenever p is an acyclic partition of g; non-acyclic
    partitions can break the equality.
    """

    commutes: bool
    lhs: MixedGraph
    rhs: MixedGraph


def check_commute(g: MixedGraph, p: Partition) -> CommuteReport:
    lhs = coarsen(acyclify(g), p)
    rhs = coarsen(g, p)
    return CommuteReport(graphs_equal(lhs, rhs), lhs, rhs)


@dataclass(frozen=True)
class TransferReport:
    """Group-level versus exhaustive micro-level separation for one query.

    For directed mixed graphs (no undirected edges), macro separation implies
    that every micro pair is separated; the converse can fail.
    """

    macro_sep: bool
    micro_all_sep: bool


def macro_separation_transfers(g: MixedGraph, p: Partition, group_y: GroupId,
                               group_z: GroupId,
                               group_s: AbstractSet[GroupId],
                               kind: SeparationKind) -> TransferReport:
    p.require_partition_of(g)
    p.require_group(group_y)
    p.require_group(group_z)
    for label in group_s:
        p.require_group(label)
    if group_y == group_z or group_y in group_s or group_z in group_s:
        raise ValueError("query groups must be distinct and not conditioned on")

    coarse = coarsen(g, p)
    macro = separated(coarse, group_y, group_z, frozenset(group_s), kind)
    t = p.union(group_s)
    micro_all = all(separated(g, y, z, t, kind)
                    for y in g.sort_nodes(p.block(group_y))
                    for z in g.sort_nodes(p.block(group_z)))
    return TransferReport(macro, micro_all)


def graph_from_vscm(parents: Mapping[str, Iterable[str]],
                    noise_pairs: Iterable[tuple[str, str]] = (),
                    ) -> MixedGraph:
    """Graph of a vector-valued structural model.

    ``parents`` maps each variable to its functional parents (directed edges
    point parent to child); ``noise_pairs`` lists unordered pairs whose noise
    terms are dependent (bidirected edges). Cyclic parent structures are
    allowed; listing a variable as its own parent is not.
    """
    nodes = tuple(parents)
    known = set(nodes)
    directed: set[tuple[str, str]] = set()
    for child, pars in parents.items():
        for parent in pars:
            if parent == child:
                raise SelfParent(f"{child!r} lists itself as a parent")
            if parent not in known:
                raise UnknownEndpoint(f"unknown parent {parent!r}")
            directed.add((parent, child))
    bidirected: set[tuple[str, str]] = set()
    for a, b in noise_pairs:
        if a == b:
            raise SelfEdge(f"noise pair ({a!r}, {b!r}) is not a pair")
        for endpoint in (a, b):
            if endpoint not in known:
                raise UnknownEndpoint(f"unknown variable {endpoint!r}")
        bidirected.add((a, b))
    return MixedGraph(nodes, frozenset(directed), frozenset(bidirected))


def apparent_cause(coarse: MixedGraph, group_y: GroupId,
                   group_z: GroupId) -> bool:
    """Is there a nontrivial directed path from one group to the other
    in the coarse graph?"""
    coarse.require_node(group_y)
    coarse.require_node(group_z)
    if group_y == group_z:
        return False
    return group_z in relatives(coarse, group_y, "descendants")


def true_cause(g: MixedGraph, p: Partition, group_y: GroupId,
               group_z: GroupId) -> bool:
    """Is there a directed micro path from a member of one group to a member
    of the other?"""
    p.require_partition_of(g)
    blk_y = p.block(group_y)
    blk_z = p.block(group_z)
    if group_y == group_z:
        return False
    for y in g.sort_nodes(blk_y):
        if relatives(g, y, "descendants") & blk_z:
            return True
    return False
