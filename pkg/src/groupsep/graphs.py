"""Immutable mixed graphs: nodes, three edge sets, walks, SCCs, path enumeration.

A mixed graph holds directed, bidirected, and undirected edges over a fixed,
ordered node set. Between one node pair up to four distinct edges may coexist
(one per type and, for directed edges, one per direction). Self-edges are
rejected everywhere. Graph values never mutate after construction, so they are
safe to share across threads and to use as dict keys.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import (
    DuplicateLabel,
    GraphTooLarge,
    InvalidWalk,
    SelfEdge,
    UnknownEndpoint,
    UnknownNode,
)

# Node identity is the label string itself; each graph assigns labels a stable
# total order (insertion order) used for every deterministic iteration below.
NodeId = str


class EdgeKind(enum.Enum):
    """The three edge types a mixed graph can hold."""

    DIRECTED = "->"
    BIDIRECTED = "<->"
    UNDIRECTED = "--"


# Deterministic tie-break rank for traversals between the same node pair:
# directed-along, directed-against, bidirected, undirected.
_STEP_RANK = {
    (EdgeKind.DIRECTED, True): 0,
    (EdgeKind.DIRECTED, False): 1,
    (EdgeKind.BIDIRECTED, True): 2,
    (EdgeKind.UNDIRECTED, True): 3,
}


@dataclass(frozen=True)
class WalkStep:
    """One traversed edge of a walk.

    ``start`` and ``end`` are the walk-order endpoints. ``forward`` records
    the traversal orientation: for a directed edge it is True when the stored
    edge is ``start -> end`` (arrow traversed tail to head) and False when the
    stored edge is ``end -> start``. Bidirected and undirected steps always
    carry ``forward=True`` since they have no stored direction.
    """

    kind: EdgeKind
    start: NodeId
    end: NodeId
    forward: bool = True

    def __post_init__(self) -> None:
        if self.start == self.end:
            raise SelfEdge(f"walk step with equal endpoints {self.start!r}")
        if self.kind is not EdgeKind.DIRECTED and not self.forward:
            raise InvalidWalk(
                f"{self.kind.value} step cannot be traversed against an arrow")

    @property
    def head_at_start(self) -> bool:
        """True when this edge has an arrowhead at the step's start node."""
        if self.kind is EdgeKind.BIDIRECTED:
            return True
        return self.kind is EdgeKind.DIRECTED and not self.forward

    @property
    def head_at_end(self) -> bool:
        """True when this edge has an arrowhead at the step's end node."""
        if self.kind is EdgeKind.BIDIRECTED:
            return True
        return self.kind is EdgeKind.DIRECTED and self.forward

    def reversed(self) -> "WalkStep":
        return WalkStep(self.kind, self.end, self.start,
                        True if self.kind is not EdgeKind.DIRECTED
                        else not self.forward)

    @property
    def rank(self) -> int:
        return _STEP_RANK[(self.kind, self.forward)]


@dataclass(frozen=True)
class Walk:
    """An alternating node/edge sequence; a walk of one node is trivial.

    Invariant: ``len(steps) == len(nodes) - 1`` and step ``i`` connects
    ``nodes[i]`` to ``nodes[i+1]`` in traversal order. A walk whose nodes are
    pairwise distinct is a path.
    """

    nodes: tuple[NodeId, ...]
    steps: tuple[WalkStep, ...] = ()

    def __post_init__(self) -> None:
        if not self.nodes:
            raise InvalidWalk("a walk needs at least one node")
        if len(self.steps) != len(self.nodes) - 1:
            raise InvalidWalk(
                f"{len(self.nodes)} nodes need {len(self.nodes) - 1} steps, "
                f"got {len(self.steps)}")
        for i, step in enumerate(self.steps):
            if step.start != self.nodes[i] or step.end != self.nodes[i + 1]:
                raise InvalidWalk(
                    f"step {i} connects {step.start!r}-{step.end!r} but the "
                    f"walk visits {self.nodes[i]!r}-{self.nodes[i + 1]!r}")

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def is_trivial(self) -> bool:
        return len(self.nodes) == 1

    @property
    def is_path(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    @property
    def is_directed(self) -> bool:
        """True for trivial walks and walks shaped A -> ... -> B or reversed."""
        if not self.steps:
            return True
        return (all(s.kind is EdgeKind.DIRECTED and s.forward
                    for s in self.steps)
                or all(s.kind is EdgeKind.DIRECTED and not s.forward
                       for s in self.steps))

    def reversed(self) -> "Walk":
        return Walk(tuple(reversed(self.nodes)),
                    tuple(s.reversed() for s in reversed(self.steps)))

    def head_into(self, i: int, side: int) -> bool:
        """Whether the step on the given side of node ``i`` points into it.

        ``side`` is -1 for the step arriving at ``nodes[i]`` and +1 for the
        step leaving it. Out-of-range sides (walk endpoints) return False.
        """
        if side == -1:
            return i > 0 and self.steps[i - 1].head_at_end
        if side == +1:
            return i < len(self.steps) and self.steps[i].head_at_start
        raise ValueError("side must be -1 or +1")

    def is_collider(self, i: int) -> bool:
        """True when inner node ``i`` has both adjacent edges pointing at it."""
        if i <= 0 or i >= len(self.nodes) - 1:
            return False
        return self.head_into(i, -1) and self.head_into(i, +1)


def _canonical_pair(a: NodeId, b: NodeId,
                    order: Mapping[NodeId, int]) -> tuple[NodeId, NodeId]:
    return (a, b) if order[a] <= order[b] else (b, a)


@dataclass(frozen=True)
class MixedGraph:
    """A mixed graph over an ordered node set.

    ``directed`` holds (tail, head) pairs; ``bidirected`` and ``undirected``
    hold unordered pairs stored with the lower-index endpoint first. Use
    :func:`build_graph` or the ``textio`` parser for label-level construction
    with friendlier errors; direct construction validates the same invariants.
    """

    nodes: tuple[NodeId, ...]
    directed: frozenset[tuple[NodeId, NodeId]] = frozenset()
    bidirected: frozenset[tuple[NodeId, NodeId]] = frozenset()
    undirected: frozenset[tuple[NodeId, NodeId]] = frozenset()

    def __post_init__(self) -> None:
        seen: set[NodeId] = set()
        for n in self.nodes:
            if n in seen:
                raise DuplicateLabel(f"node label {n!r} repeats")
            seen.add(n)
        for a, b in self.directed | self.bidirected | self.undirected:
            if a == b:
                raise SelfEdge(f"self-edge at {a!r}")
            if a not in seen or b not in seen:
                missing = a if a not in seen else b
                raise UnknownEndpoint(f"edge endpoint {missing!r} is not a node")
        order = {n: i for i, n in enumerate(self.nodes)}
        for kind in ("bidirected", "undirected"):
            pairs = getattr(self, kind)
            fixed = frozenset(_canonical_pair(a, b, order) for a, b in pairs)
            if fixed != pairs:
                object.__setattr__(self, kind, fixed)

    # -- order and membership ------------------------------------------------

    @cached_property
    def index(self) -> Mapping[NodeId, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    def __contains__(self, node: NodeId) -> bool:
        return node in self.index

    def require_node(self, node: NodeId) -> None:
        if node not in self.index:
            raise UnknownNode(f"no node {node!r} in graph")

    def sort_nodes(self, nodes: Iterable[NodeId]) -> list[NodeId]:
        """Sort node labels by their insertion order in this graph."""
        return sorted(nodes, key=self.index.__getitem__)

    # -- adjacency -----------------------------------------------------------

    @cached_property
    def _parents(self) -> Mapping[NodeId, frozenset[NodeId]]:
        out: dict[NodeId, set[NodeId]] = {n: set() for n in self.nodes}
        for tail, head in self.directed:
            out[head].add(tail)
        return {n: frozenset(v) for n, v in out.items()}

    @cached_property
    def _children(self) -> Mapping[NodeId, frozenset[NodeId]]:
        out: dict[NodeId, set[NodeId]] = {n: set() for n in self.nodes}
        for tail, head in self.directed:
            out[tail].add(head)
        return {n: frozenset(v) for n, v in out.items()}

    @cached_property
    def _sym_neighbors(self) -> Mapping[NodeId, frozenset[NodeId]]:
        """Neighbors via bidirected or undirected edges."""
        out: dict[NodeId, set[NodeId]] = {n: set() for n in self.nodes}
        for a, b in self.bidirected | self.undirected:
            out[a].add(b)
            out[b].add(a)
        return {n: frozenset(v) for n, v in out.items()}

    def neighbors(self, node: NodeId) -> frozenset[NodeId]:
        """All nodes sharing any edge with ``node``."""
        self.require_node(node)
        return (self._parents[node] | self._children[node]
                | self._sym_neighbors[node])

    def has_directed(self, tail: NodeId, head: NodeId) -> bool:
        return (tail, head) in self.directed

    def has_bidirected(self, a: NodeId, b: NodeId) -> bool:
        return _canonical_pair(a, b, self.index) in self.bidirected

    def has_undirected(self, a: NodeId, b: NodeId) -> bool:
        return _canonical_pair(a, b, self.index) in self.undirected

    def has_any_edge(self, a: NodeId, b: NodeId) -> bool:
        return (self.has_directed(a, b) or self.has_directed(b, a)
                or self.has_bidirected(a, b) or self.has_undirected(a, b))

    def steps_between(self, a: NodeId, b: NodeId) -> list[WalkStep]:
        """Each legal traversal from ``a`` to ``b``, in deterministic order."""
        out = []
        if self.has_directed(a, b):
            out.append(WalkStep(EdgeKind.DIRECTED, a, b, True))
        if self.has_directed(b, a):
            out.append(WalkStep(EdgeKind.DIRECTED, a, b, False))
        if self.has_bidirected(a, b):
            out.append(WalkStep(EdgeKind.BIDIRECTED, a, b))
        if self.has_undirected(a, b):
            out.append(WalkStep(EdgeKind.UNDIRECTED, a, b))
        return out

    def typed_edges(self) -> list[tuple[NodeId, EdgeKind, NodeId]]:
        """All edges as (endpoint, kind, endpoint) triples, in stable order."""
        idx = self.index
        out = [(a, EdgeKind.DIRECTED, b) for a, b in self.directed]
        out += [(a, EdgeKind.BIDIRECTED, b) for a, b in self.bidirected]
        out += [(a, EdgeKind.UNDIRECTED, b) for a, b in self.undirected]
        out.sort(key=lambda e: (idx[e[0]], idx[e[2]], e[1].value))
        return out

    # -- strong connectivity ---------------------------------------------

    @cached_property
    def scc(self) -> "SccIndex":
        return strongly_connected_components(self)

    @property
    def is_acyclic(self) -> bool:
        """No directed cycles; with self-edges banned this means singleton SCCs."""
        return all(len(c) == 1 for c in self.scc.components)

    def same_scc(self, a: NodeId, b: NodeId) -> bool:
        return self.scc.assignment[a] == self.scc.assignment[b]

    # -- walk validation ---------------------------------------------------

    def validate_walk(self, walk: Walk) -> None:
        """Raise InvalidWalk unless every node and traversed edge exists here."""
        for n in walk.nodes:
            if n not in self.index:
                raise InvalidWalk(f"walk visits unknown node {n!r}")
        for i, step in enumerate(walk.steps):
            if step.kind is EdgeKind.DIRECTED:
                tail, head = ((step.start, step.end) if step.forward
                              else (step.end, step.start))
                present = self.has_directed(tail, head)
            elif step.kind is EdgeKind.BIDIRECTED:
                present = self.has_bidirected(step.start, step.end)
            else:
                present = self.has_undirected(step.start, step.end)
            if not present:
                raise InvalidWalk(
                    f"step {i} uses missing edge "
                    f"{step.start!r} {step.kind.value} {step.end!r}")


@dataclass(frozen=True)
class SccIndex:
    """Strongly connected components over the directed part of a graph.

    Components are ordered by their smallest member's node index; the
    assignment maps each node to its component's position in that order.
    """

    assignment: Mapping[NodeId, int]
    components: tuple[frozenset[NodeId], ...]


def build_graph(
    nodes: Iterable[NodeId],
    edges: Iterable[tuple[NodeId, EdgeKind | str, NodeId]] = (),
) -> MixedGraph:
    """Construct a MixedGraph from labels and (label, kind, label) triples.

    Edge kinds may be EdgeKind members or their text forms "->", "<->", "--".
    Repeated identical typed edges collapse to one. Raises DuplicateLabel,
    SelfEdge, or UnknownEndpoint on malformed input.
    """
    node_tuple = tuple(nodes)
    seen: set[NodeId] = set()
    for n in node_tuple:
        if n in seen:
            raise DuplicateLabel(f"node label {n!r} repeats")
        seen.add(n)
    directed: set[tuple[NodeId, NodeId]] = set()
    bidirected: set[tuple[NodeId, NodeId]] = set()
    undirected: set[tuple[NodeId, NodeId]] = set()
    for a, kind, b in edges:
        kind = EdgeKind(kind) if not isinstance(kind, EdgeKind) else kind
        if a == b:
            raise SelfEdge(f"self-edge {a!r} {kind.value} {b!r}")
        for endpoint in (a, b):
            if endpoint not in seen:
                raise UnknownEndpoint(f"edge endpoint {endpoint!r} is not a node")
        if kind is EdgeKind.DIRECTED:
            directed.add((a, b))
        elif kind is EdgeKind.BIDIRECTED:
            bidirected.add((a, b))
        else:
            undirected.add((a, b))
    return MixedGraph(node_tuple, frozenset(directed), frozenset(bidirected),
                      frozenset(undirected))


def strongly_connected_components(g: MixedGraph) -> SccIndex:
    """Tarjan's algorithm, iterative, over directed edges only."""
    index_of: dict[NodeId, int] = {}
    lowlink: dict[NodeId, int] = {}
    on_stack: set[NodeId] = set()
    stack: list[NodeId] = []
    components: list[frozenset[NodeId]] = []
    counter = 0

    for root in g.nodes:
        if root in index_of:
            continue
        # Explicit work stack of (node, child iterator) frames.
        work: list[tuple[NodeId, Iterator[NodeId]]] = []
        index_of[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work.append((root, iter(g.sort_nodes(g._children[root]))))
        while work:
            node, children = work[-1]
            advanced = False
            for child in children:
                if child not in index_of:
                    index_of[child] = lowlink[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(g.sort_nodes(g._children[child]))))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index_of[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index_of[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                components.append(frozenset(comp))

    components.sort(key=lambda c: min(g.index[n] for n in c))
    assignment = {n: i for i, comp in enumerate(components) for n in comp}
    return SccIndex(assignment, tuple(components))


def relatives(g: MixedGraph, a: NodeId, kind: str) -> frozenset[NodeId]:
    """Parents, children, ancestors, or descendants of a node.

    Descendants include the node itself. Ancestors are nodes with a directed
    path into ``a``; since paths are node-distinct, ``a`` is never its own
    ancestor, not even on a cycle.
    """
    g.require_node(a)
    if kind == "parents":
        return g._parents[a]
    if kind == "children":
        return g._children[a]
    if kind == "descendants":
        return _directed_closure(g, a, g._children)
    if kind == "ancestors":
        return _directed_closure(g, a, g._parents) - {a}
    raise ValueError(f"unknown relation kind {kind!r}")


def _directed_closure(g: MixedGraph, start: NodeId,
                      step: Mapping[NodeId, frozenset[NodeId]],
                      ) -> frozenset[NodeId]:
    reached = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in step[node]:
            if nxt not in reached:
                reached.add(nxt)
                frontier.append(nxt)
    return frozenset(reached)


def nodes_with_descendant_in(g: MixedGraph,
                             targets: Iterable[NodeId]) -> frozenset[NodeId]:
    """All nodes from which some target is reachable via directed edges.

    Targets count as reaching themselves, matching the reflexive descendant
    convention.
    """
    reached = set(targets)
    frontier = list(reached)
    while frontier:
        node = frontier.pop()
        for parent in g._parents[node]:
            if parent not in reached:
                reached.add(parent)
                frontier.append(parent)
    return frozenset(reached)


def enumerate_paths(g: MixedGraph, a: NodeId, b: NodeId, *,
                    max_nodes: int = 12) -> list[Walk]:
    """All node-distinct walks from a to b, one per legal edge traversal.

    Between consecutive nodes, parallel edges of different types (and a
    directed edge in either stored direction) each yield their own path.
    Output order is lexicographic by node-index sequence, tie-broken by
    traversal kind. Enumeration is exponential, so graphs larger than
    ``max_nodes`` are refused.
    """
    g.require_node(a)
    g.require_node(b)
    if len(g.nodes) > max_nodes:
        raise GraphTooLarge(
            f"{len(g.nodes)} nodes exceed the enumeration budget of "
            f"{max_nodes}; raise max_nodes to force the issue")
    results: list[Walk] = []
    if a == b:
        return [Walk((a,))]

    node_seq: list[NodeId] = [a]
    step_seq: list[WalkStep] = []
    visited = {a}

    def extend(current: NodeId) -> None:
        for nxt in g.sort_nodes(g.neighbors(current)):
            if nxt in visited:
                continue
            for step in g.steps_between(current, nxt):
                node_seq.append(nxt)
                step_seq.append(step)
                if nxt == b:
                    results.append(Walk(tuple(node_seq), tuple(step_seq)))
                else:
                    visited.add(nxt)
                    extend(nxt)
                    visited.discard(nxt)
                node_seq.pop()
                step_seq.pop()

    extend(a)
    return results
