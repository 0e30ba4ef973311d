"""Stationary time series templates and their unrolled graph views.

A template lists processes and lagged edges; ``tsedge X -> Y lag k`` puts
X(t-k) -> Y(t) for every t, and ``tsedge X <-> Y lag k`` puts
X(t-k) <-> Y(t). Unrolling over a finite window yields an ordinary mixed
graph whose nodes are named ``process@time``. On top of that sit three
coarse views: the summary graph (one node per process), the grouped time
series graph (one node per group and time step), and the grouped summary
(one node per group).

Causal mixing asks, per group, that every ordered process pair, self pairs
included, is joined by a within-group directed walk of positive length
built from unit-lag edges. For mixing templates an apparent cause at the
grouped-summary level is always a true one; ``check_mixing_causation``
makes that concrete by stitching an explicit directed path in the unrolled
graph from boundary edges and within-group walks.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import AbstractSet, Mapping, Sequence

from .errors import (
    DuplicateLabel,
    EmptyWindow,
    NotAPartition,
    NotMixing,
    SelfEdge,
    UnknownEndpoint,
    UnknownGroup,
)
from .graphs import EdgeKind, MixedGraph, Walk, WalkStep, build_graph
from .grouping import GroupId, Partition, coarsen
from .separation import SeparationKind

__all__ = [
    "LagEdge",
    "TsTemplate",
    "Window",
    "Unrolled",
    "MixingReport",
    "CauseCheck",
    "node_at",
    "unroll",
    "summary_graph",
    "grouped_ts_dmg",
    "grouped_summary",
    "is_causally_mixing",
    "check_mixing_causation",
    "ts_faithfulness_check",
]

ProcessId = str

Grouping = tuple[tuple[GroupId, tuple[ProcessId, ...]], ...]


@dataclass(frozen=True)
class LagEdge:
    """One stationary edge family: src(t - lag) linked to dst(t)."""

    src: ProcessId
    dst: ProcessId
    lag: int
    kind: EdgeKind = EdgeKind.DIRECTED

    def __post_init__(self) -> None:
        if self.kind not in (EdgeKind.DIRECTED, EdgeKind.BIDIRECTED):
            raise ValueError("lag edges are directed or bidirected")
        if self.lag < 0:
            raise ValueError("lag must be non-negative")
        if self.src == self.dst and self.lag == 0:
            raise SelfEdge(f"lag-0 edge on process {self.src!r}")


@dataclass(frozen=True)
class TsTemplate:
    """Processes, lagged edges, and an optional grouping of the processes."""

    processes: tuple[ProcessId, ...]
    lag_edges: tuple[LagEdge, ...] = ()
    grouping: Grouping | None = None

    def __post_init__(self) -> None:
        if len(set(self.processes)) != len(self.processes):
            dup = next(p for i, p in enumerate(self.processes)
                       if p in self.processes[:i])
            raise DuplicateLabel(f"process {dup!r} declared twice")
        known = set(self.processes)
        for e in self.lag_edges:
            for endpoint in (e.src, e.dst):
                if endpoint not in known:
                    raise UnknownEndpoint(f"unknown process {endpoint!r}")
        if self.grouping is not None:
            seen: dict[ProcessId, GroupId] = {}
            labels: set[GroupId] = set()
            for name, members in self.grouping:
                if name in labels:
                    raise NotAPartition(f"group {name!r} declared twice")
                labels.add(name)
                if not members:
                    raise NotAPartition(f"group {name!r} is empty")
                for member in members:
                    if member not in known:
                        raise UnknownEndpoint(
                            f"group member {member!r} is not a process")
                    if member in seen:
                        raise NotAPartition(
                            f"process {member!r} in groups "
                            f"{seen[member]!r} and {name!r}")
                    seen[member] = name
            missing = known - set(seen)
            if missing:
                raise NotAPartition(
                    f"grouping misses processes {sorted(missing)}")

    @property
    def max_lag(self) -> int:
        return max((e.lag for e in self.lag_edges), default=0)

    def require_grouping(self) -> Grouping:
        if self.grouping is None:
            raise UnknownGroup("template declares no grouping")
        return self.grouping

    def group_of(self) -> Mapping[ProcessId, GroupId]:
        return {member: name for name, members in self.require_grouping()
                for member in members}


@dataclass(frozen=True)
class Window:
    """Inclusive time range [start, end]."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise EmptyWindow(f"window {self.start}:{self.end} is empty")

    @property
    def times(self) -> range:
        return range(self.start, self.end + 1)

    @property
    def span(self) -> int:
        return self.end - self.start


def node_at(process: ProcessId, time: int) -> str:
    """Unrolled node label for one process at one time step."""
    return f"{process}@{time}"


@dataclass(frozen=True)
class Unrolled:
    """An unrolled window: the mixed graph plus the per-process partition."""

    graph: MixedGraph
    by_process: Partition
    window: Window


def unroll(t: TsTemplate, window: Window) -> Unrolled:
    """Instantiate the template over a finite window.

    Edges whose source time falls before the window are dropped, so a
    window spanning fewer steps than the maximum lag silently loses edge
    families entirely; that case raises a UserWarning.
    """
    if window.span < t.max_lag:
        warnings.warn(
            f"window spans {window.span} steps but the template has lags "
            f"up to {t.max_lag}; some edges are never instantiated",
            stacklevel=2)
    nodes = [node_at(p, time) for time in window.times for p in t.processes]
    edges = []
    for e in t.lag_edges:
        for time in window.times:
            if time - e.lag < window.start:
                continue
            edges.append((node_at(e.src, time - e.lag), e.kind,
                          node_at(e.dst, time)))
    graph = build_graph(nodes, edges)
    by_process = Partition.from_mapping(
        {p: [node_at(p, time) for time in window.times]
         for p in t.processes})
    return Unrolled(graph, by_process, window)


def summary_graph(t: TsTemplate) -> MixedGraph:
    """One node per process; an edge wherever any lag links two distinct
    processes. Same-process (self) edge families vanish here."""
    edges = {(e.src, e.kind, e.dst) for e in t.lag_edges if e.src != e.dst}
    return build_graph(t.processes, sorted(
        edges, key=lambda e: (t.processes.index(e[0]),
                              t.processes.index(e[2]), e[1].value)))


def grouped_ts_dmg(t: TsTemplate, window: Window
                   ) -> tuple[MixedGraph, Partition]:
    """Coarsen the unrolled graph by group-and-time-step blocks.

    Returns the coarse graph (nodes named ``group@time``) together with the
    partition of unrolled nodes it came from.
    """
    grouping = t.require_grouping()
    unrolled = unroll(t, window)
    blocks = {node_at(name, time): [node_at(p, time) for p in members]
              for time in window.times for name, members in grouping}
    q_prime = Partition.from_mapping(blocks)
    return coarsen(unrolled.graph, q_prime), q_prime


def grouped_summary(t: TsTemplate) -> MixedGraph:
    """Coarsen the summary graph by the template's process grouping."""
    grouping = t.require_grouping()
    p = Partition.from_mapping({name: members for name, members in grouping})
    return coarsen(summary_graph(t), p)


# --- causal mixing ---------------------------------------------------------

@dataclass(frozen=True)
class MixingReport:
    per_group: tuple[tuple[GroupId, bool], ...]
    mixing: bool


def _h_adjacency(t: TsTemplate, members: AbstractSet[ProcessId], *,
                 unit_lag_only: bool) -> Mapping[ProcessId,
                                                 tuple[tuple[ProcessId, int],
                                                       ...]]:
    """Within-group directed lag structure: successors with minimal lag."""
    best: dict[tuple[ProcessId, ProcessId], int] = {}
    for e in t.lag_edges:
        if e.kind is not EdgeKind.DIRECTED:
            continue
        if e.src not in members or e.dst not in members:
            continue
        if unit_lag_only:
            if e.lag != 1:
                continue
        elif e.lag < 1:
            continue
        key = (e.src, e.dst)
        if key not in best or e.lag < best[key]:
            best[key] = e.lag
    out: dict[ProcessId, list[tuple[ProcessId, int]]] = {m: [] for m in members}
    for (src, dst), lag in sorted(
            best.items(), key=lambda kv: (t.processes.index(kv[0][0]),
                                          t.processes.index(kv[0][1]))):
        out[src].append((dst, lag))
    return {m: tuple(succ) for m, succ in out.items()}


def is_causally_mixing(t: TsTemplate, *, include_self_pairs: bool = True,
                       unit_lag_only: bool = True) -> MixingReport:
    """Per-group test that within-group dynamics connect everything.

    A group mixes when for every ordered pair of its processes (self
    pairs included by default) there is a directed walk of length at least
    one through the group's unit-lag edges. ``unit_lag_only=False`` relaxes
    the walk edges to any positive lag.
    """
    grouping = t.require_grouping()
    per_group = []
    for name, members in grouping:
        adj = _h_adjacency(t, set(members), unit_lag_only=unit_lag_only)
        ok = True
        for src in members:
            reached = _reachable_positive(adj, src)
            for dst in members:
                if dst == src and not include_self_pairs:
                    continue
                if dst not in reached:
                    ok = False
                    break
            if not ok:
                break
        per_group.append((name, ok))
    return MixingReport(tuple(per_group), all(ok for _, ok in per_group))


def _reachable_positive(adj: Mapping[ProcessId, tuple[tuple[ProcessId, int],
                                                      ...]],
                        start: ProcessId) -> set[ProcessId]:
    """Nodes reachable from start by walks of length >= 1."""
    seen: set[ProcessId] = set()
    frontier = [dst for dst, _ in adj[start]]
    while frontier:
        node = frontier.pop()
        if node in seen:
            continue
        seen.add(node)
        frontier.extend(dst for dst, _ in adj[node] if dst not in seen)
    return seen


@dataclass(frozen=True)
class CauseCheck:
    """Causation status of one ordered group pair at the grouped summary.

    When the pair is an apparent cause, ``witness`` is a directed path in
    the unrolled graph over ``window`` from a member of the first group to
    a member of the second, so the cause is also a true one.
    """

    pair: tuple[GroupId, GroupId]
    apparent: bool
    true: bool
    witness: Walk | None = None
    window: Window | None = None


def check_mixing_causation(t: TsTemplate, *, include_self_pairs: bool = True,
                           unit_lag_only: bool = True
                           ) -> tuple[CauseCheck, ...]:
    """For a mixing template, certify every apparent grouped-summary cause.

    Raises NotMixing when some group fails the mixing test. For each
    ordered pair of distinct groups, reports whether the second descends
    from the first in the grouped summary and, if so, stitches a concrete
    unrolled witness path: boundary lag edges between consecutive groups,
    joined by within-group walks whose steps each advance time.
    """
    report = is_causally_mixing(t, include_self_pairs=include_self_pairs,
                                unit_lag_only=unit_lag_only)
    if not report.mixing:
        failing = [name for name, ok in report.per_group if not ok]
        raise NotMixing(f"groups not mixing: {failing}")
    gs = grouped_summary(t)
    grouping = t.require_grouping()
    members_of = dict(grouping)
    group_of = t.group_of()
    checks: list[CauseCheck] = []
    for a, b in itertools.permutations([name for name, _ in grouping], 2):
        reach = _coarse_descendants(gs, a)
        if b not in reach:
            checks.append(CauseCheck((a, b), False, False))
            continue
        path = _shortest_coarse_path(gs, a, b)
        witness, window = _stitch_witness(t, path, members_of, group_of,
                                          unit_lag_only=unit_lag_only)
        checks.append(CauseCheck((a, b), True, True, witness, window))
    return tuple(checks)


def _coarse_descendants(gs: MixedGraph, start: GroupId) -> set[GroupId]:
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for child in gs._children[node]:
            if child not in seen:
                seen.add(child)
                frontier.append(child)
    return seen - {start}


def _shortest_coarse_path(gs: MixedGraph, a: GroupId,
                          b: GroupId) -> tuple[GroupId, ...]:
    """Shortest directed path a -> ... -> b, ties broken by node order."""
    parent: dict[GroupId, GroupId] = {a: a}
    frontier = [a]
    while frontier:
        nxt: list[GroupId] = []
        for node in frontier:
            for child in gs.sort_nodes(gs._children[node]):
                if child not in parent:
                    parent[child] = node
                    nxt.append(child)
        if b in parent:
            break
        frontier = nxt
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def _stitch_witness(t: TsTemplate, path: Sequence[GroupId],
                    members_of: Mapping[GroupId, tuple[ProcessId, ...]],
                    group_of: Mapping[ProcessId, GroupId], *,
                    unit_lag_only: bool) -> tuple[Walk, Window]:
    """Concatenate boundary edges and within-group walks into one directed
    unrolled path, anchored at time 0."""
    boundary: list[LagEdge] = []
    for src_group, dst_group in zip(path, path[1:]):
        candidates = [e for e in t.lag_edges
                      if e.kind is EdgeKind.DIRECTED
                      and group_of[e.src] == src_group
                      and group_of[e.dst] == dst_group]
        boundary.append(min(
            candidates,
            key=lambda e: (t.processes.index(e.src),
                           t.processes.index(e.dst), e.lag)))

    steps: list[tuple[ProcessId, int, ProcessId, int]] = []
    process = boundary[0].src
    time = 0
    for i, edge in enumerate(boundary):
        if process != edge.src:
            for src, lag, dst in _h_walk(t, members_of[path[i]], process,
                                         edge.src,
                                         unit_lag_only=unit_lag_only):
                steps.append((src, time, dst, time + lag))
                time += lag
            process = edge.src
        steps.append((process, time, edge.dst, time + edge.lag))
        process, time = edge.dst, time + edge.lag

    nodes = [node_at(boundary[0].src, 0)]
    walk_steps = []
    for src, t0, dst, t1 in steps:
        nodes.append(node_at(dst, t1))
        walk_steps.append(WalkStep(EdgeKind.DIRECTED, node_at(src, t0),
                                   node_at(dst, t1)))
    return Walk(tuple(nodes), tuple(walk_steps)), Window(0, max(time, 0))


def _h_walk(t: TsTemplate, members: Sequence[ProcessId], src: ProcessId,
            dst: ProcessId, *,
            unit_lag_only: bool) -> list[tuple[ProcessId, int, ProcessId]]:
    """Shortest within-group walk between two distinct processes, as
    (from, lag, to) steps; mixing guarantees one exists."""
    adj = _h_adjacency(t, set(members), unit_lag_only=unit_lag_only)
    parent: dict[ProcessId, tuple[ProcessId, int]] = {}
    frontier = [src]
    while frontier and dst not in parent:
        nxt: list[ProcessId] = []
        for node in frontier:
            for child, lag in adj[node]:
                if child != src and child not in parent:
                    parent[child] = (node, lag)
                    nxt.append(child)
        frontier = nxt
    if dst not in parent:
        raise NotMixing(f"no within-group walk {src!r} -> {dst!r}")
    chain: list[tuple[ProcessId, int, ProcessId]] = []
    node = dst
    while node != src:
        prev, lag = parent[node]
        chain.append((prev, lag, node))
        node = prev
    return list(reversed(chain))


def ts_faithfulness_check(t: TsTemplate, level: str, window: Window,
                          max_cond_groups: int,
                          kind: SeparationKind = SeparationKind.SIGMA):
    """Faithfulness violation scan for a grouped template.

    ``level`` picks the coarse view: 'grouped_ts' blocks the unrolled
    nodes by group and time step, 'grouped_summary' by group alone. The
    scan itself runs on the unrolled window.
    """
    from .faithfulness import find_faithfulness_violations

    grouping = t.require_grouping()
    unrolled = unroll(t, window)
    if level == "grouped_ts":
        blocks = {node_at(name, time): [node_at(p, time) for p in members]
                  for time in window.times for name, members in grouping}
    elif level == "grouped_summary":
        blocks = {name: [node_at(p, time) for time in window.times
                         for p in members]
                  for name, members in grouping}
    else:
        raise ValueError("level must be 'grouped_ts' or 'grouped_summary'")
    partition = Partition.from_mapping(blocks)
    return find_faithfulness_violations(unrolled.graph, partition, kind,
                                        max_cond_groups)
