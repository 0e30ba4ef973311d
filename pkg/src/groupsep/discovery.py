"""Constraint-based structure recovery over groups.

The independence oracle answers queries from the micro graph itself: two
groups are independent given conditioning groups when all their member
pairs are separated given the union of the conditioning blocks. On top of
it sit a PC-stable skeleton search, conservative collider orientation,
and the first Meek propagation rule. A diff against the true coarse graph
shows what grouping effects (cycles collapsed away, faithfulness failures)
do to the recovered structure.

Everything here is deterministic: pairs, conditioning sets, and triples
are enumerated in the partition's group order, so equal inputs yield
byte-for-byte equal outputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import AbstractSet, Sequence

from .errors import GroupSetMismatch
from .graphs import MixedGraph, build_graph
from .grouping import GroupId, Partition, coarsen
from .faithfulness import group_ci
from .separation import SeparationKind, separated

__all__ = [
    "GroupCiOracle",
    "SkeletonResult",
    "PartiallyOrientedGraph",
    "DiscoveryDiff",
    "DiscoveryResult",
    "pc_skeleton",
    "orient_conservative",
    "meek_rule1",
    "compare_to_truth",
    "discover",
]

Pair = tuple[GroupId, GroupId]


class GroupCiOracle:
    """Caching group-level conditional independence oracle.

    Queries are symmetric in the pair and keyed on the conditioning set,
    so repeated lookups during search cost one micro-graph scan each.
    """

    def __init__(self, g: MixedGraph, p: Partition,
                 kind: SeparationKind) -> None:
        p.require_partition_of(g)
        self.g = g
        self.p = p
        self.kind = kind
        self._cache: dict[tuple[frozenset[GroupId], frozenset[GroupId]],
                          bool] = {}

    @property
    def groups(self) -> tuple[GroupId, ...]:
        return self.p.labels

    def independent(self, y: GroupId, z: GroupId,
                    s: AbstractSet[GroupId] = frozenset()) -> bool:
        self.p.require_group(y)
        self.p.require_group(z)
        for label in s:
            self.p.require_group(label)
        if y == z or y in s or z in s:
            raise ValueError("query needs two distinct groups outside s")
        key = (frozenset((y, z)), frozenset(s))
        if key not in self._cache:
            self._cache[key] = group_ci(self.g, self.p, self.kind, y, z, s)
        return self._cache[key]


@dataclass(frozen=True)
class SkeletonResult:
    groups: tuple[GroupId, ...]
    edges: frozenset[Pair]
    sepsets: tuple[tuple[Pair, frozenset[GroupId]], ...]

    def sepset_of(self, y: GroupId, z: GroupId) -> frozenset[GroupId] | None:
        target = self._canonical(y, z)
        for pair, s in self.sepsets:
            if pair == target:
                return s
        return None

    def _canonical(self, y: GroupId, z: GroupId) -> Pair:
        order = {g: i for i, g in enumerate(self.groups)}
        return (y, z) if order[y] < order[z] else (z, y)

    def adjacent(self, y: GroupId) -> tuple[GroupId, ...]:
        out = [b if a == y else a for a, b in self.edges if y in (a, b)]
        order = {g: i for i, g in enumerate(self.groups)}
        return tuple(sorted(out, key=order.__getitem__))


def pc_skeleton(oracle: GroupCiOracle) -> SkeletonResult:
    """PC-stable skeleton search against the group oracle.

    Levels grow the conditioning set size; within a level, removals are
    based on a snapshot of the adjacencies taken at its start, so the
    outcome does not depend on pair order. The first separating set found
    for a pair is recorded. Candidate sets are drawn from the snapshot
    adjacencies of each endpoint in turn, in lexicographic group order.
    """
    groups = oracle.groups
    if len(groups) < 2:
        raise ValueError("skeleton search needs at least two groups")
    order = {g: i for i, g in enumerate(groups)}
    edges: set[Pair] = {(a, b)
                        for a, b in itertools.combinations(groups, 2)}
    sepsets: list[tuple[Pair, frozenset[GroupId]]] = []

    level = 0
    while True:
        adj: dict[GroupId, tuple[GroupId, ...]] = {
            y: tuple(sorted((b if a == y else a
                             for a, b in edges if y in (a, b)),
                            key=order.__getitem__))
            for y in groups}
        if all(len(adj[y]) - 1 < level for y in groups):
            break
        to_remove: list[tuple[Pair, frozenset[GroupId]]] = []
        for y, z in sorted(edges, key=lambda e: (order[e[0]], order[e[1]])):
            found: frozenset[GroupId] | None = None
            tried: set[frozenset[GroupId]] = set()
            for base in (adj[y], adj[z]):
                pool = [n for n in base if n not in (y, z)]
                if len(pool) < level:
                    continue
                for combo in itertools.combinations(pool, level):
                    s = frozenset(combo)
                    if s in tried:
                        continue
                    tried.add(s)
                    if oracle.independent(y, z, s):
                        found = s
                        break
                if found is not None:
                    break
            if found is not None:
                to_remove.append(((y, z), found))
        for pair, s in to_remove:
            edges.discard(pair)
            sepsets.append((pair, s))
        level += 1
    return SkeletonResult(groups, frozenset(edges), tuple(sepsets))


@dataclass(frozen=True)
class PartiallyOrientedGraph:
    """A skeleton with some edges oriented and some triples left ambiguous.

    ``orientations`` holds (tail, head) pairs; an edge may appear oriented
    in both directions when conflicting colliders demand it. Ambiguous
    triples (x, y, z) are unshielded triples whose collider status the
    conservative rule could not settle.
    """

    groups: tuple[GroupId, ...]
    skeleton: frozenset[Pair]
    orientations: frozenset[Pair]
    ambiguous_triples: frozenset[tuple[GroupId, GroupId, GroupId]]


def _unshielded_triples(groups: Sequence[GroupId], skeleton: AbstractSet[Pair]
                        ) -> list[tuple[GroupId, GroupId, GroupId]]:
    order = {g: i for i, g in enumerate(groups)}
    adjacent = {frozenset(e) for e in skeleton}
    triples = []
    for y in groups:
        nbrs = sorted((b if a == y else a
                       for a, b in skeleton if y in (a, b)),
                      key=order.__getitem__)
        for x, z in itertools.combinations(nbrs, 2):
            if frozenset((x, z)) not in adjacent:
                triples.append((x, y, z))
    triples.sort(key=lambda t: (order[t[0]], order[t[1]], order[t[2]]))
    return triples


def orient_conservative(oracle: GroupCiOracle,
                        skel: SkeletonResult) -> PartiallyOrientedGraph:
    """Collider orientation with the conservative separating-set rule.

    For each unshielded triple (x, y, z), every subset of the union of
    the endpoints' final adjacencies that separates the pair is a
    candidate, plus the set recorded during the skeleton search. The
    triple becomes a collider when y sits in no candidate, a non-collider
    when y sits in all of them, and is marked ambiguous otherwise.
    """
    order = {g: i for i, g in enumerate(skel.groups)}
    orientations: set[Pair] = set()
    ambiguous: set[tuple[GroupId, GroupId, GroupId]] = set()
    for x, y, z in _unshielded_triples(skel.groups, skel.edges):
        pool = sorted((set(skel.adjacent(x)) | set(skel.adjacent(z)))
                      - {x, z}, key=order.__getitem__)
        candidates: list[frozenset[GroupId]] = []
        for size in range(len(pool) + 1):
            for combo in itertools.combinations(pool, size):
                s = frozenset(combo)
                if oracle.independent(x, z, s):
                    candidates.append(s)
        recorded = skel.sepset_of(x, z)
        if recorded is not None and recorded not in candidates:
            candidates.append(recorded)
        in_some = any(y in s for s in candidates)
        in_all = all(y in s for s in candidates)
        if not in_some:
            orientations.add((x, y))
            orientations.add((z, y))
        elif not in_all:
            ambiguous.add((x, y, z))
    return PartiallyOrientedGraph(skel.groups, skel.edges,
                                  frozenset(orientations),
                                  frozenset(ambiguous))


def meek_rule1(pog: PartiallyOrientedGraph) -> PartiallyOrientedGraph:
    """Propagate orientations with Meek's first rule, to a fixpoint.

    Whenever c -> a is oriented, a - b is still unoriented, and c and b
    are not adjacent, orient a -> b (otherwise a would be a new collider
    on an unshielded triple).
    """
    order = {g: i for i, g in enumerate(pog.groups)}
    adjacent = {frozenset(e) for e in pog.skeleton}
    orientations = set(pog.orientations)
    changed = True
    while changed:
        changed = False
        for c, a in sorted(orientations, key=lambda e: (order[e[0]],
                                                        order[e[1]])):
            for pair in sorted(pog.skeleton,
                               key=lambda e: (order[e[0]], order[e[1]])):
                if a not in pair:
                    continue
                b = pair[1] if pair[0] == a else pair[0]
                if b == c or frozenset((c, b)) in adjacent:
                    continue
                if (a, b) in orientations or (b, a) in orientations:
                    continue
                orientations.add((a, b))
                changed = True
    return PartiallyOrientedGraph(pog.groups, pog.skeleton,
                                  frozenset(orientations),
                                  pog.ambiguous_triples)


@dataclass(frozen=True)
class DiscoveryDiff:
    """Recovered structure versus the true coarse graph.

    Adjacency mistakes are skeleton edges missing from or absent in the
    truth; an orientation is wrong when it points opposite to every
    directed truth edge between its endpoints.
    """

    extra_adjacencies: frozenset[Pair]
    missing_adjacencies: frozenset[Pair]
    wrong_orientations: frozenset[Pair]
    ambiguous_triples: frozenset[tuple[GroupId, GroupId, GroupId]]

    @property
    def skeleton_correct(self) -> bool:
        return not self.extra_adjacencies and not self.missing_adjacencies


def compare_to_truth(pog: PartiallyOrientedGraph,
                     truth: MixedGraph) -> DiscoveryDiff:
    if set(pog.groups) != set(truth.nodes):
        raise GroupSetMismatch(
            "recovered and true graphs cover different groups")
    order = {g: i for i, g in enumerate(pog.groups)}

    def canonical(a: GroupId, b: GroupId) -> Pair:
        return (a, b) if order[a] < order[b] else (b, a)

    true_adj = set()
    for a, b in itertools.combinations(pog.groups, 2):
        if truth.has_any_edge(a, b):
            true_adj.add(canonical(a, b))
    skel = {canonical(a, b) for a, b in pog.skeleton}
    extra = frozenset(skel - true_adj)
    missing = frozenset(true_adj - skel)
    wrong = frozenset((a, b) for a, b in pog.orientations
                      if (a, b) not in truth.directed)
    return DiscoveryDiff(extra, missing, wrong, pog.ambiguous_triples)


@dataclass(frozen=True)
class DiscoveryResult:
    skeleton: SkeletonResult
    oriented: PartiallyOrientedGraph
    diff: DiscoveryDiff
    sigma_consistent: bool | None = None
    consistent_dag: MixedGraph | None = None

    @property
    def sigma_message(self) -> str | None:
        if self.sigma_consistent is None:
            return None
        if self.sigma_consistent:
            return "a separation-consistent acyclic orientation exists"
        return "no acyclic orientation of the skeleton matches the oracle"


def discover(g: MixedGraph, p: Partition, kind: SeparationKind, *,
             sigma_aware: bool = False,
             orientation_cap: int = 4096) -> DiscoveryResult:
    """Full pipeline: skeleton, conservative colliders, Meek rule 1, diff.

    With ``sigma_aware`` the skeleton's orientations are additionally
    checked exhaustively: every acyclic orientation of the skeleton is
    compared to the oracle over all pairs and all conditioning sets, and
    the result records whether any matches. Skeletons with more than
    log2(orientation_cap) edges refuse the exhaustive pass.
    """
    oracle = GroupCiOracle(g, p, kind)
    skel = pc_skeleton(oracle)
    pog = meek_rule1(orient_conservative(oracle, skel))
    diff = compare_to_truth(pog, coarsen(g, p))
    if not sigma_aware:
        return DiscoveryResult(skel, pog, diff)
    consistent = _find_consistent_dag(oracle, skel, orientation_cap)
    return DiscoveryResult(skel, pog, diff, consistent is not None,
                           consistent)


def _find_consistent_dag(oracle: GroupCiOracle, skel: SkeletonResult,
                         cap: int) -> MixedGraph | None:
    """First acyclic orientation of the skeleton whose d-separations agree
    with the oracle on every pair and every conditioning set."""
    edges = sorted(skel.edges,
                   key=lambda e: (skel.groups.index(e[0]),
                                  skel.groups.index(e[1])))
    if 2 ** len(edges) > cap:
        raise ValueError(
            f"{len(edges)} skeleton edges exceed the orientation cap")
    groups = skel.groups
    for flips in itertools.product((False, True), repeat=len(edges)):
        directed = [(b, a) if flip else (a, b)
                    for (a, b), flip in zip(edges, flips)]
        candidate = build_graph(groups, [(a, "->", b) for a, b in directed])
        if not candidate.is_acyclic:
            continue
        if _faithful_to_oracle(candidate, oracle):
            return candidate
    return None


def _faithful_to_oracle(dag: MixedGraph, oracle: GroupCiOracle) -> bool:
    groups = oracle.groups
    for y, z in itertools.combinations(groups, 2):
        rest = [r for r in groups if r not in (y, z)]
        for size in range(len(rest) + 1):
            for combo in itertools.combinations(rest, size):
                s = frozenset(combo)
                if (separated(dag, y, z, s, SeparationKind.M)
                        != oracle.independent(y, z, s)):
                    return False
    return True
