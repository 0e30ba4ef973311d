"""Seeded random instance families used by the test and acceptance suites.

Every generator takes an explicit random.Random so runs are reproducible.
The criterion-passing families are correct by construction and assert it:

* criterion 1: every block is one strongly connected component (a cycle,
  or a singleton), so all boundary nodes of a block share their SCC and
  the boundary-matching condition holds vacuously; cross-block directed
  edges only run forward along the block order, keeping SCCs inside
  blocks.
* criterion 2: the micro graph is acyclic and all crossing edges attach
  to a single designated port node per block, so every boundary is that
  port and each mark pattern is satisfied trivially.
* mixing templates: each group carries a unit-lag cycle through all its
  members (a self-loop for singletons), which connects every ordered
  process pair, self pairs included, by a positive-length walk.
"""

from __future__ import annotations

import itertools
import random

from .faithfulness import check_criterion1, check_criterion2
from .graphs import EdgeKind, MixedGraph, build_graph
from .grouping import Partition
from .timeseries import LagEdge, TsTemplate

__all__ = [
    "random_mixed_graph",
    "random_dmg",
    "random_partition",
    "random_criterion1_instance",
    "random_criterion2_instance",
    "random_mixing_template",
]


def _node_labels(n: int) -> list[str]:
    return [f"n{i}" for i in range(n)]


def random_mixed_graph(rng: random.Random, n_nodes: int, *,
                       p_directed: float = 0.2, p_bidirected: float = 0.12,
                       p_undirected: float = 0.08) -> MixedGraph:
    """A mixed graph with independently sampled edges of all three types."""
    nodes = _node_labels(n_nodes)
    edges: list[tuple[str, EdgeKind, str]] = []
    for a, b in itertools.combinations(nodes, 2):
        if rng.random() < p_directed:
            edges.append((a, EdgeKind.DIRECTED, b))
        if rng.random() < p_directed:
            edges.append((b, EdgeKind.DIRECTED, a))
        if rng.random() < p_bidirected:
            edges.append((a, EdgeKind.BIDIRECTED, b))
        if rng.random() < p_undirected:
            edges.append((a, EdgeKind.UNDIRECTED, b))
    return build_graph(nodes, edges)


def random_dmg(rng: random.Random, n_nodes: int, *,
               p_directed: float = 0.2,
               p_bidirected: float = 0.12) -> MixedGraph:
    """Like random_mixed_graph, restricted to directed and bidirected."""
    return random_mixed_graph(rng, n_nodes, p_directed=p_directed,
                              p_bidirected=p_bidirected, p_undirected=0.0)


def random_partition(rng: random.Random, g: MixedGraph, *,
                     n_groups: int | None = None) -> Partition:
    """A uniform-ish random partition of the graph's nodes."""
    nodes = list(g.nodes)
    rng.shuffle(nodes)
    k = n_groups if n_groups is not None else rng.randint(1, len(nodes))
    k = min(k, len(nodes))
    blocks: list[list[str]] = [[] for _ in range(k)]
    for i, node in enumerate(nodes[:k]):
        blocks[i].append(node)
    for node in nodes[k:]:
        blocks[rng.randrange(k)].append(node)
    return Partition.from_mapping(
        {f"G{i}": block for i, block in enumerate(blocks)})


def _random_block_sizes(rng: random.Random, total: int,
                        k: int) -> list[int]:
    sizes = [1] * k
    for _ in range(total - k):
        sizes[rng.randrange(k)] += 1
    return sizes


def random_criterion1_instance(rng: random.Random, *, max_nodes: int = 9,
                               allow_bidirected: bool = True,
                               coarse_dag_only: bool = False
                               ) -> tuple[MixedGraph, Partition]:
    """A grouping passing the first criterion, by construction.

    With ``coarse_dag_only`` the instance also keeps the coarse graph a
    pure DAG (no bidirected edges anywhere, so discovery sees a plain
    d-separation oracle).
    """
    n = rng.randint(3, max_nodes)
    k = rng.randint(2, min(4, n))
    sizes = _random_block_sizes(rng, n, k)
    nodes = _node_labels(n)
    blocks: list[list[str]] = []
    cursor = 0
    for size in sizes:
        blocks.append(nodes[cursor:cursor + size])
        cursor += size

    edges: list[tuple[str, EdgeKind, str]] = []
    for block in blocks:
        if len(block) > 1:
            for a, b in zip(block, block[1:] + block[:1]):
                edges.append((a, EdgeKind.DIRECTED, b))
            for a, b in itertools.permutations(block, 2):
                if (a, EdgeKind.DIRECTED, b) not in edges \
                        and rng.random() < 0.15:
                    edges.append((a, EdgeKind.DIRECTED, b))
    cross = 0
    for i, j in itertools.combinations(range(k), 2):
        for a in blocks[i]:
            for b in blocks[j]:
                if rng.random() < 0.25:
                    edges.append((a, EdgeKind.DIRECTED, b))
                    cross += 1
    if cross == 0:
        edges.append((blocks[0][0], EdgeKind.DIRECTED, blocks[1][0]))
    if allow_bidirected and not coarse_dag_only:
        for a, b in itertools.combinations(nodes, 2):
            if rng.random() < 0.1:
                edges.append((a, EdgeKind.BIDIRECTED, b))

    g = build_graph(nodes, edges)
    p = Partition.from_mapping(
        {f"G{i}": block for i, block in enumerate(blocks)})
    assert check_criterion1(g, p).passed
    if coarse_dag_only:
        from .grouping import coarsen
        coarse = coarsen(g, p)
        assert coarse.is_acyclic and not coarse.bidirected \
            and not coarse.undirected
    return g, p


def random_criterion2_instance(rng: random.Random, *, max_nodes: int = 9
                               ) -> tuple[MixedGraph, Partition]:
    """An acyclic grouping passing the second criterion, by construction."""
    k = rng.randint(2, 4)
    sizes = [rng.randint(1, 3) for _ in range(k)]
    while sum(sizes) > max_nodes:
        sizes[sizes.index(max(sizes))] -= 1
    nodes = _node_labels(sum(sizes))
    blocks: list[list[str]] = []
    cursor = 0
    for size in sizes:
        blocks.append(nodes[cursor:cursor + size])
        cursor += size
    ports = [block[0] for block in blocks]

    edges: list[tuple[str, EdgeKind, str]] = []
    for block in blocks:
        for a, b in itertools.combinations(block, 2):
            if rng.random() < 0.3:
                edges.append((a, EdgeKind.DIRECTED, b))
    cross = 0
    for i, j in itertools.combinations(range(k), 2):
        if rng.random() < 0.4:
            edges.append((ports[i], EdgeKind.DIRECTED, ports[j]))
            cross += 1
        if rng.random() < 0.15:
            edges.append((ports[i], EdgeKind.BIDIRECTED, ports[j]))
            cross += 1
    if cross == 0:
        edges.append((ports[0], EdgeKind.DIRECTED, ports[1]))

    g = build_graph(nodes, edges)
    p = Partition.from_mapping(
        {f"G{i}": block for i, block in enumerate(blocks)})
    assert g.is_acyclic
    assert check_criterion2(g, p).passed
    return g, p


def random_mixing_template(rng: random.Random, *,
                           max_processes: int = 5) -> TsTemplate:
    """A grouped template that is causally mixing, by construction."""
    n = rng.randint(2, max_processes)
    processes = [f"p{i}" for i in range(n)]
    shuffled = processes[:]
    rng.shuffle(shuffled)
    k = rng.randint(2, n)
    groups: list[list[str]] = [[] for _ in range(k)]
    for i, proc in enumerate(shuffled[:k]):
        groups[i].append(proc)
    for proc in shuffled[k:]:
        groups[rng.randrange(k)].append(proc)

    edges: list[LagEdge] = []
    seen: set[tuple[str, str, int]] = set()

    def add(src: str, dst: str, lag: int) -> None:
        if (src, dst, lag) not in seen:
            seen.add((src, dst, lag))
            edges.append(LagEdge(src, dst, lag))

    for members in groups:
        if len(members) == 1:
            add(members[0], members[0], 1)
        else:
            ring = members[:]
            rng.shuffle(ring)
            for a, b in zip(ring, ring[1:] + ring[:1]):
                add(a, b, 1)
    group_index = {proc: gi for gi, members in enumerate(groups)
                   for proc in members}
    for src, dst in itertools.permutations(processes, 2):
        if group_index[src] != group_index[dst] and rng.random() < 0.3:
            add(src, dst, rng.choice((0, 1, 2)))
    for src, dst in itertools.product(processes, repeat=2):
        if group_index[src] == group_index[dst] and rng.random() < 0.1:
            lag = rng.choice((1, 2))
            if not (src == dst and lag == 0):
                add(src, dst, lag)

    return TsTemplate(tuple(processes), tuple(edges),
                      tuple((f"G{i}", tuple(members))
                            for i, members in enumerate(groups)))
