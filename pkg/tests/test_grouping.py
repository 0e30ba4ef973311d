"""Partitions, quotient graphs, segment representations, and transfer."""

from __future__ import annotations

import pytest
from hypothesis import given, settings

from groupsep import (
    CommuteReport,
    EdgeKind,
    MixedGraph,
    NodeSetMismatch,
    NotAPartition,
    Partition,
    SelfEdge,
    SelfParent,
    SeparationKind,
    UnknownEndpoint,
    UnknownGroup,
    Walk,
    WalkStep,
    acyclify,
    apparent_cause,
    build_graph,
    check_commute,
    coarsen,
    coarsen_walk,
    graph_from_text,
    graph_from_vscm,
    graphs_equal,
    is_acyclic_partition,
    macro_separation_transfers,
    maximally_acyclic_partition,
    p_equivalent,
    partition_from_text,
    segment_representation,
    singleton_partition,
    true_cause,
)

from conftest import fixture_text
from strategies import graph_and_partition, graph_and_scc_partition, mixed_graphs

M = SeparationKind.M
SIGMA = SeparationKind.SIGMA

PROPERTY = settings(max_examples=120, deadline=None)


def load(graph_name: str, part_name: str) -> tuple[MixedGraph, Partition]:
    return (graph_from_text(fixture_text(graph_name)),
            partition_from_text(fixture_text(part_name)))


class TestPartition:
    def test_from_mapping_keeps_order(self):
        p = Partition.from_mapping({"A": ["x"], "B": ["y", "z"]})
        assert p.labels == ("A", "B")
        assert p.block("B") == {"y", "z"}
        assert p.group_of == {"x": "A", "y": "B", "z": "B"}
        assert p.union(["A", "B"]) == {"x", "y", "z"}

    def test_duplicate_label_rejected(self):
        with pytest.raises(NotAPartition):
            Partition((("A", frozenset("x")), ("A", frozenset("y"))))

    def test_empty_block_rejected(self):
        with pytest.raises(NotAPartition):
            Partition((("A", frozenset()),))

    def test_overlapping_blocks_rejected(self):
        with pytest.raises(NotAPartition, match="more than one group"):
            Partition((("A", frozenset("xy")), ("B", frozenset("y"))))

    def test_unknown_group_rejected(self):
        p = Partition.from_mapping({"A": ["x"]})
        with pytest.raises(UnknownGroup):
            p.block("B")
        with pytest.raises(UnknownGroup):
            p.require_group("B")

    def test_cover_mismatch_rejected(self):
        g = build_graph("ab")
        with pytest.raises(NotAPartition, match="misses"):
            Partition.from_mapping({"A": ["a"]}).require_partition_of(g)
        with pytest.raises(NotAPartition, match="unknown"):
            Partition.from_mapping({"A": ["a", "b", "c"]}).require_partition_of(g)


class TestCoarsen:
    def test_crossing_edges_survive_within_edges_drop(self):
        g, p = load("chain_collider.mg", "blocks_wyz.part")
        coarse = coarsen(g, p)
        assert coarse.nodes == ("W", "Y", "Z")
        assert coarse.directed == {("W", "Y"), ("Y", "Z")}
        assert not coarse.bidirected and not coarse.undirected

    def test_two_micro_dags_can_coarsen_to_a_cycle(self):
        g, p = load("crossing_cycles.mg", "crossing_cycles.part")
        assert g.is_acyclic
        coarse = coarsen(g, p)
        assert coarse.directed == {("W", "Y"), ("Y", "W")}
        assert not coarse.is_acyclic

    def test_parallel_macro_edges_keep_their_kinds(self):
        g = build_graph("abcd", [("a", "->", "c"), ("b", "<->", "d"),
                                 ("a", "--", "d")])
        p = Partition.from_mapping({"L": ["a", "b"], "R": ["c", "d"]})
        coarse = coarsen(g, p)
        assert coarse.directed == {("L", "R")}
        assert coarse.bidirected == {("L", "R")}
        assert coarse.undirected == {("L", "R")}

    @PROPERTY
    @given(g=mixed_graphs())
    def test_singleton_partition_changes_nothing(self, g):
        assert graphs_equal(coarsen(g, singleton_partition(g)), g)

    @PROPERTY
    @given(gp=graph_and_partition())
    def test_coarse_adjacency_reflects_some_crossing_edge(self, gp):
        g, p = gp
        coarse = coarsen(g, p)
        grp = p.group_of
        for ga in coarse.nodes:
            for gb in coarse.nodes:
                if ga == gb:
                    continue
                micro = any(grp[a] == ga and grp[b] == gb
                            or grp[a] == gb and grp[b] == ga
                            for kind in ("directed", "bidirected", "undirected")
                            for a, b in getattr(g, kind))
                assert coarse.has_any_edge(ga, gb) == micro


class TestSegments:
    @pytest.fixture()
    def stitched(self):
        g = build_graph(["W2", "W1", "Y1", "Y3", "Z1"],
                        [("W2", "<->", "W1"), ("W1", "->", "Y1"),
                         ("Y3", "->", "Y1"), ("Y3", "->", "Z1")])
        p = Partition.from_mapping({"W": ["W1", "W2"], "Y": ["Y1", "Y3"],
                                    "Z": ["Z1"]})
        walk = Walk(("W2", "W1", "Y1", "Y3", "Z1"),
                    (WalkStep(EdgeKind.BIDIRECTED, "W2", "W1"),
                     WalkStep(EdgeKind.DIRECTED, "W1", "Y1"),
                     WalkStep(EdgeKind.DIRECTED, "Y1", "Y3", forward=False),
                     WalkStep(EdgeKind.DIRECTED, "Y3", "Z1")))
        return g, p, walk

    def test_segments_cut_at_group_crossings(self, stitched):
        g, p, walk = stitched
        rep = segment_representation(g, p, walk)
        assert [(label, seg.nodes) for label, seg in rep.segments] == [
            ("W", ("W2", "W1")), ("Y", ("Y1", "Y3")), ("Z", ("Z1",))]
        assert [(s.start, s.end) for s in rep.connecting_steps] == [
            ("W1", "Y1"), ("Y3", "Z1")]

    def test_coarse_projection_of_the_stitched_walk(self, stitched):
        g, p, walk = stitched
        coarse_walk = coarsen_walk(g, p, walk)
        assert coarse_walk.nodes == ("W", "Y", "Z")
        assert coarse_walk.is_path and coarse_walk.is_directed
        coarsen(g, p).validate_walk(coarse_walk)

    def test_micro_path_can_coarsen_to_a_non_path(self):
        g = build_graph(["w1", "y1", "w2", "y2"],
                        [("w1", "->", "y1"), ("y1", "->", "w2"),
                         ("w2", "->", "y2")])
        p = Partition.from_mapping({"W": ["w1", "w2"], "Y": ["y1", "y2"]})
        walk = Walk(("w1", "y1", "w2", "y2"),
                    tuple(WalkStep(EdgeKind.DIRECTED, a, b)
                          for a, b in (("w1", "y1"), ("y1", "w2"),
                                       ("w2", "y2"))))
        out = coarsen_walk(g, p, walk)
        assert out.nodes == ("W", "Y", "W", "Y")
        assert not out.is_path

    @PROPERTY
    @given(gp=graph_and_partition(max_nodes=5))
    def test_segments_reassemble_into_the_walk(self, gp):
        from groupsep import enumerate_paths
        g, p = gp
        for walk in enumerate_paths(g, g.nodes[0], g.nodes[-1]):
            rep = segment_representation(g, p, walk)
            nodes: list[str] = []
            steps: list[WalkStep] = []
            for _, seg in rep.segments:
                nodes.extend(seg.nodes)
                steps.extend(seg.steps)
            assert tuple(nodes) == walk.nodes
            connectors = iter(rep.connecting_steps)
            rebuilt = list(rep.segments[0][1].steps)
            for _, seg in rep.segments[1:]:
                rebuilt.append(next(connectors))
                rebuilt.extend(seg.steps)
            assert tuple(rebuilt) == walk.steps
            grp = p.group_of
            for label, seg in rep.segments:
                assert {grp[n] for n in seg.nodes} == {label}


class TestAcyclicPartitions:
    def test_scc_partition_of_the_two_cycle_demo(self):
        g = graph_from_text(fixture_text("mixed_demo.mg"))
        p = maximally_acyclic_partition(g)
        assert [(label, sorted(members)) for label, members in p.blocks] == [
            ("A", ["A"]), ("B", ["B", "C"]), ("D", ["D"])]
        assert is_acyclic_partition(g, p)

    def test_singletons_over_a_cycle_are_not_acyclic(self):
        g, p = load("two_cycle.mg", "singletons_ab.part")
        assert not is_acyclic_partition(g, p)

    @PROPERTY
    @given(g=mixed_graphs())
    def test_blocks_are_exactly_the_sccs(self, g):
        p = maximally_acyclic_partition(g)
        assert set(members for _, members in p.blocks) == set(g.scc.components)
        assert is_acyclic_partition(g, p)


class TestCommute:
    def test_two_cycle_with_singletons_breaks(self):
        g, p = load("two_cycle.mg", "singletons_ab.part")
        report = check_commute(g, p)
        assert isinstance(report, CommuteReport) and not report.commutes
        assert report.lhs.bidirected == {("A", "B")}
        assert not report.lhs.directed
        assert report.rhs.directed == {("A", "B"), ("B", "A")}

    def test_acyclic_partition_commutes_on_the_demo(self):
        g = graph_from_text(fixture_text("mixed_demo.mg"))
        assert check_commute(g, maximally_acyclic_partition(g)).commutes

    @PROPERTY
    @given(gp=graph_and_scc_partition())
    def test_acyclic_partitions_always_commute(self, gp):
        g, p = gp
        report = check_commute(g, p)
        assert report.commutes
        assert graphs_equal(report.lhs, report.rhs)

    @PROPERTY
    @given(gp=graph_and_partition())
    def test_lhs_and_rhs_are_the_advertised_compositions(self, gp):
        g, p = gp
        report = check_commute(g, p)
        assert graphs_equal(report.lhs, coarsen(acyclify(g), p))
        assert graphs_equal(report.rhs, coarsen(g, p))
        assert report.commutes == graphs_equal(report.lhs, report.rhs)


class TestPEquivalence:
    def test_different_node_sets_rejected(self):
        g1 = build_graph("ab")
        g2 = build_graph("ac")
        with pytest.raises(NodeSetMismatch):
            p_equivalent(g1, g2, singleton_partition(g1))

    def test_graphs_may_differ_only_inside_blocks(self):
        base = build_graph("abc", [("a", "->", "b"), ("b", "->", "c")])
        other = build_graph("abc", [("b", "->", "a"), ("b", "->", "c")])
        p = Partition.from_mapping({"L": ["a", "b"], "R": ["c"]})
        assert p_equivalent(base, other, p)
        assert not p_equivalent(base, other, singleton_partition(base))


class TestTransfer:
    def test_macro_connected_micro_separated(self):
        g, p = load("chain_collider.mg", "blocks_wyz.part")
        report = macro_separation_transfers(g, p, "W", "Z", frozenset(), M)
        assert not report.macro_sep
        assert report.micro_all_sep

    def test_undirected_bridge_reverses_the_gap(self):
        g, p = load("undirected_bridge.mg", "blocks_wyz.part")
        report = macro_separation_transfers(g, p, "W", "Z", frozenset(), SIGMA)
        assert report.macro_sep
        assert not report.micro_all_sep

    def test_conditioning_groups_map_to_their_union(self):
        g, p = load("chain_collider.mg", "blocks_wyz.part")
        report = macro_separation_transfers(g, p, "W", "Z", {"Y"}, M)
        # Conditioning on all of Y opens nothing here: the collider at Y2
        # opens but Y1 and Y3 block as non-colliders.
        assert report.micro_all_sep

    def test_query_group_validation(self):
        g, p = load("chain_collider.mg", "blocks_wyz.part")
        with pytest.raises(ValueError):
            macro_separation_transfers(g, p, "W", "W", frozenset(), M)
        with pytest.raises(ValueError):
            macro_separation_transfers(g, p, "W", "Z", {"W"}, M)
        with pytest.raises(UnknownGroup):
            macro_separation_transfers(g, p, "W", "Q", frozenset(), M)


class TestVscm:
    def test_parent_map_and_noise_pairs(self):
        g = graph_from_vscm({"x": [], "y": ["x"], "z": ["y"]},
                            [("x", "z")])
        assert g.nodes == ("x", "y", "z")
        assert g.directed == {("x", "y"), ("y", "z")}
        assert g.bidirected == {("x", "z")}

    def test_cyclic_parent_maps_are_fine(self):
        g = graph_from_vscm({"a": ["b"], "b": ["a"]})
        assert not g.is_acyclic

    def test_self_parent_rejected(self):
        with pytest.raises(SelfParent):
            graph_from_vscm({"x": ["x"]})

    def test_bad_noise_pairs_rejected(self):
        with pytest.raises(SelfEdge):
            graph_from_vscm({"x": []}, [("x", "x")])
        with pytest.raises(UnknownEndpoint):
            graph_from_vscm({"x": []}, [("x", "q")])


class TestCauses:
    def test_apparent_but_not_true(self):
        g, p = load("mediator_split.mg", "blocks_wyz_small.part")
        coarse = coarsen(g, p)
        assert apparent_cause(coarse, "W", "Z")
        assert not true_cause(g, p, "W", "Z")

    def test_true_cause_through_one_block(self):
        g, p = load("chain_collider.mg", "blocks_wyz.part")
        assert apparent_cause(coarsen(g, p), "W", "Y")
        assert true_cause(g, p, "W", "Y")
        assert not true_cause(g, p, "Z", "W")

    def test_same_group_is_never_its_own_cause(self):
        g, p = load("chain_collider.mg", "blocks_wyz.part")
        assert not apparent_cause(coarsen(g, p), "W", "W")
        assert not true_cause(g, p, "W", "W")

    @PROPERTY
    @given(gp=graph_and_partition())
    def test_true_cause_implies_apparent_cause(self, gp):
        g, p = gp
        coarse = coarsen(g, p)
        for gy in p.labels:
            for gz in p.labels:
                if true_cause(g, p, gy, gz):
                    assert apparent_cause(coarse, gy, gz)
