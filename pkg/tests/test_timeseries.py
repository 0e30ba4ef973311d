"""Templates, unrolling, summaries, causal mixing, and the ts-level scan."""

from __future__ import annotations

import random
import warnings

import pytest

from groupsep import (
    DuplicateLabel,
    EdgeKind,
    EmptyWindow,
    LagEdge,
    NotAPartition,
    NotMixing,
    Partition,
    SelfEdge,
    SeparationKind,
    TsTemplate,
    UnknownEndpoint,
    UnknownGroup,
    ViolationClass,
    Window,
    check_mixing_causation,
    coarsen,
    graphs_equal,
    grouped_summary,
    grouped_ts_dmg,
    is_causally_mixing,
    node_at,
    summary_graph,
    template_from_text,
    ts_faithfulness_check,
    unroll,
)
from groupsep.generators import random_mixing_template

from conftest import fixture_text

SIGMA = SeparationKind.SIGMA


@pytest.fixture(scope="module")
def ar_pair() -> TsTemplate:
    return template_from_text(fixture_text("ar_pair.tmpl"))


@pytest.fixture(scope="module")
def mix() -> TsTemplate:
    return template_from_text(fixture_text("mixing_violation.tmpl"))


def tmpl(text: str) -> TsTemplate:
    return template_from_text(text)


def _unroll_quietly(t: TsTemplate, window: Window):
    """Witness windows are often narrower than the template's maximum lag;
    the narrow-window warning is beside the point when validating them."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return unroll(t, window)


class TestValidation:
    def test_lag_edge_rules(self):
        with pytest.raises(ValueError):
            LagEdge("a", "b", 1, EdgeKind.UNDIRECTED)
        with pytest.raises(ValueError):
            LagEdge("a", "b", -1)
        with pytest.raises(SelfEdge):
            LagEdge("a", "a", 0)
        assert LagEdge("a", "a", 1).lag == 1
        assert LagEdge("a", "b", 0).kind is EdgeKind.DIRECTED

    def test_template_rules(self):
        with pytest.raises(DuplicateLabel):
            TsTemplate(("a", "a"))
        with pytest.raises(UnknownEndpoint):
            TsTemplate(("a",), (LagEdge("a", "b", 1),))
        with pytest.raises(NotAPartition, match="misses"):
            TsTemplate(("a", "b"), (), (("G", ("a",)),))
        with pytest.raises(NotAPartition, match="in groups"):
            TsTemplate(("a",), (), (("G", ("a",)), ("H", ("a",))))
        with pytest.raises(UnknownEndpoint):
            TsTemplate(("a",), (), (("G", ("a", "q")),))

    def test_grouping_is_optional_until_needed(self):
        t = TsTemplate(("a",), (LagEdge("a", "a", 1),))
        assert t.max_lag == 1
        with pytest.raises(UnknownGroup):
            t.require_grouping()

    def test_window_rules(self):
        with pytest.raises(EmptyWindow):
            Window(3, 2)
        w = Window(-1, 2)
        assert list(w.times) == [-1, 0, 1, 2]
        assert w.span == 3

    def test_node_labels(self):
        assert node_at("x", 3) == "x@3"
        assert node_at("x", -1) == "x@-1"


class TestUnroll:
    def test_ar_pair_over_three_steps(self, ar_pair):
        u = unroll(ar_pair, Window(0, 2))
        assert u.graph.nodes == ("x@0", "y@0", "x@1", "y@1", "x@2", "y@2")
        assert u.graph.directed == {
            ("x@0", "x@1"), ("x@1", "x@2"),
            ("y@0", "y@1"), ("y@1", "y@2"),
            ("x@0", "y@2"),
        }
        assert u.by_process.block("x") == {"x@0", "x@1", "x@2"}
        assert u.window == Window(0, 2)

    def test_edges_reaching_before_the_window_are_dropped(self, ar_pair):
        u = unroll(ar_pair, Window(1, 3))
        assert ("x@1", "y@3") in u.graph.directed
        assert all(not a.endswith("@0") for a, _ in u.graph.directed)

    def test_narrow_window_warns(self, ar_pair):
        with pytest.warns(UserWarning, match="lags up to 2"):
            u = unroll(ar_pair, Window(0, 1))
        # The lag-2 family never fires inside a two-step window.
        assert all(not b.startswith("y@") or a.startswith("y@")
                   for a, b in u.graph.directed)

    def test_unrolled_graph_is_acyclic_without_lag0(self, mix):
        u = unroll(mix, Window(0, 4))
        assert u.graph.is_acyclic

    def test_lag0_edges_stay_inside_one_slice(self):
        t = tmpl("process a\nprocess b\ntsedge a -> b lag 0\n"
                 "tsedge a <-> b lag 1\n")
        u = unroll(t, Window(0, 1))
        assert ("a@0", "b@0") in u.graph.directed
        assert ("a@0", "b@1") in u.graph.bidirected


class TestSummaries:
    def test_self_families_vanish(self, ar_pair):
        s = summary_graph(ar_pair)
        assert s.nodes == ("x", "y")
        assert s.directed == {("x", "y")}

    def test_summary_equals_coarsened_unroll(self, ar_pair, mix):
        for t in (ar_pair, mix):
            u = unroll(t, Window(0, t.max_lag + 2))
            assert graphs_equal(coarsen(u.graph, u.by_process),
                                summary_graph(t))

    def test_grouped_summary_of_the_mixing_fixture(self, mix):
        gs = grouped_summary(mix)
        assert gs.nodes == ("Y", "W", "Z")
        assert gs.directed == {("Y", "W"), ("Z", "W")}

    def test_grouped_ts_blocks_are_group_by_time(self, mix):
        coarse, q_prime = grouped_ts_dmg(mix, Window(0, 2))
        assert q_prime.block("W@1") == {"w1@1", "w2@1"}
        assert ("Y@0", "W@1") in coarse.directed
        assert ("Y@0", "Y@1") in coarse.directed
        assert coarse.is_acyclic

    def test_grouped_summary_is_the_grouped_ts_collapsed(self, mix):
        # Composing the two quotients agrees with grouping the summary.
        coarse, _ = grouped_ts_dmg(mix, Window(0, 3))
        by_group = {}
        for label in coarse.nodes:
            by_group.setdefault(label.split("@")[0], []).append(label)
        collapsed = coarsen(coarse, Partition.from_mapping(by_group))
        assert graphs_equal(collapsed, grouped_summary(mix))


class TestMixing:
    def test_fixture_groups_all_mix(self, mix):
        report = is_causally_mixing(mix)
        assert report.mixing
        assert report.per_group == (("Y", True), ("W", True), ("Z", True))

    def test_one_way_pair_does_not_mix(self):
        t = tmpl("process a\nprocess b\ntsedge a -> b lag 1\ngroup G = a, b\n")
        report = is_causally_mixing(t)
        assert report.per_group == (("G", False),)
        with pytest.raises(NotMixing, match="G"):
            check_mixing_causation(t)

    def test_self_pairs_flag(self):
        t = tmpl("process a\ngroup G = a\n")
        assert not is_causally_mixing(t).mixing
        assert is_causally_mixing(t, include_self_pairs=False).mixing

    def test_unit_lag_flag(self):
        t = tmpl("process a\ntsedge a -> a lag 2\ngroup G = a\n")
        assert not is_causally_mixing(t).mixing
        assert is_causally_mixing(t, unit_lag_only=False).mixing

    def test_cross_group_edges_do_not_help(self, mix):
        # w1 -> w2 -> w1 keeps W mixing; removing one leg breaks it even
        # though the group stays connected through y and z from outside.
        t = tmpl(
            "process y\nprocess w1\nprocess w2\nprocess z\n"
            "tsedge y -> y lag 1\ntsedge z -> z lag 1\n"
            "tsedge y -> w1 lag 1\ntsedge z -> w2 lag 1\n"
            "tsedge w1 -> w2 lag 1\n"
            "group Y = y\ngroup W = w1, w2\ngroup Z = z\n")
        assert [ok for _, ok in is_causally_mixing(t).per_group] == [
            True, False, True]


class TestCausation:
    def test_fixture_causes(self, mix):
        checks = {c.pair: c for c in check_mixing_causation(mix)}
        assert len(checks) == 6
        apparent = {pair for pair, c in checks.items() if c.apparent}
        assert apparent == {("Y", "W"), ("Z", "W")}
        for pair in apparent:
            assert checks[pair].true

    def test_fixture_witnesses(self, mix):
        checks = {c.pair: c for c in check_mixing_causation(mix)}
        yw = checks[("Y", "W")]
        assert yw.witness.nodes == ("y@0", "w1@1")
        assert yw.window == Window(0, 1)
        zw = checks[("Z", "W")]
        assert zw.witness.nodes == ("z@0", "w2@1")

    def test_non_causes_carry_no_witness(self, mix):
        checks = {c.pair: c for c in check_mixing_causation(mix)}
        assert not checks[("W", "Y")].apparent
        assert not checks[("W", "Y")].true
        assert checks[("W", "Y")].witness is None

    def test_witness_needs_a_within_group_hop(self):
        # The entry process differs from the exit process, so the witness
        # must ride the within-group unit-lag edge before leaving.
        t = tmpl(
            "process a\nprocess b1\nprocess b2\nprocess c\n"
            "tsedge a -> a lag 1\ntsedge c -> c lag 1\n"
            "tsedge b1 -> b2 lag 1\ntsedge b2 -> b1 lag 1\n"
            "tsedge a -> b1 lag 1\ntsedge b2 -> c lag 1\n"
            "group A = a\ngroup B = b1, b2\ngroup C = c\n")
        checks = {c.pair: c for c in check_mixing_causation(t)}
        ac = checks[("A", "C")]
        assert ac.witness.nodes == ("a@0", "b1@1", "b2@2", "c@3")
        assert ac.window == Window(0, 3)

    def test_witnesses_are_directed_paths_in_the_unrolled_graph(self, mix):
        for check in check_mixing_causation(mix):
            if check.witness is None:
                continue
            u = _unroll_quietly(mix, check.window)
            u.graph.validate_walk(check.witness)
            assert check.witness.is_path and check.witness.is_directed

    def test_random_templates_witness_every_apparent_cause(self):
        rng = random.Random(29)
        done = 0
        while done < 10:
            t = random_mixing_template(rng)
            assert is_causally_mixing(t).mixing
            for check in check_mixing_causation(t):
                assert check.apparent == check.true
                if check.witness is None:
                    continue
                u = _unroll_quietly(t, check.window)
                u.graph.validate_walk(check.witness)
                assert check.witness.is_directed
                group_of = t.group_of()
                first, last = check.witness.nodes[0], check.witness.nodes[-1]
                assert group_of[first.split("@")[0]] == check.pair[0]
                assert group_of[last.split("@")[0]] == check.pair[1]
            done += 1


class TestTsFaithfulness:
    def test_grouped_summary_scan_finds_the_seeded_violation(self, mix):
        report = ts_faithfulness_check(mix, "grouped_summary", Window(0, 4), 1)
        assert [(v.pair, sorted(v.conditioning), v.category)
                for v in report.violations] == [
            (("Y", "Z"), ["W"], ViolationClass.LOCAL)]

    def test_grouped_ts_scan_runs_clean_on_the_ar_pair(self, ar_pair):
        report = ts_faithfulness_check(ar_pair, "grouped_ts", Window(0, 2), 0)
        assert report.is_empty

    def test_unknown_level_rejected(self, mix):
        with pytest.raises(ValueError, match="level"):
            ts_faithfulness_check(mix, "summary", Window(0, 2), 0)

    def test_needs_a_grouping(self):
        t = TsTemplate(("a",), (LagEdge("a", "a", 1),))
        with pytest.raises(UnknownGroup):
            ts_faithfulness_check(t, "grouped_summary", Window(0, 2), 0)
