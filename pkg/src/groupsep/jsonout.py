"""JSON payloads for command output, all stamped with a schema version.

Every document is ``{"schema_version": ..., "command": ..., ...}``; the
shipped schema (``schema/output.schema.json``) validates any of them.
Collections are emitted in deterministic order so equal runs produce
byte-for-byte equal files.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any, Iterable, Mapping

from .discovery import DiscoveryResult
from .faithfulness import CriterionReport, FaithfulnessReport
from .graphs import MixedGraph, Walk
from .grouping import Partition
from .separation import BlockReport
from .timeseries import CauseCheck, MixingReport

SCHEMA_VERSION = "1"

__all__ = [
    "SCHEMA_VERSION",
    "document",
    "dumps",
    "load_schema",
    "graph_payload",
    "partition_payload",
    "walk_payload",
    "block_report_payload",
    "faithfulness_payload",
    "criterion_payload",
    "mixing_payload",
    "cause_check_payload",
    "discovery_payload",
]


def document(command: str, payload: Mapping[str, Any]) -> dict[str, Any]:
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION,
                           "command": command}
    doc.update(payload)
    return doc


def dumps(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_schema() -> dict[str, Any]:
    text = (resources.files("groupsep") / "schema"
            / "output.schema.json").read_text()
    return json.loads(text)


def graph_payload(g: MixedGraph) -> dict[str, Any]:
    return {"nodes": list(g.nodes),
            "edges": [[a, kind.value, b] for a, kind, b in g.typed_edges()]}


def partition_payload(p: Partition) -> list[list[Any]]:
    return [[label, sorted(block)] for label, block in p.blocks]


def walk_payload(walk: Walk) -> dict[str, Any]:
    return {"nodes": list(walk.nodes),
            "steps": [[s.start, s.kind.value if s.forward
                       else "<-", s.end] for s in walk.steps]}


def block_report_payload(report: BlockReport) -> dict[str, Any]:
    out: dict[str, Any] = {"walk": walk_payload(report.walk),
                           "blocked": report.blocked}
    if report.witness is not None:
        index, reason = report.witness
        out["witness"] = {"index": index, "reason": reason.value}
    return out


def faithfulness_payload(report: FaithfulnessReport) -> dict[str, Any]:
    return {
        "kind": report.kind.value,
        "max_cond_groups": report.max_cond_groups,
        "violations": [
            {"pair": list(v.pair),
             "conditioning": sorted(v.conditioning),
             "kind_used": v.kind_used.value,
             "class": v.category.value}
            for v in report.violations],
    }


def criterion_payload(report: CriterionReport) -> dict[str, Any]:
    out: dict[str, Any] = {"passed": report.passed}
    failure = report.failing_condition
    if failure is None:
        out["failing_condition"] = None
    else:
        detail: dict[str, Any] = {"condition": failure.condition}
        if failure.edges is not None:
            detail["edges"] = [[e[0], e[1].value, e[2]]
                               for e in failure.edges]
        if failure.node is not None:
            detail["node"] = failure.node
        out["failing_condition"] = detail
    return out


def mixing_payload(report: MixingReport) -> dict[str, Any]:
    return {"per_group": [[name, ok] for name, ok in report.per_group],
            "mixing": report.mixing}


def cause_check_payload(check: CauseCheck) -> dict[str, Any]:
    out: dict[str, Any] = {"pair": list(check.pair),
                           "apparent": check.apparent,
                           "true": check.true}
    if check.witness is not None:
        out["witness"] = walk_payload(check.witness)
    if check.window is not None:
        out["window"] = [check.window.start, check.window.end]
    return out


def discovery_payload(result: DiscoveryResult) -> dict[str, Any]:
    skel = result.skeleton
    order = {g: i for i, g in enumerate(skel.groups)}

    def sorted_pairs(pairs: Iterable[tuple[str, str]]) -> list[list[str]]:
        return [list(p) for p in
                sorted(pairs, key=lambda e: (order[e[0]], order[e[1]]))]

    payload: dict[str, Any] = {
        "groups": list(skel.groups),
        "skeleton": sorted_pairs(skel.edges),
        "sepsets": [[list(pair), sorted(s)] for pair, s in skel.sepsets],
        "orientations": sorted_pairs(result.oriented.orientations),
        "ambiguous_triples": [
            list(t) for t in sorted(
                result.oriented.ambiguous_triples,
                key=lambda t: (order[t[0]], order[t[1]], order[t[2]]))],
        "diff": {
            "extra_adjacencies": sorted_pairs(result.diff.extra_adjacencies),
            "missing_adjacencies": sorted_pairs(
                result.diff.missing_adjacencies),
            "wrong_orientations": sorted_pairs(
                result.diff.wrong_orientations),
            "ambiguous_triples": [
                list(t) for t in sorted(
                    result.diff.ambiguous_triples,
                    key=lambda t: (order[t[0]], order[t[1]], order[t[2]]))],
        },
    }
    if result.sigma_consistent is not None:
        payload["sigma_consistent"] = result.sigma_consistent
        payload["sigma_message"] = result.sigma_message
    return payload
