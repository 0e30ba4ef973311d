"""Plain-text graph, partition, and template formats, plus DOT export.

One declaration per line; blank lines and lines starting with '#' are
skipped. Labels are drawn from [A-Za-z0-9_@.+-] so they survive the list
syntax (commas separate members) and the unrolled time-step naming.

    node A                      # graph files
    edge A -> B                 # also <-> and --
    group W = A, B              # partition files (and template groups)
    process X                   # template files
    tsedge X -> Y lag 1         # also <-> ; lag is a non-negative integer

All syntax and semantic problems in input text raise ParseError carrying
the source name, line number, and offending token, so the command line can
point at the exact spot. Writers emit the same format back; parsing a
written graph reproduces it exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .graphs import EdgeKind, MixedGraph, build_graph
from .grouping import Partition
from .timeseries import LagEdge, TsTemplate

__all__ = [
    "Document",
    "parse_document",
    "graph_from_text",
    "partition_from_text",
    "template_from_text",
    "graph_to_text",
    "partition_to_text",
    "template_to_text",
    "graph_to_dot",
]

_LABEL = re.compile(r"[A-Za-z0-9_@.+-]+\Z")
_EDGE_OPS = {"->": EdgeKind.DIRECTED, "<->": EdgeKind.BIDIRECTED,
             "--": EdgeKind.UNDIRECTED}
_TS_OPS = {"->": EdgeKind.DIRECTED, "<->": EdgeKind.BIDIRECTED}


@dataclass(frozen=True)
class Document:
    """Syntactic content of one file, before semantic assembly."""

    source: str
    nodes: tuple[tuple[int, str], ...] = ()
    edges: tuple[tuple[int, str, EdgeKind, str], ...] = ()
    groups: tuple[tuple[int, str, tuple[str, ...]], ...] = ()
    processes: tuple[tuple[int, str], ...] = ()
    tsedges: tuple[tuple[int, str, EdgeKind, str, int], ...] = ()


def _check_label(label: str, source: str, line_no: int) -> str:
    if not _LABEL.match(label):
        raise ParseError("invalid label", source=source, line_no=line_no,
                         token=label)
    return label


def _split_members(rest: str, source: str, line_no: int) -> tuple[str, ...]:
    members = tuple(part.strip() for part in rest.split(","))
    if any(not part for part in members):
        raise ParseError("empty member in list", source=source,
                         line_no=line_no, token=rest.strip() or ",")
    for part in members:
        _check_label(part, source, line_no)
    return members


def parse_document(text: str, source: str = "<input>") -> Document:
    """Line-level parse of any of the three formats into one Document."""
    nodes: list[tuple[int, str]] = []
    edges: list[tuple[int, str, EdgeKind, str]] = []
    groups: list[tuple[int, str, tuple[str, ...]]] = []
    processes: list[tuple[int, str]] = []
    tsedges: list[tuple[int, str, EdgeKind, str, int]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        keyword = fields[0]
        if keyword == "node":
            if len(fields) != 2:
                raise ParseError("expected: node <label>", source=source,
                                 line_no=line_no, token=line)
            nodes.append((line_no, _check_label(fields[1], source, line_no)))
        elif keyword == "edge":
            if len(fields) != 4 or fields[2] not in _EDGE_OPS:
                raise ParseError("expected: edge <a> -> <b> (or <-> or --)",
                                 source=source, line_no=line_no, token=line)
            a = _check_label(fields[1], source, line_no)
            b = _check_label(fields[3], source, line_no)
            edges.append((line_no, a, _EDGE_OPS[fields[2]], b))
        elif keyword == "group":
            body = line[len("group"):].strip()
            name, eq, rest = body.partition("=")
            name = name.strip()
            if not eq or not name:
                raise ParseError("expected: group <label> = <member>, ...",
                                 source=source, line_no=line_no, token=line)
            _check_label(name, source, line_no)
            groups.append((line_no, name,
                           _split_members(rest, source, line_no)))
        elif keyword == "process":
            if len(fields) != 2:
                raise ParseError("expected: process <label>", source=source,
                                 line_no=line_no, token=line)
            processes.append((line_no,
                              _check_label(fields[1], source, line_no)))
        elif keyword == "tsedge":
            if (len(fields) != 6 or fields[2] not in _TS_OPS
                    or fields[4] != "lag"):
                raise ParseError(
                    "expected: tsedge <a> -> <b> lag <n> (or <->)",
                    source=source, line_no=line_no, token=line)
            a = _check_label(fields[1], source, line_no)
            b = _check_label(fields[3], source, line_no)
            if not fields[5].isdigit():
                raise ParseError("lag must be a non-negative integer",
                                 source=source, line_no=line_no,
                                 token=fields[5])
            tsedges.append((line_no, a, _TS_OPS[fields[2]], b,
                            int(fields[5])))
        else:
            raise ParseError("unknown keyword", source=source,
                             line_no=line_no, token=keyword)
    return Document(source, tuple(nodes), tuple(edges), tuple(groups),
                    tuple(processes), tuple(tsedges))


def graph_from_text(text: str, source: str = "<input>") -> MixedGraph:
    """Assemble a mixed graph, rejecting the usual structural mistakes.

    Every edge endpoint must be declared by a node line; self-edges and a
    repeated edge of the same type between the same pair are errors.
    """
    doc = parse_document(text, source)
    if doc.groups or doc.processes or doc.tsedges:
        line_no = min(l for l, *_ in
                      (*doc.groups, *doc.processes, *doc.tsedges))
        raise ParseError("not a graph file", source=source, line_no=line_no,
                         token="group/process/tsedge")
    seen: dict[str, int] = {}
    for line_no, label in doc.nodes:
        if label in seen:
            raise ParseError("duplicate node label", source=source,
                             line_no=line_no, token=label)
        seen[label] = line_no
    seen_edges: set[tuple[EdgeKind, frozenset[str]]] = set()
    for line_no, a, kind, b in doc.edges:
        for endpoint in (a, b):
            if endpoint not in seen:
                raise ParseError("edge endpoint not declared",
                                 source=source, line_no=line_no,
                                 token=endpoint)
        if a == b:
            raise ParseError("self-edges are not allowed", source=source,
                             line_no=line_no, token=a)
        key = (kind, frozenset((a, b)) if kind is not EdgeKind.DIRECTED
               else frozenset(((a, b),)))
        if key in seen_edges:
            raise ParseError("duplicate edge", source=source,
                             line_no=line_no,
                             token=f"{a} {kind.value} {b}")
        seen_edges.add(key)
    return build_graph([label for _, label in doc.nodes],
                       [(a, kind, b) for _, a, kind, b in doc.edges])


def partition_from_text(text: str, source: str = "<input>") -> Partition:
    """Assemble a partition from group lines."""
    doc = parse_document(text, source)
    if doc.nodes or doc.edges or doc.processes or doc.tsedges:
        line_no = min(l for l, *_ in
                      (*doc.nodes, *doc.edges, *doc.processes, *doc.tsedges))
        raise ParseError("not a partition file", source=source,
                         line_no=line_no, token="node/edge/process/tsedge")
    if not doc.groups:
        raise ParseError("no group lines", source=source, line_no=1,
                         token="group")
    labels: dict[str, int] = {}
    assigned: dict[str, str] = {}
    for line_no, name, members in doc.groups:
        if name in labels:
            raise ParseError("duplicate group label", source=source,
                             line_no=line_no, token=name)
        labels[name] = line_no
        for member in members:
            if member in assigned:
                raise ParseError(
                    f"node already in group {assigned[member]!r}",
                    source=source, line_no=line_no, token=member)
            assigned[member] = name
    return Partition.from_mapping(
        {name: members for _, name, members in doc.groups})


def template_from_text(text: str, source: str = "<input>") -> TsTemplate:
    """Assemble a time series template; group lines (over processes) are
    optional and become the template's process grouping."""
    doc = parse_document(text, source)
    if doc.nodes or doc.edges:
        line_no = min(l for l, *_ in (*doc.nodes, *doc.edges))
        raise ParseError("not a template file", source=source,
                         line_no=line_no, token="node/edge")
    if not doc.processes:
        raise ParseError("no process lines", source=source, line_no=1,
                         token="process")
    seen: dict[str, int] = {}
    for line_no, label in doc.processes:
        if label in seen:
            raise ParseError("duplicate process label", source=source,
                             line_no=line_no, token=label)
        seen[label] = line_no
    lag_edges: list[LagEdge] = []
    seen_lags: set[tuple[EdgeKind, object, int]] = set()
    for line_no, a, kind, b, lag in doc.tsedges:
        for endpoint in (a, b):
            if endpoint not in seen:
                raise ParseError("tsedge endpoint not declared",
                                 source=source, line_no=line_no,
                                 token=endpoint)
        if a == b and lag == 0:
            raise ParseError("lag-0 edges need distinct processes",
                             source=source, line_no=line_no, token=a)
        key = (kind, (a, b) if kind is EdgeKind.DIRECTED
               else frozenset(((a, lag), (b, 0))), lag)
        if key in seen_lags:
            raise ParseError("duplicate tsedge", source=source,
                             line_no=line_no,
                             token=f"{a} {kind.value} {b} lag {lag}")
        seen_lags.add(key)
        lag_edges.append(LagEdge(a, b, lag, kind))
    grouping = None
    if doc.groups:
        assigned: dict[str, str] = {}
        for line_no, name, members in doc.groups:
            for member in members:
                if member not in seen:
                    raise ParseError("group member is not a process",
                                     source=source, line_no=line_no,
                                     token=member)
                if member in assigned:
                    raise ParseError(
                        f"process already in group {assigned[member]!r}",
                        source=source, line_no=line_no, token=member)
                assigned[member] = name
        names = [name for _, name, _ in doc.groups]
        if len(set(names)) != len(names):
            dup = next(n for i, n in enumerate(names) if n in names[:i])
            line_no = [l for l, n, _ in doc.groups if n == dup][1]
            raise ParseError("duplicate group label", source=source,
                             line_no=line_no, token=dup)
        grouping = tuple((name, members) for _, name, members in doc.groups)
    return TsTemplate(tuple(label for _, label in doc.processes),
                      tuple(lag_edges), grouping)


# --- writers ---------------------------------------------------------------

def graph_to_text(g: MixedGraph) -> str:
    lines = [f"node {label}" for label in g.nodes]
    for a, kind, b in g.typed_edges():
        lines.append(f"edge {a} {kind.value} {b}")
    return "\n".join(lines) + "\n"


def partition_to_text(p: Partition) -> str:
    lines = []
    for label, block in p.blocks:
        members = ", ".join(sorted(block))
        lines.append(f"group {label} = {members}")
    return "\n".join(lines) + "\n"


def template_to_text(t: TsTemplate) -> str:
    lines = [f"process {label}" for label in t.processes]
    for e in t.lag_edges:
        lines.append(f"tsedge {e.src} {e.kind.value} {e.dst} lag {e.lag}")
    if t.grouping:
        for name, members in t.grouping:
            lines.append(f"group {name} = {', '.join(members)}")
    return "\n".join(lines) + "\n"


_DOT_STYLE = {EdgeKind.DIRECTED: "forward", EdgeKind.BIDIRECTED: "both",
              EdgeKind.UNDIRECTED: "none"}


def graph_to_dot(g: MixedGraph, name: str = "g") -> str:
    """Graphviz rendering; edge heads encode the three edge types."""
    lines = [f"digraph \"{name}\" {{"]
    for label in g.nodes:
        lines.append(f"  \"{label}\";")
    for a, kind, b in g.typed_edges():
        lines.append(f"  \"{a}\" -> \"{b}\" [dir={_DOT_STYLE[kind]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
