"""Command line entry points.

Exit codes follow one convention everywhere: 0 means the command ran and,
for check-style commands, the property holds; 1 means it ran and the
property fails (a pair is connected, violations were found, a criterion
check failed); 2 means the input was unusable, with a diagnostic naming
the file, line, and token where possible.

``--json PATH`` writes a machine-readable report carrying a schema_version
field; the bundled JSON schema validates every document shape.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path
from typing import Callable, Sequence

import click

from . import jsonout
from .discovery import discover as run_discovery
from .errors import GroupsepError
from .faithfulness import (
    check_criterion1,
    check_criterion2,
    find_faithfulness_violations,
)
from .graphs import MixedGraph, Walk
from .grouping import (
    apparent_cause,
    coarsen,
    check_commute,
    is_acyclic_partition,
    maximally_acyclic_partition,
    true_cause,
)
from .separation import (
    SeparationKind,
    acyclify,
    blocking_reports,
    separated,
)
from .errors import GraphTooLarge
from .textio import (
    graph_from_text,
    graph_to_dot,
    graph_to_text,
    partition_from_text,
    partition_to_text,
    template_from_text,
)
from .timeseries import (
    Window,
    check_mixing_causation,
    grouped_summary,
    is_causally_mixing,
    summary_graph,
    ts_faithfulness_check,
    unroll,
)

from dataclasses import dataclass


@dataclass(frozen=True)
class CommandResult:
    exit_code: int


def _fail_input(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _input_errors(f: Callable) -> Callable:
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (GroupsepError, ValueError) as exc:
            _fail_input(str(exc))
    return wrapper


def _load_graph(path: str) -> MixedGraph:
    return graph_from_text(Path(path).read_text(), source=path)


def _load_partition(path: str):
    return partition_from_text(Path(path).read_text(), source=path)


def _load_template(path: str):
    return template_from_text(Path(path).read_text(), source=path)


def _parse_pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise ValueError(f"--pair needs exactly two labels, got {text!r}")
    return parts[0], parts[1]


def _parse_labels(text: str) -> frozenset[str]:
    if not text.strip():
        return frozenset()
    parts = [p.strip() for p in text.split(",")]
    if not all(parts):
        raise ValueError(f"bad label list {text!r}")
    return frozenset(parts)


def _parse_window(text: str) -> Window:
    start_text, sep, end_text = text.partition(":")
    if not sep:
        raise ValueError(f"--window must look like a:b, got {text!r}")
    try:
        return Window(int(start_text), int(end_text))
    except ValueError as exc:
        raise ValueError(f"bad --window {text!r}: {exc}") from None


def _write_json(path: str | None, command: str, payload: dict) -> None:
    if path is not None:
        Path(path).write_text(jsonout.dumps(jsonout.document(command,
                                                             payload)))


def format_walk(walk: Walk) -> str:
    parts = [walk.nodes[0]]
    for step in walk.steps:
        if step.kind.value == "->":
            parts.append("->" if step.forward else "<-")
        else:
            parts.append(step.kind.value)
        parts.append(step.end)
    return " ".join(parts)


_graph_opt = click.option("--graph", "graph_path", required=True,
                          type=click.Path(exists=True, dir_okay=False),
                          help="Graph file.")
_partition_opt = click.option("--partition", "partition_path", required=True,
                              type=click.Path(exists=True, dir_okay=False),
                              help="Partition file.")
_template_opt = click.option("--template", "template_path", required=True,
                             type=click.Path(exists=True, dir_okay=False),
                             help="Time series template file.")
_json_opt = click.option("--json", "json_path",
                         type=click.Path(dir_okay=False),
                         help="Also write a JSON report to this path.")
_kind_opt = functools.partial(
    click.option, "--kind", type=click.Choice(["m", "sigma"]),
    show_default=True, help="Separation notion.")


@click.group()
def main() -> None:
    """Separation, grouping, and faithfulness analysis for mixed graphs."""


@main.command()
@_graph_opt
@click.option("--pair", required=True, help="The two nodes, as A,B.")
@click.option("--given", default="", help="Conditioning nodes, as A,B,...")
@_kind_opt(default="m")
@click.option("--explain", is_flag=True,
              help="Show an open path, or why each path blocks.")
@_json_opt
@_input_errors
def separate(graph_path: str, pair: str, given: str, kind: str,
             explain: bool, json_path: str | None) -> None:
    """Decide whether two nodes are separated. Exit 1 when connected."""
    g = _load_graph(graph_path)
    a, b = _parse_pair(pair)
    s = _parse_labels(given)
    sk = SeparationKind(kind)
    sep = separated(g, a, b, s, sk)
    click.echo(f"{kind}-separated" if sep else f"{kind}-connected")
    payload: dict = {"kind": kind, "pair": [a, b],
                     "conditioning": sorted(s), "separated": sep}
    if explain:
        try:
            reports = blocking_reports(g, a, b, s, sk)
        except GraphTooLarge:
            click.echo("(graph too large for a path-level explanation)")
            reports = None
        if reports is not None and sep:
            payload["blocked_paths"] = [jsonout.block_report_payload(r)
                                        for r in reports]
            for r in reports:
                index, reason = r.witness
                click.echo(f"blocked: {format_walk(r.walk)} "
                           f"at {r.walk.nodes[index]} ({reason.value})")
        elif reports is not None:
            open_report = next((r for r in reports if not r.blocked), None)
            if open_report is not None:
                payload["open_path"] = jsonout.walk_payload(open_report.walk)
                click.echo(f"open: {format_walk(open_report.walk)}")
            else:
                # Undirected edges can leave every path blocked while a
                # node-revisiting walk stays open.
                click.echo("(every path is blocked; the connection "
                           "needs a walk that revisits a node)")
    _write_json(json_path, "separate", payload)
    sys.exit(0 if sep else 1)


@main.command(name="coarsen")
@_graph_opt
@_partition_opt
@_json_opt
@_input_errors
def coarsen_cmd(graph_path: str, partition_path: str,
                json_path: str | None) -> None:
    """Print the coarse graph of a partition."""
    g = _load_graph(graph_path)
    p = _load_partition(partition_path)
    coarse = coarsen(g, p)
    click.echo(graph_to_text(coarse), nl=False)
    _write_json(json_path, "coarsen",
                {"graph": jsonout.graph_payload(coarse)})
    sys.exit(0)


@main.command(name="acyclify")
@_graph_opt
@_json_opt
@_input_errors
def acyclify_cmd(graph_path: str, json_path: str | None) -> None:
    """Print the acyclification of a graph."""
    g = _load_graph(graph_path)
    out = acyclify(g)
    click.echo(graph_to_text(out), nl=False)
    _write_json(json_path, "acyclify",
                {"graph": jsonout.graph_payload(out)})
    sys.exit(0)


@main.command(name="check-commute")
@_graph_opt
@_partition_opt
@_json_opt
@_input_errors
def check_commute_cmd(graph_path: str, partition_path: str,
                      json_path: str | None) -> None:
    """Does coarsening commute with acyclification? Exit 1 when it breaks."""
    g = _load_graph(graph_path)
    p = _load_partition(partition_path)
    report = check_commute(g, p)
    click.echo(f"commutes: {'yes' if report.commutes else 'no'}")
    click.echo("coarsen(acyclify(g)):")
    click.echo(graph_to_text(report.lhs), nl=False)
    click.echo("coarsen(g):")
    click.echo(graph_to_text(report.rhs), nl=False)
    _write_json(json_path, "check-commute",
                {"commutes": report.commutes,
                 "lhs": jsonout.graph_payload(report.lhs),
                 "rhs": jsonout.graph_payload(report.rhs)})
    sys.exit(0 if report.commutes else 1)


@main.command(name="partition-scc")
@_graph_opt
@_json_opt
@_input_errors
def partition_scc_cmd(graph_path: str, json_path: str | None) -> None:
    """Print the strongly-connected-component partition."""
    g = _load_graph(graph_path)
    p = maximally_acyclic_partition(g)
    click.echo(partition_to_text(p), nl=False)
    _write_json(json_path, "partition-scc",
                {"partition": jsonout.partition_payload(p),
                 "acyclic": is_acyclic_partition(g, p)})
    sys.exit(0)


@main.command(name="faithfulness")
@_graph_opt
@_partition_opt
@_kind_opt(default="sigma")
@click.option("--max-cond", default=1, show_default=True,
              help="Largest conditioning set size, in groups; clamped to "
                   "the group count minus two.")
@click.option("--jobs", default=1, show_default=True,
              help="Worker threads for the scan.")
@_json_opt
@_input_errors
def faithfulness_cmd(graph_path: str, partition_path: str, kind: str,
                     max_cond: int, jobs: int,
                     json_path: str | None) -> None:
    """Search for faithfulness violations. Exit 1 when any exist."""
    g = _load_graph(graph_path)
    p = _load_partition(partition_path)
    if len(p.labels) < 2:
        raise ValueError("need at least two groups")
    clamped = max(0, min(max_cond, len(p.labels) - 2))
    report = find_faithfulness_violations(g, p, SeparationKind(kind),
                                          clamped, jobs=max(1, jobs))
    click.echo(f"violations: {len(report.violations)}")
    for v in report.violations:
        given = ",".join(sorted(v.conditioning)) or "(empty)"
        click.echo(f"  {v.pair[0]},{v.pair[1]} | {given} "
                   f"class={v.category.value} kind={v.kind_used.value}")
    _write_json(json_path, "faithfulness",
                jsonout.faithfulness_payload(report))
    sys.exit(0 if report.is_empty else 1)


def _describe_criterion(name: str, report) -> str:
    if report.passed:
        return f"{name}: passed"
    failure = report.failing_condition
    detail = f"condition {failure.condition}"
    if failure.edges is not None:
        e, e2 = failure.edges
        detail += (f" between {e[0]} {e[1].value} {e[2]}"
                   f" and {e2[0]} {e2[1].value} {e2[2]}")
    if failure.node is not None:
        detail += f" at {failure.node}"
    return f"{name}: failed ({detail})"


@main.command(name="criteria")
@_graph_opt
@_partition_opt
@_json_opt
@_input_errors
def criteria_cmd(graph_path: str, partition_path: str,
                 json_path: str | None) -> None:
    """Check both sufficient criteria. Exit 0 when either passes."""
    g = _load_graph(graph_path)
    p = _load_partition(partition_path)
    r1 = check_criterion1(g, p)
    r2 = check_criterion2(g, p)
    click.echo(_describe_criterion("criterion 1", r1))
    click.echo(_describe_criterion("criterion 2", r2))
    _write_json(json_path, "criteria",
                {"criterion1": jsonout.criterion_payload(r1),
                 "criterion2": jsonout.criterion_payload(r2)})
    sys.exit(0 if r1.passed or r2.passed else 1)


@main.command(name="causes")
@_graph_opt
@_partition_opt
@click.option("--pair", required=True, help="The two groups, as Y,Z.")
@_json_opt
@_input_errors
def causes_cmd(graph_path: str, partition_path: str, pair: str,
               json_path: str | None) -> None:
    """Apparent and true causation between two groups. Exit 1 when the
    apparent relation is not a true one (or neither holds)."""
    g = _load_graph(graph_path)
    p = _load_partition(partition_path)
    group_y, group_z = _parse_pair(pair)
    p.require_group(group_y)
    p.require_group(group_z)
    coarse = coarsen(g, p)
    apparent = apparent_cause(coarse, group_y, group_z)
    true = true_cause(g, p, group_y, group_z)
    click.echo(f"apparent: {'yes' if apparent else 'no'}")
    click.echo(f"true: {'yes' if true else 'no'}")
    _write_json(json_path, "causes",
                {"pair": [group_y, group_z], "apparent": apparent,
                 "true": true})
    sys.exit(0 if true else 1)


@main.group()
def ts() -> None:
    """Time series template commands."""


def _window_option(f):
    return click.option("--window", "window_text", default=None,
                        help="Inclusive time range a:b (default covers the "
                             "maximum lag).")(f)


def _default_window(template) -> Window:
    return Window(0, max(1, template.max_lag))


@ts.command(name="unroll")
@_template_opt
@_window_option
@_json_opt
@_input_errors
def ts_unroll(template_path: str, window_text: str | None,
              json_path: str | None) -> None:
    """Unroll a template over a window; prints graph then blocks."""
    t = _load_template(template_path)
    window = (_parse_window(window_text) if window_text
              else _default_window(t))
    unrolled = unroll(t, window)
    click.echo(graph_to_text(unrolled.graph), nl=False)
    click.echo()
    click.echo(partition_to_text(unrolled.by_process), nl=False)
    _write_json(json_path, "ts-unroll",
                {"graph": jsonout.graph_payload(unrolled.graph),
                 "partition": jsonout.partition_payload(
                     unrolled.by_process)})
    sys.exit(0)


@ts.command(name="summary")
@_template_opt
@_json_opt
@_input_errors
def ts_summary(template_path: str, json_path: str | None) -> None:
    """Print the summary graph (one node per process)."""
    t = _load_template(template_path)
    g = summary_graph(t)
    click.echo(graph_to_text(g), nl=False)
    _write_json(json_path, "ts-summary",
                {"graph": jsonout.graph_payload(g)})
    sys.exit(0)


@ts.command(name="grouped-summary")
@_template_opt
@_json_opt
@_input_errors
def ts_grouped_summary(template_path: str, json_path: str | None) -> None:
    """Print the grouped summary graph (one node per group)."""
    t = _load_template(template_path)
    g = grouped_summary(t)
    click.echo(graph_to_text(g), nl=False)
    _write_json(json_path, "ts-grouped-summary",
                {"graph": jsonout.graph_payload(g)})
    sys.exit(0)


@ts.command(name="mixing")
@_template_opt
@click.option("--any-lag", is_flag=True,
              help="Let within-group walks use any positive lag, not "
                   "just lag 1.")
@click.option("--skip-self-pairs", is_flag=True,
              help="Do not require walks from a process back to itself.")
@click.option("--causes", "with_causes", is_flag=True,
              help="Also certify grouped-summary causation with witnesses.")
@_json_opt
@_input_errors
def ts_mixing(template_path: str, any_lag: bool, skip_self_pairs: bool,
              with_causes: bool, json_path: str | None) -> None:
    """Check causal mixing per group. Exit 1 when some group fails."""
    t = _load_template(template_path)
    report = is_causally_mixing(t, include_self_pairs=not skip_self_pairs,
                                unit_lag_only=not any_lag)
    for name, ok in report.per_group:
        click.echo(f"{name}: {'mixing' if ok else 'not mixing'}")
    click.echo(f"overall: {'mixing' if report.mixing else 'not mixing'}")
    payload = jsonout.mixing_payload(report)
    if with_causes and report.mixing:
        checks = check_mixing_causation(
            t, include_self_pairs=not skip_self_pairs,
            unit_lag_only=not any_lag)
        payload["causation"] = [jsonout.cause_check_payload(c)
                                for c in checks]
        for c in checks:
            if c.apparent:
                click.echo(f"{c.pair[0]} causes {c.pair[1]}: "
                           f"{format_walk(c.witness)}")
    _write_json(json_path, "ts-mixing", payload)
    sys.exit(0 if report.mixing else 1)


@ts.command(name="faithfulness")
@_template_opt
@click.option("--level", type=click.Choice(["grouped_ts",
                                            "grouped_summary"]),
              default="grouped_summary", show_default=True)
@_window_option
@_kind_opt(default="sigma")
@click.option("--max-cond", default=1, show_default=True)
@_json_opt
@_input_errors
def ts_faithfulness(template_path: str, level: str,
                    window_text: str | None, kind: str, max_cond: int,
                    json_path: str | None) -> None:
    """Faithfulness scan on the unrolled window. Exit 1 on violations."""
    t = _load_template(template_path)
    window = (_parse_window(window_text) if window_text
              else _default_window(t))
    report = ts_faithfulness_check(t, level, window, max_cond,
                                   SeparationKind(kind))
    click.echo(f"violations: {len(report.violations)}")
    for v in report.violations:
        given = ",".join(sorted(v.conditioning)) or "(empty)"
        click.echo(f"  {v.pair[0]},{v.pair[1]} | {given} "
                   f"class={v.category.value} kind={v.kind_used.value}")
    _write_json(json_path, "ts-faithfulness",
                jsonout.faithfulness_payload(report))
    sys.exit(0 if report.is_empty else 1)


@main.command(name="discover")
@_graph_opt
@_partition_opt
@_kind_opt(default="sigma")
@click.option("--sigma-aware", is_flag=True,
              help="Also test every acyclic orientation of the skeleton "
                   "against the oracle.")
@_json_opt
@_input_errors
def discover_cmd(graph_path: str, partition_path: str, kind: str,
                 sigma_aware: bool, json_path: str | None) -> None:
    """Run skeleton search and conservative orientation over the groups."""
    g = _load_graph(graph_path)
    p = _load_partition(partition_path)
    result = run_discovery(g, p, SeparationKind(kind),
                           sigma_aware=sigma_aware)
    payload = jsonout.discovery_payload(result)
    click.echo("skeleton:")
    for a, b in payload["skeleton"]:
        click.echo(f"  {a} -- {b}")
    click.echo("orientations:")
    for a, b in payload["orientations"]:
        click.echo(f"  {a} -> {b}")
    click.echo("ambiguous triples:")
    for x, y, z in payload["ambiguous_triples"]:
        click.echo(f"  ({x}, {y}, {z})")
    click.echo("diff against the true coarse graph:")
    click.echo(f"  extra adjacencies: "
               f"{_fmt_pairs(payload['diff']['extra_adjacencies'])}")
    click.echo(f"  missing adjacencies: "
               f"{_fmt_pairs(payload['diff']['missing_adjacencies'])}")
    click.echo(f"  wrong orientations: "
               f"{_fmt_pairs(payload['diff']['wrong_orientations'])}")
    if result.sigma_consistent is not None:
        click.echo(result.sigma_message)
    _write_json(json_path, "discover", payload)
    sys.exit(0)


def _fmt_pairs(pairs: Sequence[Sequence[str]]) -> str:
    if not pairs:
        return "none"
    return "; ".join(f"{a},{b}" for a, b in pairs)


@main.command(name="export-dot")
@_graph_opt
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              help="Write the DOT text here instead of stdout.")
@_input_errors
def export_dot_cmd(graph_path: str, out_path: str | None) -> None:
    """Render a graph file as Graphviz DOT."""
    g = _load_graph(graph_path)
    text = graph_to_dot(g, name=Path(graph_path).stem)
    if out_path is None:
        click.echo(text, nl=False)
    else:
        Path(out_path).write_text(text)
    sys.exit(0)


def run(argv: Sequence[str]) -> CommandResult:
    """Programmatic entry point; returns the exit code without exiting."""
    try:
        main.main(args=list(argv), prog_name="groupsep",
                  standalone_mode=False)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return CommandResult(code)
    except click.exceptions.Exit as exc:
        return CommandResult(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return CommandResult(exc.exit_code)
    return CommandResult(0)
