"""Separation, grouping, and faithfulness analysis for mixed causal graphs.

The package splits along the workflow: build graphs (``graphs``), decide
separation (``separation``), coarsen by a grouping of variables
(``grouping``), audit the grouping for faithfulness (``faithfulness``),
unroll time series templates (``timeseries``), and recover structure from
the group-level oracle (``discovery``). ``textio`` gives the plain-text
formats, ``cli`` the command line on top of it all.
"""

from .errors import (
    CyclicInput,
    DuplicateLabel,
    EmptyWindow,
    GraphTooLarge,
    GroupSetMismatch,
    GroupsepError,
    InvalidWalk,
    NoSuchMacroEdge,
    NotAPartition,
    NotMixing,
    NodeSetMismatch,
    ParseError,
    SelfEdge,
    SelfParent,
    UnknownEndpoint,
    UnknownGroup,
    UnknownNode,
)
from .graphs import (
    EdgeKind,
    MixedGraph,
    NodeId,
    SccIndex,
    Walk,
    WalkStep,
    build_graph,
    enumerate_paths,
    nodes_with_descendant_in,
    relatives,
    strongly_connected_components,
)
from .separation import (
    BlockReason,
    BlockReport,
    SeparationKind,
    acyclify,
    blocking_reports,
    brute_force_separated,
    is_blocked,
    reachability_separated,
    separated,
    sigma_via_acyclification,
)
from .grouping import (
    CommuteReport,
    GroupId,
    Partition,
    SegmentRepresentation,
    TransferReport,
    check_commute,
    coarsen,
    coarsen_walk,
    graph_from_vscm,
    graphs_equal,
    is_acyclic_partition,
    macro_separation_transfers,
    maximally_acyclic_partition,
    p_equivalent,
    segment_representation,
    singleton_partition,
)
from .faithfulness import (
    CriterionFailure,
    CriterionReport,
    EdgeBoundary,
    FaithfulnessReport,
    Violation,
    ViolationClass,
    apparent_cause,
    check_criterion1,
    check_criterion2,
    classify_violation,
    edge_boundary,
    find_faithfulness_violations,
    group_ci,
    true_cause,
)
from .timeseries import (
    CauseCheck,
    LagEdge,
    MixingReport,
    TsTemplate,
    Unrolled,
    Window,
    check_mixing_causation,
    grouped_summary,
    grouped_ts_dmg,
    is_causally_mixing,
    node_at,
    summary_graph,
    ts_faithfulness_check,
    unroll,
)
from .discovery import (
    DiscoveryDiff,
    DiscoveryResult,
    GroupCiOracle,
    PartiallyOrientedGraph,
    SkeletonResult,
    compare_to_truth,
    discover,
    meek_rule1,
    orient_conservative,
    pc_skeleton,
)
from .textio import (
    Document,
    graph_from_text,
    graph_to_dot,
    graph_to_text,
    parse_document,
    partition_from_text,
    partition_to_text,
    template_from_text,
    template_to_text,
)

__version__ = "0.1.0"
