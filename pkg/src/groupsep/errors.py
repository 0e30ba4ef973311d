"""Exception taxonomy shared by every groupsep module.

Each error names the contract it enforces; callers that want a single
catch-all can handle :class:`GroupsepError`.
"""


class GroupsepError(Exception):
    """Base class for all groupsep-specific errors."""


class DuplicateLabel(GroupsepError):
    """A node label occurs more than once in a graph under construction."""


class SelfEdge(GroupsepError):
    """An edge was declared with both endpoints equal."""


class UnknownEndpoint(GroupsepError):
    """An edge refers to a label that is not in the node list."""


class UnknownNode(GroupsepError):
    """A query names a node that the graph does not contain."""


class InvalidWalk(GroupsepError):
    """A walk is malformed or uses an edge the graph does not have."""


class GraphTooLarge(GroupsepError):
    """Exhaustive path enumeration refused: graph exceeds the node budget."""


class CyclicInput(GroupsepError):
    """An operation restricted to acyclic graphs received a cyclic one."""


class NotAPartition(GroupsepError):
    """Blocks are empty, overlap, or do not cover the node set exactly."""


class NodeSetMismatch(GroupsepError):
    """Two graphs expected to share a node set do not."""


class UnknownGroup(GroupsepError):
    """A query names a group that the partition does not contain."""


class NoSuchMacroEdge(GroupsepError):
    """The requested coarse edge is absent from the coarse graph."""


class SelfParent(GroupsepError):
    """A structural-model variable lists itself among its parents."""


class EmptyWindow(GroupsepError):
    """A time window contains no time steps."""


class NotMixing(GroupsepError):
    """The causal-mixing precondition does not hold for the grouping."""


class GroupSetMismatch(GroupsepError):
    """Two group-level objects expected to share a group set do not."""


class ParseError(GroupsepError):
    """A text input is malformed; carries file, line, and token context.

    Attributes:
        source: name of the file or stream being parsed.
        line_no: 1-based line number of the offending line.
        token: the token (or line fragment) that failed to parse.
    """

    def __init__(self, message: str, *, source: str = "<string>",
                 line_no: int = 0, token: str = "") -> None:
        self.source = source
        self.line_no = line_no
        self.token = token
        super().__init__(f"{source}:{line_no}: {message}"
                         + (f" (at {token!r})" if token else ""))
