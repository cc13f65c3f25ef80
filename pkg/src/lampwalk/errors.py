"""Exception types shared across the package."""


class GraphSpecError(ValueError):
    """Malformed graph specification or invalid graph data."""


class IsolatedVertexError(GraphSpecError):
    """A walk kernel was requested on a graph with a degree-0 vertex."""


class BudgetError(RuntimeError):
    """A size/memory budget was exceeded; the message names the offender."""
