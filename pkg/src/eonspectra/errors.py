"""Exception hierarchy shared across the package.

``InputError`` marks problems with user-supplied documents (topology,
demand or architecture files); the CLI maps it to exit code 1.  Everything
else is a programming or guard error and surfaces as a normal exception.
"""


class InputError(ValueError):
    """A user-supplied input document is invalid."""


class TopologyParseError(InputError):
    """Topology document is structurally invalid."""


class DuplicateEdgeError(InputError):
    """Two links share the same ordered node pair."""


class NonpositiveWeightError(InputError):
    """A link weight is zero or negative."""


class MissingNodeError(InputError):
    """An edge or demand references a node that does not exist."""


class DemandError(InputError):
    """A demand entry violates its invariants."""


class ArchitectureError(InputError):
    """An architecture entry violates its invariants."""


class UnreachableError(InputError):
    """One or more demands have no route.

    Carries the offending (src, dst) label pairs in ``pairs``.
    """

    def __init__(self, pairs):
        self.pairs = list(pairs)
        super().__init__(f"no route for demand pairs: {self.pairs}")


class SimulatorFault(RuntimeError):
    """Internal inconsistency detected by the simulator (a bug, not blocking)."""
