"""Exception types shared across the package.

Input problems (malformed documents, impossible references, bad lengths)
raise subclasses of :class:`InputError`.  Conditions that make an instance
unfoldable are not exceptions at all; they travel inside verdicts.  The
remaining classes mark internal invariant breaks and are never expected to
surface when the library is used through its public entry points.
"""

from __future__ import annotations


class FlatFoldError(Exception):
    """Base class for every error raised by this package."""


class InputError(FlatFoldError):
    """Base class for problems with user-supplied documents or arguments."""


class MalformedInput(InputError):
    """The instance document violates the schema or references nothing."""


class UnknownVertex(InputError):
    """A vertex id was used that the graph does not contain."""


class NonPositiveLength(InputError):
    """Edge lengths must be strictly positive rationals."""


class NonPlanarEmbedding(InputError):
    """The rotation system fails the per-component Euler count V - E + F = 2."""


class EmptySet(InputError):
    """A diameter was requested for an empty vertex collection."""


class TooLarge(InputError):
    """The exhaustive reference decider refuses instances past its bound."""


class InternalError(FlatFoldError):
    """Base class for invariant violations inside the solver itself."""


class ClosureViolation(FlatFoldError):
    """Coordinate assignment found an edge whose endpoints cannot both hold.

    Carries the id of the first offending edge in depth-first order.  This
    is not an input error: the instance is well formed, it just cannot fold,
    so callers translate it into an unsatisfiable verdict.
    """

    def __init__(self, edge_id: str, detail: str = ""):
        self.edge_id = edge_id
        msg = f"closure violated at edge {edge_id!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class FlatCountViolation(FlatFoldError):
    """A vertex carries a number of straight angles other than zero or two."""

    def __init__(self, vertex: str, count: int):
        self.vertex = vertex
        self.count = count
        super().__init__(
            f"vertex {vertex!r} has {count} straight angle(s); only 0 or 2 allowed"
        )


class DiameterViolation(FlatFoldError):
    """A nested component is wider than the face that must contain it."""

    def __init__(self, component: str, parent_face: int, child: object, parent: object):
        self.component = component
        self.parent_face = parent_face
        self.child_diameter = child
        self.parent_diameter = parent
        super().__init__(
            f"component rooted at {component!r} folds to width {child}, "
            f"exceeding width {parent} of its containing face {parent_face}"
        )


class InternalDegeneracy(InternalError):
    """A reduction step tried to wrap around onto its own flank.

    Unreachable when the face passed its closure check; raised instead of
    silently producing wrong constraints if a caller skips that check.
    """


class StructureViolation(InternalError):
    """A variable does not appear in exactly one red and one blue clause."""


class TotalsMismatch(InternalError):
    """Red and blue clause targets disagree in total.

    The totals are provably equal for constraint systems generated from a
    well formed embedding, so this class exists only as a guard rail for
    hand-built clause systems fed directly into the flow stage.
    """
