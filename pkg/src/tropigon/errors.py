"""Exception types shared across the package.

Every domain failure raises a subclass of :class:`TropigonError`, so callers
(and the CLI) can distinguish bad input from internal bugs.
"""


class TropigonError(Exception):
    """Base class for all domain errors raised by this package."""


# ---------------------------------------------------------------------------
# polygons / triangulations


class ParityMismatch(TropigonError):
    """Genus and Maroni invariant have different parity."""


class MaroniRange(TropigonError):
    """Maroni invariant outside the admissible range for the genus."""


class NotRegular(TropigonError):
    """A height certificate was required but the triangulation is not regular."""


# ---------------------------------------------------------------------------
# curves


class NotSmooth(TropigonError):
    """The dual subdivision is not a unimodular triangulation on all lattice points."""


class WrongPolygon(TropigonError):
    """The curve's Newton polygon does not have the required shape."""


# ---------------------------------------------------------------------------
# graphs


class Disconnected(TropigonError):
    """The (multi)graph is not connected."""


class GenusZero(TropigonError):
    """The operation requires positive first Betti number."""


class NotCanonical(TropigonError):
    """The metric graph is not a canonical model (stable, no legs)."""


class UnsupportedGenus(TropigonError):
    """Catalog lookups only cover genus 3 and 4."""


class UnknownType(TropigonError):
    """Combinatorial-type name not present in the catalog."""


class BadMaroniParameter(TropigonError):
    """No Hirzebruch polygon exists for this (genus, n) pair."""


# ---------------------------------------------------------------------------
# divisors


class BadDivisor(TropigonError):
    """Divisor does not satisfy the preconditions of the requested operation."""


# ---------------------------------------------------------------------------
# covers


class NotHarmonic(TropigonError):
    """Local degree at some vertex depends on the chosen target direction."""


class DegreeVaries(TropigonError):
    """Total degree differs over different generic target points."""


class DegenerateVertex(TropigonError):
    """Some vertex has no incident edge with positive dilation."""


class ContractedLoop(TropigonError):
    """A loop edge is contracted (dilation 0), which is not allowed."""


class LengthMismatch(TropigonError):
    """Edge length, dilation and endpoint heights are inconsistent."""


# ---------------------------------------------------------------------------
# unfolding


class ForcedZeroViolated(TropigonError):
    """Input lengths break the zero constraints of the selected unfolding case."""


class NegativeLength(TropigonError):
    """A length that must be non-negative is negative."""


class UnscalableLengths(TropigonError):
    """Lengths cannot be rescaled to satisfy the requested normalization."""
