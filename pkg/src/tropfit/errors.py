"""Exception hierarchy shared by all tropfit modules.

Every domain error derives from :class:`TropfitError`; the CLI maps the
subclasses onto its exit codes (parse = 2, dimension/contract = 3,
degenerate/infeasible = 4, size limit = 5).
"""


class TropfitError(Exception):
    """Base class for all tropfit domain errors."""


class ParseError(TropfitError):
    """Malformed input file (CSV, JSON, or config)."""


class NonFinite(TropfitError):
    """A coordinate that must be a finite real is NaN or infinite."""


class DimTooSmall(TropfitError):
    """Ambient dimension below the supported minimum."""


class DimMismatch(TropfitError):
    """Operands live in tropical tori of different dimensions."""


class NotSquare(TropfitError):
    """Tropical determinant of a non-square matrix."""


class RankExceedsDim(TropfitError):
    """Generator rank m must satisfy 1 <= m < d."""


class InvalidPlucker(TropfitError):
    """Coordinates fail the three-term exchange condition."""


class DegeneratePlucker(TropfitError):
    """Projection undefined: every candidate term is -inf for some coordinate."""


class NotGeneralPosition(TropfitError):
    """Two points with a repeated coordinate difference; carries the offending pairs."""

    def __init__(self, pairs):
        self.pairs = list(pairs)
        listed = ", ".join(f"({i},{j})" for i, j in self.pairs)
        super().__init__(f"coordinate differences collide at index pairs {listed}")


class DegenerateSlope(TropfitError):
    """Two-point line interpolation with slope in {0, 1} or a vertical segment."""


class Infeasible(TropfitError):
    """No curve of the requested shape passes through the given points."""


class Degenerate(TropfitError):
    """Input configuration too special for a unique answer."""


class EmptyGrid(TropfitError):
    """Grid specification produces no nodes."""


class UnsupportedDim(TropfitError):
    """Operation defined only for a specific ambient dimension."""


class BadWeights(TropfitError):
    """Mixture weights are negative or do not sum to one."""


class BadParams(TropfitError):
    """Invalid Monte Carlo experiment parameters."""


class LimitExceeded(TropfitError):
    """Problem size beyond the documented complexity guard."""
