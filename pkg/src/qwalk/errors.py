"""Exception hierarchy for qwalk.

Every error raised by the library derives from :class:`QWalkError`, which is
itself a ``ValueError`` so callers that only care about bad input can catch
the builtin.
"""


class QWalkError(ValueError):
    """Base class for all qwalk errors."""


# -- graph -----------------------------------------------------------------

class DuplicateVertex(QWalkError):
    def __init__(self, vertex):
        super().__init__(f"duplicate vertex label {vertex!r}")
        self.vertex = vertex


class UnknownVertex(QWalkError):
    def __init__(self, vertex):
        super().__init__(f"edge endpoint {vertex!r} is not a declared vertex")
        self.vertex = vertex


class AsymmetricEdge(QWalkError):
    def __init__(self, x, j):
        super().__init__(f"edge ({x!r}, {j!r}) has no reverse edge ({j!r}, {x!r})")
        self.x, self.j = x, j


class NonUnitaryCoin(QWalkError):
    def __init__(self, x, deviation=None):
        msg = f"coin at vertex {x!r} is not unitary"
        if deviation is not None:
            msg += f" (max |A^dag A - I| = {deviation:.3e})"
        super().__init__(msg)
        self.x = x


class CoinDimensionMismatch(QWalkError):
    def __init__(self, x, expected, got):
        super().__init__(
            f"coin at vertex {x!r} has shape {got}, neighborhood size is {expected}")
        self.x = x


class InvalidNeighborhood(QWalkError):
    def __init__(self, x, detail):
        super().__init__(f"neighborhood order at vertex {x!r}: {detail}")
        self.x = x


class InvalidWidth(QWalkError):
    pass


class InvalidDimensions(QWalkError):
    pass


# -- fock ------------------------------------------------------------------

class InvalidMode(QWalkError):
    pass


class SizeOverflow(QWalkError):
    pass


# -- evolution -------------------------------------------------------------

class ScheduleLengthMismatch(QWalkError):
    pass


class ModeIndexMismatch(QWalkError):
    pass


# -- measurement -----------------------------------------------------------

class MixedWalkerNumber(QWalkError):
    pass


class UnsupportedWalkerCount(QWalkError):
    pass


class ZeroProbabilityEvent(QWalkError):
    pass


class AmbiguousSpecies(QWalkError):
    """Species-resolved detection needs one walker per distinct species."""


class DegenerateMatrix(QWalkError):
    pass


class LengthMismatch(QWalkError):
    pass


# -- optical ---------------------------------------------------------------

class InvalidLevels(QWalkError):
    pass


class AlphaOutOfRange(QWalkError):
    pass


class DimensionMismatch(QWalkError):
    pass


class ZeroField(QWalkError):
    pass


# -- cli -------------------------------------------------------------------

class ConfigParseError(QWalkError):
    def __init__(self, field, detail):
        super().__init__(f"config field {field!r}: {detail}")
        self.field = field
