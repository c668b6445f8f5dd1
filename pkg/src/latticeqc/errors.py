"""Exception types. Each maps to a distinct CLI exit code."""


class LatticeQCError(Exception):
    exit_code = 1
    kind = "error"


class ParseError(LatticeQCError, ValueError):
    exit_code = 2
    kind = "parse"


class DimensionError(LatticeQCError, ValueError):
    exit_code = 3
    kind = "dimension"


class SamplingError(LatticeQCError, ValueError):
    """Grid too coarse (or too small) for the requested propagation."""

    exit_code = 4
    kind = "sampling"


class FunctionClassError(LatticeQCError, ValueError):
    """Boolean function is neither constant nor balanced."""

    exit_code = 5
    kind = "function-class"
