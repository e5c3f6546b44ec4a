"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI prints
on stderr.  All of them derive from :class:`CyctomoError`.
"""


class CyctomoError(Exception):
    code = "error"


class DivisionByZero(CyctomoError, ZeroDivisionError):
    code = "division_by_zero"


class NotAUnit(CyctomoError, ValueError):
    code = "not_a_unit"


class NotReal(CyctomoError, ValueError):
    code = "not_real"


class SubfieldAbsent(CyctomoError, ValueError):
    code = "subfield_absent"


class NotInSubfield(CyctomoError, ValueError):
    code = "not_in_subfield"


class NotADivisor(CyctomoError, ValueError):
    code = "not_a_divisor"


class PrecisionExhausted(CyctomoError, ArithmeticError):
    code = "precision_exhausted"


class OrderTooSmall(CyctomoError, ValueError):
    code = "order_too_small"


class UnsupportedField(CyctomoError, ValueError):
    code = "unsupported_field"


class MalformedReference(CyctomoError, ValueError):
    code = "malformed_reference"


class OrderMismatch(CyctomoError, ValueError):
    code = "order_mismatch"


class WindowDegenerate(CyctomoError, ValueError):
    code = "window_degenerate"


class NoInternalSpace(CyctomoError, ValueError):
    code = "no_internal_space"


class SearchExhausted(CyctomoError, RuntimeError):
    code = "search_exhausted"


class DegenerateTuple(CyctomoError, ValueError):
    code = "degenerate_tuple"


class ParallelPair(CyctomoError, ValueError):
    code = "parallel_pair"


class RegionTooSmall(CyctomoError, ValueError):
    code = "region_too_small"


class RegionTooLarge(CyctomoError, ValueError):
    code = "region_too_large"


class TooFewDirections(CyctomoError, ValueError):
    code = "too_few_directions"


class DegeneratePolygon(CyctomoError, ValueError):
    code = "degenerate_polygon"


class UnsupportedN(CyctomoError, ValueError):
    code = "unsupported_n"


class ConstructionFailed(CyctomoError, RuntimeError):
    code = "construction_failed"


class NotColorable(CyctomoError, RuntimeError):
    code = "not_colorable"


class EmbeddingFailed(CyctomoError, RuntimeError):
    code = "embedding_failed"


class VerificationFailed(CyctomoError, RuntimeError):
    code = "verification_failed"


class ViewportOverflow(CyctomoError, ValueError):
    code = "viewport_overflow"
