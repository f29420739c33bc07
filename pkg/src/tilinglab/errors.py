"""Exception types shared across the package.

Every error that the CLI reports as a domain error derives from TilingError,
so the front end can turn it into a JSON error document with exit code 1.
"""


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if v is None or isinstance(v, (bool, int, str)):
        return v
    return str(v)


class TilingError(Exception):
    """Base class; keyword arguments are kept as evidence for the report."""

    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def payload(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = _plain(self.details)
        return out


class DivisionByZero(TilingError, ZeroDivisionError):
    code = "division_by_zero"


class FieldError(TilingError):
    code = "field_error"


class SchemaError(TilingError):
    code = "schema_error"


class DimensionError(TilingError):
    code = "dimension_error"


class OverlapError(TilingError):
    code = "overlap"

    def __init__(self, message, pair=None):
        super().__init__(message, pair=pair)
        self.pair = pair


class InvalidUnion(TilingError):
    code = "invalid_union"


class EmptyPatch(TilingError):
    code = "empty_patch"


class NoSeedFound(TilingError):
    code = "no_seed_found"

    def __init__(self, max_n):
        super().__init__(f"no verified seed with period <= {max_n}", max_n=max_n)
        self.max_n = max_n


class ResourceLimit(TilingError):
    code = "resource_limit"


class InsufficientCoverage(TilingError):
    code = "insufficient_coverage"


class InsufficientOccurrences(TilingError):
    code = "insufficient_occurrences"


class PhaseTooSpread(TilingError):
    code = "phase_too_spread"


class PreconditionFailed(TilingError):
    code = "precondition_failed"


class NoBaseEigenvalues(TilingError):
    code = "no_base_eigenvalues"


class NoMatch(TilingError):
    code = "no_match"


class NotStabilized(TilingError):
    code = "not_stabilized"


class WordNotInLanguage(TilingError):
    code = "word_not_in_language"
