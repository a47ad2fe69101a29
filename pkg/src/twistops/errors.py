"""Exception and warning types shared across the package."""


class TwistOpsError(Exception):
    """Base class for all errors raised by twistops."""


class ValidationError(TwistOpsError, ValueError):
    """Malformed input: bad generator index, shape mismatch, non-unitary twist, ..."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self), "details": _jsonable(self.details)}


class RelationError(ValidationError):
    """Operators fail the doubly twisted relations; ``details['residuals']`` holds the report."""


class UnsupportedParameterError(ValidationError):
    """Input lies outside the hypotheses the decision procedures are valid for."""


class ProximityWarning(UserWarning):
    """Two eigenvalues were merged although they are numerically distinguishable."""


class StabilizationWarning(UserWarning):
    """A numeric subspace iteration hit its depth bound before stabilizing."""


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj
    try:
        return float(obj)
    except (TypeError, ValueError):
        return str(obj)
