"""Exception types shared across the package."""


class JlabError(Exception):
    pass


class AlgebraFormatError(JlabError):
    """Malformed algebra/system input; ``where`` names the offending location."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(message if where is None else f"{message} (at {where})")


class UnknownSymbol(JlabError):
    pass


class ArityMismatch(JlabError):
    pass


class SizeMismatch(JlabError):
    pass


class ResourceLimit(JlabError):
    """A configured cap was exceeded; the computation is inconclusive."""


class NotFound(JlabError):
    pass


class VerificationFailed(JlabError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class StepValidationFailed(JlabError):
    def __init__(self, step, expected, detail=""):
        self.step = step
        self.expected = expected
        self.detail = detail
        msg = f"step {step} not in {expected}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class AmbiguousFormula(JlabError):
    """No candidate reading of an ambiguous formula validated."""

    def __init__(self, failures):
        self.failures = failures
        lines = "; ".join(f"{name}: {err}" for name, err in failures)
        super().__init__(f"no candidate reading validated ({lines})")


class NoSuchX(JlabError):
    pass
