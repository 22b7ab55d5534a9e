"""Exception hierarchy shared by every kkgreen module.

Each class also derives from the builtin category a caller would catch
without knowing about kkgreen (ValueError for bad input, RuntimeError for
numerical failure).
"""


class KKGreenError(Exception):
    """Root of all kkgreen errors."""


class FrequencyDomainError(KKGreenError, ValueError):
    """Frequency outside the domain where the quantity is defined."""


class SingularInputError(KKGreenError, ValueError):
    """Coincident field and source points."""


class QuadratureError(KKGreenError, ValueError):
    """Quadrature grid cannot resolve the integrand."""


class UnderResolvedInterfaceError(KKGreenError, ValueError):
    """Mollification width smaller than two grid spacings."""


class GridError(KKGreenError, ValueError):
    """Empty domain, or a stencil that does not fit on the grid."""


class ModelError(KKGreenError, ValueError):
    """Inconsistent permittivity model description."""


class ConvergenceError(KKGreenError, RuntimeError):
    """Born series cannot or did not converge."""


class ScenarioError(KKGreenError, ValueError):
    def __init__(self, message: str, problems: list[str] | None = None):
        self.problems = list(problems or [])
        if self.problems:
            message = message + "\n" + "\n".join(f"  - {problem}" for problem in self.problems)
        super().__init__(message)


class NearResonanceWarning(UserWarning):
    """(I - K) is close to singular at this frequency."""
