"""Exception hierarchy shared by every qwlab module."""


class QwlabError(Exception):
    """Base class for all qwlab errors."""


class InvalidArity(QwlabError):
    pass


class WindowMismatch(QwlabError):
    pass


class WindowTooSmall(QwlabError):
    pass


class SpecMismatch(QwlabError):
    pass


class DimensionMismatch(QwlabError):
    pass


class NonUnitary(QwlabError):
    def __init__(self, deviation: float, message: str | None = None):
        self.deviation = float(deviation)
        super().__init__(message or f"matrix is not unitary (max |U^H U - I| = {self.deviation:.3e})")


class NotNormalized(QwlabError):
    pass


class IncompatibleDeterminants(QwlabError):
    def __init__(self, delta_plus: complex, delta_minus: complex):
        self.delta_plus = delta_plus
        self.delta_minus = delta_minus
        super().__init__(
            f"no common eigenvalue: lambda^2 must equal both Delta+ = {delta_plus:.6g} "
            f"and Delta- = {delta_minus:.6g}"
        )


class IncompatiblePhases(QwlabError):
    def __init__(self, phase_plus: complex, phase_minus: complex):
        self.phase_plus = phase_plus
        self.phase_minus = phase_minus
        super().__init__(
            f"no common eigenvalue: lambda^2 must equal both Delta+ e^(i sigma+) = {phase_plus:.6g} "
            f"and Delta- e^(i sigma-) = {phase_minus:.6g}"
        )


class InadmissibleLambda(QwlabError):
    pass


class SingularGamma(QwlabError):
    pass


class ParseError(QwlabError):
    pass


class NotDiagonal(QwlabError):
    """A bulk coin was expected to be of the diagonal form and is not."""
