class AtapError(ValueError):
    """Base class for every error raised by the library."""


class InvalidParam(AtapError):
    pass


class DegenerateInput(AtapError):
    pass


class EvalAtZero(AtapError):
    pass


class InexactDivision(AtapError):
    def __init__(self, message: str, remainder_norm: float = float("nan")):
        super().__init__(message)
        self.remainder_norm = remainder_norm


class NoNonabelianRoots(AtapError):
    pass


class NotUnimodular(AtapError):
    pass


class DegenerateTrace(AtapError):
    pass


class NotOnRileyVariety(AtapError):
    pass


class ClosedFormSingular(AtapError):
    def __init__(self, culprit: str, value: complex = 0j):
        super().__init__(f"closed form is singular: {culprit} = {value:.3g}")
        self.culprit = culprit
        self.value = value
