"""Exception types raised by the library."""


class TCBMError(Exception):
    """Base class for all library errors."""


class DomainError(TCBMError, ValueError):
    """An argument lies outside the domain of a Laplace exponent or formula."""


class QuadratureError(TCBMError, ArithmeticError):
    """An oscillatory integral failed to converge within its panel budget."""


class NumericalError(TCBMError, ArithmeticError):
    """A computed probability or density is out of range beyond tolerance."""


class LatticeError(TCBMError, ValueError):
    """Loss weights cannot be represented on the loss lattice."""


class ScenarioError(TCBMError, ValueError):
    """A scenario file is malformed or violates a parameter invariant."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"[{key}] "
        super().__init__(prefix + message)
