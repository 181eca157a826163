"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: configuration problems exit 1,
runtime/numerical failures exit 2, non-convergence exits 3.
"""


class EggChamberError(Exception):
    """Base class for all package errors."""


class ConfigError(EggChamberError):
    """Invalid configuration: bad value, unknown key, violated precondition."""


class StructuralError(EggChamberError):
    """Structurally incompatible inputs (shape/grid mismatch, bad index)."""


class ContractError(EggChamberError):
    """A documented operation contract was violated (e.g. negative diffusivity)."""


class NumericalError(EggChamberError):
    """The computation produced non-finite values or blew past an invariant."""

    def __init__(self, message, last_good_snapshot=None):
        super().__init__(message)
        self.last_good_snapshot = last_good_snapshot


class NonConvergenceError(EggChamberError):
    """An iterative stage hit its step budget before reaching tolerance."""

    def __init__(self, message, residual=None, steps=None):
        super().__init__(message)
        self.residual = residual
        self.steps = steps
