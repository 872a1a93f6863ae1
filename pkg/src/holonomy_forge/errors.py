"""Exception types shared across the library."""


class HolonomyForgeError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HolonomyForgeError):
    """A run configuration failed validation (bad file, schema, or parameters)."""


class NumericalConditionError(HolonomyForgeError):
    """A numerical requirement on inputs or intermediate results was violated."""


class SingularCoupling(NumericalConditionError):
    """Coupling block is singular or numerically rank-deficient."""


class NotUnitary(NumericalConditionError):
    """Matrix expected to be unitary is not, within tolerance."""


class NotHermitian(NumericalConditionError):
    """Matrix expected to be Hermitian is not, within tolerance."""


class LeakageDetected(NumericalConditionError):
    """An operator maps the retained subspace outside itself beyond tolerance."""


class NotBlockDiagonal(NumericalConditionError):
    """A composed propagator has off-diagonal blocks beyond tolerance."""


class ConditionUnsatisfiable(NumericalConditionError):
    """Pulse area and singular values cannot satisfy the pulse-pair conditions.

    Carries the best residual found while trying every branch.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class BudgetExhausted(NumericalConditionError):
    """Optimizer ran out of objective evaluations before reaching its target.

    Carries the best configuration and score seen so far.
    """

    def __init__(self, message: str, best_config=None, best_p_min: float = 0.0, evaluations: int = 0):
        super().__init__(message)
        self.best_config = best_config
        self.best_p_min = best_p_min
        self.evaluations = evaluations
