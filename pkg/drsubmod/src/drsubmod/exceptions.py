from typing import Any, Optional


class DrSubmodError(Exception):
    """Base class for every error raised by the drsubmod package."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class InstanceError(DrSubmodError):
    """The feasible set description is malformed."""


class NotAForest(InstanceError):
    pass


class NonMonotoneBounds(InstanceError):
    pass


class NonPositiveBound(InstanceError):
    pass


class InfeasibleInput(InstanceError):
    pass


class InstanceFormatError(InstanceError):
    """An instance document could not be parsed or does not match the schema."""


class AssumptionViolated(DrSubmodError):
    pass


class Assumption1Violated(AssumptionViolated):
    pass


class Assumption2Violated(AssumptionViolated):
    pass


class NotAPsiRoot(DrSubmodError):
    pass


class PermutationError(DrSubmodError):
    pass


class NotAPermutation(PermutationError):
    pass


class InvalidPartial(PermutationError):
    pass


class InvalidPrefix(PermutationError):
    pass


class InvalidPermutation(PermutationError):
    pass


class NotInHull(DrSubmodError):
    pass


class DecompositionResidual(DrSubmodError):
    pass


class OracleEvaluationFailure(DrSubmodError):
    pass


class NonDRSubmodularDetected(DrSubmodError):
    pass


class IterationLimit(DrSubmodError):
    pass


class NumericalFailure(DrSubmodError):
    pass


class BudgetExceeded(DrSubmodError):
    pass


class TooLarge(DrSubmodError):
    pass
