"""Exception taxonomy shared by all valkit modules."""


class ValkitError(Exception):
    """Base class for all valkit errors."""


class EmptySequenceError(ValkitError):
    """A value sequence with no terms was supplied where one is required."""


class InvalidSubgroupError(ValkitError):
    """The requested subgroup is not contained in the ambient group."""


class InconclusiveError(ValkitError):
    """The question could not be decided within the configured probe budget.

    This is deliberately an error rather than a guess: exceeding a budget
    never silently turns into a verdict.
    """


class BackendMismatchError(ValkitError):
    """Two field elements from different backends (or primes) were combined."""


class NonMonicBaseError(ValkitError):
    """A base polynomial that must be monic is not."""


class StabilizationBudgetExceededError(ValkitError):
    """The evaluation window never stabilized within the probe budget."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)


class NoWitnessError(ValkitError):
    """No key of admissible degree attains the full value within budget."""


class NegativeValueInputError(ValkitError):
    """An operation restricted to nonnegative-value input got a negative one."""


class ValueNotRepresentableError(ValkitError):
    """No field element with the requested valuation exists in this backend."""


class LawMismatchError(ValkitError):
    """A claimed closed-form value law disagrees with exact computation."""


class HypothesisViolatedError(ValkitError):
    """A structural hypothesis of the requested criterion does not hold."""


class EmptyRootDataError(ValkitError):
    """Root data required for an epsilon spot check is missing."""


class ScenarioDataError(ValkitError):
    """Scenario data violates an invariant that valid inputs always satisfy."""


class ConfigError(ValkitError):
    """A scenario configuration is malformed."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class NonNegativeValuationWarning(UserWarning):
    """Partial sums were requested outside the negative-valuation regime."""
