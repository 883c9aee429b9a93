"""Exact invariants of simple algebraic valued-field extensions.

valkit computes, in exact rational arithmetic, the truncation-valuation
invariants attached to a key-polynomial presentation of a simple algebraic
extension of valued fields, the final segments those invariants generate,
and the verdict on whether the module of Kahler differentials of the
valuation-ring extension vanishes -- decided through three independently
implemented, cross-checked criteria.
"""

from .errors import (
    BackendMismatchError,
    ConfigError,
    EmptyRootDataError,
    EmptySequenceError,
    HypothesisViolatedError,
    InconclusiveError,
    InvalidSubgroupError,
    LawMismatchError,
    NegativeValueInputError,
    NoWitnessError,
    NonMonicBaseError,
    ScenarioDataError,
    StabilizationBudgetExceededError,
    ValkitError,
    ValueNotRepresentableError,
)
from .fields import (
    Backend,
    HahnElem,
    PAdicRational,
    RationalFunctionElem,
    artin_schreier_partial_sum,
    valuation,
)
from .groups import (
    ClosedForm,
    Diverging,
    EmptySegment,
    ExtValue,
    FiniteList,
    GeneratedBy,
    GroupElem,
    IsolatedSubgroup,
    MinClosed,
    Sampled,
    Segment,
    SegmentRelation,
    Stabilized,
    WholeGroup,
    coset_representatives,
    largest_delta,
    rat1,
    segment_compare,
    segment_contains,
    segment_from,
    wlim,
)
from .kahler import (
    InvariantRecord,
    InvariantStream,
    Verdict,
    VerdictKind,
    alpha_beta_segments,
    b1_criterion,
    b_set,
    classify,
    epsilon_check,
    first_minimizing_plateau,
    ideal_inclusion_check,
    invariant_stream,
    invariant_stream_from_schedule,
    omega_verdict,
)
from .keyseq import (
    ExplicitStage,
    FinalStage,
    KeyIndex,
    KeySequence,
    PlateauStage,
    ScheduleStage,
    artin_schreier_family,
    completeness_probe,
    hensel_family,
    normalize,
    plateaus,
)
from .poly import Poly, QExpansion, derivative, is_q_monic, q_expand, resultant
from .truncation import NuOracle

__version__ = "0.1.0"
