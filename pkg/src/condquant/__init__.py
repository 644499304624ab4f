"""Conditional generalized quantiles, shortfall risk measures, and dynamic
risk measures on finite scenario spaces."""

from .errors import (
    AlphaOutOfRange,
    BracketFailure,
    CondQuantError,
    DegenerateScore,
    InstanceTooLarge,
    MaxIterExceeded,
    MissingSecondDerivative,
    NonPositiveProbability,
    NotMeasurable,
    NumericOverflow,
    ParseError,
    ProbabilitiesDoNotSumToOne,
    ScoreNotIntegrable,
    SpaceMismatch,
    UnknownAtom,
    ValidationError,
)
from .space import (
    Distribution,
    Filtration,
    Partition,
    ProbabilitySpace,
    RandomVariable,
    conditional_distribution,
    conditional_expectation,
    constant_rv,
    discrete_partition,
    distribution,
    ess_sup_conditional,
    filtration,
    is_measurable,
    make_space,
    partition_from_atoms,
    partition_from_labels,
    refines,
    rv,
    same_space,
    trivial_partition,
    uniform_space,
)
from .losses import (
    LossFunction,
    MembershipReport,
    ScoreFunction,
    entropic_score,
    exp_integral_loss,
    expectile_score,
    identity_loss,
    loss_from_tag,
    losses_from_score,
    normalize_loss,
    power_loss,
    quadratic_loss,
    score_from_losses,
    score_from_tag,
    tabulated_score,
    validate_loss,
    validate_score,
    var_score,
)
from .quantile import (
    DEFAULT_SETTINGS,
    RiskSpec,
    SolveSettings,
    brute_force_quantile,
    conditional_generalized_quantile,
    foc_check,
    joint_brute_force,
    phi_alpha,
    pi_alpha,
    risk_spec,
    static_generalized_quantile,
)
from .shortfall import (
    ENTROPIC_INF,
    EquivalenceReport,
    ShortfallSpec,
    conditional_entropic,
    conditional_expectile,
    conditional_shortfall,
    conditional_var,
    equivalence_check,
    shortfall_spec,
)
from .dynamic import (
    PROPERTY_TOL,
    WITNESS_THRESHOLD,
    DynamicRiskMeasure,
    PropertyReport,
    check_conditional_convexity,
    check_continuity_from_below,
    check_monotone_alpha,
    check_monotonicity,
    check_normalization,
    check_positive_homogeneity,
    check_sequential_consistency,
    check_supermartingale,
    check_tower_property,
    check_translation_invariance,
    convexity_condition,
    dynamic_entropic,
    dynamic_eval,
    dynamic_quantile,
    dynamic_shortfall,
    random_filtration,
    random_partition,
    random_rv,
    random_space,
)
from .presets import entropic_spec, expectile_spec, power_spec, var_spec
from .verify import SpecEntry, SuiteResult, run_suite

__version__ = "0.1.0"
