"""Generate, evaluate and test 1-scalable resource measures.

Submodules
----------
combinatorics   ordered compositions and exact binomial identities
series          N-copy Maclaurin coefficients from a seed series
closed_forms    closed-form low-order coefficients and additivity class
states          density matrices, l1/l2 coherence, tensor-power oracles
harness         scalability tests of measures on state families
cli             command-line interface
"""
from .closed_forms import (
    Additivity,
    SeedSummary,
    binomial_family,
    classify_additivity,
    closed_form_d1,
    closed_form_d2,
    closed_form_d3,
    closed_form_d4_two_coeff,
    third_order_expansion,
)
from .combinatorics import (
    Composition,
    binomial,
    compositions,
    count_compositions,
    iter_compositions,
    subset_convolution_identity,
)
from .errors import (
    ConfigError,
    DegreeOverflowError,
    DomainError,
    InvalidArgumentError,
    ScalableMeasuresError,
    SingularInputError,
    SizeLimitError,
    ValidationError,
)
from .harness import (
    CONSISTENT,
    NOT_1S,
    MeasureUnderTest,
    ScalabilityReport,
    SuiteConfig,
    builtin_measure,
    collision_partner,
    run_suite,
    series_predictor,
    test_composition,
    test_definition,
)
from .series import (
    ScaledSeries,
    SeedSeries,
    check_composition_law,
    degree_law,
    evaluate,
    scale_coefficients,
    third_order_recurrence,
)
from .states import (
    CoherenceSummary,
    DensityMatrix,
    brute_force_coherence,
    kron_power,
    l1_coherence,
    l1_n_copies_closed,
    l2_coherence,
    l2_n_copies_closed,
    load_state,
    purity,
    qubit,
    random_state,
    save_state,
    summarize,
)

__version__ = "0.1.0"
