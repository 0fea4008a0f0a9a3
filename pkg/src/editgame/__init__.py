"""Equilibrium analysis of competitive editing.

Library + CLI covering the contributor game (closed-form, spectral and
best-response equilibria), entropy-maximizing governance selection, revision
corpus measurement (sentence ownership, edit-distance effort traits), the
prediction-vs-data validation pipeline, and a seeded synthetic corpus
simulator that closes the loop at desk scale.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Allocation,
    ContributorProfile,
    EquilibriumSolution,
    GameInstance,
    asymptotic_ownership,
    closed_form_equilibrium,
    equilibrium_ownership,
    feasibility,
    fractional_ownership,
    net_utility,
)
from .solvers import (  # noqa: F401
    Eigenbasis,
    SolverConfig,
    best_response_equilibrium,
    best_response_step,
    eigenbasis,
    spectral_equilibrium,
)
from .governance import (  # noqa: F401
    EntropyProfile,
    GovernanceSearch,
    entropy,
    entropy_at,
    entropy_gradient,
    optimal_governance,
    ownership_gradient,
)
from .corpus import (  # noqa: F401
    Article,
    EffortProfile,
    OwnershipLedger,
    Revision,
    RevisionCorpus,
    contributor_profiles,
    levenshtein,
    load_corpus,
    segment_sentences,
    track_ownership,
    write_corpus_jsonl,
)
from .analysis import (  # noqa: F401
    BracketSnapshot,
    ComparisonReport,
    FitResult,
    bracket,
    linear_fit,
    pearson,
    predict_vs_observe,
    quality_correlation,
    train_test_validation,
)
from .simulator import (  # noqa: F401
    Population,
    PopulationConfig,
    SynthesisConfig,
    sample_population,
    synthesize_corpus,
)
