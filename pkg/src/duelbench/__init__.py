"""Adversarial duelling-bandits simulator with weak-regret accounting."""

from .core import (
    ActionPair,
    ConfigurationError,
    ContractViolation,
    CumulativeOutcomeMatrix,
    DuelOutcome,
    LossVector,
    MixedStrategy,
    OutcomeMatrix,
    PreferenceMatrix,
    RegretLedger,
    UtilityVector,
    checkpoint_grid,
    psi_strong,
    psi_weak,
    validate_outcome_matrix,
)
from .losses import (
    borda_loss,
    copeland_loss,
    expected_borda_loss,
    expected_vn_loss,
    induced_preference_matrix,
    linear_link,
    relation_borda_utility,
    utility_loss,
    vn_loss,
    winner_argmin,
)
from .gamesolver import (
    SolverError,
    approximate_equilibrium,
    lp_equilibrium,
    von_neumann_winner,
)
from .envs import (
    BlockEnv,
    BlockSequence,
    EnvSeed,
    StochasticPreferenceEnv,
    UtilityEnv,
    build_block_sequence,
    derive_rng,
    env_round,
    load_matrix_file,
    load_preference_matrix,
    stochastic_duel,
    utility_duel,
)
from .algos import (
    Exp3PSparring,
    Exp3Sparring,
    Exp3Unif,
    Policy,
    Rex3,
    UcbUnif,
    VnUnif,
    WinnerStaysWeak,
    eta_borda,
    eta_utility,
)
from .harness import (
    EXPERIMENTS,
    AlgorithmConfig,
    Dataset,
    ExperimentSpec,
    aggregate,
    builtin_dataset,
    run_experiment,
    run_single_cell,
    verify_lemma,
)

__version__ = "0.1.0"
