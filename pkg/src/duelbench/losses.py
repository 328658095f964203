"""Loss models, expected-loss oracles and winner extraction.

All functions are pure.  The Borda loss of an arm is derived from the
column of the round's outcome matrix (how often the other arms beat it);
the Copeland loss counts strict pairwise defeats in the cumulative matrix;
utility losses are one minus the utilities; the von-Neumann loss of an arm
is the expected margin a fixed mixed strategy scores against it.
"""

from __future__ import annotations

import numpy as np

from .core import (
    ContractViolation,
    CumulativeOutcomeMatrix,
    LossVector,
    MixedStrategy,
    OutcomeMatrix,
    PreferenceMatrix,
    UtilityVector,
)


def borda_loss(m: OutcomeMatrix) -> LossVector:
    """Per-arm Borda loss of one round: 1/2 + (column sum) / 2K."""
    k = m.k
    col = m.m.sum(axis=0, dtype=np.float64)
    return LossVector(0.5 + col / (2.0 * k), "borda")


def expected_borda_loss(p: PreferenceMatrix) -> LossVector:
    """Expected Borda loss under independent sampling from ``p``.

    Equals one minus the normalised Borda count (mean win probability of
    the arm's row, the diagonal counting as 1/2).
    """
    return LossVector(1.0 - p.p.mean(axis=1), "borda")


def copeland_loss(mc: CumulativeOutcomeMatrix) -> LossVector:
    """Fraction of the other arms that strictly beat each arm on aggregate.

    Only the cumulative form exists here: a per-round Copeland loss would
    collapse to an affine image of the Borda loss by skew-symmetry, so it
    adds nothing over ``borda_loss``.
    """
    k = mc.k
    if k < 2:
        raise ContractViolation("Copeland loss needs at least 2 arms")
    defeats = (mc.m < 0).sum(axis=1)
    return LossVector(defeats / (k - 1.0), "copeland")


def utility_loss(x: UtilityVector) -> LossVector:
    """Losses are one minus the utilities."""
    return LossVector(1.0 - x.values, "utility")


def vn_loss(u: MixedStrategy, m: OutcomeMatrix) -> LossVector:
    """Expected margin by which strategy ``u`` beats each arm this round."""
    if u.k != m.k:
        raise ContractViolation(
            f"strategy has {u.k} arms but outcome matrix has {m.k}")
    return LossVector(u.probs @ m.m, "von-neumann")


def expected_vn_loss(u: MixedStrategy, p: PreferenceMatrix) -> LossVector:
    """Von-Neumann loss against the expected game matrix 2P - 1."""
    if u.k != p.k:
        raise ContractViolation(
            f"strategy has {u.k} arms but preference matrix has {p.k}")
    return LossVector(u.probs @ (2.0 * p.p - 1.0), "von-neumann")


def winner_argmin(cumulative_losses) -> list[int]:
    """All arms attaining the minimum cumulative loss (0-based, sorted)."""
    v = np.asarray(cumulative_losses, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ContractViolation("cumulative losses must form a non-empty vector")
    if not np.all(np.isfinite(v)):
        raise ContractViolation("cumulative losses must be finite")
    return [int(i) for i in np.flatnonzero(v == v.min())]


def linear_link(xi: float, xj: float) -> float:
    """Win probability of the first arm under the linear link: (1 + xi - xj)/2."""
    return (1.0 + xi - xj) / 2.0


def induced_preference_matrix(x: UtilityVector) -> PreferenceMatrix:
    """Preference matrix generated by utilities through the linear link."""
    v = x.values
    return PreferenceMatrix((1.0 + v[:, None] - v[None, :]) / 2.0)


def relation_borda_utility(utility_losses: LossVector) -> LossVector:
    """Expected Borda loss induced by utility losses under the linear link.

    Test-only oracle: 1/2 + losses/2 - mean(losses)/2.  Its argmin set
    always matches the utility winner, so it cross-checks environments
    that derive duels from utilities.
    """
    if utility_losses.model != "utility":
        raise ContractViolation("expected a utility-model loss vector")
    v = utility_losses.values
    return LossVector(0.5 + 0.5 * v - v.mean() / 2.0, "borda")
