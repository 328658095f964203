"""Domain types for duelling-bandit simulations and regret accounting.

Arms are indexed 0..K-1 throughout the library.  Matrix files, CLI reports
and error messages use 1-based indices so that they can be compared against
published preference tables directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

#: Loss models supported by the accounting layer.
LOSS_MODELS = ("borda", "copeland", "utility", "von-neumann")

#: Regret combiners: "weak" takes the better loss of the pair, "strong" the mean.
COMBINERS = ("weak", "strong")


class ContractViolation(ValueError):
    """An input broke a documented precondition or invariant."""


class ConfigurationError(ValueError):
    """A run was configured with unusable parameters."""


def psi_strong(x: float, y: float) -> float:
    """Mean of the pair's losses."""
    return (x + y) / 2.0


def psi_weak(x: float, y: float) -> float:
    """Better (smaller) of the pair's losses."""
    return x if x < y else y


def combiner_fn(name: str):
    if name == "weak":
        return psi_weak
    if name == "strong":
        return psi_strong
    raise ContractViolation(f"unknown regret combiner {name!r}")


def outcome_matrix_violation(m: np.ndarray) -> str | None:
    """Describe the first way ``m`` fails to be a valid duel-outcome matrix.

    Valid means: square, skew-symmetric, zero diagonal, and every
    off-diagonal entry in {-1, +1} (ties between distinct arms are not
    allowed).  Returns ``None`` when the matrix is valid; indices in the
    message are 1-based.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return f"matrix is not square: shape {m.shape}"
    k = m.shape[0]
    for i in range(k):
        if m[i, i] != 0:
            return f"diagonal entry ({i + 1},{i + 1}) is {m[i, i]}, expected 0"
        for j in range(i + 1, k):
            if m[i, j] != -m[j, i]:
                return (f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) "
                        f"are not skew-symmetric: {m[i, j]} vs {m[j, i]}")
            if m[i, j] not in (-1, 1):
                return (f"off-diagonal entry ({i + 1},{j + 1}) is {m[i, j]}, "
                        f"expected -1 or +1 (ties are disallowed)")
    return None


def validate_outcome_matrix(m: np.ndarray) -> None:
    """Raise :class:`ContractViolation` if ``m`` is not a valid outcome matrix."""
    problem = outcome_matrix_violation(m)
    if problem is not None:
        raise ContractViolation(problem)


@dataclass(frozen=True)
class PreferenceMatrix:
    """K x K win probabilities; ``p[i, j]`` is the chance arm i beats arm j."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        object.__setattr__(self, "p", p)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ContractViolation(f"preference matrix is not square: {p.shape}")
        if p.shape[0] < 2:
            raise ContractViolation("preference matrix needs at least 2 arms")
        if np.any(p < 0) or np.any(p > 1):
            raise ContractViolation("win probabilities must lie in [0, 1]")
        if np.max(np.abs(p + p.T - 1.0)) > 1e-12:
            bad = np.unravel_index(np.argmax(np.abs(p + p.T - 1.0)), p.shape)
            raise ContractViolation(
                f"p[{bad[0] + 1},{bad[1] + 1}] + p[{bad[1] + 1},{bad[0] + 1}] != 1")
        if np.max(np.abs(np.diag(p) - 0.5)) > 1e-12:
            raise ContractViolation("diagonal entries must equal 1/2")

    @property
    def k(self) -> int:
        return self.p.shape[0]


@dataclass(frozen=True)
class OutcomeMatrix:
    """One round of duel results: skew-symmetric with off-diagonal +-1."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.int8)
        validate_outcome_matrix(m)
        object.__setattr__(self, "m", m)

    @property
    def k(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True)
class CumulativeOutcomeMatrix:
    """Sum of outcome matrices over ``rounds`` rounds."""

    m: np.ndarray
    rounds: int

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.int64)
        object.__setattr__(self, "m", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractViolation(f"matrix is not square: {m.shape}")
        if self.rounds < 0:
            raise ContractViolation("rounds must be non-negative")
        if np.any(m != -m.T):
            raise ContractViolation("cumulative outcome matrix must be skew-symmetric")
        if np.any(np.abs(m) > self.rounds):
            raise ContractViolation("|entries| cannot exceed the number of rounds")

    @property
    def k(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True)
class LossVector:
    """Per-arm losses for one round under a given loss model.

    Borda, Copeland and utility losses live in [0, 1]; losses measured
    against a mixed von-Neumann strategy are signed and live in [-1, 1].
    """

    values: np.ndarray
    model: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if self.model not in LOSS_MODELS:
            raise ContractViolation(f"unknown loss model {self.model!r}")
        if v.ndim != 1 or v.size == 0:
            raise ContractViolation("losses must form a non-empty vector")
        lo = -1.0 if self.model == "von-neumann" else 0.0
        eps = 1e-9
        if np.any(v < lo - eps) or np.any(v > 1.0 + eps):
            raise ContractViolation(
                f"{self.model} losses must lie in [{lo:g}, 1]")

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class UtilityVector:
    """Per-arm utilities in [0, 1]; losses are one minus utilities."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size == 0:
            raise ContractViolation("utilities must form a non-empty vector")
        if np.any(v < 0) or np.any(v > 1):
            raise ContractViolation("utilities must lie in [0, 1]")

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MixedStrategy:
    """A probability distribution over the K arms."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", p)
        if p.ndim != 1 or p.size == 0:
            raise ContractViolation("strategy must be a non-empty vector")
        if np.any(p < 0):
            raise ContractViolation("strategy probabilities must be non-negative")
        if abs(float(p.sum()) - 1.0) > 1e-9:
            raise ContractViolation(f"strategy sums to {p.sum()!r}, expected 1")

    @property
    def k(self) -> int:
        return self.probs.shape[0]

    @staticmethod
    def uniform(k: int) -> "MixedStrategy":
        return MixedStrategy(np.full(k, 1.0 / k))

    @staticmethod
    def point_mass(k: int, arm: int) -> "MixedStrategy":
        p = np.zeros(k)
        p[arm] = 1.0
        return MixedStrategy(p)


class ActionPair(NamedTuple):
    """The two arms played in one round (0-based)."""

    a: int
    b: int


class DuelOutcome(NamedTuple):
    """Signed duel result; +1 means the pair's first arm won."""

    y: int


class RegretLedger:
    """Running regret of one (policy, environment, loss model) run.

    Single-writer: one ledger belongs to exactly one run loop.  Appends a
    ``(t, regret)`` checkpoint whenever the round counter hits the supplied
    checkpoint grid.  Regret at time t is the accumulated combined pair loss
    minus the best single arm's accumulated loss.
    """

    def __init__(self, k: int, combiner: str, checkpoint_grid=()):
        if combiner not in COMBINERS:
            raise ContractViolation(f"unknown regret combiner {combiner!r}")
        self.k = k
        self.combiner = combiner
        self._psi = combiner_fn(combiner)
        self.t = 0
        self.cumulative_pair_loss = 0.0
        self.per_arm_cumulative = np.zeros(k)
        self.checkpoints: list[tuple[int, float]] = []
        self._grid = [int(t) for t in checkpoint_grid]
        self._grid_pos = 0

    def record(self, pair: ActionPair, losses: LossVector) -> "RegretLedger":
        values = losses.values
        if values.shape[0] != self.k:
            raise ContractViolation(
                f"loss vector has {values.shape[0]} arms, ledger expects {self.k}")
        a, b = pair
        if not (0 <= a < self.k and 0 <= b < self.k):
            raise ContractViolation(f"action pair {(a + 1, b + 1)} out of range")
        self.t += 1
        self.cumulative_pair_loss += float(self._psi(values[a], values[b]))
        self.per_arm_cumulative += values
        if self._grid_pos < len(self._grid) and self.t == self._grid[self._grid_pos]:
            self.checkpoints.append((self.t, self.regret()))
            self._grid_pos += 1
        return self

    def regret(self) -> float:
        return float(self.cumulative_pair_loss - self.per_arm_cumulative.min())


def checkpoint_grid(horizon: int, points: int = 200) -> list[int]:
    """Evenly spaced checkpoint rounds, always ending at the horizon."""
    if horizon < 1:
        raise ContractViolation("horizon must be at least 1")
    grid = {horizon}
    for i in range(1, points + 1):
        grid.add(max(1, round(i * horizon / points)))
    return sorted(grid)
