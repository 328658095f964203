"""Environments that generate duel outcomes and per-round losses.

Three kinds: stochastic sampling from a preference matrix, utility-driven
sampling through the linear link, and deterministic block sequences whose
per-block win frequencies match a target preference matrix exactly.

Copeland accounting is deferred: those environments return no per-round
loss vector and instead expose the cumulative outcome matrix so the runner
can price the recorded pairs after the run.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .core import (
    ActionPair,
    ContractViolation,
    LossVector,
    MixedStrategy,
    OutcomeMatrix,
    PreferenceMatrix,
    UtilityVector,
    CumulativeOutcomeMatrix,
)
from .gamesolver import von_neumann_winner
from .losses import (
    borda_loss,
    expected_borda_loss,
    expected_vn_loss,
    linear_link,
    utility_loss,
    vn_loss,
)


def _label_entropy(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & (2**64 - 1)
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_rng(master: int, *labels) -> np.random.Generator:
    """Counter-based generator for one (master seed, label...) stream.

    Distinct label tuples give statistically independent streams, which
    keeps runs reproducible regardless of scheduling order.
    """
    entropy = [int(master) & (2**64 - 1)] + [_label_entropy(l) for l in labels]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class EnvSeed:
    """Master seed plus the labels that derive one run's streams."""

    master: int
    experiment: str = ""
    algorithm: str = ""
    iteration: int = 0

    def stream(self, role: str) -> np.random.Generator:
        return derive_rng(self.master, self.experiment, self.algorithm,
                          self.iteration, role)


def stochastic_duel(p: PreferenceMatrix, i: int, j: int,
                    rng: np.random.Generator) -> int:
    """Sample a duel between distinct arms: +1 with probability p[i, j]."""
    if i == j:
        raise ContractViolation("a stochastic duel needs two distinct arms")
    return 1 if rng.random() < p.p[i, j] else -1


def utility_duel(x: UtilityVector, i: int, j: int,
                 rng: np.random.Generator) -> int:
    """Sample a duel with win probability given by the linear link."""
    if i == j:
        raise ContractViolation("a utility duel needs two distinct arms")
    return 1 if rng.random() < linear_link(x.values[i], x.values[j]) else -1


@dataclass(frozen=True)
class BlockSequence:
    """tau outcome matrices whose win frequencies equal the source exactly."""

    tau: int
    matrices: tuple[OutcomeMatrix, ...]
    source: PreferenceMatrix


def build_block_sequence(p: PreferenceMatrix, tau: int,
                         rng: np.random.Generator) -> BlockSequence:
    """Randomly ordered outcome block realising ``p`` exactly over ``tau`` rounds.

    For every pair i < j, exactly tau * p[i, j] of the tau matrices contain
    a win for arm i, in a uniformly random order.  Rejects block lengths
    where that count is not an integer.
    """
    if tau < 1:
        raise ContractViolation("block length tau must be at least 1")
    k = p.k
    block = np.zeros((tau, k, k), dtype=np.int8)
    for i in range(k):
        for j in range(i + 1, k):
            wins = tau * p.p[i, j]
            if abs(wins - round(wins)) > 1e-6:
                raise ContractViolation(
                    f"tau * p[{i + 1},{j + 1}] = {tau} * {p.p[i, j]!r} = "
                    f"{wins!r} is not an integer win count")
            wins = round(wins)
            seq = np.full(tau, -1, dtype=np.int8)
            seq[:wins] = 1
            seq = rng.permutation(seq)
            block[:, i, j] = seq
            block[:, j, i] = -seq
    matrices = tuple(OutcomeMatrix(block[t]) for t in range(tau))
    return BlockSequence(tau=tau, matrices=matrices, source=p)


def _resolve_vn_strategy(p: PreferenceMatrix, given) -> MixedStrategy:
    if given is not None:
        return given
    u, _ = von_neumann_winner(2.0 * p.p - 1.0)
    return u


class Environment:
    """Per-run outcome generator; owned by a single run loop."""

    k: int
    loss_model: str
    horizon: int

    def round(self, t: int, pair: ActionPair) -> tuple[int, LossVector | None]:
        """Play one round: the observed outcome plus the round's true losses.

        Returns ``None`` for the losses under Copeland accounting, which is
        priced after the run from the cumulative outcome matrix.
        """
        self._check_round(t, pair)
        return self.duel(t, pair[0], pair[1]), self.round_loss(t)

    def duel(self, t: int, i: int, j: int) -> int:
        raise NotImplementedError

    def round_loss(self, t: int) -> LossVector | None:
        raise NotImplementedError

    def cumulative_outcome_matrix(self, t: int) -> CumulativeOutcomeMatrix:
        raise NotImplementedError

    def _check_round(self, t: int, pair: ActionPair) -> None:
        if not 1 <= t <= self.horizon:
            raise ContractViolation(
                f"round {t} outside horizon 1..{self.horizon}")
        a, b = pair
        if not (0 <= a < self.k and 0 <= b < self.k):
            raise ContractViolation(f"pair {(a + 1, b + 1)} out of range")


class _SampledEnv(Environment):
    """Shared plumbing for environments that sample outcomes per round.

    Caches the samples of the current round per unordered pair so that a
    duel and its mirror are consistent if both are queried, and so that
    self-duels resolve to a fair coin.
    """

    def __init__(self, rng: np.random.Generator):
        self._rng = rng
        self._round_t = 0
        self._round_cache: dict[tuple[int, int], int] = {}

    def _sample_duel(self, i: int, j: int) -> int:
        raise NotImplementedError

    def duel(self, t: int, i: int, j: int) -> int:
        if t != self._round_t:
            self._round_t = t
            self._round_cache.clear()
        lo, hi = (i, j) if i <= j else (j, i)
        y = self._round_cache.get((lo, hi))
        if y is None:
            if lo == hi:
                y = 1 if self._rng.random() < 0.5 else -1
            else:
                y = self._sample_duel(lo, hi)
            self._round_cache[(lo, hi)] = y
        return y if i == lo else -y


class StochasticPreferenceEnv(_SampledEnv):
    """Outcomes sampled independently from a fixed preference matrix.

    Regret is accounted against the expected loss vector, which is constant
    over rounds.
    """

    def __init__(self, preference: PreferenceMatrix, loss_model: str,
                 horizon: int, rng: np.random.Generator, vn_strategy=None):
        super().__init__(rng)
        self.preference = preference
        self.k = preference.k
        self.loss_model = loss_model
        self.horizon = horizon
        if loss_model == "borda":
            self._loss = expected_borda_loss(preference)
        elif loss_model == "von-neumann":
            self.vn_strategy = _resolve_vn_strategy(preference, vn_strategy)
            self._loss = expected_vn_loss(self.vn_strategy, preference)
        elif loss_model == "copeland":
            self._loss = None
        else:
            raise ContractViolation(
                f"loss model {loss_model!r} needs a utility environment")

    def _sample_duel(self, i: int, j: int) -> int:
        return stochastic_duel(self.preference, i, j, self._rng)

    def round_loss(self, t: int) -> LossVector | None:
        return self._loss

    def cumulative_outcome_matrix(self, t: int) -> CumulativeOutcomeMatrix:
        # expected cumulative matrix; only the signs matter for Copeland
        m = np.rint(t * (2.0 * self.preference.p - 1.0)).astype(np.int64)
        return CumulativeOutcomeMatrix(m, t)


class UtilityEnv(_SampledEnv):
    """Outcomes driven by fixed utilities through the linear link."""

    def __init__(self, utilities: UtilityVector, horizon: int,
                 rng: np.random.Generator):
        super().__init__(rng)
        self.utilities = utilities
        self.k = utilities.k
        self.loss_model = "utility"
        self.horizon = horizon
        self._loss = utility_loss(utilities)

    def _sample_duel(self, i: int, j: int) -> int:
        return utility_duel(self.utilities, i, j, self._rng)

    def round_loss(self, t: int) -> LossVector:
        return self._loss


class BlockEnv(Environment):
    """Deterministic adversarial sequence cycling through an outcome block.

    Horizons that are not multiples of tau simply truncate the last block.
    Self-duels are resolved by a fair coin: the matrices' zero diagonal is
    not a valid observation, and the pair's regret contribution is the same
    arm's loss either way.
    """

    def __init__(self, block: BlockSequence, loss_model: str, horizon: int,
                 rng: np.random.Generator, vn_strategy=None):
        self.block = block
        self.k = block.source.k
        self.loss_model = loss_model
        self.horizon = horizon
        self._rng = rng
        self._stack = np.stack([m.m for m in block.matrices])
        prefix = np.zeros((block.tau + 1, self.k, self.k), dtype=np.int64)
        np.cumsum(self._stack, axis=0, dtype=np.int64, out=prefix[1:])
        self._prefix = prefix
        if loss_model == "borda":
            self._losses = [borda_loss(m) for m in block.matrices]
        elif loss_model == "von-neumann":
            self.vn_strategy = _resolve_vn_strategy(block.source, vn_strategy)
            self._losses = [vn_loss(self.vn_strategy, m)
                            for m in block.matrices]
        elif loss_model == "copeland":
            self._losses = None
        else:
            raise ContractViolation(
                f"loss model {loss_model!r} not supported by block environments")

    def duel(self, t: int, i: int, j: int) -> int:
        if i == j:
            return 1 if self._rng.random() < 0.5 else -1
        return int(self._stack[(t - 1) % self.block.tau, i, j])

    def round_loss(self, t: int) -> LossVector | None:
        if self._losses is None:
            return None
        return self._losses[(t - 1) % self.block.tau]

    def cumulative_outcome_matrix(self, t: int) -> CumulativeOutcomeMatrix:
        tau = self.block.tau
        full, rem = divmod(t, tau)
        return CumulativeOutcomeMatrix(
            full * self._prefix[tau] + self._prefix[rem], t)


def env_round(env: Environment, t: int,
              pair: ActionPair) -> tuple[int, LossVector | None]:
    """Play round ``t`` of ``env`` with the given pair."""
    return env.round(t, pair)


def load_matrix_file(path) -> np.ndarray:
    """Read a square matrix file: first token K, then K*K row-major values."""
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ContractViolation(f"matrix file {path} is empty")
    try:
        k = int(tokens[0])
    except ValueError:
        raise ContractViolation(
            f"matrix file {path} must start with the arm count") from None
    if k < 1 or len(tokens) != 1 + k * k:
        raise ContractViolation(
            f"matrix file {path} declares K={k} but holds "
            f"{len(tokens) - 1} values")
    values = np.array([float(v) for v in tokens[1:]], dtype=np.float64)
    return values.reshape(k, k)


def load_preference_matrix(path) -> PreferenceMatrix:
    """Read and validate a preference matrix file."""
    return PreferenceMatrix(load_matrix_file(path))


def save_matrix_file(path, m) -> None:
    """Write a matrix in the plain-text format ``load_matrix_file`` reads."""
    m = np.asarray(m)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{m.shape[0]}\n")
        for row in m:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
