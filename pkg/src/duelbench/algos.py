"""Duelling-bandit policies behind one select/observe contract.

Every policy alternates ``select()`` (emit the round's pair) and
``observe(y)`` (feed back the signed outcome, +1 when the first arm won).
Policies own a private generator, so identical seeds replay identical
transcripts.  ``get_params()`` returns the parameter record the harness
serialises next to the results.
"""

from __future__ import annotations

import math

import numpy as np

from .core import ActionPair, ConfigurationError, ContractViolation
from .gamesolver import approximate_equilibrium

#: Divisions by a sampled-arm probability clamp the denominator here.
PROB_FLOOR = 1e-6


def eta_utility(k: int, horizon: int) -> float:
    """Tuned learning rate for utility-based losses: (4/K) sqrt((K-1) log K / 3T)."""
    if k < 2 or horizon < 1:
        raise ContractViolation("need K >= 2 and T >= 1")
    return 4.0 / k * math.sqrt((k - 1) * math.log(k) / (3.0 * horizon))


def eta_borda(k: int, horizon: int) -> float:
    """Tuned learning rate for Borda losses: 2 sqrt(log K / KT)."""
    if k < 2 or horizon < 1:
        raise ContractViolation("need K >= 2 and T >= 1")
    return 2.0 * math.sqrt(math.log(k) / (k * horizon))


def sparring_rate(t: int, k: int) -> float:
    """Anytime analogue of the fixed rate sqrt(2 log K / TK)."""
    return math.sqrt(2.0 * math.log(k) / (t * k))


def rex3_rate(k: int, horizon: int) -> float:
    """Exploration rate min(1/2, sqrt(K log K / (T/2)))."""
    return min(0.5, math.sqrt(k * math.log(k) / (0.5 * horizon)))


def _sample(rng: np.random.Generator, probs: np.ndarray) -> int:
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, probs.shape[0] - 1)


def _uniform_other(rng: np.random.Generator, k: int, a: int) -> int:
    b = int(rng.integers(k - 1))
    return b + 1 if b >= a else b


def _softmin(scores: np.ndarray, eta: float) -> np.ndarray:
    w = np.exp(-eta * (scores - scores.min()))
    return w / w.sum()


class Policy:
    """Base select/observe machinery with strict phase alternation."""

    name = "policy"
    #: outcomes a policy accepts; REX3 additionally tolerates draws
    valid_outcomes = (-1, 1)

    def __init__(self, k: int, rng: np.random.Generator):
        if k < 2:
            raise ContractViolation("policies need at least 2 arms")
        self.k = k
        self.rng = rng
        self.round = 0
        self._awaiting_outcome = False

    def get_params(self) -> dict:
        return {}

    def select(self) -> ActionPair:
        if self._awaiting_outcome:
            raise ContractViolation("select() called twice without observe()")
        self.round += 1
        pair = self._select()
        self._awaiting_outcome = True
        return pair

    def observe(self, y: int) -> None:
        if not self._awaiting_outcome:
            raise ContractViolation("observe() called before select()")
        if y not in self.valid_outcomes:
            raise ContractViolation(f"unexpected outcome {y!r}")
        self._observe(y)
        self._awaiting_outcome = False

    def _select(self) -> ActionPair:
        raise NotImplementedError

    def _observe(self, y: int) -> None:
        raise NotImplementedError


class Exp3Unif(Policy):
    """Exponential weights on importance-weighted losses for the first arm,
    uniform exploration over the remaining arms for the second."""

    name = "Exp3+UnifK-1"

    def __init__(self, k: int, eta: float, rng: np.random.Generator):
        super().__init__(k, rng)
        if eta <= 0:
            raise ContractViolation("learning rate must be positive")
        self.eta = eta
        self.cumulative_estimates = np.zeros(k)
        self.last_probs: np.ndarray | None = None
        self.last_pair: ActionPair | None = None

    def get_params(self) -> dict:
        return {"eta": self.eta}

    def _select(self) -> ActionPair:
        p = _softmin(self.cumulative_estimates, self.eta)
        a = _sample(self.rng, p)
        b = _uniform_other(self.rng, self.k, a)
        self.last_probs = p
        self.last_pair = ActionPair(a, b)
        return self.last_pair

    def _observe(self, y: int) -> None:
        a = self.last_pair.a
        p_a = max(float(self.last_probs[a]), PROB_FLOOR)
        self.cumulative_estimates[a] += (1 - y) / (2.0 * p_a)


class Exp3Sparring(Policy):
    """Two exponential-weights learners duelling each other.

    Both arms are sampled independently, so self-duels can occur.  The
    first learner treats a loss of the duel as loss 1, the second the win.
    """

    name = "Exp3-Sparring"

    def __init__(self, k: int, rng: np.random.Generator, rate=sparring_rate):
        super().__init__(k, rng)
        self.rate = rate
        self.estimates_a = np.zeros(k)
        self.estimates_b = np.zeros(k)
        self._last = None

    def get_params(self) -> dict:
        if self.rate is sparring_rate:
            return {"eta_t": "sqrt(2*log(K)/(t*K))"}
        return {"eta_t": getattr(self.rate, "__name__", repr(self.rate))}

    def _select(self) -> ActionPair:
        eta = self.rate(self.round, self.k)
        p_a = _softmin(self.estimates_a, eta)
        p_b = _softmin(self.estimates_b, eta)
        a = _sample(self.rng, p_a)
        b = _sample(self.rng, p_b)
        self._last = (a, b, float(p_a[a]), float(p_b[b]))
        return ActionPair(a, b)

    def _observe(self, y: int) -> None:
        a, b, pa, pb = self._last
        self.estimates_a[a] += (1 - y) / (2.0 * max(pa, PROB_FLOOR))
        self.estimates_b[b] += (1 + y) / (2.0 * max(pb, PROB_FLOOR))


class Exp3PSparring(Policy):
    """Sparring with two gain-based learners that add a bias term beta to
    every arm's importance-weighted estimate and mix in gamma-uniform
    exploration, which bounds every sampling probability below."""

    name = "Exp3.P-Sparring"

    def __init__(self, k: int, horizon: int, delta: float,
                 rng: np.random.Generator):
        super().__init__(k, rng)
        if not 0.0 < delta < 1.0:
            raise ContractViolation("delta must lie in (0, 1)")
        self.horizon = horizon
        self.delta = delta
        self.beta = math.sqrt(math.log(k / delta) / (horizon * k))
        self.eta = 0.95 * math.sqrt(math.log(k) / (horizon * k))
        self.gamma = 1.05 * math.sqrt(k * math.log(k) / horizon)
        if self.gamma >= 1.0:
            raise ConfigurationError(
                f"horizon T={horizon} is too small for K={k}: exploration "
                f"rate gamma={self.gamma:.4f} >= 1")
        self.gains_a = np.zeros(k)
        self.gains_b = np.zeros(k)
        self._last = None

    def get_params(self) -> dict:
        return {"beta": self.beta, "eta": self.eta, "gamma": self.gamma,
                "delta": self.delta}

    def _mixed(self, gains: np.ndarray) -> np.ndarray:
        w = np.exp(self.eta * (gains - gains.max()))
        p = (1.0 - self.gamma) * (w / w.sum()) + self.gamma / self.k
        return p / p.sum()

    def _select(self) -> ActionPair:
        p_a = self._mixed(self.gains_a)
        p_b = self._mixed(self.gains_b)
        a = _sample(self.rng, p_a)
        b = _sample(self.rng, p_b)
        self._last = (a, b, p_a, p_b)
        return ActionPair(a, b)

    def _observe(self, y: int) -> None:
        a, b, p_a, p_b = self._last
        gain = (y + 1) / 2.0
        self.gains_a += self.beta / p_a
        self.gains_a[a] += gain / p_a[a]
        self.gains_b += self.beta / p_b
        self.gains_b[b] += (1.0 - gain) / p_b[b]


class VnUnif(Policy):
    """First arm sampled from the equilibrium of an importance-weighted
    estimate of the cumulative outcome matrix, second arm uniform.

    The equilibrium is recomputed every round, warm-started from the
    previous round's strategies.
    """

    name = "VN+UnifK-1"

    def __init__(self, k: int, rng: np.random.Generator,
                 solver_tol: float = 1e-3, solver_iterations: int = 600):
        super().__init__(k, rng)
        self.solver_tol = solver_tol
        self.solver_iterations = solver_iterations
        self.estimate = np.zeros((k, k))
        self.strategy = None
        self._opponent = None
        self._last = None

    def get_params(self) -> dict:
        return {"solver_tol": self.solver_tol,
                "solver_iterations": self.solver_iterations}

    def _select(self) -> ActionPair:
        warm = None
        if self.strategy is not None:
            warm = (self.strategy, self._opponent)
        scale = max(1.0, float(np.abs(self.estimate).max()))
        u, v, _, _ = approximate_equilibrium(
            self.estimate, tol=self.solver_tol * scale,
            max_iterations=self.solver_iterations, warm_start=warm,
            check_every=50)
        self.strategy, self._opponent = u, v
        a = _sample(self.rng, u.probs)
        b = _uniform_other(self.rng, self.k, a)
        self._last = (a, b, float(u.probs[a]))
        return ActionPair(a, b)

    def _observe(self, y: int) -> None:
        a, b, p_a = self._last
        delta = y / ((self.k - 1) * max(p_a, PROB_FLOOR))
        self.estimate[a, b] += delta
        self.estimate[b, a] -= delta


class UcbUnif(Policy):
    """Borda reduction: a UCB index picks the first arm, uniform second.

    Unplayed arms have an infinite index, so the first K rounds play each
    arm once (ties broken by index).  The first arm is credited reward
    (1 + Y)/2.
    """

    name = "UCB+UnifK-1"

    def __init__(self, k: int, alpha: float, rng: np.random.Generator):
        super().__init__(k, rng)
        if alpha <= 0.5:
            raise ContractViolation("alpha must exceed 1/2")
        self.alpha = alpha
        self.wins = np.zeros(k)
        self.plays = np.zeros(k, dtype=np.int64)
        self._last_a = None

    def get_params(self) -> dict:
        return {"alpha": self.alpha}

    def _select(self) -> ActionPair:
        unplayed = np.flatnonzero(self.plays == 0)
        if unplayed.size:
            a = int(unplayed[0])
        else:
            index = self.wins / self.plays + np.sqrt(
                self.alpha * math.log(self.round) / self.plays)
            a = int(np.argmax(index))
        b = _uniform_other(self.rng, self.k, a)
        self._last_a = a
        return ActionPair(a, b)

    def _observe(self, y: int) -> None:
        self.wins[self._last_a] += (y + 1) / 2.0
        self.plays[self._last_a] += 1


class WinnerStaysWeak(Policy):
    """Plays the arms with the highest win-minus-loss counters, preferring
    the previous round's arms on ties; the winner's counter is incremented
    and the loser's decremented."""

    name = "WS-W"

    def __init__(self, k: int, rng: np.random.Generator):
        super().__init__(k, rng)
        self.counters = np.zeros(k, dtype=np.int64)
        self._prev: ActionPair | None = None
        self._last = None

    def _pick(self, candidates: np.ndarray, prefer: tuple[int, ...]) -> int:
        cset = set(int(c) for c in candidates)
        for arm in prefer:
            if arm in cset:
                return arm
        return int(candidates[self.rng.integers(candidates.size)])

    def _select(self) -> ActionPair:
        prefer = () if self._prev is None else (self._prev.a, self._prev.b)
        best = np.flatnonzero(self.counters == self.counters.max())
        a = self._pick(best, prefer)
        rest = np.flatnonzero(np.arange(self.k) != a)
        best_rest = rest[self.counters[rest] == self.counters[rest].max()]
        b = self._pick(best_rest, tuple(reversed(prefer)))
        self._last = ActionPair(a, b)
        return self._last

    def _observe(self, y: int) -> None:
        winner, loser = self._last if y > 0 else (self._last.b, self._last.a)
        self.counters[winner] += 1
        self.counters[loser] -= 1
        self._prev = self._last


class Rex3(Policy):
    """A single exponential-weights learner queried for both arms.

    On a decisive outcome the winner's weight is raised and the loser's
    lowered by the importance-weighted relative update; draws leave the
    weights untouched (self-duels cancel exactly).
    """

    name = "REX3"
    valid_outcomes = (-1, 0, 1)

    def __init__(self, k: int, horizon: int, rng: np.random.Generator,
                 gamma: float | None = None):
        super().__init__(k, rng)
        self.gamma = rex3_rate(k, horizon) if gamma is None else gamma
        if not 0.0 < self.gamma <= 1.0:
            raise ContractViolation("gamma must lie in (0, 1]")
        self.log_weights = np.zeros(k)
        self._last = None

    def get_params(self) -> dict:
        return {"gamma": self.gamma}

    def _select(self) -> ActionPair:
        w = np.exp(self.log_weights - self.log_weights.max())
        p = (1.0 - self.gamma) * (w / w.sum()) + self.gamma / self.k
        a = _sample(self.rng, p)
        b = _sample(self.rng, p)
        self._last = (a, b, p)
        return ActionPair(a, b)

    def _observe(self, y: int) -> None:
        a, b, p = self._last
        if y == 0 or a == b:
            return
        step = self.gamma / (2.0 * self.k)
        self.log_weights[a] += step * y / p[a]
        self.log_weights[b] -= step * y / p[b]
