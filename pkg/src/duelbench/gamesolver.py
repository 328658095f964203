"""Equilibrium solver for zero-sum matrix games.

``von_neumann_winner`` returns the maximin strategy of the row player:
the mixed strategy whose expected payoff against every column is at least
the game value.  For the skew-symmetric games built from duel outcomes the
value is zero and the winner weakly beats every single arm.

Two independent paths solve the same problem: an iterative
multiplicative-weights self-play loop (primary; optimistic updates with
averaged iterates, anchored restarts when progress stalls) and a dense LP
via the HiGHS simplex (oracle for tests, K <= 32).
"""

from __future__ import annotations

import numpy as np

from .core import ContractViolation, MixedStrategy

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap

#: Iteration cap for the self-play loop.
DEFAULT_MAX_ITERATIONS = 10**6

#: Default duality-gap tolerance, in payoff units of the input matrix.
DEFAULT_TOL = 1e-6

_GAP_CHECK_EVERY = 200
_RESTART_CHECK_MULTIPLE = 20


class SolverError(RuntimeError):
    """Self-play did not reach the requested gap within the iteration cap."""

    def __init__(self, message: str, achieved_gap: float):
        super().__init__(message)
        self.achieved_gap = achieved_gap


@njit(cache=True)
def _softmax(x):
    z = x - x.max()
    e = np.exp(z)
    return e / e.sum()


@njit(cache=True)
def _gap(a, p, q):
    # best row response to q minus best column response to p; brackets the value
    return (a @ q).max() - (a.T @ p).min()


@njit(cache=True)
def _self_play(a, x, y, eta0, tol, max_iterations, check_every):
    """Optimistic multiplicative-weights self-play on payoff matrix ``a``.

    ``x``/``y`` are initial log-weights for the row (maximising) and column
    (minimising) players.  Keeps the best of the last iterate and the
    running average; when the best gap stops shrinking, halves the step and
    restarts anchored at the best pair found so far.
    """
    k1, k2 = a.shape
    eta = eta0
    g_prev = np.zeros(k1)
    h_prev = np.zeros(k2)
    p_avg = np.zeros(k1)
    q_avg = np.zeros(k2)
    n_avg = 0

    best_p = _softmax(x)
    best_q = _softmax(y)
    best_gap = _gap(a, best_p, best_q)
    if best_gap <= tol:
        return best_p, best_q, best_gap, 0
    last_best = best_gap

    it = 0
    while it < max_iterations:
        it += 1
        p = _softmax(x)
        q = _softmax(y)
        g = a @ q
        h = a.T @ p
        x += eta * (2.0 * g - g_prev)
        y -= eta * (2.0 * h - h_prev)
        g_prev = g
        h_prev = h
        p_avg += p
        q_avg += q
        n_avg += 1
        if it % check_every == 0 or it == max_iterations:
            gl = _gap(a, p, q)
            if gl < best_gap:
                best_gap = gl
                best_p = p.copy()
                best_q = q.copy()
            pa = p_avg / n_avg
            qa = q_avg / n_avg
            ga = _gap(a, pa, qa)
            if ga < best_gap:
                best_gap = ga
                best_p = pa
                best_q = qa
            if best_gap <= tol:
                return best_p, best_q, best_gap, it
            if it % (check_every * _RESTART_CHECK_MULTIPLE) == 0:
                if best_gap > 0.7 * last_best:
                    eta = max(eta * 0.5, 1e-3)
                    x = np.log(np.maximum(best_p, 1e-300))
                    y = np.log(np.maximum(best_q, 1e-300))
                    g_prev = np.zeros(k1)
                    h_prev = np.zeros(k2)
                    p_avg = np.zeros(k1)
                    q_avg = np.zeros(k2)
                    n_avg = 0
                last_best = best_gap
    return best_p, best_q, best_gap, max_iterations


def _support_guess(m: np.ndarray, p: np.ndarray, q: np.ndarray,
                   threshold: float):
    """Solve the equilibrium equations on the supports suggested by (p, q).

    On the true supports, every supported column payoff equals the value and
    the strategy sums to one; a least-squares solve recovers the exact
    equilibrium.  Returns ``None`` when the guessed supports are wrong.
    """
    rows = np.flatnonzero(p >= threshold * p.max())
    cols = np.flatnonzero(q >= threshold * q.max())
    if rows.size == 0 or cols.size == 0:
        return None
    sub = m[np.ix_(rows, cols)]

    def solve(payoffs, size):
        # [payoffs | -1] x = 0 plus sum(x) = 1, solved in least squares
        a = np.hstack([payoffs, -np.ones((payoffs.shape[0], 1))])
        a = np.vstack([a, np.hstack([np.ones(size), [0.0]])])
        b = np.zeros(payoffs.shape[0] + 1)
        b[-1] = 1.0
        x = np.linalg.lstsq(a, b, rcond=None)[0]
        weights = x[:-1]
        if weights.min() < -1e-7:
            return None
        weights = np.maximum(weights, 0.0)
        total = weights.sum()
        if total <= 0:
            return None
        return weights / total

    u_s = solve(sub.T, rows.size)
    v_s = solve(sub, cols.size)
    if u_s is None or v_s is None:
        return None
    u = np.zeros(m.shape[0])
    u[rows] = u_s
    v = np.zeros(m.shape[1])
    v[cols] = v_s
    return u, v


def _polish(m: np.ndarray, p: np.ndarray, q: np.ndarray, tol: float):
    """Try support-restricted exact solves; certified by the duality gap."""
    best = None
    for threshold in (1e-2, 1e-4, 1e-6):
        guess = _support_guess(m, p, q, threshold)
        if guess is None:
            continue
        u, v = guess
        gap = float((m @ v).max() - (u @ m).min())
        if best is None or gap < best[2]:
            best = (u, v, gap)
        if gap <= tol:
            break
    return best


def _check_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"game matrix is not square: shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("game matrix entries must be finite")
    return m


def _warm_logs(k: int, warm_start) -> tuple[np.ndarray, np.ndarray]:
    if warm_start is None:
        return np.zeros(k), np.zeros(k)
    u, v = warm_start
    u = u.probs if isinstance(u, MixedStrategy) else np.asarray(u, float)
    v = v.probs if isinstance(v, MixedStrategy) else np.asarray(v, float)
    if u.shape != (k,) or v.shape != (k,):
        raise ContractViolation("warm-start strategies have the wrong length")
    # flooring lets arms near zero mass recover quickly if the game drifts
    return np.log(np.maximum(u, 1e-12)), np.log(np.maximum(v, 1e-12))


def approximate_equilibrium(m, tol: float = DEFAULT_TOL,
                            max_iterations: int = DEFAULT_MAX_ITERATIONS,
                            eta: float = 0.25, warm_start=None,
                            check_every: int = _GAP_CHECK_EVERY):
    """Best equilibrium pair found within the budget; never raises.

    Returns ``(u, v, gap, value)`` where ``gap`` is the achieved duality gap
    in the payoff units of ``m``.  Self-play runs in chunks; between chunks
    a support-restricted exact solve tries to finish degenerate games the
    iterates only approach.
    """
    m = _check_square(m)
    k = m.shape[0]
    if tol <= 0:
        raise ContractViolation("tolerance must be positive")
    if k == 1:
        u = MixedStrategy(np.ones(1))
        return u, u, 0.0, float(m[0, 0])
    scale = max(1.0, float(np.abs(m).max()))
    a = m / scale
    x, y = _warm_logs(k, warm_start)
    best_p, best_q, best_gap = None, None, np.inf
    remaining = max_iterations
    while True:
        chunk = min(remaining, 100_000)
        p, q, gap, used = _self_play(a, x, y, eta, tol / scale, chunk,
                                     check_every)
        remaining -= max(used, 1)
        if gap < best_gap:
            best_p, best_q, best_gap = p, q, gap
        if best_gap > tol / scale:
            polished = _polish(a, best_p, best_q, tol / scale)
            if polished is not None and polished[2] < best_gap:
                best_p, best_q, best_gap = polished
        if best_gap <= tol / scale or remaining <= 0:
            break
        x = np.log(np.maximum(best_p, 1e-300))
        y = np.log(np.maximum(best_q, 1e-300))
    p = np.maximum(best_p, 0.0)
    p /= p.sum()
    q = np.maximum(best_q, 0.0)
    q /= q.sum()
    # the true value lies between the two best responses
    value = float(((m @ q).max() + (m.T @ p).min()) / 2.0)
    return MixedStrategy(p), MixedStrategy(q), float(best_gap * scale), value


def von_neumann_winner(m, tol: float = DEFAULT_TOL,
                       max_iterations: int = DEFAULT_MAX_ITERATIONS,
                       warm_start=None) -> tuple[MixedStrategy, float]:
    """Maximin strategy and value of the zero-sum game with payoffs ``m``.

    The returned strategy u satisfies min_j [u^T m]_j >= value - tol.  For
    skew-symmetric ``m`` the value is zero, so u weakly beats every arm up
    to ``tol``.  Raises :class:`SolverError` with the achieved gap when the
    iteration cap is hit first.
    """
    u, _, gap, value = approximate_equilibrium(
        m, tol=tol, max_iterations=max_iterations, warm_start=warm_start)
    if gap > tol:
        raise SolverError(
            f"no equilibrium within gap {tol:g} after {max_iterations} "
            f"iterations; achieved gap {gap:.3e}", gap)
    return u, value


def lp_equilibrium(m) -> tuple[MixedStrategy, float]:
    """Exact maximin strategy via a dense LP (test oracle, K <= 32)."""
    from scipy.optimize import linprog

    m = _check_square(m)
    k = m.shape[0]
    if k > 32:
        raise ContractViolation("LP oracle path is limited to K <= 32")
    # maximise z subject to m^T u >= z 1, sum(u) = 1, u >= 0
    c = np.zeros(k + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-m.T, np.ones((k, 1))])
    a_eq = np.ones((1, k + 1))
    a_eq[0, -1] = 0.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(k), A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * k + [(None, None)], method="highs")
    if not res.success:  # pragma: no cover - bounded feasible by construction
        raise SolverError(f"LP solve failed: {res.message}", np.inf)
    u = np.maximum(res.x[:k], 0.0)
    u /= u.sum()
    return MixedStrategy(u), float(-res.fun)


def worst_case_payoff(m, u: MixedStrategy) -> float:
    """Payoff the row strategy ``u`` guarantees against the worst column."""
    m = _check_square(m)
    return float((u.probs @ m).min())
