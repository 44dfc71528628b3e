"""Discrete stochastic calculus on (T+1, n) process tables.

Conventions: X_{0-} = X_0, so every increment at t = 0 is zero, and
(H.X)_t = sum_{s=1..t} H_s (X_s - X_{s-1}).
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NonPositive, NotAdapted, NotAStoppingTime
from .space import INF, is_adapted, is_stopping_time


def left(X):
    """Left limit X_{t-}: the previous row, and X_0 at t = 0."""
    return np.concatenate([X[:1], X[:-1]], axis=0)


def delta(X):
    return X - left(X)


def integrate(H, X):
    return np.cumsum(H * delta(X), axis=0)


def bracket(X, Y):
    return np.cumsum(delta(X) * delta(Y), axis=0)


def cumulate(increments):
    """Process starting at 0 whose increments at t >= 1 are given."""
    inc = increments.copy()
    inc[0] = Fraction(0)
    return np.cumsum(inc, axis=0)


def stoch_exp(X):
    factors = 1 + delta(X)
    return np.cumprod(factors, axis=0)


def stoch_log(Y, absorbing=False):
    """Inverse of stoch_exp for Y with Y_0 = 1.

    With ``absorbing`` the path may hit 0 once and stay there; increments
    after absorption are set to 0.
    """
    if any(v != 1 for v in Y[0]):
        raise NonPositive("stoch_log needs Y_0 = 1")
    out = np.full(Y.shape, Fraction(0), dtype=object)
    for w in range(Y.shape[1]):
        acc = Fraction(0)
        for t in range(1, Y.shape[0]):
            prev, cur = Y[t - 1, w], Y[t, w]
            if prev == 0 and absorbing:
                if cur != 0:
                    raise NonPositive("path leaves 0 after absorption")
            elif prev <= 0 or (cur < 0) or (cur == 0 and not absorbing):
                raise NonPositive("stoch_log of a non-positive path")
            else:
                acc += (cur - prev) / prev
            out[t, w] = acc
    return out


def _time_index(T, R):
    """Row index min(t, R) for each (t, w), as an int array."""
    t = np.arange(T + 1)[:, None]
    return np.minimum(t, np.minimum(R, T)[None, :]).astype(int)


def take(X, index):
    cols = np.arange(X.shape[1])[None, :]
    return X[index, np.broadcast_to(cols, index.shape)]


def stop_at(X, R):
    R = np.asarray(R, dtype=float)
    return take(X, _time_index(X.shape[0] - 1, R))


def stop_before(X, R):
    """X^{R-}: X on [0, R), then frozen at X_{R-} (X_0 when R = 0)."""
    R = np.asarray(R, dtype=float)
    Rm = np.where(R >= 1, R - 1, 0.0)
    T = X.shape[0] - 1
    t = np.arange(T + 1)[:, None]
    idx = np.where(t < R[None, :], t, np.minimum(Rm, T)[None, :]).astype(int)
    return take(X, idx)


def at_time(X, R, default=None):
    """Values X_R(w) as an object array (``default`` where R is infinite)."""
    out = np.empty(X.shape[1], dtype=object)
    for w, r in enumerate(R):
        out[w] = default if r == INF else X[int(r), w]
    return out


def _drifts(space, X):
    if not is_adapted(space, X):
        raise NotAdapted("martingale tests need an adapted process")
    dX = delta(X)
    for t in range(1, space.T + 1):
        yield t, space.cond_exp(dX[t], t - 1)


def martingale_test(space, X):
    return all(all(v == 0 for v in d) for _, d in _drifts(space, X))


def supermartingale_test(space, X):
    return all(all(v <= 0 for v in d) for _, d in _drifts(space, X))


@dataclass
class StochasticInterval:
    """[0, bound] (or [0, bound)) or the union of [0, R] over a family."""
    bound: np.ndarray = None
    inclusive: bool = True
    union_family: list = field(default=None)

    def mask(self, T):
        t = np.arange(T + 1, dtype=float)[:, None]
        if self.union_family is not None:
            m = np.zeros((T + 1, len(self.union_family[0])), dtype=bool)
            for R in self.union_family:
                m |= t <= R[None, :]
            return m
        if self.inclusive:
            return t <= self.bound[None, :]
        return t < self.bound[None, :]

    def members(self):
        return list(self.union_family) if self.union_family is not None else [self.bound]


def martingale_on_set_test(space, X, S):
    for R in S.members():
        if not is_stopping_time(space, R):
            raise NotAStoppingTime("interval bounds must be stopping times")
    if S.union_family is not None or S.inclusive:
        return all(martingale_test(space, stop_at(X, R)) for R in S.members())
    return martingale_test(space, stop_before(X, S.bound))


def orthogonality_test(space, X, U):
    return martingale_test(space, X * U)


def full_interval(space):
    return StochasticInterval(bound=np.full(space.n, INF), inclusive=True)


def is_deflator(space, Y, S):
    """Y > 0 and Y, Y S^i martingales for every component S^i."""
    if not all(v > 0 for v in Y.ravel()):
        return False
    try:
        return martingale_test(space, Y) and all(martingale_test(space, Y * s) for s in S)
    except NotAdapted:
        return False
