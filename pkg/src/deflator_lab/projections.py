"""Optional and predictable projections, their dual versions, Doob-Meyer."""
from dataclasses import dataclass

import numpy as np

from .calculus import delta
from .errors import NotAdapted
from .space import is_adapted


def optional_projection(space, X):
    return np.array([space.cond_exp(X[t], t) for t in range(space.T + 1)], dtype=object)


def predictable_projection(space, X):
    return np.array([space.cond_exp_prev(X[t], t) for t in range(space.T + 1)], dtype=object)


def dual_optional(space, V):
    return np.cumsum(optional_projection(space, delta(V)), axis=0)


def dual_predictable(space, V):
    return np.cumsum(predictable_projection(space, delta(V)), axis=0)


@dataclass
class DoobMeyer:
    martingale: np.ndarray  # includes the initial value
    drift: np.ndarray       # predictable, zero at t = 0


def doob_meyer(space, X):
    """X = martingale - drift with a predictable drift starting at 0."""
    if not is_adapted(space, X):
        raise NotAdapted("Doob-Meyer needs an adapted process")
    drift = -dual_predictable(space, X)
    return DoobMeyer(martingale=X + drift, drift=drift)
