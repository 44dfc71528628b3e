"""Finite filtered probability spaces with exact rational probabilities.

A process is a numpy object array of shape ``(T + 1, n)`` holding
``Fraction`` entries: row ``t`` is the value at time ``t``, column ``w`` the
outcome.  A random time is a float array of length ``n`` whose entries are
integers in ``0..T`` or ``INF``.
"""
from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import BadMeasure, NonRefiningFiltration, NotAStoppingTime

INF = math.inf


def frac(x):
    """Parse an exact rational from int, Fraction or a 'p/q' string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or 'p/q' string")
    return Fraction(x)


def rtime(values):
    """Build a random time from ints, 'inf' strings, None or math.inf."""
    out = []
    for v in values:
        if v is None or v == "inf" or v == INF:
            out.append(INF)
        else:
            out.append(float(int(v)))
    return np.array(out, dtype=float)


def const_time(space, t):
    return np.full(space.n, float(t))


def never(space):
    return np.full(space.n, INF)


class FilteredSpace:
    """Outcomes, strictly positive exact probabilities and a filtration.

    Use :func:`build_space` to construct a validated instance.
    """

    def __init__(self, outcomes, prob, horizon, partitions):
        self.outcomes = tuple(outcomes)
        self.prob = np.array(prob, dtype=object)
        self.horizon = int(horizon)
        self.partitions = tuple(tuple(tuple(sorted(b)) for b in sorted(p, key=min)) for p in partitions)
        n = len(self.outcomes)
        self.labels = np.zeros((self.horizon + 1, n), dtype=int)
        for t, part in enumerate(self.partitions):
            for k, block in enumerate(part):
                self.labels[t, list(block)] = k
        self._mass = [[sum(self.prob[list(b)], Fraction(0)) for b in part] for part in self.partitions]

    @property
    def n(self):
        return len(self.outcomes)

    @property
    def T(self):
        return self.horizon

    def shape(self):
        return (self.horizon + 1, self.n)

    def blocks(self, t):
        return self.partitions[t]

    def cond_exp(self, values, t):
        """E[values | F_t] as a length-n array (block averages)."""
        out = np.empty(self.n, dtype=object)
        for block, mass in zip(self.partitions[t], self._mass[t]):
            idx = list(block)
            avg = sum(self.prob[idx] * values[idx], Fraction(0)) / mass
            out[idx] = avg
        return out

    def cond_exp_prev(self, values, t):
        """E[values | F_{t-}] with F_{0-} = F_0."""
        return self.cond_exp(values, max(t - 1, 0))

    def expectation(self, values):
        return sum(self.prob * np.asarray(values, dtype=object), Fraction(0))

    def is_measurable(self, values, t):
        for block in self.partitions[t]:
            first = values[block[0]]
            if any(values[w] != first for w in block[1:]):
                return False
        return True

    def with_prob(self, prob):
        return FilteredSpace(self.outcomes, prob, self.horizon, self.partitions)

    def same_structure(self, other):
        return (self.outcomes == other.outcomes and self.horizon == other.horizon
                and list(self.prob) == list(other.prob))

    def __repr__(self):
        return f"FilteredSpace(n={self.n}, T={self.horizon})"


def _check_partition(part, n, t):
    seen = sorted(w for block in part for w in block)
    if seen != list(range(n)) or any(len(b) == 0 for b in part):
        raise NonRefiningFiltration(f"partition at t={t} is not a partition of the outcomes")


def refines(fine, coarse):
    """True when every block of ``fine`` sits inside a block of ``coarse``."""
    owner = {}
    for k, block in enumerate(coarse):
        for w in block:
            owner[w] = k
    return all(len({owner[w] for w in block}) == 1 for block in fine)


def build_space(outcomes, probs, horizon, partitions):
    outcomes = list(outcomes)
    n = len(outcomes)
    probs = [frac(p) for p in probs]
    if horizon < 1:
        raise NonRefiningFiltration("horizon must be at least 1")
    if len(probs) != n:
        raise BadMeasure("one probability per outcome is required")
    if any(p <= 0 for p in probs):
        raise BadMeasure("probabilities must be strictly positive")
    if sum(probs) != 1:
        raise BadMeasure(f"probabilities sum to {sum(probs)}, not 1")
    if len(partitions) != horizon + 1:
        raise NonRefiningFiltration("need one partition per time 0..T")
    parts = [[list(b) for b in p] for p in partitions]
    for t, part in enumerate(parts):
        _check_partition(part, n, t)
    for t in range(horizon):
        if not refines(parts[t + 1], parts[t]):
            raise NonRefiningFiltration(f"partition at t={t + 1} does not refine t={t}")
    return FilteredSpace(outcomes, probs, horizon, parts)


def is_stopping_time(space, rt):
    rt = np.asarray(rt, dtype=float)
    return all(space.is_measurable(rt <= t, t) for t in range(space.T + 1))


def is_predictable_time(space, rt):
    """One-step announcement: {rt = t} is F_{t-1}-measurable (F_{0-} = F_0)."""
    rt = np.asarray(rt, dtype=float)
    if not is_stopping_time(space, rt):
        raise NotAStoppingTime("predictability is only defined for stopping times")
    return all(space.is_measurable(rt == t, max(t - 1, 0)) for t in range(space.T + 1))


@dataclass(frozen=True)
class MeasureChange:
    density: tuple

    @classmethod
    def of(cls, space, density):
        d = tuple(frac(x) for x in density)
        if len(d) != space.n:
            raise BadMeasure("density needs one value per outcome")
        if any(x <= 0 for x in d):
            raise BadMeasure("density must be strictly positive")
        if space.expectation(np.array(d, dtype=object)) != 1:
            raise BadMeasure("density must have expectation 1")
        return cls(d)

    def inverse(self):
        return MeasureChange(tuple(1 / x for x in self.density))


def apply_measure_change(space, mc):
    mc = MeasureChange.of(space, mc.density)
    return space.with_prob([d * p for d, p in zip(mc.density, space.prob)])


# -- process helpers -------------------------------------------------------

def zeros(space):
    return np.full(space.shape(), Fraction(0), dtype=object)


def constant(space, c):
    return np.full(space.shape(), frac(c), dtype=object)


def as_proc(rows):
    """Build a process from nested rows (time-major) of rationals."""
    return np.array([[frac(x) for x in row] for row in rows], dtype=object)


def time_column(space):
    return np.arange(space.T + 1, dtype=float)[:, None]


def is_adapted(space, X):
    return all(space.is_measurable(X[t], t) for t in range(space.T + 1))


def is_predictable(space, X):
    return all(space.is_measurable(X[t], max(t - 1, 0)) for t in range(space.T + 1))


def fixture_m1():
    """Two equally likely outcomes, trivial filtration, tau = (1, 2)."""
    space = build_space(["w1", "w2"], ["1/2", "1/2"], 2, [[[0, 1]]] * 3)
    return space, rtime([1, 2])


def fixture_m2():
    """Outcomes a, b, c uniform; F_1 = {{a},{b,c}}, F_2 discrete; tau = (2, 1, inf)."""
    space = build_space(["a", "b", "c"], ["1/3"] * 3, 2,
                        [[[0, 1, 2]], [[0], [1, 2]], [[0], [1], [2]]])
    return space, rtime([2, 1, "inf"])
