"""Seeded random models: filtration trees, random times, martingales and
deflator instances.  Every generator is a pure function of its seed."""
from dataclasses import dataclass
from fractions import Fraction
import random

import numpy as np

from .azema import azema_bundle, vanishing_times
from .calculus import delta, stoch_log
from .errors import UnrealizableClass
from .jumps import ortho_decomp
from .space import INF, MeasureChange, build_space

ZERO, ONE = Fraction(0), Fraction(1)

PATHOLOGICAL_CLASSES = ("eta_finite", "eta_ddot_finite", "eta_dot_finite",
                        "eta_tilde_finite", "Da_equals_1")


@dataclass(frozen=True)
class Sizes:
    max_outcomes: int = 8
    max_horizon: int = 5


def _rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _weights(rng, k, lo=1, hi=5):
    w = [Fraction(rng.randint(lo, hi)) for _ in range(k)]
    total = sum(w)
    return [x / total for x in w]


def random_partitions(rng, n, T):
    """A refining sequence of partitions of range(n), starting trivial."""
    parts = [[list(range(n))]]
    for _ in range(T):
        new = []
        for block in parts[-1]:
            block = block[:]
            rng.shuffle(block)
            k = rng.randint(1, min(len(block), 3))
            cuts = sorted(rng.sample(range(1, len(block)), k - 1)) if k > 1 else []
            bounds = [0] + cuts + [len(block)]
            new.extend(sorted(block[a:b]) for a, b in zip(bounds, bounds[1:]))
        parts.append(new)
    return parts


def random_space(seed, n=None, T=None, sizes=Sizes()):
    rng = _rng(seed)
    n = n or rng.randint(2, sizes.max_outcomes)
    T = T or rng.randint(1, sizes.max_horizon)
    return build_space([f"w{i}" for i in range(n)], _weights(rng, n), T,
                       random_partitions(rng, n, T))


def random_time(rng, space, mode=None):
    """A random time; ``mode`` picks its relation to the filtration."""
    T, n = space.T, space.n
    mode = mode or rng.choice(["free", "free", "terminal", "stopping", "predictable"])
    values = list(range(T + 1)) + [INF]
    weights = [1] + [3] * T + [2]
    if mode == "free":
        return np.array([float(rng.choices(values, weights)[0]) for _ in range(n)])
    if mode == "terminal":
        tau = np.full(n, INF)
        for block in space.blocks(T):
            tau[list(block)] = rng.choices(values, weights)[0]
        return tau
    predictable = mode == "predictable"
    tau = np.full(n, INF)
    for t in range(T + 1):
        info = max(t - 1, 0) if predictable else t
        for block in space.blocks(info):
            live = [w for w in block if tau[w] == INF]
            if live and rng.random() < (0.15 if t == 0 else 0.4):
                tau[live] = t
    return tau


def random_model(seed, sizes=Sizes()):
    rng = _rng(seed)
    F = random_space(rng, sizes=sizes)
    return F, random_time(rng, F)


def random_martingale(seed, space, lo=-3, hi=3):
    """Integer-valued steps with zero conditional mean on every block."""
    rng = _rng(seed)
    X = np.full(space.shape(), ZERO, dtype=object)
    X[0] = Fraction(rng.randint(lo, hi))
    for t in range(1, space.T + 1):
        X[t] = X[t - 1]
        for block in space.blocks(t - 1):
            children = [c for c in space.blocks(t) if c[0] in block]
            steps = [Fraction(rng.randint(lo, hi)) for _ in children]
            mass = [sum(space.prob[list(c)], ZERO) for c in children]
            mean = sum(s * m for s, m in zip(steps, mass)) / sum(mass)
            for c, s in zip(children, steps):
                X[t, list(c)] += s - mean
    return X


def random_positive_martingale(seed, space, lo=1, hi=4):
    """Multiplicative steps with unit conditional mean."""
    rng = _rng(seed)
    Y = np.full(space.shape(), ONE, dtype=object)
    for t in range(1, space.T + 1):
        Y[t] = Y[t - 1]
        for block in space.blocks(t - 1):
            children = [c for c in space.blocks(t) if c[0] in block]
            f = [Fraction(rng.randint(lo, hi)) for _ in children]
            mass = [sum(space.prob[list(c)], ZERO) for c in children]
            mean = sum(x * m for x, m in zip(f, mass)) / sum(mass)
            for c, x in zip(children, f):
                Y[t, list(c)] *= x / mean
    return Y


def random_adapted(seed, space, lo=-3, hi=3):
    rng = _rng(seed)
    X = np.full(space.shape(), ZERO, dtype=object)
    for t in range(space.T + 1):
        for block in space.blocks(t):
            X[t, list(block)] = Fraction(rng.randint(lo, hi))
    return X


def random_density(seed, space):
    rng = _rng(seed)
    raw = np.array([Fraction(rng.randint(1, 6)) for _ in range(space.n)], dtype=object)
    return MeasureChange.of(space, raw / space.expectation(raw))


def random_stopping_time(seed, space):
    return random_time(_rng(seed), space, "stopping")


def priced_by(seed, space, Y, R=None):
    """A process S with Y S^{R-} a martingale (Y S a martingale when R is None).

    Values of S at and after R are free and drawn at random, so S jumps at R.
    """
    rng = _rng(seed)
    R = np.full(space.n, INF) if R is None else np.asarray(R, dtype=float)
    S = np.full(space.shape(), ZERO, dtype=object)
    S[0] = Fraction(rng.randint(-2, 2))
    for t in range(1, space.T + 1):
        S[t] = S[t - 1]
        for block in space.blocks(t - 1):
            children = [list(c) for c in space.blocks(t) if c[0] in block]
            if R[block[0]] < t:
                for c in children:
                    S[t, c] = Fraction(rng.randint(-3, 3))
                continue
            alive = [c for c in children if R[c[0]] > t]
            drift = ZERO
            for c in children:
                w, p = c[0], sum(space.prob[c], ZERO)
                if R[w] == t:
                    drift += p * S[t - 1, w] * (Y[t, w] - Y[t - 1, w])
                    S[t, c] = S[t - 1, w] + rng.randint(-3, 3)
                elif c is not alive[-1]:
                    S[t, c] = Fraction(rng.randint(-3, 3))
                    drift += p * (S[t, w] * Y[t, w] - S[t - 1, w] * Y[t - 1, w])
            if alive:
                # zero conditional drift of Y S^{R-}: solve for the last alive child
                c = alive[-1]
                w, p = c[0], sum(space.prob[c], ZERO)
                S[t, c] = (S[t - 1, w] * Y[t - 1, w] - drift / p) / Y[t, w]
    return S


# -- density and Cox models -------------------------------------------------

def _lift(parts, m):
    """Partitions of range(k) lifted to range(k * m) with outcome (i, j) -> i * m + j."""
    return [[[i * m + j for i in block for j in range(m)] for block in part] for part in parts]


def gen_density_model(seed, sizes=Sizes()):
    """F carries no information on tau; P(tau = t | F_T) > 0 on a support."""
    rng = _rng(seed)
    T = rng.randint(1, sizes.max_horizon)
    m = rng.randint(2, max(2, min(T + 2, sizes.max_outcomes // 2)))
    support = sorted(rng.sample(list(range(T + 1)) + [INF], m))
    k = rng.randint(1, max(1, sizes.max_outcomes // m))
    q = _weights(rng, k)
    prob, labels, tau = [], [], []
    for i in range(k):
        cond = _weights(rng, m)
        for j, t in enumerate(support):
            prob.append(q[i] * cond[j])
            labels.append(f"f{i}@{t}")
            tau.append(t)
    F = build_space(labels, prob, T, _lift(random_partitions(rng, k, T), m))
    return F, np.array(tau, dtype=float)


def _threshold_model(rng, k, T, parts, barrier, xi_support, xi_weights):
    prob, labels, tau = [], [], []
    m = len(xi_support)
    q = _weights(rng, k)
    for i in range(k):
        for j, x in enumerate(xi_support):
            prob.append(q[i] * xi_weights[j])
            labels.append(f"f{i}|xi={x}")
            hit = [s for s in range(1, T + 1) if barrier[s][i] > x]
            tau.append(float(hit[0]) if hit else INF)
    F = build_space(labels, prob, T, _lift(parts, m))
    return F, np.array(tau, dtype=float)


def _random_barrier(rng, parts, k, T, max_step=2):
    a = [[0] * k]
    for t in range(1, T + 1):
        row = a[-1][:]
        for block in parts[t]:
            step = rng.randint(0, max_step)
            for i in block:
                row[i] += step
        a.append(row)
    return a


def gen_cox_model(seed, sizes=Sizes(), zero_barrier=False):
    """tau = inf{s >= 1 : a_s > xi} with xi independent of the barrier a."""
    rng = _rng(seed)
    T = rng.randint(1, sizes.max_horizon)
    k = rng.randint(1, max(1, sizes.max_outcomes // 2))
    parts = random_partitions(rng, k, T)
    a = [[0] * k for _ in range(T + 1)] if zero_barrier else _random_barrier(rng, parts, k, T)
    top = max(max(r) for r in a)
    m = rng.randint(1, max(1, sizes.max_outcomes // k))
    below = rng.sample(range(top), min(m - 1, top)) if top else []
    support = sorted(below) + [top + rng.randint(0, 1)]
    F, tau = _threshold_model(rng, k, T, parts, a, support, _weights(rng, len(support)))
    return F, tau


def cox_survival_identity(F, tau, barrier, xi_support, xi_weights, k):
    """Q(tau > s | F_T) = Q(xi >= a_s) on each barrier path."""
    m = len(xi_support)
    for i in range(k):
        rows = list(range(i * m, (i + 1) * m))
        mass = sum(F.prob[rows], ZERO)
        for s in range(F.T + 1):
            lhs = sum((F.prob[r] for r in rows if tau[r] > s), ZERO) / mass
            rhs = sum((w for x, w in zip(xi_support, xi_weights) if x >= barrier[s][i]), ZERO)
            if s >= 1 and lhs != rhs:
                return False
    return True


def cox_branch_model(seed, sizes=Sizes()):
    """Two-regime barrier a_s = s + 1_{T <= s} with T an F stopping time.

    Returns (F, tau, barrier, T_values, xi_support, xi_weights, k).
    """
    rng = _rng(seed)
    T = rng.randint(2, max(2, sizes.max_horizon))
    k = rng.randint(2, max(2, min(4, sizes.max_outcomes // 3)))
    parts = random_partitions(rng, k, T)
    Fk = build_space(list(range(k)), _weights(rng, k), T, parts)
    stop = random_time(rng, Fk, "stopping")
    stop = np.where(stop == 0, 1.0, stop)
    barrier = [[s + (1 if stop[i] <= s else 0) for i in range(k)] for s in range(T + 1)]
    top = T + 1
    m = max(1, min(top + 1, sizes.max_outcomes // k))
    support = list(range(m - 1)) + [top]
    weights = _weights(rng, len(support))
    F, tau = _threshold_model(rng, k, T, parts, barrier, support, weights)
    return F, tau, barrier, stop, support, weights, k


# -- pathological classes ---------------------------------------------------

def realizes(F, tau, cls):
    b = azema_bundle(F, tau)
    vt = vanishing_times(b)
    if cls == "Da_equals_1":
        return bool((delta(b.a) == 1).any())
    field = {"eta_finite": vt.eta, "eta_ddot_finite": vt.eta_ddot,
             "eta_dot_finite": vt.eta_dot, "eta_tilde_finite": vt.eta_tilde}[cls]
    return bool((field < INF).any())


def da_one_time(F, tau):
    """First t >= 1 with da_t = 1 (a predictable time), INF where none."""
    da = delta(azema_bundle(F, tau).a)
    out = np.full(F.n, INF)
    for w in range(F.n):
        hits = [t for t in range(1, F.T + 1) if da[t, w] == 1]
        if hits:
            out[w] = hits[0]
    return out


def gen_pathological(seed, cls, sizes=Sizes(), tries=60):
    """Rejection sampling, growing the size budget up to 12 outcomes and horizon 6."""
    if cls not in PATHOLOGICAL_CLASSES:
        raise ValueError(f"unknown class {cls!r}")
    rng = _rng(seed)
    budgets = [sizes, Sizes(max(sizes.max_outcomes, 10), max(sizes.max_horizon, 5)), Sizes(12, 6)]
    for budget in budgets:
        for _ in range(tries):
            F, tau = random_model(rng, budget)
            if realizes(F, tau, cls):
                return F, tau
    raise UnrealizableClass(f"class {cls} not realized within the size budget")


# -- deflator instances -----------------------------------------------------

def deflator_instance(seed, space, R=None):
    """(S, Y, xi) with Y = E(xi) an F deflator of S^{R-} and S jumping at R."""
    rng = _rng(seed)
    Y = random_positive_martingale(rng, space)
    S = priced_by(rng, space, Y, R)
    return S, Y, stoch_log(Y)


def eta_regular_martingale(seed, space, eta):
    """A martingale X with X^{eta-} a martingale: the jump at eta is removed."""
    X = random_martingale(seed, space)
    return ortho_decomp(space, X, eta).Xbar
