"""Progressive enlargement G of F by a random time tau, and the passage of
processes and stopping times between G and F.

G_t is generated by F_t together with the events {tau = s} for s <= t and
{tau > t}, so tau is a G stopping time.  Before tau the two filtrations
agree, which is what makes every reduction below possible.
"""
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
import itertools

import numpy as np

from .azema import azema_bundle, indicator, safe_inverse, vanishing_times
from .calculus import (StochasticInterval, bracket, delta, integrate, left, martingale_on_set_test,
                       martingale_test, stoch_exp, stop_at, stop_before)
from .errors import (EquationNotSatisfied, JumpAtTau, NonVanishingAtEtaDdot, NotAdapted,
                     NotAMartingale, NotAStoppingTime, NotPredictable, ReductionImpossible, require)
from .space import (INF, build_space, is_adapted, is_predictable, is_predictable_time,
                    is_stopping_time, refines, time_column)

ZERO = Fraction(0)


@dataclass
class EnlargedPair:
    F_space: object
    G_space: object
    tau: np.ndarray

    @cached_property
    def bundle(self):
        return azema_bundle(self.F_space, self.tau)

    @cached_property
    def vt(self):
        return vanishing_times(self.bundle)

    def zeta_set(self):
        """The union of [0, zeta_n] over n as a stochastic interval."""
        return StochasticInterval(union_family=list(self.vt.zeta_n.values()))


def _tau_key(r, t):
    return int(r) if r <= t else -1


def enlarge_progressively(F_space, tau):
    tau = np.asarray(tau, dtype=float)
    parts = []
    for t in range(F_space.T + 1):
        blocks = {}
        for w in range(F_space.n):
            key = (F_space.labels[t, w], _tau_key(tau[w], t))
            blocks.setdefault(key, []).append(w)
        parts.append(list(blocks.values()))
    G = build_space(F_space.outcomes, F_space.prob, F_space.T, parts)
    require(all(refines(G.partitions[t], F_space.partitions[t]) for t in range(G.T + 1)),
            "G does not refine F")
    require(is_stopping_time(G, tau), "tau is not a G stopping time")
    return EnlargedPair(F_space, G, tau)


def _alive(pair):
    return indicator(time_column(pair.F_space) < pair.tau[None, :])


def _alive_prev(pair):
    """1_{tau >= t} for t >= 1 and 1_{tau > 0} at t = 0."""
    t = time_column(pair.F_space)
    tau = pair.tau[None, :]
    return indicator(np.where(t == 0, tau > 0, t <= tau))


def reduce_optional(pair, H):
    """F-adapted K with K = H on [0, tau): E[H 1_{t<tau} | F_t] / Z on {Z > 0}."""
    F = pair.F_space
    if not is_adapted(pair.G_space, H):
        raise NotAdapted("H must be G-adapted")
    Z = pair.bundle.Z
    raw = np.array([F.cond_exp(H[t] * _alive(pair)[t], t) for t in range(F.T + 1)], dtype=object)
    K = raw * safe_inverse(Z, Z > 0)
    on = time_column(F) < pair.tau[None, :]
    if not (K[on] == H[on]).all():
        raise ReductionImpossible("no F-adapted process matches H before tau")
    return K


def reduce_predictable(pair, H):
    """F-predictable K with K = H on (0, tau], normalised against Z_-."""
    F = pair.F_space
    if not is_predictable(pair.G_space, H):
        raise NotPredictable("H must be G-predictable")
    Zm = left(pair.bundle.Z)
    alive = _alive_prev(pair)
    raw = np.array([F.cond_exp_prev(H[t] * alive[t], t) for t in range(F.T + 1)], dtype=object)
    K = raw * safe_inverse(Zm, Zm > 0)
    t = time_column(F)
    on = (t >= 1) & (t <= pair.tau[None, :])
    if not (K[on] == H[on]).all():
        raise ReductionImpossible("no F-predictable process matches H on (0, tau]")
    return K


def _reduce_time(pair, U, predictable):
    F, tau = pair.F_space, pair.tau
    T = np.full(F.n, INF)
    for t in range(F.T + 1):
        s = max(t - 1, 0) if predictable else t
        alive = (tau >= t) if (predictable and t > 0) else (tau > t)
        for block in F.blocks(s):
            idx = [w for w in block if alive[w]]
            if idx and all(U[w] <= t for w in idx):
                for w in block:
                    T[w] = min(T[w], t)
    return T


def _agrees(pair, T, U):
    return (np.minimum(T, pair.tau) == np.minimum(U, pair.tau)).all()


def _search_times(pair, U, predictable, limit=200000):
    """Exhaustive search over F stopping (or predictable) times."""
    F = pair.F_space
    stages = [F.blocks(max(t - 1, 0) if predictable else t) for t in range(F.T + 1)]
    count = 0

    def rec(t, T):
        nonlocal count
        count += 1
        if count > limit:
            return None
        if t > F.T:
            return T if _agrees(pair, T, U) else None
        live = [b for b in stages[t] if T[b[0]] == INF]
        for choice in itertools.product((False, True), repeat=len(live)):
            T2 = T.copy()
            for b, stop in zip(live, choice):
                if stop:
                    T2[list(b)] = t
            found = rec(t + 1, T2)
            if found is not None:
                return found
        return None

    return rec(0, np.full(F.n, INF))


def reduce_stopping_time(pair, U):
    U = np.asarray(U, dtype=float)
    if not is_stopping_time(pair.G_space, U):
        raise NotAStoppingTime("U must be a G stopping time")
    T = _reduce_time(pair, U, predictable=False)
    if not (_agrees(pair, T, U) and is_stopping_time(pair.F_space, T)):
        T = _search_times(pair, U, predictable=False)
        if T is None:
            raise ReductionImpossible("no F stopping time agrees with U before tau")
    return T


def reduce_predictable_time(pair, U):
    U = np.asarray(U, dtype=float)
    if not is_predictable_time(pair.G_space, U):
        raise NotPredictable("U must be G-predictable")
    T = _reduce_time(pair, U, predictable=True)
    if not (_agrees(pair, T, U) and is_predictable_time(pair.F_space, T)):
        T = _search_times(pair, U, predictable=True)
        if T is None:
            raise ReductionImpossible("no F-predictable time agrees with U before tau")
    return T


def check_redreg(pair, X):
    Y = reduce_optional(pair, X)
    Zm = left(pair.bundle.Z)
    Ym = left(Y) * indicator(Zm > 0)
    t = time_column(pair.F_space)
    on = (t >= 1) & (t <= pair.tau[None, :])
    return bool((Ym[on] == left(X)[on]).all())


def check_rdps(pair, H, predictable=False):
    """Reduction of a process positive before tau is positive before zeta."""
    t = time_column(pair.F_space)
    zeta = pair.vt.zeta[None, :]
    if predictable:
        K = reduce_predictable(pair, H)
        return bool((K[(t >= 1) & (t <= zeta)] > 0).all())
    K = reduce_optional(pair, H)
    return bool((K[t < zeta] > 0).all())


def _tau_jump(pair, X):
    dX = delta(X)
    return [dX[int(r), w] for w, r in enumerate(pair.tau) if 0 < r < INF]


def equation_process(bundle, Y):
    """Y Z + Y_- . a, a martingale on the zeta set exactly when Y solves the equation."""
    return Y * bundle.Z + integrate(left(Y), bundle.a)


def rdm_check(pair, X):
    G = pair.G_space
    if not martingale_test(G, X):
        raise NotAMartingale("X must be a G martingale")
    if any(j != 0 for j in _tau_jump(pair, X)):
        raise JumpAtTau("X jumps at tau")
    Y = reduce_optional(pair, X)
    b, S = pair.bundle, pair.zeta_set()
    first = martingale_on_set_test(pair.F_space, equation_process(b, Y), S)
    second = martingale_on_set_test(pair.F_space, integrate(left(b.Z), Y) + bracket(Y, b.Z), S)
    return Y, bool(first and second)


def _zeta_set_of(bundle):
    vt = vanishing_times(bundle)
    return vt, StochasticInterval(union_family=list(vt.zeta_n.values()))


def yyam_solve(bundle, direction, X_or_M):
    """Forward: X = E(-(1/Z_-).a) M.  Backward: recover M from X."""
    vt, S = _zeta_set_of(bundle)
    F = bundle.space
    Zm = left(bundle.Z)
    inv = safe_inverse(Zm, Zm > 0)
    E = stoch_exp(-integrate(inv, bundle.a))

    def equation(X):
        return X + integrate(left(X) * inv, bundle.a)

    if direction == "forward":
        M = X_or_M
        if not martingale_on_set_test(F, M, S):
            raise NotAMartingale("M must be a martingale on the zeta set")
        X = E * M
        require(martingale_on_set_test(F, equation(X), S), "forward solution fails the equation")
        return X
    if direction != "backward":
        raise ValueError("direction must be 'forward' or 'backward'")
    X = X_or_M
    for w, r in enumerate(vt.eta_ddot):
        if r < INF and X[int(r), w] != 0:
            raise NonVanishingAtEtaDdot("X must vanish at eta_ddot")
    Mp = equation(X)
    if not martingale_on_set_test(F, Mp, S):
        raise EquationNotSatisfied("X does not solve the martingale equation")
    dMp = delta(Mp)
    require(all(dMp[int(r), w] == 0 for w, r in enumerate(vt.eta_ddot) if r < INF),
            "M' jumps at eta_ddot")
    t = time_column(F)
    E_stop = stoch_exp(-integrate(inv * indicator(t < vt.eta_ddot[None, :]), bundle.a))
    M = Mp[0][None, :] + integrate(safe_inverse(E_stop, E_stop != 0), Mp)
    on = S.mask(F.T)
    require(((E * M)[on] == X[on]).all(), "X != E(-(1/Z_-).a) (M'_0 + M)")
    return M


def csinv_lift(pair, X):
    if not martingale_on_set_test(pair.F_space, equation_process(pair.bundle, X), pair.zeta_set()):
        raise EquationNotSatisfied("X does not solve the martingale equation")
    lifted = stop_before(X, pair.tau)
    require(martingale_test(pair.G_space, lifted), "X^{tau-} is not a G martingale")
    return lifted


def jeulin_yor(pair, X):
    """G-drift of X^tau: sum over s <= t and s <= tau of E[dX_s dm_s | F_{s-1}] / Z_{s-1}."""
    F, b = pair.F_space, pair.bundle
    if not martingale_test(F, X):
        raise NotAMartingale("X must be an F martingale")
    dX, dm = delta(X), delta(b.m)
    Zm = left(b.Z)
    inc = np.full(X.shape, ZERO, dtype=object)
    for s in range(1, F.T + 1):
        cov = F.cond_exp(dX[s] * dm[s], s - 1)
        inc[s] = [c / z if z > 0 and s <= r else ZERO for c, z, r in zip(cov, Zm[s], pair.tau)]
    drift = np.cumsum(inc, axis=0)
    require(martingale_test(pair.G_space, stop_at(X, pair.tau) - drift),
            "X^tau minus its drift is not a G martingale")
    return drift


def key_lemma_check(pair, T, xi):
    F, G, tau = pair.F_space, pair.G_space, pair.tau
    T = np.asarray(T, dtype=float)
    if not is_predictable_time(F, T):
        raise NotPredictable("T must be F-predictable")
    xi = np.array([x if x is not None else ZERO for x in xi], dtype=object)
    for t in range(F.T + 1):
        on = T == t
        if on.any() and not F.is_measurable(np.where(on, xi, ZERO), t):
            raise NotAdapted("xi must be F_T-measurable")
    b = pair.bundle
    for w in range(F.n):
        t = T[w]
        if t == INF or not (0 < tau[w] and t <= tau[w]):
            continue
        t = int(t)
        s = max(t - 1, 0)
        gb = list(G.blocks(s)[G.labels[s, w]])
        lhs = sum(G.prob[gb] * xi[gb], ZERO) / sum(G.prob[gb], ZERO)
        if t == 0:
            rhs = xi[w]
        else:
            fb = list(F.blocks(s)[F.labels[s, w]])
            num = sum(F.prob[fb] * xi[fb] * b.Ztilde[t, fb], ZERO) / sum(F.prob[fb], ZERO)
            rhs = num / b.Z[t - 1, w]
        if lhs != rhs:
            return False
    return True


def rdi_check(pair, A):
    """Reduction of a nondecreasing G-predictable A is nondecreasing before zeta."""
    if any(v != 0 for v in A[0]):
        raise ValueError("A must start at 0")
    B = reduce_predictable(pair, A)
    B[0] = ZERO
    nondecreasing = (delta(A) >= 0).all()
    if not nondecreasing:
        return True
    t = time_column(pair.F_space)
    Z0 = pair.bundle.Z[0][None, :]
    on = (t >= 1) & (t <= pair.vt.zeta[None, :]) & (Z0 > 0)
    return bool((delta(B)[on] >= 0).all())
