"""Azema supermartingale of a random time, its vanishing times and the
multiplicative decomposition Z = L D."""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .calculus import (StochasticInterval, delta, integrate, left, martingale_test, stoch_exp,
                       stop_before)
from .errors import DecompositionDomainViolation, NotPredictable, require
from .projections import dual_optional, dual_predictable, optional_projection, predictable_projection
from .space import INF, apply_measure_change, is_predictable_time, time_column

ONE, ZERO = Fraction(1), Fraction(0)


def indicator(mask):
    return np.where(mask, ONE, ZERO).astype(object)


def first_hit(mask):
    """Row index of the first True per column, INF when none."""
    out = np.full(mask.shape[1], INF)
    for w in range(mask.shape[1]):
        hits = np.flatnonzero(mask[:, w])
        if hits.size:
            out[w] = float(hits[0])
    return out


def safe_inverse(X, where):
    """1/X on ``where``, 0 elsewhere."""
    out = np.full(X.shape, ZERO, dtype=object)
    out[where] = 1 / X[where]
    return out


@dataclass
class AzemaBundle:
    space: object
    tau: np.ndarray
    Z: np.ndarray
    Ztilde: np.ndarray
    a: np.ndarray
    A: np.ndarray
    m: np.ndarray
    mdot: np.ndarray
    gamma: np.ndarray

    def processes(self):
        return {"Z": self.Z, "Ztilde": self.Ztilde, "a": self.a, "A": self.A,
                "m": self.m, "mdot": self.mdot, "gamma": self.gamma}


def default_indicator(space, tau):
    """1_{0<tau} 1_{[tau, inf)} as a process."""
    t = time_column(space)
    return indicator((tau[None, :] > 0) & (t >= tau[None, :]))


def azema_bundle(spaceF, tau):
    tau = np.asarray(tau, dtype=float)
    t = time_column(spaceF)
    Z = optional_projection(spaceF, indicator(t < tau[None, :]))
    Ztilde = optional_projection(spaceF, indicator(t <= tau[None, :]))
    V = default_indicator(spaceF, tau)
    a = dual_predictable(spaceF, V)
    A = dual_optional(spaceF, V)
    b = AzemaBundle(spaceF, tau, Z, Ztilde, a, A, Z + A, Z + a,
                    predictable_projection(spaceF, Z))
    require(martingale_test(spaceF, b.mdot), "Z + a is not a martingale")
    require(martingale_test(spaceF, b.m), "Z + A is not a martingale")
    require((b.Ztilde[1:] == b.Z[:-1] + delta(b.m)[1:]).all(), "Ztilde != Z_- + dm")
    require((b.gamma == left(Z) - delta(a)).all(), "gamma != Z_- - da")
    return b


@dataclass
class VanishingTimes:
    zeta: np.ndarray
    zeta_n: dict
    eta: np.ndarray
    eta_dot: np.ndarray
    eta_ddot: np.ndarray
    eta_tilde: np.ndarray

    def times(self):
        return {"zeta": self.zeta, "eta": self.eta, "eta_dot": self.eta_dot,
                "eta_ddot": self.eta_ddot, "eta_tilde": self.eta_tilde}


def effective_levels(Z):
    """The n at which zeta_n = inf{Z <= 1/n} can change, plus one past the last."""
    levels = {1}
    for v in set(Z.ravel()):
        if v > 0:
            levels.add(int(1 / v) + 1)
    return sorted(levels)


def vanishing_times(bundle):
    Z, gamma, Zt = bundle.Z, bundle.gamma, bundle.Ztilde
    zeta = first_hit(Z == 0)
    zeta_n = {k: first_hit(Z <= Fraction(1, k)) for k in effective_levels(Z)}
    n = Z.shape[1]
    eta, eta_dot, eta_ddot, eta_tilde = (np.full(n, INF) for _ in range(4))
    for w in range(n):
        z = zeta[w]
        if not 0 < z < INF:
            continue
        k = int(z)
        before = Z[k - 1, w]
        if before == 0:
            eta_dot[w] = z
        elif gamma[k, w] > 0:
            eta[w] = z
        else:
            eta_ddot[w] = z
        if Zt[k, w] == 0 < before:
            eta_tilde[w] = z
    require((np.maximum.reduce(list(zeta_n.values())) == zeta).all(), "zeta != sup zeta_n")
    return VanishingTimes(zeta, zeta_n, eta, eta_dot, eta_ddot, eta_tilde)


def C_mask(bundle, vt):
    t = time_column(bundle.space)
    return ((t <= vt.zeta[None, :]) & (t != vt.eta_dot[None, :])
            & (t != vt.eta_ddot[None, :]))


def set_C(bundle, vt):
    """C(1/gamma) with the exhausting family S_n = (first exit from {1/gamma <= n} on C) - 1."""
    C = C_mask(bundle, vt)
    gamma = bundle.gamma
    T = gamma.shape[0] - 1
    positive = [v for v in set(gamma[C].ravel()) if v > 0]
    levels = sorted({1} | {int(1 / v) + 1 for v in positive})
    family = []
    for k in levels:
        bad = ~C | (gamma < Fraction(1, k))
        bad[0] = False
        exit_time = first_hit(bad)
        family.append(np.where(exit_time == INF, INF, exit_time - 1))
    S = StochasticInterval(union_family=family)
    require((S.mask(T) == C).all(), "exhausting family does not cover C")
    return S


class PartialProc:
    """A process defined only on a mask; reading outside raises."""

    def __init__(self, values, mask, name):
        self._values, self.mask, self.name = values, mask, name

    def __getitem__(self, key):
        if not np.all(self.mask[key]):
            raise DecompositionDomainViolation(f"{self.name} is undefined outside its domain")
        return self._values[key]

    def filled(self, fill=ZERO):
        out = self._values.copy()
        out[~self.mask] = fill
        return out


@dataclass
class MultDecomp:
    L: PartialProc
    D: np.ndarray
    D_original: np.ndarray
    D_closed: np.ndarray
    Lhat: np.ndarray
    C_set: StochasticInterval
    S_n: list
    C: np.ndarray
    exp_a: np.ndarray  # E(-(1/Z_-).a)

    @property
    def Lminus(self):
        return left(self.Lhat)


def exp_compensator(bundle):
    """E(-(1/Z_-).a) with the integrand set to 0 where Z_- = 0."""
    Zm = left(bundle.Z)
    return stoch_exp(-integrate(safe_inverse(Zm, Zm > 0), bundle.a))


def mult_decomp(bundle, vt):
    space, Z, a, gamma = bundle.space, bundle.Z, bundle.a, bundle.gamma
    t = time_column(space)
    C = C_mask(bundle, vt)
    S = set_C(bundle, vt)
    Z0 = Z[0][None, :]
    E = exp_compensator(bundle)
    D_closed = Z0 * E
    D = stop_before(D_closed, vt.eta_dot) * indicator(t < vt.eta_ddot[None, :])
    D_original = Z0 / stoch_exp(integrate(safe_inverse(gamma, C & (gamma > 0)), a))

    Lvals = np.full(Z.shape, ZERO, dtype=object)
    pos = C & (D > 0)
    Lvals[pos] = Z[pos] / D[pos]
    Lvals[C & (D == 0)] = ONE
    require(((C & (D == 0)) <= ((t == 0) & (Z0 == 0))).all(), "D vanishes inside C")
    L = PartialProc(Lvals, C, "L")
    Lhat = indicator(np.broadcast_to(Z0 == 0, Z.shape)) + Lvals * indicator(t < vt.zeta[None, :])
    md = MultDecomp(L, D, D_original, D_closed, Lhat, S, S.union_family, C, E)
    _check_mult(bundle, vt, md)
    return md


def _check_mult(bundle, vt, md):
    Z, a, gamma, mdot = bundle.Z, bundle.a, bundle.gamma, bundle.mdot
    t = time_column(bundle.space)
    C, D, Lv = md.C, md.D, md.L.filled()
    Z0 = np.broadcast_to(Z[0][None, :], Z.shape)
    on_zeta = np.broadcast_to(t <= vt.zeta[None, :], Z.shape)
    require((Z[C] == (Lv * D)[C]).all(), "Z != L D on C")
    require((Z == md.Lhat * D).all(), "Z != Lhat D")
    require((left(Z) == md.Lminus * left(D) * indicator(on_zeta)).all(), "Z_- != L_- D_- 1_[0,zeta]")
    require((gamma == md.Lminus * indicator(C) * D).all(), "gamma != L_- 1_C D")
    require((delta(a)[on_zeta] == (-md.Lminus * delta(D))[on_zeta]).all(), "da != -L_- dD")
    require((D[C] == md.D_closed[C]).all(), "D != Z0 E(-(1/Z_-).a) on C")
    require((D[C] == md.D_original[C]).all(), "D != Z0 / E((1/gamma).a) on C")
    E = md.exp_a
    E2 = stoch_exp(integrate(safe_inverse(gamma, C & (gamma > 0)), a))
    require(((E * E2)[C] == 1).all(), "E(-(1/Z_-).a) E((1/gamma).a) != 1 on C")
    pos = Z0 > 0
    L_formula = 1 + indicator(pos) * integrate(safe_inverse(E, pos & (E != 0)), mdot) / np.where(pos, Z0, ONE)
    require((L_formula[C] == Lv[C]).all(), "L != 1 + (1/Z0) E^{-1}.mdot on C")
    L_exp = stoch_exp(integrate(safe_inverse(gamma, C & (gamma > 0)), mdot))
    require((L_exp[C] == Lv[C]).all(), "L != E((1/gamma).mdot) on C")


@dataclass
class EtaMartingales:
    d_comp: np.ndarray
    n: np.ndarray
    d_tilde: np.ndarray
    n_tilde: np.ndarray


def exp_inverse_before(space, R):
    """(d, E(-d)^{-1} 1_[0,R)) for d the compensator of 1_{0<R} 1_[R,inf)."""
    d = dual_predictable(space, default_indicator(space, R))
    require((delta(d) < 1).all(), "compensator jump reaches 1")
    t = time_column(space)
    n = indicator(t < R[None, :]) / stoch_exp(-d)
    require(martingale_test(space, n), "n is not a martingale")
    return d, n


def eta_martingales(bundle, vt):
    d, n = exp_inverse_before(bundle.space, vt.eta)
    dt, nt = exp_inverse_before(bundle.space, vt.eta_tilde)
    t = time_column(bundle.space)
    require(((nt > 0) == (t < vt.eta_tilde[None, :])).all(), "{ntilde > 0} != [0, eta_tilde)")
    require(((left(nt) > 0) == (t <= vt.eta_tilde[None, :])).all(), "{ntilde_- > 0} != [0, eta_tilde]")
    return EtaMartingales(d, n, dt, nt)


def positivity_sets(bundle):
    return bundle.Z > 0, left(bundle.Z) > 0, bundle.gamma > 0


def check_chgpas(spaceF, tau, mc):
    b = azema_bundle(spaceF, tau)
    b2 = azema_bundle(apply_measure_change(spaceF, mc), tau)
    v, v2 = vanishing_times(b), vanishing_times(b2)
    same_sets = all((x == y).all() for x, y in zip(positivity_sets(b), positivity_sets(b2)))
    return bool(same_sets and (v.zeta == v2.zeta).all() and (v.eta == v2.eta).all()
                and (v.eta_ddot == v2.eta_ddot).all())


@dataclass
class Da1Report:
    sigma_prime: np.ndarray
    holds: bool


def check_Da1(spaceF, tau, sigma):
    sigma = np.asarray(sigma, dtype=float)
    if not is_predictable_time(spaceF, sigma):
        raise NotPredictable("sigma must be predictable")
    b = azema_bundle(spaceF, tau)
    da = delta(b.a)
    sp = np.full(spaceF.n, INF)
    holds = True
    for w, s in enumerate(sigma):
        if 0 < s < INF and da[int(s), w] == 1:
            sp[w] = s
            k = int(s)
            holds &= bool(tau[w] == s and b.Z[k, w] == 0 and b.Z[k - 1, w] == 1)
    return Da1Report(sp, holds)
