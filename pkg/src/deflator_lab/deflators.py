"""Deflators in the enlarged filtration for processes stopped at (or just
before) the random time, and exact feasibility searches for them."""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .azema import default_indicator, indicator, safe_inverse
from .calculus import (bracket, delta, integrate, is_deflator, left, martingale_on_set_test,
                       martingale_test, stoch_exp, stop_at, stop_before, supermartingale_test)
from .enlargement import equation_process
from .projections import doob_meyer
from .errors import EtaStopFails, JumpAtEtaTilde, NotADeflator, NotAMartingale, require
from .simplex import maximize
from .space import INF, is_adapted, time_column

ZERO, ONE = Fraction(0), Fraction(1)

__all__ = ["is_deflator", "deflator_dfet", "arbitrage_witness", "ratio_supermartingale_check",
           "Certificate", "certificate_search", "g_deflator_search", "whenS_search",
           "FrakM", "frak_m", "deflator_at_tau", "puredisc_note", "components"]


def components(X):
    """Accept one process or a list of them; return a list."""
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [X]
    return list(X)


def _z0_positive(bundle):
    return np.broadcast_to(bundle.Z[0][None, :] > 0, bundle.Z.shape)


def deflator_dfet(pair, bundle, md, em, X):
    """n^{tau-} / L^{tau-}, a G deflator of X^{tau-} when X^{eta-} is a martingale."""
    F, G, tau = pair.F_space, pair.G_space, pair.tau
    Xs = components(X)
    if not all(martingale_test(F, x) for x in Xs):
        raise NotAMartingale("X must be an F martingale")
    eta = pair.vt.eta
    if not all(martingale_test(F, stop_before(x, eta)) for x in Xs):
        raise EtaStopFails("X stopped before eta is not a martingale")
    Y = stop_before(em.n, tau) / stop_before(md.Lhat, tau)
    require(is_deflator(G, Y, [stop_before(x, tau) for x in Xs]), "n/L is not a G deflator")
    return Y


@dataclass
class Witness:
    M: np.ndarray
    M_before_tau: np.ndarray
    expectation: Fraction


def arbitrage_witness(pair, bundle, em):
    F, G, tau = pair.F_space, pair.G_space, pair.tau
    eta = pair.vt.eta
    if F.expectation((eta > 0) & (eta < INF)) == 0:
        return None
    M = default_indicator(F, eta) - em.d_comp
    Mt = stop_before(M, tau)
    t = time_column(F)
    require((Mt == -integrate(indicator(t < tau[None, :]), em.d_comp)).all(),
            "M^{tau-} != -1_[0,tau).d")
    require((delta(Mt) <= 0).all(), "M^{tau-} is not nonincreasing")
    require(is_adapted(G, Mt), "M^{tau-} is not G-adapted")
    require(any(v != 0 for v in Mt.ravel()), "M^{tau-} is constant")
    value = G.expectation(Mt[-1])
    require(value < 0, "M^{tau-} does not lose value")
    return Witness(M, Mt, value)


def ratio_supermartingale_check(pair, md, M):
    tau = pair.tau
    return supermartingale_test(pair.G_space, stop_before(M, tau) / stop_before(md.Lhat, tau))


@dataclass
class Certificate:
    feasible: bool
    slack: Fraction
    M: np.ndarray = None
    z: np.ndarray = None
    Phi: np.ndarray = None


def _solve_program(space, active, weights, fixed, strict):
    """Find U on ``active`` with every W U a martingale over active steps.

    ``fixed`` maps (t, w) to a value, ``strict`` marks where U >= slack.
    Returns (slack or None, U table).
    """
    T, n = space.T, space.n
    var = {}
    nv = 0
    for t in range(T + 1):
        for block in space.blocks(t):
            w0 = block[0]
            if active[t, w0] and (t, w0) not in fixed:
                for w in block:
                    var[(t, w)] = nv
                nv += 1
    s = nv
    strict_vars = sorted({var[(t, w)] for (t, w) in var if strict[t, w]})
    free = set(range(nv)) - set(strict_vars)

    eq = []
    for W in weights:
        for t in range(1, T + 1):
            for block in space.blocks(t - 1):
                if not active[t, block[0]]:
                    continue
                row, rhs = {}, ZERO
                for w in block:
                    p = space.prob[w]
                    for tt, sign in ((t, 1), (t - 1, -1)):
                        coef = sign * p * W[tt, w]
                        if (tt, w) in fixed:
                            rhs -= coef * fixed[(tt, w)]
                        elif coef:
                            j = var[(tt, w)]
                            row[j] = row.get(j, ZERO) + coef
                eq.append(({j: c for j, c in row.items() if c}, rhs))
    ub = [({s: ONE, j: -ONE}, ZERO) for j in strict_vars] + [({s: ONE}, ONE)]
    res = maximize(nv + 1, {s: ONE}, eq, ub, free)
    if res.status != "optimal":
        return None, None
    U = np.full((T + 1, n), ZERO, dtype=object)
    for (t, w), v in fixed.items():
        U[t, w] = v
    for (t, w), j in var.items():
        U[t, w] = res.x[j]
    return res.x[s], U


def _witness_program(pair, weight, S_list):
    """Unknown M on [0, zeta]: weight*M and weight*S^{eta_ddot-}*M martingales there,
    M_0 = 1, M_eta = 0, M > 0 on [0, zeta)."""
    F, vt = pair.F_space, pair.vt
    t = time_column(F)
    active = np.broadcast_to(t <= vt.zeta[None, :], F.shape()).copy()
    strict = np.broadcast_to(t < vt.zeta[None, :], F.shape()).copy()
    fixed = {(0, w): ONE for w in range(F.n)}
    for w, r in enumerate(vt.eta):
        if r < INF:
            fixed[(int(r), w)] = ZERO
    weights = [weight] + [weight * stop_before(s, vt.eta_ddot) for s in S_list]
    return _solve_program(F, active, weights, fixed, strict)


def _normalise_witness(pair, M):
    """M^{eta_ddot-} on [0, zeta] and 1 after zeta, so that {M = 0} = [eta]."""
    t = time_column(pair.F_space)
    M = stop_before(M, pair.vt.eta_ddot)
    return np.where(t <= pair.vt.zeta[None, :], M, ONE).astype(object)


def _z_process(pair, bundle, md, numerator):
    """1_{Z0=0} + 1_{Z0>0} E(-(1/Z_-).a)^{eta_ddot-} (numerator/Z)^{eta-} on [0, zeta];
    the ratio is frozen from zeta on, where Z vanishes."""
    vt = pair.vt
    Z = bundle.Z
    ratio = stop_before(numerator * safe_inverse(Z, Z > 0), vt.zeta)
    pos = _z0_positive(bundle)
    body = stop_before(md.exp_a, vt.eta_ddot) * ratio
    return np.where(pos, body, ONE).astype(object)


def _check_z(pair, bundle, z, Xs):
    F, vt = pair.F_space, pair.vt
    S = pair.zeta_set()
    t = time_column(F)
    require(martingale_on_set_test(F, equation_process(bundle, z), S), "z fails zZ + z_-.a")
    for x in Xs:
        require(martingale_on_set_test(F, bracket(x, z * bundle.Z), S), "z fails [X, zZ]")
    require((z[t < vt.zeta[None, :]] > 0).all(), "z is not positive before zeta")
    require((left(z)[t <= vt.zeta[None, :]] > 0).all(), "z_- is not positive on [0, zeta]")


def certificate_search(pair, bundle, md, vt, X):
    F, G, tau = pair.F_space, pair.G_space, pair.tau
    Xs = components(X)
    if not all(martingale_test(F, x) for x in Xs):
        raise NotAMartingale("X must be an F martingale")
    one = np.full(F.shape(), ONE, dtype=object)
    slack, M = _witness_program(pair, one, Xs)
    if slack is None or slack <= 0:
        return Certificate(False, slack if slack is not None else ZERO)
    M = _normalise_witness(pair, M)
    z = _z_process(pair, bundle, md, M)
    _check_z(pair, bundle, z, Xs)
    Phi = stop_before(z, tau)
    pos = _z0_positive(bundle)
    Z0 = np.where(pos, bundle.Z[0][None, :], ONE)
    closed = np.where(pos, stop_before(M, tau) / (Z0 * stop_before(md.Lhat, tau)), ONE)
    require((Phi == closed).all(), "Phi != (1/Z0) M^{tau-} / L^{tau-}")
    require(is_deflator(G, Phi, [stop_before(x, tau) for x in Xs]), "Phi is not a G deflator")
    return Certificate(True, slack, M, z, Phi)


def g_deflator_search(pair, S_G):
    G = pair.G_space
    Ss = components(S_G)
    active = np.ones(G.shape(), dtype=bool)
    strict = active.copy()
    fixed = {(0, w): ONE for w in range(G.n)}
    one = np.full(G.shape(), ONE, dtype=object)
    slack, Y = _solve_program(G, active, [one] + Ss, fixed, strict)
    if slack is None or slack <= 0:
        return Certificate(False, slack if slack is not None else ZERO)
    require(is_deflator(G, Y, Ss), "LP solution is not a deflator")
    return Certificate(True, slack, Phi=Y)


def whenS_search(pair, bundle, md, vt, S, Y):
    """Witness M with Y M and S^{eta_ddot-} Y M martingales on [0, zeta]."""
    F, G, tau = pair.F_space, pair.G_space, pair.tau
    Ss = components(S)
    if not is_deflator(F, Y, Ss):
        raise NotADeflator("Y is not an F deflator of S")
    slack, M = _witness_program(pair, Y, Ss)
    if slack is None or slack <= 0:
        return Certificate(False, slack if slack is not None else ZERO)
    M = _normalise_witness(pair, M)
    w = _z_process(pair, bundle, md, Y * M)
    _check_z(pair, bundle, w, [])
    Phi = stop_before(w, tau)
    require(is_deflator(G, Phi, [stop_before(s, tau) for s in Ss]), "Phi is not a G deflator")
    return Certificate(True, slack, M, w, Phi)


def whenS_conditions(pair, S, Y, M):
    """Check the witness conditions for a given triple (S, Y, M) directly."""
    F, vt = pair.F_space, pair.vt
    Sset = pair.zeta_set()
    t = time_column(F)
    ok = martingale_on_set_test(F, Y * M, Sset)
    ok &= all(martingale_on_set_test(F, stop_before(s, vt.eta_ddot) * Y * M, Sset)
              for s in components(S))
    ok &= bool((M[t < vt.zeta[None, :]] > 0).all())
    ok &= all(M[int(r), w] == 0 for w, r in enumerate(vt.eta) if r < INF)
    return bool(ok)


@dataclass
class FrakM:
    m_frak: np.ndarray
    jumps: np.ndarray


def frak_m(pair, bundle, em):
    G, tau = pair.G_space, pair.tau
    Z, Zt, nt = bundle.Z, bundle.Ztilde, em.n_tilde
    t = time_column(G)
    on = (t >= 1) & (t <= tau[None, :])
    jumps = np.full(Z.shape, ZERO, dtype=object)
    num, den = left(Z) * nt, left(nt) * Zt
    jumps[on] = num[on] / den[on] - 1
    for s in range(1, G.T + 1):
        require(all(v == 0 for v in G.cond_exp(jumps[s], s - 1)),
                "jump process has a nonzero G-predictable projection")
    m = np.cumsum(jumps, axis=0)
    require(martingale_test(G, m), "frak m is not a G martingale")
    require((jumps > -1).all(), "frak m jumps by -1 or less")
    require((stoch_exp(m) > 0).all(), "E(frak m) is not positive")
    return FrakM(m, jumps)


def deflator_at_tau(pair, bundle, em, S, Y):
    F, G, tau = pair.F_space, pair.G_space, pair.tau
    Ss = components(S)
    if not is_deflator(F, Y, Ss):
        raise NotADeflator("Y is not an F deflator of S")
    et = pair.vt.eta_tilde
    for proc in [Y] + Ss:
        d = delta(proc)
        if any(d[int(r), w] != 0 for w, r in enumerate(et) if 0 < r < INF):
            raise JumpAtEtaTilde("Y and S must not jump at eta_tilde")
    out = stop_at(Y, tau) * stoch_exp(frak_m(pair, bundle, em).m_frak)
    require(is_deflator(G, out, [stop_at(s, tau) for s in Ss]), "Y^tau E(m) is not a G deflator")
    return out


def puredisc_note(pair, X):
    """On a discrete grid every martingale is a sum of jumps: the continuous
    martingale part of X^tau in G is identically zero."""
    G = pair.G_space
    if not martingale_test(pair.F_space, X):
        raise NotAMartingale("X must be an F martingale")
    mart = doob_meyer(G, stop_at(X, pair.tau)).martingale
    continuous_part = mart - mart[0][None, :] - np.cumsum(delta(mart), axis=0)
    return {"note": "discrete time: the continuous martingale part vanishes",
            "holds": bool((continuous_part == 0).all())}
