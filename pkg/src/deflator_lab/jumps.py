"""Compensation of the jump of a process at a stopping time R.

``v`` is the predictable compensator of 1_{0<R} 1_[R,inf) and ``u`` the
compensated indicator.  The orthogonal decomposition splits a martingale
into a part stopped strictly before R, its jump at R and an integral
against ``u``.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .azema import default_indicator, indicator
from .calculus import (delta, integrate, is_deflator, martingale_test, orthogonality_test,
                       stoch_exp, stop_at, stop_before)
from .errors import NotADeflator, NotAMartingale, NotAStoppingTime, require
from .projections import dual_predictable
from .space import INF, is_predictable_time, is_stopping_time, time_column


@dataclass
class JumpComp:
    R: np.ndarray
    v: np.ndarray
    u: np.ndarray
    R_natural: np.ndarray
    R_flat: np.ndarray
    kappa: np.ndarray


def jump_comp(space, R):
    R = np.asarray(R, dtype=float)
    if not is_stopping_time(space, R):
        raise NotAStoppingTime("R must be a stopping time")
    V = default_indicator(space, R)
    v = dual_predictable(space, V)
    dv = delta(v)
    require((dv <= 1).all(), "compensator jump exceeds 1")
    R_nat, R_flat = np.full(space.n, INF), np.full(space.n, INF)
    for w, r in enumerate(R):
        if 0 < r < INF:
            if dv[int(r), w] == 1:
                R_nat[w] = r
            else:
                R_flat[w] = r
    t = time_column(space)
    require(((dv == 1) == (t == R_nat[None, :])).all(), "[R natural] != {dv = 1}")
    require(is_predictable_time(space, R_nat), "R natural is not predictable")
    kappa = np.where(dv < 1, dv, Fraction(0)).astype(object)
    flat_comp = dual_predictable(space, default_indicator(space, R_flat))
    require((flat_comp == np.cumsum(kappa, axis=0)).all(), "compensator of R flat mismatch")
    return JumpComp(R, v, V - v, R_nat, R_flat, kappa)


def K_coefficient(space, X, R):
    """Predictable mean of the jump of X at R, given that R happens now."""
    R = np.asarray(R, dtype=float)
    dX = delta(X)
    hit = indicator(time_column(space) == R[None, :])
    K = np.full(X.shape, Fraction(0), dtype=object)
    for t in range(1, space.T + 1):
        num = space.cond_exp(dX[t] * hit[t], t - 1)
        den = space.cond_exp(hit[t], t - 1)
        K[t] = [x / d if d > 0 else Fraction(0) for x, d in zip(num, den)]
    return K


@dataclass
class OrthoDecomp:
    H: np.ndarray
    K: np.ndarray
    Xbar: np.ndarray
    jump_mart: np.ndarray
    comp: JumpComp


def ortho_decomp(space, X, R, comp=None):
    if not martingale_test(space, X):
        raise NotAMartingale("orthogonal decomposition needs a martingale")
    jc = comp if comp is not None else jump_comp(space, R)
    K = K_coefficient(space, X, jc.R)
    H = K / (1 - jc.kappa)
    Y = X - integrate(H, jc.u)
    Xbar = stop_before(Y, jc.R)
    t = time_column(space)
    after = (jc.R[None, :] > 0) & (t >= jc.R[None, :])
    jump_mart = indicator(after) * (stop_at(Y, jc.R) - Xbar)
    od = OrthoDecomp(H, K, Xbar, jump_mart, jc)
    require((stop_at(X, jc.R) == Xbar + jump_mart + integrate(H, jc.u)).all(),
            "X^R != Xbar + jump + H.u")
    require(martingale_test(space, Xbar), "Xbar is not a martingale")
    require(martingale_test(space, jump_mart), "jump part is not a martingale")
    require(orthogonality_test(space, Y, jc.u), "X - H.u is not orthogonal to u")
    return od


def nojump_deflator(space, S, R, xi):
    """Two deflators of S^{R-} built from E(xi); the second has no jump at R."""
    R = np.asarray(R, dtype=float)
    Y = stoch_exp(xi)
    S_before = [stop_before(s, R) for s in S]
    if not is_deflator(space, Y, S_before):
        raise NotADeflator("E(xi) is not a deflator of S^{R-}")
    od = ortho_decomp(space, xi, R)
    jc = od.comp
    dv = delta(jc.v)
    require((od.H * dv < 1).all(), "H dv reaches 1")
    Hu = integrate(od.H, jc.u)
    require((delta(od.Xbar + Hu) > -1).all(), "jump of xibar + H.u is <= -1")
    Y1 = stoch_exp(od.Xbar + Hu)
    Y2 = stoch_exp(integrate(1 / (1 - od.H * dv), od.Xbar))
    for Yk in (Y1, Y2):
        require(is_deflator(space, Yk, S_before), "constructed process is not a deflator")
    dY2 = delta(Y2)
    require(all(dY2[int(r), w] == 0 for w, r in enumerate(R) if 0 < r < INF),
            "second deflator jumps at R")
    return Y1, Y2
