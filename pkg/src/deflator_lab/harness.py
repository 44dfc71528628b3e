"""Seeded property suites over fixtures and generated models.

Every check returns a verdict for one model.  A check raises :class:`Skip`
when the model does not meet the preconditions of the property; any other
exception counts as a failure and the model is stored as a replayable
counterexample.
"""
from dataclasses import dataclass, field
from functools import cached_property
import random
import time

import numpy as np

from . import generators as gen
from .azema import (check_Da1, check_chgpas, eta_martingales, indicator, mult_decomp,
                    safe_inverse)
from .calculus import (at_time, bracket, delta, integrate, is_deflator, left, martingale_test,
                       orthogonality_test, stoch_exp, stop_at, stop_before, supermartingale_test)
from .deflators import (arbitrage_witness, certificate_search, deflator_at_tau, deflator_dfet,
                        frak_m, g_deflator_search, puredisc_note, ratio_supermartingale_check,
                        whenS_search)
from .enlargement import (check_rdps, check_redreg, csinv_lift, enlarge_progressively,
                          jeulin_yor, key_lemma_check, rdi_check, rdm_check,
                          reduce_predictable_time, reduce_stopping_time, yyam_solve)
from .inference import (condB1_check, conditional_kernel, cox_branch_split,
                        infer_filtration, saturation_check, terminal_algebra)
from .io import model_to_dict
from .jumps import jump_comp, nojump_deflator, ortho_decomp
from .projections import doob_meyer, optional_projection, predictable_projection
from .space import INF, fixture_m1, fixture_m2, is_predictable_time, time_column

SUITES = ("azema", "jumpstop", "reduction", "deflator-minus", "deflator-tau", "inference")


class Skip(Exception):
    """The model does not satisfy the property's preconditions."""


class Ctx:
    """One model plus lazily built derived objects and a private RNG."""

    def __init__(self, F, tau, seed, source):
        self.F, self.tau, self.source = F, np.asarray(tau, dtype=float), source
        self.rng = random.Random(f"{seed}:checks")
        self.tags = []

    def tag(self, label):
        """Record a label (e.g. which side of an equivalence was hit) for the report."""
        self.tags.append(label)

    @cached_property
    def pair(self):
        return enlarge_progressively(self.F, self.tau)

    @property
    def G(self):
        return self.pair.G_space

    @property
    def bundle(self):
        return self.pair.bundle

    @property
    def vt(self):
        return self.pair.vt

    @cached_property
    def md(self):
        return mult_decomp(self.bundle, self.vt)

    @cached_property
    def em(self):
        return eta_martingales(self.bundle, self.vt)

    def mask(self, cond):
        return np.broadcast_to(cond, self.F.shape())


def _t(c):
    return time_column(c.F)


# -- azema, projections and calculus ---------------------------------------

def chk_multdecomp(c):
    md = c.md
    return bool((c.bundle.Z == md.Lhat * md.D).all())


def chk_asupport(c):
    b, vt = c.bundle, c.vt
    da, dmd = delta(b.a), delta(b.mdot)
    ok = True
    for w, r in enumerate(vt.eta_dot):
        if r < INF:
            ok &= da[int(r), w] == 0 and dmd[int(r), w] == 0
    for w, r in enumerate(vt.eta_ddot):
        if r < INF:
            ok &= da[int(r), w] == b.Z[int(r) - 1, w] > 0
    on = c.pair.zeta_set().mask(c.F.T)
    Zm, Lm = left(b.Z), c.md.Lminus
    for w, r in enumerate(c.tau):
        if 0 < r < INF:
            k = int(r)
            ok &= bool(on[k, w]) and Zm[k, w] > 0 and Lm[k, w] > 0
    return bool(ok)


def chk_Z_to_0(c):
    b = c.bundle
    on = c.pair.zeta_set().mask(c.F.T)
    return bool(((left(b.Z) > 0) == (on & (b.Z[0][None, :] > 0))).all())


def chk_ttC(c):
    vt, t, F = c.vt, _t(c), c.F
    on = c.pair.zeta_set().mask(F.T)
    ok = (on == ((t <= vt.zeta[None, :]) & (t != vt.eta_dot[None, :]))).all()
    ok &= is_predictable_time(F, vt.eta_dot) and is_predictable_time(F, vt.eta_ddot)
    graphs = [r < INF for r in (vt.eta, vt.eta_dot, vt.eta_ddot)]
    ok &= not any((graphs[i] & graphs[j]).any() for i in range(3) for j in range(i + 1, 3))
    for r in (vt.eta, vt.eta_dot, vt.eta_ddot, vt.eta_tilde):
        ok &= bool(((r == INF) | (r == vt.zeta)).all())
    return bool(ok)


def chk_exp_product(c):
    md, b = c.md, c.bundle
    E2 = stoch_exp(integrate(safe_inverse(b.gamma, md.C & (b.gamma > 0)), b.a))
    return bool(((md.exp_a * E2)[md.C] == 1).all())


def chk_nmart(c):
    em, vt, t = c.em, c.vt, _t(c)
    ok = (delta(em.d_comp) < 1).all() and (delta(em.d_tilde) < 1).all()
    ok &= martingale_test(c.F, em.n) and martingale_test(c.F, em.n_tilde)
    ok &= ((em.n_tilde > 0) == (t < vt.eta_tilde[None, :])).all()
    ok &= all(c.md.C[int(r), w] for w, r in enumerate(vt.eta) if 0 < r < INF)
    if (vt.eta < INF).any():
        # recorded only: whether eta is ever predictable is left open
        c.tag("eta_predictable" if is_predictable_time(c.F, vt.eta) else "eta_not_predictable")
    return bool(ok)


def chk_Lhat_super(c):
    return supermartingale_test(c.F, c.md.Lhat)


def chk_projection_identity(c):
    t = _t(c)
    lhs = predictable_projection(c.F, indicator(t <= c.tau[None, :]))
    rhs = indicator(c.mask(t == 0)) + indicator(c.mask(t > 0)) * left(c.bundle.Z)
    return bool((lhs == rhs).all())


def chk_doob_meyer(c):
    dm = doob_meyer(c.F, c.bundle.Z)
    ok = martingale_test(c.F, dm.martingale) and (delta(dm.drift) >= 0).all()
    return bool(ok and (dm.martingale - dm.drift == c.bundle.Z).all())


def chk_calculus(c):
    F, rng = c.F, c.rng
    X, Y = gen.random_adapted(rng, F), gen.random_adapted(rng, F)
    N = gen.random_martingale(rng, F)
    ok = (X * Y == X[0] * Y[0] + integrate(left(X), Y) + integrate(left(Y), X) + bracket(X, Y)).all()
    ok &= (stoch_exp(X) * stoch_exp(Y) == stoch_exp(X + Y + bracket(X, Y))).all()
    B = np.cumsum(predictable_projection(F, delta(X)), axis=0)
    ok &= martingale_test(F, bracket(B, N))
    R = gen.random_stopping_time(rng, F)
    ok &= (stop_before(stop_before(X, R), R) == stop_before(X, R)).all()
    raw = gen.random_adapted(rng, c.G)
    once = optional_projection(F, raw)
    ok &= (optional_projection(F, once) == once).all()
    return bool(ok)


def chk_chgpas(c):
    return check_chgpas(c.F, c.tau, gen.random_density(c.rng, c.F))


def chk_Da1(c):
    return check_Da1(c.F, c.tau, gen.da_one_time(c.F, c.tau)).holds


# -- jumps at a stopping time -----------------------------------------------

def _stopping(c):
    mode = c.rng.choice(["stopping", "predictable"])
    return gen.random_time(c.rng, c.F, mode)


def _max_predictable_inside(F, R):
    """Largest predictable time whose graph lies in [R]."""
    out = np.full(F.n, INF)
    for t in range(1, F.T + 1):
        for block in F.blocks(t - 1):
            if all(R[w] == t for w in block):
                out[list(block)] = t
    return out


def chk_rdecomp(c):
    R = _stopping(c)
    X = gen.random_martingale(c.rng, c.F)
    od = ortho_decomp(c.F, X, R)
    jc = od.comp
    ok = (delta(jc.v) <= 1).all()
    sigma = _max_predictable_inside(c.F, R)
    ok &= all(s == INF or s == jc.R_natural[w] for w, s in enumerate(sigma))
    return bool(ok)


def chk_ortho_iff(c):
    R = _stopping(c)
    u = jump_comp(c.F, R).u
    X = gen.random_martingale(c.rng, c.F)
    Xbar = ortho_decomp(c.F, X, R).Xbar
    ok = True
    for P in (X, Xbar):
        ok &= martingale_test(c.F, stop_before(P, R)) == orthogonality_test(c.F, P, u)
    ok &= martingale_test(c.F, stop_before(Xbar, R))
    return bool(ok)


def chk_ddotxi(c):
    R = _stopping(c)
    S, Y, xi = gen.deflator_instance(c.rng, c.F, R)
    Y1, Y2 = nojump_deflator(c.F, [S], R, xi)
    Sb = [stop_before(S, R)]
    ok = is_deflator(c.F, Y1, Sb) and is_deflator(c.F, Y2, Sb)
    od = ortho_decomp(c.F, xi, R)
    ok &= (od.H * delta(od.comp.v) < 1).all()
    d2 = delta(Y2)
    ok &= all(d2[int(r), w] == 0 for w, r in enumerate(R) if 0 < r < INF)
    return bool(ok)


# -- reduction ---------------------------------------------------------------

def chk_rdm_csinv(c):
    # n times a martingale without jump at eta vanishes at eta, as Y Z must
    M = c.em.n * gen.eta_regular_martingale(c.rng, c.F, c.vt.eta)
    Z = c.bundle.Z
    X = yyam_solve(c.bundle, "forward", M) * safe_inverse(Z, Z > 0)
    lifted = csinv_lift(c.pair, X)
    Y, holds = rdm_check(c.pair, lifted)
    on = c.mask(_t(c) < c.tau[None, :])
    return bool(holds and (Y[on] == X[on]).all())


def chk_yyam(c):
    M = gen.random_martingale(c.rng, c.F)
    X = yyam_solve(c.bundle, "forward", M)
    back = yyam_solve(c.bundle, "backward", X)
    on = c.pair.zeta_set().mask(c.F.T)
    return bool((back[on] == stop_before(M, c.vt.eta_ddot)[on]).all())


def chk_key_lemma(c):
    ok = True
    for _ in range(3):
        T = gen.random_time(c.rng, c.F, "predictable")
        X = gen.random_adapted(c.rng, c.F)
        ok &= key_lemma_check(c.pair, T, at_time(X, T))
    return bool(ok)


def _g_predictable_increasing(c):
    G = c.G
    A = np.full(G.shape(), gen.ZERO, dtype=object)
    for t in range(1, G.T + 1):
        A[t] = A[t - 1]
        for block in G.blocks(t - 1):
            A[t, list(block)] += c.rng.randint(0, 3)
    return A


def chk_rdi(c):
    return rdi_check(c.pair, _g_predictable_increasing(c))


def chk_jeulin_yor(c):
    X = gen.random_martingale(c.rng, c.F)
    drift = jeulin_yor(c.pair, X)
    return martingale_test(c.G, stop_at(X, c.tau) - drift)


def chk_redreg(c):
    return check_redreg(c.pair, gen.random_adapted(c.rng, c.G))


def chk_rdps(c):
    H = gen.random_adapted(c.rng, c.G, 1, 4)
    A = _g_predictable_increasing(c) + 1
    return check_rdps(c.pair, H) and check_rdps(c.pair, A, predictable=True)


def chk_reduce_times(c):
    U = gen.random_time(c.rng, c.G, "stopping")
    T = reduce_stopping_time(c.pair, U)
    V = gen.random_time(c.rng, c.G, "predictable")
    P = reduce_predictable_time(c.pair, V)
    tau = c.tau
    return bool((np.minimum(T, tau) == np.minimum(U, tau)).all()
                and (np.minimum(P, tau) == np.minimum(V, tau)).all())


# -- deflators before tau ------------------------------------------------------

def chk_dfet(c):
    eta = c.vt.eta
    candidates = [np.full(c.F.shape(), gen.ONE, dtype=object),
                  gen.eta_regular_martingale(c.rng, c.F, eta)]
    for X in candidates:
        Y = deflator_dfet(c.pair, c.bundle, c.md, c.em, X)
        if not is_deflator(c.G, Y, [stop_before(X, c.tau)]):
            return False
    return True


def chk_arbitrage(c):
    eta = c.vt.eta
    w = arbitrage_witness(c.pair, c.bundle, c.em)
    has = c.F.expectation((eta > 0) & (eta < INF)) > 0
    c.tag("eta_finite" if has else "eta_infinite")
    if not has:
        return w is None
    return w is not None and not g_deflator_search(c.pair, [w.M_before_tau]).feasible


def chk_iff_certificate(c):
    k = c.rng.choice([1, 1, 2])
    Xs = [gen.random_martingale(c.rng, c.F) for _ in range(k)]
    cert = certificate_search(c.pair, c.bundle, c.md, c.vt, Xs)
    direct = g_deflator_search(c.pair, [stop_before(x, c.tau) for x in Xs])
    c.tag("feasible" if direct.feasible else "infeasible")
    return cert.feasible == direct.feasible


def chk_iff_whenS(c):
    Y = gen.random_positive_martingale(c.rng, c.F)
    S = gen.priced_by(c.rng, c.F, Y)
    cert = whenS_search(c.pair, c.bundle, c.md, c.vt, [S], Y)
    direct = g_deflator_search(c.pair, [stop_before(S, c.tau)])
    c.tag("feasible" if direct.feasible else "infeasible")
    return cert.feasible == direct.feasible


def chk_ratio_super(c):
    M = gen.random_positive_martingale(c.rng, c.F)
    return ratio_supermartingale_check(c.pair, c.md, M) and \
        ratio_supermartingale_check(c.pair, c.md, c.bundle.mdot)


# -- deflators at tau ------------------------------------------------------------

def chk_frak_m(c):
    fm = frak_m(c.pair, c.bundle, c.em)
    for s in range(1, c.G.T + 1):
        if any(v != 0 for v in c.G.cond_exp(fm.jumps[s], s - 1)):
            return False
    return bool(martingale_test(c.G, fm.m_frak))


def chk_deflator_at_tau(c):
    R = c.vt.eta_tilde
    if (R < INF).any():
        c.tag(f"eta_tilde_finite:{c.source}")
    S, Y, xi = gen.deflator_instance(c.rng, c.F, R)
    _, Y2 = nojump_deflator(c.F, [S], R, xi)
    S2 = stop_before(S, R)
    out = deflator_at_tau(c.pair, c.bundle, c.em, [S2], Y2)
    return is_deflator(c.G, out, [stop_at(S2, c.tau)])


def chk_puredisc(c):
    return puredisc_note(c.pair, gen.random_martingale(c.rng, c.F))["holds"]


# -- inference -------------------------------------------------------------------

def chk_kernel(c):
    conditional_kernel(c.F, c.tau)
    return True


def chk_saturation(c):
    return saturation_check(c.G, c.tau, terminal_algebra(c.F))


def chk_recovery(c):
    """Every kernel level passing B1 recovers F; absctn is asserted inside condB1_check."""
    H = terminal_algebra(c.F)
    kern = conditional_kernel(c.F, c.tau)
    passing = [t for t in kern.levels() if condB1_check(c.F, c.tau, H, kern.kernel[t])]
    if not passing:
        raise Skip("no kernel level satisfies B1")
    c.tag(f"b1_levels={len(passing)}")
    return all(infer_filtration(c.G, c.tau, H, kern.kernel[t], reference=c.F).matches
               for t in passing)


def chk_cox_immersion(c):
    if not c.source.startswith("cox"):
        raise Skip("not a Cox model")
    drift = jeulin_yor(c.pair, gen.random_martingale(c.rng, c.F))
    return bool((drift == 0).all())


def chk_branch_split(c):
    model = gen.cox_branch_model(c.rng)
    holds, level = cox_branch_split(*model)
    return holds and level is not None


CHECKS = {
    "azema": [chk_multdecomp, chk_asupport, chk_Z_to_0, chk_ttC, chk_exp_product, chk_nmart,
              chk_Lhat_super, chk_projection_identity, chk_doob_meyer, chk_calculus,
              chk_chgpas, chk_Da1],
    "jumpstop": [chk_rdecomp, chk_ortho_iff, chk_ddotxi],
    "reduction": [chk_rdm_csinv, chk_yyam, chk_key_lemma, chk_rdi, chk_jeulin_yor, chk_redreg,
                  chk_rdps, chk_reduce_times],
    "deflator-minus": [chk_dfet, chk_arbitrage, chk_iff_certificate, chk_iff_whenS,
                       chk_ratio_super],
    "deflator-tau": [chk_frak_m, chk_deflator_at_tau, chk_puredisc],
    "inference": [chk_kernel, chk_saturation, chk_recovery, chk_cox_immersion, chk_branch_split],
}


def check_names(suite):
    return [f.__name__[4:] for f in CHECKS[suite]]


# -- model streams ------------------------------------------------------------------

REALIZABLE = [cls for cls in gen.PATHOLOGICAL_CLASSES if cls != "eta_dot_finite"]


def model_stream(suite, seed, count, sizes=gen.Sizes()):
    """Fixtures first, then ``count`` generated models as (id, F, tau, source)."""
    yield "M1", *fixture_m1(), "fixture"
    yield "M2", *fixture_m2(), "fixture"
    for i in range(count):
        s = f"{seed}:{suite}:{i}"
        rng = random.Random(s)
        if suite == "inference":
            kind = "density" if i % 2 == 0 else "cox"
        elif suite == "deflator-tau":
            kind = "eta_tilde_finite" if i % 2 == 0 else ["random", "density", "cox"][i % 3]
        else:
            kind = ["random", "density", "cox", "pathological"][i % 4]
        if kind == "pathological":
            kind = REALIZABLE[(i // 4) % len(REALIZABLE)]
        if kind == "random":
            F, tau = gen.random_model(rng, sizes)
        elif kind == "density":
            F, tau = gen.gen_density_model(rng, sizes)
        elif kind == "cox":
            F, tau = gen.gen_cox_model(rng, sizes)
        else:
            F, tau = gen.gen_pathological(rng, kind, sizes)
        yield f"{suite}-{i}", F, tau, kind


# -- reports --------------------------------------------------------------------------

@dataclass
class CheckStats:
    tested: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    counterexample: dict = None
    tags: dict = field(default_factory=dict)

    def as_dict(self):
        out = {"tested": self.tested, "passed": self.passed, "failed": self.failed,
               "skipped": self.skipped}
        if self.tags:
            out["tags"] = dict(sorted(self.tags.items()))
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteReport:
    seed: object
    models: int
    suites: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def failures(self):
        return sum(s.failed for checks in self.suites.values() for s in checks.values())

    def as_dict(self, timing=False):
        out = {"seed": self.seed, "models": self.models,
               "suites": {name: {k: v.as_dict() for k, v in checks.items()}
                          for name, checks in sorted(self.suites.items())},
               "failures": self.failures}
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


def _run_check(fn, ctx):
    try:
        return "pass" if fn(ctx) else "fail", "property returned false"
    except Skip as exc:
        return "skip", str(exc)
    except Exception as exc:  # noqa: BLE001 - any crash is a counterexample
        return "fail", f"{type(exc).__name__}: {exc}"


def _suite_names(suite):
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in CHECKS:
            raise ValueError(f"unknown suite {name!r}")
    return names


def _run(report, names, stream, checks=None):
    start = time.perf_counter()
    for name in names:
        fns = [f for f in CHECKS[name] if checks is None or f.__name__[4:] in checks]
        stats = {f.__name__[4:]: CheckStats() for f in fns}
        for model_id, F, tau, source in stream(name):
            ctx = Ctx(F, tau, f"{report.seed}:{model_id}", source)
            for fn in fns:
                st = stats[fn.__name__[4:]]
                verdict, message = _run_check(fn, ctx)
                for label in ctx.tags:
                    st.tags[label] = st.tags.get(label, 0) + 1
                ctx.tags.clear()
                if verdict == "skip":
                    st.skipped += 1
                    continue
                st.tested += 1
                if verdict == "pass":
                    st.passed += 1
                else:
                    st.failed += 1
                    if st.counterexample is None:
                        st.counterexample = {"model_id": model_id, "source": source,
                                             "message": message,
                                             "model": model_to_dict(F, tau)}
        report.suites[name] = stats
    report.wall_time = time.perf_counter() - start
    return report


def run_suite(suite="all", models=100, seed=0, sizes=gen.Sizes(), checks=None):
    """Run the named suite (or all) on the fixtures plus ``models`` generated models."""
    names = _suite_names(suite)
    return _run(SuiteReport(seed, models), names,
                lambda name: model_stream(name, seed, models, sizes), checks)


def run_on_models(suite, models, seed=0, checks=None):
    """Run a suite on given (id, F, tau) triples, e.g. models loaded from files."""
    names = _suite_names(suite)
    return _run(SuiteReport(seed, len(models)), names,
                lambda name: ((i, F, tau, "file") for i, F, tau in models), checks)
