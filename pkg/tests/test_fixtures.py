"""Module outputs on the two hand fixtures against the frozen oracle values."""
from fractions import Fraction as Q
import math

import numpy as np
import pytest

from conftest import rows, times
from deflator_lab import (B1Violated, EtaStopFails, NotAdapted, BadMeasure, DecompositionDomainViolation, JumpAtEtaTilde,
                          MeasureChange, NonRefiningFiltration, NotADeflator, NotAStoppingTime,
                          SigmaAlg, apply_measure_change, arbitrage_witness, azema_bundle,
                          bracket, build_space, certificate_search, check_Da1, check_chgpas,
                          condB1_check, conditional_kernel, csinv_lift, deflator_at_tau,
                          deflator_dfet, doob_meyer, find_b1_measure, frak_m, g_deflator_search,
                          infer_filtration, integrate, is_predictable_time, is_stopping_time,
                          jeulin_yor, jump_comp, K_coefficient, key_lemma_check, left,
                          martingale_on_set_test, martingale_test, orthogonality_test,
                          ortho_decomp, puredisc_note, rdi_check, rdm_check, reduce_optional,
                          reduce_stopping_time, rtime, saturation_check, stoch_exp, stop_at, stop_before,
                          supermartingale_test, whenS_search, yyam_solve)
from deflator_lab.azema import safe_inverse
from deflator_lab.deflators import whenS_conditions
from deflator_lab.enlargement import enlarge_progressively
from deflator_lab.inference import terminal_algebra
from deflator_lab.projections import dual_predictable
from deflator_lab.azema import default_indicator
from deflator_lab.space import as_proc, constant, const_time
from frozen import M1, M2

INF = math.inf
FROZEN = {"m1": M1, "m2": M2}


@pytest.fixture(params=["m1", "m2"])
def both(request):
    return request.getfixturevalue(request.param), FROZEN[request.param]


class TestSpace:
    def test_fixture_shapes(self, m1, m2):
        assert m1.F.shape() == (3, 2)
        assert m2.F.shape() == (3, 3)

    def test_coarser_later_partition_rejected(self):
        with pytest.raises(NonRefiningFiltration):
            build_space("abc", ["1/3"] * 3, 2, [[[0, 1, 2]], [[0], [1], [2]], [[0], [1, 2]]])

    @pytest.mark.parametrize("probs", [["1/2", "1/2", "0"], ["1/2", "1/4", "1/3"],
                                       ["1", "1/2", "-1/2"]])
    def test_bad_measure_rejected(self, probs):
        with pytest.raises(BadMeasure):
            build_space("abc", probs, 1, [[[0, 1, 2]], [[0], [1], [2]]])

    def test_tau_is_not_an_F_stopping_time_on_m1(self, m1):
        assert not is_stopping_time(m1.F, m1.tau)
        assert is_stopping_time(m1.F, const_time(m1.F, 1))

    def test_tau_is_a_G_stopping_time_on_m2(self, m2):
        assert is_stopping_time(m2.G, m2.tau)

    def test_predictable_times_on_m2(self, m2):
        assert is_predictable_time(m2.F, rtime([2, "inf", "inf"]))
        assert not is_predictable_time(m2.F, rtime(["inf", 2, "inf"]))
        assert is_predictable_time(m2.F, const_time(m2.F, 1))
        with pytest.raises(NotAStoppingTime):
            is_predictable_time(m2.F, rtime([2, 1, 2]))

    def test_measure_change_arithmetic(self, m1):
        moved = apply_measure_change(m1.F, MeasureChange.of(m1.F, ["3/2", "1/2"]))
        assert list(moved.prob) == [Q(3, 4), Q(1, 4)]
        back = apply_measure_change(moved, MeasureChange.of(m1.F, ["3/2", "1/2"]).inverse())
        assert list(back.prob) == list(m1.F.prob)

    def test_density_needs_unit_mean(self, m1):
        with pytest.raises(BadMeasure):
            MeasureChange.of(m1.F, ["1", "1/2"])


class TestAzemaBundle:
    @pytest.mark.parametrize("name", ["Z", "Ztilde", "a", "A", "gamma", "mdot"])
    def test_processes(self, both, name):
        fx, frozen = both
        assert rows(fx.b.processes()[name]) == frozen[name]

    def test_doob_meyer_of_Z(self, m1):
        dm = doob_meyer(m1.F, m1.b.Z)
        assert rows(dm.martingale - dm.martingale[0][None, :]) == [[0, 0]] * 3
        assert rows(dm.drift) == M1["a"]

    def test_vanishing_times(self, both):
        fx, frozen = both
        assert {k: times(v) for k, v in fx.vt.times().items()} == frozen["times"]

    def test_set_C(self, both):
        fx, frozen = both
        assert rows(fx.md.C.astype(int)) == frozen["C"]
        assert (fx.md.C_set.mask(fx.F.T) == fx.md.C).all()

    def test_multiplicative_decomposition(self, both):
        fx, frozen = both
        assert rows(fx.md.D) == frozen["D"]
        assert rows(fx.md.Lhat) == frozen["Lhat"]

    def test_L_values_on_m2(self, m2):
        L = m2.md.L
        assert list(L[1]) == [Q(3, 2), Q(3, 4), Q(3, 4)]
        assert L[2, 1] == 0 and L[2, 2] == Q(3, 2)

    def test_L_on_m1(self, m1):
        assert list(m1.md.L[0]) == [1, 1] and list(m1.md.L[1]) == [1, 1]

    def test_L_outside_C_raises(self, m2):
        with pytest.raises(DecompositionDomainViolation):
            m2.md.L[2, 0]

    def test_eta_martingales(self, both):
        fx, frozen = both
        assert rows(fx.em.n) == frozen["n"]
        assert rows(fx.em.d_comp) == frozen["d"]
        assert rows(fx.em.n_tilde) == frozen["ntilde"]

    def test_measure_change_on_m2(self, m2):
        assert check_chgpas(m2.F, m2.tau, MeasureChange.of(m2.F, ["3/2", "3/4", "3/4"]))

    def test_unit_jump_of_compensator_on_m2(self, m2):
        rep = check_Da1(m2.F, m2.tau, const_time(m2.F, 2))
        assert times(rep.sigma_prime) == [2, INF, INF]
        assert rep.holds

    def test_unit_jump_when_tau_is_one(self):
        F = build_space(["x"], ["1"], 1, [[[0]], [[0]]])
        b = azema_bundle(F, rtime([1]))
        assert rows(b.Z) == [[1], [0]]
        rep = check_Da1(F, rtime([1]), rtime([1]))
        assert times(rep.sigma_prime) == [1] and rep.holds


class TestCalculus:
    def test_integral_against_compensator_on_m1(self, m1):
        Zm = left(m1.b.Z)
        H = safe_inverse(Zm, Zm > 0)
        assert [r[0] for r in rows(integrate(H, m1.b.a))] == [0, Q(1, 2), Q(3, 2)]

    def test_bracket(self, m1, m2):
        assert rows(bracket(m1.b.mdot, m1.b.mdot)) == [[0, 0]] * 3
        assert rows(bracket(m2.b.mdot, m2.b.mdot)) == M2["bracket_mdot"]

    def test_exponential_matches_D_on_m1(self, m1):
        Zm = left(m1.b.Z)
        E = stoch_exp(-integrate(safe_inverse(Zm, Zm > 0), m1.b.a))
        assert rows(E) == M1["D"]

    def test_stop_before_tau_on_m2(self, m2):
        X = stop_before(m2.b.mdot, m2.tau)
        assert [r[1] for r in rows(X)] == [1, 1, 1]

    def test_martingale_tests(self, m1, m2):
        assert martingale_test(m1.F, m1.b.mdot)
        assert supermartingale_test(m2.F, m2.md.Lhat)
        assert not martingale_test(m2.F, m2.md.Lhat)

    def test_martingale_on_sets(self, m1, m2):
        assert martingale_on_set_test(m2.F, m2.md.L.filled(), m2.md.C_set)
        assert not martingale_on_set_test(m1.F, m1.b.Z, m1.pair.zeta_set())

    def test_orthogonality(self, m1, m2):
        u1 = jump_comp(m1.G, m1.tau).u
        assert orthogonality_test(m1.G, m1.b.mdot, u1)
        u2 = jump_comp(m2.G, m2.tau).u
        assert not orthogonality_test(m2.G, u2, u2)


class TestJumps:
    def test_compensator_of_eta_on_m2(self, m2):
        jc = jump_comp(m2.F, m2.vt.eta)
        assert rows(jc.v) == M2["v_eta"]
        assert times(jc.R_natural) == [INF] * 3
        assert times(jc.R_flat) == [INF, 2, INF]
        assert list(jc.kappa[2]) == [0, Q(1, 2), Q(1, 2)]

    def test_jump_mean_of_n(self, m2):
        assert rows(K_coefficient(m2.F, m2.em.n, m2.vt.eta)) == M2["K_n_eta"]

    def test_orthogonal_decomposition_of_n(self, m2):
        od = ortho_decomp(m2.F, m2.em.n, m2.vt.eta)
        assert list(od.H[2]) == [0, -2, -2]


class TestEnlargement:
    def test_enlarged_partitions(self, both):
        fx, frozen = both
        got = [sorted(sorted(b) for b in fx.G.blocks(t)) for t in range(fx.F.T + 1)]
        assert got == frozen["G"]

    def test_reduce_indicator_on_m1(self, m1):
        t = np.arange(3)[:, None]
        H = np.where(t < m1.tau[None, :], Q(1), Q(0)).astype(object)
        K = reduce_optional(m1.pair, H)
        assert (K[m1.b.Z > 0] == 1).all()

    def test_reduce_time_path_on_m2(self, m2):
        t = np.arange(3, dtype=float)[:, None]
        H = as_proc(np.minimum(t, m2.tau[None, :]).astype(int))
        K = reduce_optional(m2.pair, H)
        before = t < m2.tau[None, :]
        assert (K[before] == H[before]).all()

    def test_reduce_tau_on_m1(self, m1):
        T = reduce_stopping_time(m1.pair, m1.tau)
        assert is_stopping_time(m1.F, T)
        assert (np.minimum(T, m1.tau) == m1.tau).all()

    def test_reduce_deterministic_time(self, m2):
        U = const_time(m2.F, 1)
        assert times(reduce_stopping_time(m2.pair, U)) == [1, 1, 1]

    def test_equation_for_constant(self, m2):
        Y, holds = rdm_check(m2.pair, constant(m2.F, 1))
        assert holds and (Y[m2.b.Z > 0] == 1).all() and (Y[m2.b.Z == 0] == 0).all()

    def test_equation_for_the_deflator(self, m2):
        X = deflator_dfet(m2.pair, m2.b, m2.md, m2.em, constant(m2.F, 1))
        _, holds = rdm_check(m2.pair, X)
        assert holds

    def test_forward_solution_of_one(self, both):
        fx, frozen = both
        X = yyam_solve(fx.b, "forward", constant(fx.F, 1))
        D = np.array(frozen["D"], dtype=object)
        assert (X[fx.md.C] == D[fx.md.C]).all()

    def test_backward_solution_of_Z_is_L(self, both):
        fx, _ = both
        M = yyam_solve(fx.b, "backward", fx.b.Z)
        assert (M[fx.md.C] == fx.md.L.filled()[fx.md.C]).all()

    def test_lift_on_m1(self, m1):
        # the forward solution X equals Y Z for the Y that csinv_lift expects
        X = yyam_solve(m1.b, "forward", constant(m1.F, 5))
        Y = X * safe_inverse(m1.b.Z, m1.b.Z > 0)
        lifted = csinv_lift(m1.pair, Y)
        assert martingale_test(m1.G, lifted) and (lifted == 5).all()

    def test_compensated_mdot_on_m2(self, m2):
        drift = jeulin_yor(m2.pair, m2.b.mdot)
        assert martingale_test(m2.G, stop_at(m2.b.mdot, m2.tau) - drift)

    def test_key_lemma_on_m1(self, m1):
        assert key_lemma_check(m1.pair, const_time(m1.F, 2), [Q(3), Q(3)])

    def test_key_lemma_needs_measurable_payoff(self, m1):
        # F is trivial on M1, so an indicator of one outcome is not F_2-measurable
        with pytest.raises(NotAdapted):
            key_lemma_check(m1.pair, const_time(m1.F, 2), [Q(1), Q(0)])

    @pytest.mark.parametrize("xi", [[1, 0, 0], [0, 1, 0], [0, 0, 1], [2, -1, 5]])
    def test_key_lemma_on_m2(self, m2, xi):
        assert key_lemma_check(m2.pair, const_time(m2.F, 2), [Q(x) for x in xi])

    def test_reduction_of_tau_compensator_on_m2(self, m2):
        A = dual_predictable(m2.G, default_indicator(m2.G, m2.tau))
        assert rdi_check(m2.pair, A)


class TestDeflators:
    def test_dfet_on_m1_is_one(self, m1):
        Y = deflator_dfet(m1.pair, m1.b, m1.md, m1.em, constant(m1.F, 1))
        assert (Y == 1).all()

    def test_dfet_on_m2(self, m2):
        Y = deflator_dfet(m2.pair, m2.b, m2.md, m2.em, constant(m2.F, 1))
        assert rows(Y) == M2["dfet"]

    def test_dfet_refuses_n(self, m2):
        # n stopped before eta averages 3/2 at t = 2 on {b, c} but is 1 at t = 1
        with pytest.raises(EtaStopFails):
            deflator_dfet(m2.pair, m2.b, m2.md, m2.em, m2.em.n)

    def test_arbitrage(self, m1, m2):
        assert arbitrage_witness(m1.pair, m1.b, m1.em) is None
        w = arbitrage_witness(m2.pair, m2.b, m2.em)
        assert w.expectation == M2["arbitrage_expectation"]

    def test_certificate_on_m1(self, m1):
        cert = certificate_search(m1.pair, m1.b, m1.md, m1.vt, constant(m1.F, 1))
        assert cert.feasible and (cert.Phi == 1).all()

    def test_certificate_for_constant_on_m2(self, m2):
        cert = certificate_search(m2.pair, m2.b, m2.md, m2.vt, constant(m2.F, 1))
        assert cert.feasible and cert.slack > 0

    def test_n_has_no_deflator_on_m2(self, m2):
        # n^{tau-} rises from 1 to 2 on {c} with G_1 already discrete: a sure gain
        cert = certificate_search(m2.pair, m2.b, m2.md, m2.vt, m2.em.n)
        direct = g_deflator_search(m2.pair, stop_before(m2.em.n, m2.tau))
        assert not cert.feasible and not direct.feasible

    def test_whenS_with_M_equal_to_n(self, m2):
        S, Y = constant(m2.F, 1), constant(m2.F, 1)
        assert whenS_conditions(m2.pair, S, Y, m2.em.n)
        assert whenS_search(m2.pair, m2.b, m2.md, m2.vt, S, Y).feasible

    def test_whenS_rejects_non_deflator(self, m2):
        with pytest.raises(NotADeflator):
            whenS_search(m2.pair, m2.b, m2.md, m2.vt, m2.b.Z, constant(m2.F, 1))

    def test_frak_m_vanishes_on_fixtures(self, both):
        fx, _ = both
        fm = frak_m(fx.pair, fx.b, fx.em)
        assert (fm.m_frak == 0).all() and (fm.jumps == 0).all()

    def test_deflator_at_tau_on_m1(self, m1):
        out = deflator_at_tau(m1.pair, m1.b, m1.em, constant(m1.F, 3), constant(m1.F, 1))
        assert (out == 1).all()

    def test_deflator_at_tau_rejects_jump(self, m2):
        with pytest.raises(JumpAtEtaTilde):
            deflator_at_tau(m2.pair, m2.b, m2.em, m2.em.n, constant(m2.F, 1))

    def test_deflator_at_tau_rejects_non_deflator(self, m2):
        with pytest.raises(NotADeflator):
            deflator_at_tau(m2.pair, m2.b, m2.em, m2.b.Z, constant(m2.F, 1))

    def test_no_continuous_part(self, both):
        fx, _ = both
        assert puredisc_note(fx.pair, fx.b.mdot)["holds"]


def _independent_cox():
    """Two F paths, an independent coin deciding tau in {1, inf}."""
    F = build_space(["u0", "u1", "d0", "d1"], ["1/4"] * 4, 1, [[[0, 1, 2, 3]], [[0, 1], [2, 3]]])
    return F, rtime([1, "inf", 1, "inf"])


class TestInference:
    def test_kernels(self, both):
        fx, frozen = both
        k = conditional_kernel(fx.F, fx.tau)
        assert {t: list(v) for t, v in k.kernel.items()} == frozen["kernel"]

    def test_saturation_on_m2(self, m2):
        assert saturation_check(m2.F, m2.tau, SigmaAlg.discrete(3))

    def test_trivial_H_fails_saturation(self):
        F = build_space(["x", "y"], ["1/2", "1/2"], 1, [[[0, 1]], [[0], [1]]])
        assert not saturation_check(F, rtime([1, 1]), SigmaAlg.trivial(2))

    def test_point_mass_at_c_fails_b1(self, m2):
        P = M2["kernel"][INF]
        assert not condB1_check(m2.F, m2.tau, terminal_algebra(m2.F), P)
        with pytest.raises(B1Violated):
            infer_filtration(m2.G, m2.tau, terminal_algebra(m2.F), P)

    def test_no_level_of_m2_satisfies_b1(self, m2):
        assert find_b1_measure(m2.F, m2.tau, terminal_algebra(m2.F)) is None

    def test_recovery_on_independent_model(self):
        F, tau = _independent_cox()
        H = terminal_algebra(F)
        level, P = find_b1_measure(F, tau, H)
        assert level == 1 and list(P) == [Q(1, 2), 0, Q(1, 2), 0]
        rec = infer_filtration(enlarge_progressively(F, tau).G_space, tau, H, P, reference=F)
        assert rec.matches
