"""Generators are deterministic in their seed and produce what they promise."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from deflator_lab import UnrealizableClass, azema_bundle, vanishing_times
from deflator_lab import generators as gen
from deflator_lab.calculus import is_deflator, martingale_test, stop_before
from deflator_lab.inference import conditional_kernel
from deflator_lab.io import model_to_dict

SMALL = gen.Sizes(6, 4)
seeds = st.integers(0, 2**32)


class TestDeterminism:
    @pytest.mark.parametrize("make", [gen.random_model, gen.gen_density_model, gen.gen_cox_model])
    def test_same_seed_same_model(self, make):
        assert model_to_dict(*make("abc", SMALL)) == model_to_dict(*make("abc", SMALL))

    def test_different_seeds_differ(self):
        models = {str(model_to_dict(*gen.random_model(i, SMALL))) for i in range(10)}
        assert len(models) > 5


class TestProcesses:
    @given(seeds)
    def test_martingales(self, seed):
        F = gen.random_space(seed, sizes=SMALL)
        assert martingale_test(F, gen.random_martingale(seed, F))
        Y = gen.random_positive_martingale(seed, F)
        assert martingale_test(F, Y) and (Y > 0).all()

    @given(seeds)
    def test_priced_asset_is_deflated(self, seed):
        F = gen.random_space(seed, sizes=SMALL)
        R = gen.random_stopping_time(seed, F)
        S, Y, xi = gen.deflator_instance(seed, F, R)
        assert is_deflator(F, Y, [stop_before(S, R)])

    @given(seeds)
    def test_eta_regular_martingale(self, seed):
        F, tau = gen.gen_pathological(seed, "eta_finite", SMALL)
        eta = vanishing_times(azema_bundle(F, tau)).eta
        X = gen.eta_regular_martingale(seed, F, eta)
        assert martingale_test(F, stop_before(X, eta))


class TestModelFamilies:
    @pytest.mark.parametrize("cls", [c for c in gen.PATHOLOGICAL_CLASSES if c != "eta_dot_finite"])
    def test_realizable_classes(self, cls):
        for seed in range(5):
            F, tau = gen.gen_pathological(seed, cls, SMALL)
            assert gen.realizes(F, tau, cls)

    def test_eta_dot_is_never_realized(self):
        # Z_{zeta-1} = 0 contradicts the first hitting time of 0 being zeta
        with pytest.raises(UnrealizableClass):
            gen.gen_pathological(0, "eta_dot_finite", gen.Sizes(4, 2), tries=5)

    @given(seeds)
    def test_density_model_kernel_has_full_support_levels(self, seed):
        F, tau = gen.gen_density_model(seed, SMALL)
        kern = conditional_kernel(F, tau)
        assert sum(kern.nu.values()) == 1

    @given(seeds)
    def test_cox_survival_identity(self, seed):
        assert gen.cox_survival_identity(*_cox_parts(seed))

    @pytest.mark.parametrize("seed", range(5))
    def test_zero_barrier_never_fires(self, seed):
        _, tau = gen.gen_cox_model(seed, SMALL, zero_barrier=True)
        assert (tau == np.inf).all()


def _cox_parts(seed):
    F, tau, barrier, stop, support, weights, k = gen.cox_branch_model(seed)
    return F, tau, barrier, support, weights, k
