"""Kernels, saturation and recovery beyond the harness checks."""
import pytest
from hypothesis import given, strategies as st

from deflator_lab import InvariantViolation, SigmaAlg, conditional_kernel, saturation_check
from deflator_lab import generators as gen
from deflator_lab.enlargement import enlarge_progressively
from deflator_lab.inference import (condB1_check, cox_branch_split, infer_filtration,
                                    join_with_time, terminal_algebra)

SMALL = gen.Sizes(6, 4)
seeds = st.integers(0, 2**32)


class TestSigmaAlg:
    def test_atoms_must_partition(self):
        with pytest.raises(InvariantViolation):
            SigmaAlg.of([[0, 1], [1, 2]], 3)
        with pytest.raises(InvariantViolation):
            SigmaAlg.of([[0], [2]], 3)

    def test_atom_lookup(self):
        assert SigmaAlg.of([[2, 0], [1]], 3).atom_of() == {0: 0, 2: 0, 1: 1}


class TestKernels:
    @given(seeds)
    def test_disintegration(self, seed):
        F, tau = gen.random_model(seed, SMALL)
        k = conditional_kernel(F, tau)
        for w in range(F.n):
            assert sum(k.nu[t] * k.kernel[t][w] for t in k.levels()) == F.prob[w]

    @given(seeds)
    def test_saturation_by_the_joined_algebra(self, seed):
        F, tau = gen.random_model(seed, SMALL)
        assert saturation_check(F, tau, join_with_time(F, tau))

    @given(seeds)
    def test_b1_measures_recover_on_cox_models(self, seed):
        F, tau = gen.gen_cox_model(seed, SMALL)
        H = terminal_algebra(F)
        G = enlarge_progressively(F, tau).G_space
        k = conditional_kernel(F, tau)
        for t in k.levels():
            if condB1_check(F, tau, H, k.kernel[t]):
                assert infer_filtration(G, tau, H, k.kernel[t], reference=F).matches

    @given(seeds)
    def test_branch_split(self, seed):
        holds, level = cox_branch_split(*gen.cox_branch_model(seed))
        assert holds and level is not None

    def test_b1_rejects_non_probability(self):
        F, tau = gen.random_model(1, SMALL)
        with pytest.raises(InvariantViolation):
            condB1_check(F, tau, terminal_algebra(F), [0] * F.n)
