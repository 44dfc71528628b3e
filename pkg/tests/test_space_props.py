"""Invariants of generated filtered spaces, random times and measure changes."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deflator_lab import apply_measure_change, is_predictable_time, is_stopping_time
from deflator_lab import generators as gen
from deflator_lab.space import frac, refines, rtime

seeds = st.integers(0, 2**32)
SMALL = gen.Sizes(6, 4)


class TestGeneratedSpaces:
    @given(seeds)
    def test_partitions_refine_and_mass_is_one(self, seed):
        F = gen.random_space(seed, sizes=SMALL)
        assert sum(F.prob) == 1
        assert all(p > 0 for p in F.prob)
        assert F.partitions[0] == (tuple(range(F.n)),)
        assert all(refines(F.partitions[t + 1], F.partitions[t]) for t in range(F.T))

    @given(seeds, st.sampled_from(["free", "terminal", "stopping", "predictable"]))
    def test_predictable_implies_stopping(self, seed, mode):
        F = gen.random_space(seed, sizes=SMALL)
        R = gen.random_time(gen._rng(seed + 1), F, mode)
        if not is_stopping_time(F, R):
            assert mode in ("free", "terminal")
            return
        if is_predictable_time(F, R):
            assert is_stopping_time(F, R)
        if mode == "predictable":
            assert is_predictable_time(F, R)

    @given(seeds)
    def test_measure_change_round_trip(self, seed):
        F = gen.random_space(seed, sizes=SMALL)
        mc = gen.random_density(seed, F)
        moved = apply_measure_change(F, mc)
        assert sum(moved.prob) == 1
        back = apply_measure_change(moved, mc.inverse())
        assert list(back.prob) == list(F.prob)

    @given(seeds)
    def test_conditional_expectation_tower(self, seed):
        F = gen.random_space(seed, sizes=SMALL)
        X = gen.random_adapted(seed, F)[-1]
        for s in range(F.T + 1):
            for t in range(s, F.T + 1):
                assert (F.cond_exp(F.cond_exp(X, t), s) == F.cond_exp(X, s)).all()
        assert F.expectation(F.cond_exp(X, 0)) == F.expectation(X)


class TestParsing:
    def test_frac_rejects_floats(self):
        with pytest.raises(TypeError):
            frac(0.5)

    def test_frac_and_rtime(self):
        assert frac("3/4") == Fraction(3, 4)
        assert list(rtime([0, "inf", None, 2])) == [0.0, np.inf, np.inf, 2.0]
