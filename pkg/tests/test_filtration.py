import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slopecalc.filtration import (
    HodgeData,
    dual_hodge,
    induced_on_subspace,
    shift,
    t_h,
)
from slopecalc.rational import FlagRequiredError, InputError

from _generators import random_flag


def flag2(entries, rank=2):
    return HodgeData.from_flag(entries, rank=rank)


class TestTH:
    def test_all_zero(self):
        assert t_h(HodgeData.from_weights([0, 0, 0])) == 0

    def test_zero_one(self):
        assert t_h(HodgeData.from_weights([0, 1])) == 1

    def test_flag_jumps(self):
        # rank 3, a one-dimensional drop entering index 2 and death at 3:
        # weights {1, 3, 3}, t_h = 7
        h = HodgeData.from_flag(
            [(1, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]), (2, [[0, 1, 0], [0, 0, 1]]), (3, [[0, 1, 0], [0, 0, 1]])],
            rank=3,
        )
        assert h.weights == (1, 3, 3)
        assert t_h(h) == 7


class TestFlagSemantics:
    def test_subspace_lookup(self):
        h = flag2([(1, [[1, 0]])])
        assert len(h.subspace_at(0)) == 2
        assert h.subspace_at(1) == ((F(1), F(0)),)
        assert h.subspace_at(2) == ()

    def test_weights_from_flag(self):
        assert flag2([(1, [[1, 0]])]).weights == (0, 1)

    def test_presentations_compare_equal(self):
        a = flag2([(1, [[1, 0]])])
        b = flag2([(0, [[1, 0], [0, 1]]), (1, [[1, 0]])])
        assert a == b

    def test_nesting_enforced(self):
        with pytest.raises(InputError):
            flag2([(0, [[1, 0]]), (1, [[0, 1]])])

    def test_non_integer_weight_rejected(self):
        with pytest.raises(InputError):
            HodgeData.from_weights([F(1, 2)])

    def test_json_roundtrip(self):
        h = flag2([(1, [[1, 0]])])
        assert HodgeData.from_obj(h.to_obj()) == h
        w = HodgeData.from_weights([0, 2])
        assert HodgeData.from_obj(w.to_obj()) == w


class TestDual:
    # The annihilator-of-Fil^{1-i} recipe negates weights: that is the unique
    # convention making double duals the identity AND weak admissibility
    # duality-stable (a rank-one module with weight w and slope w must dualize
    # to weight -w, slope -w).

    def test_single_zero_weight(self):
        assert dual_hodge(HodgeData.from_weights([0])).weights == (0,)
        assert dual_hodge(HodgeData.from_weights([1])).weights == (-1,)

    def test_zero_one(self):
        assert dual_hodge(HodgeData.from_weights([0, 1])).weights == (-1, 0)

    def test_involution_weights(self):
        h = HodgeData.from_weights([-1, 0, 2, 2])
        assert dual_hodge(dual_hodge(h)).weights == h.weights

    def test_involution_flag(self):
        h = flag2([(1, [[1, 2]])])
        assert dual_hodge(dual_hodge(h)) == h

    def test_flag_dual_weights(self):
        h = flag2([(1, [[1, 0]])])
        assert dual_hodge(h).weights == (-1, 0)

    def test_flag_dual_is_annihilator(self):
        h = flag2([(1, [[1, 0]])])
        d = dual_hodge(h)
        # level 0 of the dual annihilates Fil^1 = span(e1)
        assert d.subspace_at(0) == ((F(0), F(1)),)

    @settings(max_examples=25)
    @given(st.integers(0, 10**6))
    def test_dual_weight_sum(self, seed):
        rng = random.Random(seed)
        h = random_flag(rng, rng.randint(1, 3), 0, 3)
        assert t_h(dual_hodge(h)) == -t_h(h)


class TestShift:
    def test_by_two(self):
        assert shift(HodgeData.from_weights([0, 1]), 2).weights == (2, 3)

    def test_identity(self):
        h = flag2([(1, [[1, 1]])])
        assert shift(h, 0) == h

    @settings(max_examples=25)
    @given(st.integers(0, 10**6), st.integers(-3, 3))
    def test_th_linear(self, seed, r):
        rng = random.Random(seed)
        h = random_flag(rng, rng.randint(1, 3), 0, 2)
        assert t_h(shift(h, r)) == t_h(h) + r * h.rank


class TestInduced:
    def test_whole_space(self):
        h = flag2([(1, [[1, 0]])])
        ind = induced_on_subspace(h, [[1, 0], [0, 1]])
        assert ind.weights == h.weights

    def test_zero_subspace(self):
        h = flag2([(1, [[1, 0]])])
        ind = induced_on_subspace(h, [])
        assert ind.rank == 0 and t_h(ind) == 0

    def test_lines(self):
        h = flag2([(1, [[1, 0]])])
        assert induced_on_subspace(h, [[1, 0]]).weights == (1,)
        assert induced_on_subspace(h, [[1, 1]]).weights == (0,)

    def test_weights_only_rejected(self):
        with pytest.raises(FlagRequiredError):
            induced_on_subspace(HodgeData.from_weights([0, 1]), [[1, 0]])

    @settings(max_examples=20)
    @given(st.integers(0, 10**6))
    def test_monotone_dimension_bound(self, seed):
        # t_h of a subspace never exceeds taking the largest weights available
        rng = random.Random(seed)
        n = rng.randint(1, 3)
        h = random_flag(rng, n, 0, 3)
        k = rng.randint(0, n)
        rows = [[F(rng.randint(-2, 2)) for _ in range(n)] for _ in range(k)]
        ind = induced_on_subspace(h, rows)
        top = sorted(h.weights, reverse=True)[: ind.rank]
        assert t_h(ind) <= sum(top)
