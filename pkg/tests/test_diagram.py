import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slopecalc.bc import BCObject, dimension
from slopecalc.diagram import (
    SyntheticCohomology,
    battery,
    build_modification,
    dichotomy,
    mv_check,
)
from slopecalc.filtration import HodgeData
from slopecalc.hn import STATUS_TRUE, FilteredPhiModule, is_acyclic
from slopecalc.isocrystal import PhiModule
from slopecalc.rational import InputError

from _generators import certified_filtered_instance

P = 2


def fm(phi, flag_entries, rank, nil=None):
    return FilteredPhiModule(
        PhiModule.from_matrices(P, phi, nil),
        HodgeData.from_flag(flag_entries, rank=rank),
    )


def full_flag_all_weight(n, w):
    ident = [[F(i == j) for j in range(n)] for i in range(n)]
    return HodgeData.from_flag([(w, ident)], rank=n) if w != 0 else HodgeData.from_flag([(0, ident)], rank=n)


STEIN = fm([[1, 0], [0, P]], [(1, [[1, 0], [0, 1]])], 2)
PROPER = fm([[1, 0], [0, P]], [(1, [[0, 1]])], 2)
BAD = fm([[P]], [(0, [[1]])], 1)


class TestBuildModification:
    def test_unit_line_weight_one(self):
        mod = build_modification(PhiModule.from_matrices(P, [[1]]),
                                 HodgeData.from_flag([(1, [[1]])], rank=1), 1)
        assert mod.certified and mod.sheaf.bundle == ((F(1), 1),)

    def test_weakly_admissible_gives_trivial_bundle(self):
        mod = build_modification(PROPER.module, PROPER.hodge, 1)
        assert mod.sheaf.bundle == ((F(0), 2),)

    def test_negative_line(self):
        mod = build_modification(BAD.module, BAD.hodge, 1)
        assert mod.sheaf.bundle == ((F(-1), 1),)

    def test_window_validation(self):
        with pytest.raises(InputError):
            build_modification(PhiModule.from_matrices(P, [[8]]),
                               HodgeData.from_flag([(1, [[1]])], rank=1), 1)
        with pytest.raises(InputError):
            build_modification(PhiModule.from_matrices(P, [[1]]),
                               HodgeData.from_flag([(2, [[1]])], rank=1), 1)

    def test_degree_and_rank_invariants(self):
        mod = build_modification(STEIN.module, STEIN.hodge, 1)
        from slopecalc.hn import degree

        assert mod.sheaf.degree() == degree(STEIN)
        assert mod.sheaf.rank() == STEIN.rank


class TestDichotomy:
    def test_weakly_admissible_surjective(self):
        res = dichotomy(PROPER.module, PROPER.hodge, 1)
        assert res.branch == "surjective" and res.deficit == 0

    def test_bad_line(self):
        res = dichotomy(BAD.module, BAD.hodge, 1)
        assert res.branch == "positive-height-image" and res.deficit == 1

    def test_stein_surjective(self):
        assert dichotomy(STEIN.module, STEIN.hodge, 1).branch == "surjective"

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_exhaustive_exclusive(self, seed):
        rng = random.Random(seed)
        r = rng.randint(1, 3)
        m = certified_filtered_instance(rng, max_rank=min(r + 1, 3),
                                        weight_lo=0, weight_hi=r, exp_lo=0, exp_hi=r)
        res = dichotomy(m.module, m.hodge, r)
        assert res.branch in ("surjective", "positive-height-image")
        assert (res.branch == "surjective") == (res.deficit == 0)
        if res.certified:
            assert (res.branch == "surjective") == (is_acyclic(m).status == STATUS_TRUE)


class TestBattery:
    def test_stein_like(self):
        rep = battery(SyntheticCohomology.build(1, STEIN))
        assert rep.certified and rep.consistent
        assert all(v.is_true for v in rep.verdicts().values())
        assert rep.ht_glued == 2 == rep.dim_de_rham

    def test_proper_like(self):
        rep = battery(SyntheticCohomology.build(1, PROPER))
        assert all(v.is_true for v in rep.verdicts().values())
        assert rep.ht_glued == rep.dim_de_rham == 2

    def test_failure_case(self):
        rep = battery(SyntheticCohomology.build(1, BAD))
        assert rep.certified and rep.consistent
        assert not rep.verdict_a.is_true
        assert not rep.verdict_b_r.is_true
        assert not rep.verdict_cprime.is_true
        assert not rep.verdict_d.is_true
        assert rep.verdict_b_rm1.is_true  # vacuous at the trivial degree
        assert rep.ht_glued == 0 and rep.dim_de_rham == 1

    def test_lower_degree_failure_propagates(self):
        # acyclic at degree r, non-acyclic at degree r-1
        bad_below = fm([[P]], [(0, [[1]])], 1)
        s = SyntheticCohomology.build(2, fm([[1]], [(1, [[1]])], 1), bad_below)
        rep = battery(s)
        assert not rep.verdict_b_rm1.is_true
        assert not rep.verdict_d.is_true
        assert rep.consistent

    def test_window_enforced(self):
        with pytest.raises(InputError):
            SyntheticCohomology.build(1, fm([[P ** 3]], [(1, [[1]])], 1))

    def test_json_roundtrip(self):
        s = SyntheticCohomology.build(1, STEIN, None)
        again = SyntheticCohomology.from_obj(s.to_obj())
        assert again.top == s.top and again.r == s.r and again.below.rank == 0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_weight_window_maximal_always_true(self, seed):
        # weights all equal to the degree: the target quotient collapses
        rng = random.Random(seed)
        r = rng.randint(1, 3)
        n = rng.randint(1, min(3, r + 1))  # distinct exponents must fit in [0, r]
        from _generators import diagonal_instance

        mod = diagonal_instance(rng, P, n, 0, r)
        ident = [[F(i == j) for j in range(n)] for i in range(n)]
        hodge = HodgeData.from_flag([(r, ident)], rank=n)
        rep = battery(SyntheticCohomology.build(r, FilteredPhiModule(mod, hodge)))
        if rep.certified:
            assert all(v.is_true for v in rep.verdicts().values())


def split_row(parts):
    """Exact row 0 -> X1 -> X1+X2 -> ... -> Xn -> 0 from summands."""
    objs = [parts[0]]
    for a, b in zip(parts, parts[1:]):
        objs.append(a.direct_sum(b))
    objs.append(parts[-1])
    # arrows alternate kill/inject along the chain
    arrows = []
    kills = [BCObject.zero()] + parts
    for i in range(len(objs) - 1):
        arrows.append({"ker": dimension(kills[i]), "im": dimension(parts[i] if i < len(parts) else parts[-1])})
    return {
        "objects": [o.to_obj() for o in objs],
        "arrows": [{"ker": a["ker"].to_obj(), "im": a["im"].to_obj()} for a in arrows],
    }


class TestMVCheck:
    def mk_rows(self, pa, pb):
        return split_row(pa), split_row(pb)

    def test_identical_rows(self):
        parts = [BCObject.build(qp=1), BCObject.build(ueff=[(1, 1, 1)]),
                 BCObject.build(torsion=[("infty", (2,))])]
        row = split_row(parts)
        rep = mv_check(row, row, 1)
        assert rep.equal and rep.certified

    def test_glued_rows(self):
        # same heights summand by summand, different objects
        pa = [BCObject.build(qp=2), BCObject.build(ueff=[(1, 1, 1)]),
              BCObject.build(torsion=[("infty", (1,))])]
        pb = [BCObject.build(ueff=[(1, 2, 1)], qp=0, torsion=[("infty", (1,))]),
              BCObject.build(qp=1), BCObject.build(torsion=[("infty", (3,))])]
        # align heights: pa hts = [2, 1, 0]; pb hts = [2, 1, 0]
        ra, rb = self.mk_rows(pa, pb)
        rep = mv_check(ra, rb, 1)
        assert rep.equal is True
        assert rep.value == dimension(pa[-1]).ht  # index 3r = 3 holds the last summand

    def test_height_mismatch_reported(self):
        pa = [BCObject.build(qp=1), BCObject.build(qp=1), BCObject.build(qp=1)]
        pb = [BCObject.build(qp=2), BCObject.build(qp=1), BCObject.build(qp=1)]
        ra, rb = self.mk_rows(pa, pb)
        rep = mv_check(ra, rb, 1)
        assert rep.equal is None
        assert any("ht(A_0)" in v for v in rep.violations)

    def test_positive_curvature_reported(self):
        pa = [BCObject.build(uquot=[(1, 1, 1)]), BCObject.build(qp=1), BCObject.build(qp=1)]
        ra, rb = self.mk_rows(pa, pa)
        rep = mv_check(ra, rb, 1)
        assert rep.equal is None and any("curvature" in v for v in rep.violations)

    def test_rows_too_short(self):
        pa = [BCObject.build(qp=1)]
        ra, rb = self.mk_rows(pa, pa)
        with pytest.raises(InputError):
            mv_check(ra, rb, 2)


class TestMVWithQuasiObjects:
    def test_quasi_rows_certify(self):
        from slopecalc.bc import Dimension, QBCObject

        # row A carries a torsion core through the first two nodes; row B is
        # the plain version; heights agree index by index
        tail = BCObject.build(torsion=[("infty", (1,))])
        a1 = QBCObject.build([2], BCObject.build(qp=1))
        a2 = QBCObject.build([2], BCObject.build(qp=1, torsion=[("infty", (1,))]))
        b1 = BCObject.build(qp=1)
        b2 = BCObject.build(qp=1, torsion=[("infty", (1,))])

        def row(w1, w2):
            objs = [w1, w2, tail, BCObject.zero()]
            arrows = [
                {"ker": {"dim": 0, "ht": 0}, "im": dimension(w1).to_obj()},
                {"ker": dimension(w1).to_obj(), "im": {"dim": 1, "ht": 0}},
                {"ker": {"dim": 1, "ht": 0}, "im": {"dim": 0, "ht": 0}},
            ]
            return {"objects": [o.to_obj() for o in objs], "arrows": arrows}

        rep = mv_check(row(a1, a2), row(b1, b2), 1)
        assert rep.violations == ()
        assert rep.equal is True and rep.value == 0  # index 3 is the zero object
