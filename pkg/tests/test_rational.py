from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slopecalc.rational import (
    INFINITY,
    InputError,
    Polygon,
    RatMatrix,
    charpoly,
    complement_basis,
    coordinates,
    newton_polygon,
    rat,
    rat_str,
    restriction_matrix,
    rref_rows,
    span_contains,
    span_intersect,
    valuation,
)


def brute_valuation(q, p):
    # independent oracle: strip factors of p one by one
    q = F(q)
    if q == 0:
        return INFINITY
    v = 0
    while (q.numerator % p) == 0:
        q /= p
        v += 1
    while q.denominator % p == 0:
        q *= p
        v -= 1
    return v


class TestValuation:
    def test_zero_is_infinite(self):
        assert valuation(0, 5) == INFINITY

    def test_unit(self):
        assert valuation(1, 3) == 0

    def test_eighteen_twentyfifths(self):
        # 18/25 = 2 * 3^2 / 5^2, so v_5 = -2
        assert valuation(F(18, 25), 5) == -2

    def test_rejects_non_prime(self):
        with pytest.raises(InputError):
            valuation(F(1, 2), 6)
        with pytest.raises(InputError):
            valuation(1, 1)

    @given(
        st.fractions(min_value=-50, max_value=50, max_denominator=60),
        st.sampled_from([2, 3, 5, 7]),
    )
    def test_matches_brute_force(self, q, p):
        assert valuation(q, p) == brute_valuation(q, p)

    @given(
        st.fractions(min_value=-9, max_value=9, max_denominator=12).filter(lambda q: q != 0),
        st.fractions(min_value=-9, max_value=9, max_denominator=12).filter(lambda q: q != 0),
        st.sampled_from([2, 3, 5]),
    )
    def test_multiplicative(self, x, y, p):
        assert valuation(x * y, p) == valuation(x, p) + valuation(y, p)


def poly_mul(f, g):
    out = [F(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


class TestNewtonPolygon:
    def test_linear_unit_root(self):
        # x - 1
        assert newton_polygon([-1, 1], 7) == [(F(0), 1)]

    def test_x2_minus_p(self):
        # hull through (0,1), (2,0): slope -1/2, so root valuation 1/2 twice
        assert newton_polygon([-5, 0, 1], 5) == [(F(1, 2), 2)]

    def test_split_polygon(self):
        # x^2 - (1+p)x + p: hull (0,1), (1,0), (2,0)
        p = 3
        assert newton_polygon([p, -(1 + p), 1], p) == [(F(0), 1), (F(1), 1)]

    def test_errors(self):
        with pytest.raises(InputError):
            newton_polygon([], 2)
        with pytest.raises(InputError):
            newton_polygon([0, 0], 2)
        with pytest.raises(InputError):
            newton_polygon([0, 1], 2)  # zero constant coefficient
        with pytest.raises(InputError):
            newton_polygon([1, 1, 0], 2)  # zero leading coefficient

    def test_degree_zero(self):
        assert newton_polygon([F(3, 2)], 2) == []

    @settings(max_examples=60)
    @given(
        st.lists(st.integers(-9, 9), min_size=1, max_size=4),
        st.lists(st.integers(-9, 9), min_size=1, max_size=4),
        st.sampled_from([2, 3, 5]),
    )
    def test_multiplicativity(self, f, g, p):
        # valuations of roots of f*g = multiset union of those of f and of g
        f = [F(c) for c in f]
        g = [F(c) for c in g]
        if not f[0] or not f[-1] or not g[0] or not g[-1]:
            return
        fg = poly_mul(f, g)

        def expand(pairs):
            out = []
            for s, m in pairs:
                out.extend([s] * m)
            return sorted(out)

        assert expand(newton_polygon(fg, p)) == sorted(
            expand(newton_polygon(f, p)) + expand(newton_polygon(g, p))
        )

    @given(st.lists(st.integers(-20, 20), min_size=2, max_size=7), st.sampled_from([2, 5]))
    def test_multiplicities_sum_to_degree(self, coeffs, p):
        if not coeffs[0] or not coeffs[-1]:
            return
        pairs = newton_polygon(coeffs, p)
        assert sum(m for _, m in pairs) == len(coeffs) - 1


def det_by_permutations(m: RatMatrix):
    # independent oracle: Leibniz expansion
    import itertools

    n = m.rows
    total = F(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = F(1)
        for i in range(n):
            term *= m.entries[i][perm[i]]
        total += sign * term
    return total


class TestMatrix:
    def test_charpoly_identity(self):
        assert charpoly(RatMatrix.identity(2)) == [F(1), F(-2), F(1)]

    def test_charpoly_diag(self):
        p = 5
        m = RatMatrix([[1, 0], [0, p]])
        assert charpoly(m) == [F(p), F(-(1 + p)), F(1)]

    def test_charpoly_companion(self):
        p = 2
        m = RatMatrix([[0, p], [1, 0]])
        assert charpoly(m) == [F(-p), F(0), F(1)]

    def test_charpoly_rank_zero(self):
        assert charpoly(RatMatrix([])) == [F(1)]

    @settings(max_examples=40)
    @given(
        st.lists(
            st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=3, max_size=3),
            min_size=3,
            max_size=3,
        )
    )
    def test_bareiss_matches_permutation_expansion(self, rows):
        m = RatMatrix(rows)
        assert m.det() == det_by_permutations(m)

    @given(st.lists(st.integers(1, 9), min_size=1, max_size=4))
    def test_charpoly_kills_eigenvalues(self, diag):
        n = len(diag)
        m = RatMatrix([[F(diag[i]) if i == j else F(0) for j in range(n)] for i in range(n)])
        coeffs = charpoly(m)
        for lam in diag:
            value = sum(c * F(lam) ** k for k, c in enumerate(coeffs))
            assert value == 0

    def test_inverse(self):
        m = RatMatrix([[1, 2], [3, 5]])
        assert m @ m.inverse() == RatMatrix.identity(2)
        with pytest.raises(InputError):
            RatMatrix([[1, 2], [2, 4]]).inverse()

    def test_nullspace(self):
        m = RatMatrix([[1, 2, 3], [2, 4, 6]])
        ns = m.nullspace()
        assert len(ns) == 2
        for v in ns:
            assert m.apply(v) == (F(0), F(0))

    def test_kron_shape(self):
        a = RatMatrix([[1, 2], [0, 1]])
        b = RatMatrix([[3]])
        assert a.kron(b) == RatMatrix([[3, 6], [0, 3]])


class TestPolygon:
    def test_lower_hull(self):
        poly = Polygon.lower_hull([(0, 1), (1, 0), (2, 0), (1, 5)])
        assert poly.vertices == ((0, F(1)), (1, F(0)), (2, F(0)))

    def test_rejects_concave(self):
        with pytest.raises(InputError):
            Polygon([(0, F(0)), (1, F(1)), (2, F(0))])

    def test_rejects_non_increasing_x(self):
        with pytest.raises(InputError):
            Polygon([(0, F(0)), (0, F(1))])

    @settings(max_examples=50)
    @given(st.lists(st.tuples(st.integers(0, 6), st.integers(-5, 5)), min_size=1, max_size=8))
    def test_hull_below_all_points(self, pts):
        poly = Polygon.lower_hull(pts)
        verts = dict(poly.vertices)
        for x, y in pts:
            # interpolate the hull at x and compare
            vs = poly.vertices
            if x < vs[0][0] or x > vs[-1][0]:
                continue
            for (x1, y1), (x2, y2) in zip(vs, vs[1:]):
                if x1 <= x <= x2:
                    hull_y = y1 + (F(y2) - y1) * (x - x1) / (x2 - x1)
                    assert hull_y <= y
                    break
            else:
                assert vs[0][0] == x and vs[0][1] <= y


class TestSpans:
    def test_coordinates_and_containment(self):
        basis = rref_rows([(F(1), F(0), F(1)), (F(0), F(1), F(1))], 3)
        assert coordinates(basis, (F(1), F(1), F(2))) is not None
        assert not span_contains(basis, (F(0), F(0), F(1)))

    def test_intersection(self):
        a = rref_rows([(F(1), F(0)), (F(0), F(1))], 2)
        b = rref_rows([(F(1), F(1))], 2)
        inter = span_intersect(a, b, 2)
        assert inter == b

    def test_restriction(self):
        m = RatMatrix([[1, 0], [0, 5]])
        sub = rref_rows([(F(0), F(1))], 2)
        restr = restriction_matrix(m, sub)
        assert restr == RatMatrix([[5]])
        assert restriction_matrix(RatMatrix([[0, 1], [1, 0]]), sub) is None

    def test_complement(self):
        inner = rref_rows([(F(1), F(0), F(0))], 3)
        outer = rref_rows([(F(1), F(0), F(0)), (F(0), F(1), F(0))], 3)
        comp = complement_basis(inner, outer, 3)
        assert len(comp) == 1 and span_contains(outer, comp[0])


class TestRatParsing:
    def test_strings(self):
        assert rat("3/4") == F(3, 4)
        assert rat("-2") == F(-2)
        assert rat_str(F(3, 4)) == "3/4"
        assert rat_str(F(5)) == "5"

    def test_rejects_floats_and_decimals(self):
        with pytest.raises(InputError):
            rat(1.5)
        with pytest.raises(InputError):
            rat("1.5")
        with pytest.raises(InputError):
            rat("1e3")


class TestComplementErrors:
    def test_inner_must_lie_inside_outer(self):
        inner = rref_rows([(F(1), F(0))], 2)
        outer = rref_rows([(F(0), F(1))], 2)
        with pytest.raises(InputError):
            complement_basis(inner, outer, 2)
