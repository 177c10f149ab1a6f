import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from bidisk import fixtures
from bidisk.errors import PreconditionError
from bidisk.polycore import (BivPoly, UniPoly, INF_ORDER, flip2, from_json_dict,
                             gcd, gcd_is_constant, homog_divide, homog_expand,
                             reflect, resultant_z2, to_json_dict, translate,
                             unipoly_gcd)
from bidisk.scalars import EXACT, FLOAT, GaussianRational, rational


def exact_grids(max_n=3, max_m=3, lo=-5, hi=5):
    """Nonzero integer coefficient grids as hypothesis strategy."""
    return st.integers(0, max_n).flatmap(lambda n: st.integers(0, max_m).flatmap(
        lambda m: st.lists(
            st.lists(st.integers(lo, hi), min_size=m + 1, max_size=m + 1),
            min_size=n + 1, max_size=n + 1)
    )).filter(lambda g: any(any(x for x in row) for row in g))


def torus_points(count=5, seed=7):
    import random
    rng = random.Random(seed)
    return [(cmath.exp(2j * math.pi * rng.random()),
             cmath.exp(2j * math.pi * rng.random())) for _ in range(count)]


class TestBivPolyBasics:
    def test_construction_and_eval(self):
        p = BivPoly.exact([[2, -1], [-1, 0]])   # 2 - z2 - z1
        assert p.bidegree == (1, 1)
        assert complex(p(GaussianRational(1), GaussianRational(1))) == 0
        assert p(0j, 0j) == 2

    def test_declared_vs_natural_bidegree(self):
        p = BivPoly.exact([[1]], bidegree=(1, 2))
        assert p.bidegree == (1, 2)
        assert p.natural_bidegree() == (0, 0)
        assert p.trimmed().bidegree == (0, 0)

    def test_arithmetic(self):
        p = BivPoly.exact([[1, 1]])             # 1 + z2
        q = BivPoly.exact([[1], [1]])           # 1 + z1
        s = p * q
        assert s.bidegree == (1, 1)
        assert complex(s(2 + 0j, 3 + 0j)) == (1 + 3) * (1 + 2)
        assert (p + q - p - q).is_zero()

    def test_backend_mixing_rejected(self):
        p = BivPoly.exact([[1]])
        q = BivPoly.from_complex([[1.0]])
        with pytest.raises(Exception):
            p + q

    def test_eval_grid_matches_pointwise(self):
        import numpy as np
        p = fixtures.ex1().to_float()
        Z1 = np.array([[0.3 + 0.1j, -0.2j], [0.9 + 0j, 0.5 + 0.5j]])
        Z2 = np.array([[0.1 + 0j, 0.7 - 0.1j], [-0.4 + 0j, 0.2 + 0.2j]])
        V = p.eval_grid(Z1, Z2)
        for idx in ((0, 0), (0, 1), (1, 0), (1, 1)):
            assert abs(V[idx] - p(Z1[idx], Z2[idx])) < 1e-12

    def test_derivatives(self):
        p = fixtures.ex1()
        d1 = p.deriv1()
        # p = 4 - z1 - 3 z2 - z1 z2 + z2^2, so d1 = -1 - z2
        assert complex(d1(0j, 0j)) == -1
        assert complex(d1(0j, 2 + 0j)) == -3
        d2 = p.deriv2()
        assert complex(d2(0j, 0j)) == -3


class TestReflection:
    def test_p0_reflection(self):
        p = fixtures.p0()
        pr = reflect(p)
        # 2 z1 z2 - z1 - z2
        assert complex(pr.at(1, 1)) == 2
        assert complex(pr.at(1, 0)) == -1
        assert complex(pr.at(0, 1)) == -1
        assert complex(pr.at(0, 0)) == 0

    @given(exact_grids())
    @settings(max_examples=60, deadline=None)
    def test_involution_at_declared_bidegree(self, grid):
        p = BivPoly.exact(grid)
        assert reflect(reflect(p)) == p

    @given(exact_grids())
    @settings(max_examples=40, deadline=None)
    def test_torus_modulus_preserved(self, grid):
        p = BivPoly.exact(grid).to_float()
        pr = reflect(p)
        for w1, w2 in torus_points():
            assert abs(abs(p(w1, w2)) - abs(pr(w1, w2))) < 1e-9 * max(
                1.0, p.max_norm())

    @given(exact_grids())
    @settings(max_examples=40, deadline=None)
    def test_reflection_formula_pointwise(self, grid):
        p = BivPoly.exact(grid).to_float()
        n, m = p.bidegree
        pr = reflect(p)
        for w1, w2 in torus_points(3):
            lhs = pr(w1, w2)
            rhs = (w1 ** n) * (w2 ** m) * p(1 / w1.conjugate(),
                                            1 / w2.conjugate()).conjugate()
            assert abs(lhs - rhs) < 1e-9 * max(1.0, p.max_norm())

    def test_flip2_is_z2_reversal(self):
        p = fixtures.ex1()
        q = flip2(p)
        n, m = p.bidegree
        w1, w2 = 0.3 + 0.4j, cmath.exp(0.7j)
        pf = p.to_float()
        qf = q.to_float()
        assert abs(qf(w1, w2) - (w2 ** m) * pf(w1, 1 / w2)) < 1e-12


class TestGcd:
    def test_common_factor_recovered(self):
        a = BivPoly.exact([[1], [-1]])          # 1 - z1
        b = BivPoly.exact([[1, -1]])            # 1 - z2
        g = gcd(a * b, a * a * b)
        assert g.natural_bidegree() == (a * b).natural_bidegree()
        # gcd is normalized; a*b should divide it exactly (same span)
        assert not gcd_is_constant(a * b, a * a * b)

    def test_coprime(self):
        assert gcd_is_constant(fixtures.p0(), reflect(fixtures.p0()))

    def test_exact_only(self):
        p = fixtures.ex2()
        with pytest.raises(PreconditionError):
            gcd(p, p)

    @given(exact_grids(1, 1, -3, 3), exact_grids(1, 1, -3, 3),
           exact_grids(1, 1, -3, 3))
    @settings(max_examples=25, deadline=None)
    def test_common_factor_lower_bounds_gcd(self, g1, g2, g3):
        a, b, c = BivPoly.exact(g1), BivPoly.exact(g2), BivPoly.exact(g3)
        g = gcd((a * c).trimmed(), (b * c).trimmed())
        cn = c.trimmed().natural_bidegree()
        gn = g.natural_bidegree()
        assert gn[0] >= cn[0] and gn[1] >= cn[1]


class TestResultant:
    def test_known_resultant(self):
        # res_z2(z2 - a(z1), z2 - b(z1)) = b - a up to sign
        a = BivPoly.exact([[0, 1], [-1, 0]])    # z2 - z1
        b = BivPoly.exact([[-2, 1], [0, 0]])    # z2 - 2
        r = resultant_z2(a, b)
        # roots where z1 = 2
        vals = [complex(x) for x in r.c]
        import numpy as np
        roots = np.roots(vals[::-1])
        assert any(abs(z - 2) < 1e-9 for z in roots)

    def test_vanishes_iff_common_z2_factor(self):
        a = BivPoly.exact([[1, -1]])            # 1 - z2
        b = BivPoly.exact([[1], [-1]])          # 1 - z1
        r = resultant_z2((a * a).trimmed(), (a * b).trimmed())
        assert r.is_zero()

    def test_float_matches_exact(self):
        p = fixtures.p0()
        q = reflect(p)
        re = resultant_z2(p, q)
        rf = resultant_z2(p.to_float(), q.to_float())
        for ce, cf in zip(re.c, rf.c):
            assert abs(complex(ce) - cf) < 1e-8


class TestUniPoly:
    def test_divmod_exact(self):
        a = UniPoly([GaussianRational(x) for x in (1, 0, -1)], EXACT)  # 1 - t^2
        b = UniPoly([GaussianRational(x) for x in (1, 1)], EXACT)      # 1 + t
        q, r = a.divmod(b)
        assert r.is_zero()
        assert q.c == [GaussianRational(1), GaussianRational(-1)]

    def test_unipoly_gcd(self):
        t = UniPoly([GaussianRational(0), GaussianRational(1)], EXACT)
        one = UniPoly([GaussianRational(1)], EXACT)
        a = (t - one) * (t - one) * (t + one)
        b = (t - one) * t
        g = unipoly_gcd(a, b)
        assert g.degree == 1
        assert g(GaussianRational(1)).is_zero()

    def test_reflect(self):
        a = UniPoly([1 + 0j, 2 + 0j], FLOAT)
        r = a.reflect(2)
        assert r.to_array().tolist() == [0, 2, 1]


class TestTranslate:
    def test_shift_moves_zero_to_origin(self):
        p = fixtures.p0()
        q = translate(p, GaussianRational(1), GaussianRational(1))
        assert complex(q(0j, 0j)) == 0
        # translate(p, a, b)(z) = p(a + z1, b + z2)
        w = complex(q(GaussianRational(1), GaussianRational(0)))
        assert w == complex(p(GaussianRational(2), GaussianRational(1)))


class TestHomogExpansion:
    def test_p0_forms(self):
        p = fixtures.p0()
        exp = homog_expand(p, (GaussianRational(1), GaussianRational(1)))
        assert exp.order == 1
        f1 = exp.form(1)
        # p(1-zeta1, 1-zeta2) = zeta1 + zeta2
        assert complex(f1((1 + 0j, 0j))) == 1
        assert complex(f1((0j, 1 + 0j))) == 1
        assert exp.form(0).is_zero()

    def test_resubstitute_round_trip(self):
        from bidisk.polycore import bivpoly_to_mpoly
        p = fixtures.ex1()
        exp = homog_expand(p, (GaussianRational(1), GaussianRational(1)))
        back = exp.resubstitute()
        assert back == bivpoly_to_mpoly(p)

    def test_zero_poly_order(self):
        z = BivPoly.zero_poly(EXACT)
        exp = homog_expand(z, (GaussianRational(1), GaussianRational(1)))
        assert exp.order is INF_ORDER

    def test_base_must_be_on_torus(self):
        with pytest.raises(PreconditionError):
            homog_expand(fixtures.p0(), (GaussianRational(2), GaussianRational(1)))

    def test_homog_divide(self):
        p = fixtures.p0()
        exp = homog_expand(p * p, (GaussianRational(1), GaussianRational(1)))
        bottom = exp.form(exp.order)
        single = homog_expand(p, (GaussianRational(1), GaussianRational(1))).form(1)
        q = homog_divide(bottom, single)
        assert q is not None
        assert q.total_degree() == 1
        assert homog_divide(single, bottom) is None


class TestJson:
    @given(exact_grids())
    @settings(max_examples=40, deadline=None)
    def test_exact_round_trip(self, grid):
        p = BivPoly.exact(grid)
        assert from_json_dict(to_json_dict(p)) == p

    def test_float_round_trip(self):
        p = fixtures.ex2()
        q = from_json_dict(to_json_dict(p))
        assert q.backend == FLOAT
        assert q.bidegree == p.bidegree
        for j in range(p.n + 1):
            for k in range(p.m + 1):
                assert abs(p.at(j, k) - q.at(j, k)) < 1e-15

    def test_exact_round_trip_preserves_rationals(self):
        p = BivPoly.exact([[rational(1, 3), GaussianRational(0, rational(2, 7))]])
        assert from_json_dict(to_json_dict(p)) == p
