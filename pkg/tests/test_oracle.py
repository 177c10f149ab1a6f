import math

import pytest

from bidisk import fixtures
from bidisk.errors import CrossCheckError, PreconditionError
from bidisk.oracle import (CONVERGENT, DIVERGENT, GROWTH, INCONCLUSIVE,
                           PLATEAU, fourier_report, l2_quadrature,
                           resultant_multiplicity)
from bidisk.polycore import BivPoly, reflect
from bidisk.scalars import GaussianRational


class TestL2Quadrature:
    def test_square_integrable_ratios(self):
        cases = dict((name, (q, p)) for name, q, p in fixtures.goodman())
        v1 = l2_quadrature(*cases["g1"], max_grid=1024)
        v2 = l2_quadrature(*cases["g2"], max_grid=1024)
        assert v1.verdict == CONVERGENT
        assert v2.verdict == CONVERGENT
        # the middle ratio has a computable L2 norm: ||G2||^2 = 1/2
        assert abs(v2.estimates[-1][1] - 0.5) < 1e-3

    def test_divergent_ratio(self):
        cases = dict((name, (q, p)) for name, q, p in fixtures.goodman())
        v3 = l2_quadrature(*cases["g3"], max_grid=1024)
        assert v3.verdict == DIVERGENT
        assert v3.growth is not None and v3.growth > 0.15
        assert not bool(v3)

    def test_zero_numerator(self):
        p = fixtures.p0()
        z = BivPoly.zero_poly("exact")
        v = l2_quadrature(z, p)
        assert v.verdict == CONVERGENT
        assert v.estimates[-1][1] == 0.0

    def test_nonvanishing_denominator_smooth_value(self):
        # q/p with p zero-free on the closed bidisk: plain quadrature of a
        # smooth function; estimate stabilizes fast
        p = BivPoly.exact([[3, -1], [-1, 0]])
        q = BivPoly.exact([[1]])
        v = l2_quadrature(q, p, max_grid=512)
        assert v.verdict == CONVERGENT

    def test_denominator_with_interior_zero_rejected(self):
        bad = BivPoly.exact([[-1], [2]])         # zero at z1 = 1/2
        with pytest.raises(PreconditionError):
            l2_quadrature(BivPoly.exact([[1]]), bad)


class TestFourierReport:
    def test_polynomial_recovered_exactly(self):
        # q/p with p = 1: coefficients of q itself
        q = fixtures.ex1()
        one = BivPoly.exact([[1]])
        rep = fourier_report(q, one, box=(4, 4))
        for j in range(5):
            for k in range(5):
                want = complex(q.at(j, k)) if j <= q.n and k <= q.m else 0.0
                assert abs(rep.coefficients[j][k] - want) < 1e-10

    def test_geometric_series_closed_form(self):
        # 2/(2 - z1 - z2) has coefficients binom(j+k, j) / 2^(j+k)
        cases = dict((name, (q, p)) for name, q, p in fixtures.goodman())
        rep = fourier_report(*cases["g3"], box=(8, 8))
        for j in range(9):
            for k in range(9):
                want = math.comb(j + k, j) / 2 ** (j + k)
                assert abs(rep.coefficients[j][k] - want) < 1e-6

    def test_goodman_trends(self):
        cases = dict((name, (q, p)) for name, q, p in fixtures.goodman())
        r1 = fourier_report(*cases["g1"], box=(48, 48))
        assert r1.l1_trend == PLATEAU
        r2 = fourier_report(*cases["g2"], box=(48, 48))
        assert r2.l2_trend == PLATEAU
        assert r2.l1_trend == GROWTH
        r3 = fourier_report(*cases["g3"], box=(48, 48))
        assert r3.l2_trend == GROWTH

    def test_parseval_consistency(self):
        # the l2 partial sums of G2's coefficients approach ||G2||^2 = 1/2
        cases = dict((name, (q, p)) for name, q, p in fixtures.goodman())
        rep = fourier_report(*cases["g2"], box=(64, 64))
        assert abs(rep.l2_partials[-1] - 0.5) < 1e-2


class TestResultantMultiplicity:
    def test_fixture_values(self):
        one = GaussianRational(1)
        for name, want in (("p0", 2), ("ex1", 4), ("ex3", 6)):
            p = getattr(fixtures, name)()
            got = resultant_multiplicity(p, reflect(p), (one, one), seed=5)
            assert got == want

    def test_float_rejected(self):
        p = fixtures.ex2()
        one = GaussianRational(1)
        with pytest.raises(PreconditionError):
            resultant_multiplicity(p, reflect(p), (one, one))

    def test_non_common_zero_rejected(self):
        p = fixtures.p0()
        pt = (GaussianRational(-1), GaussianRational(1))
        with pytest.raises(PreconditionError):
            resultant_multiplicity(p, reflect(p), pt)

    def test_seed_determinism(self):
        p = fixtures.ex1()
        one = GaussianRational(1)
        a = resultant_multiplicity(p, reflect(p), (one, one), seed=123)
        b = resultant_multiplicity(p, reflect(p), (one, one), seed=123)
        assert a == b
