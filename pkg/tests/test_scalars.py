import pytest
from hypothesis import given, strategies as st

from bidisk.scalars import (EXACT, FLOAT, BackendMismatch, GaussianRational,
                            backend_of, parse_unimodular, rational,
                            scalar_from_pair, scalar_to_pair)


def gr(re, im=0):
    return GaussianRational(re, im)


small_rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussians = st.builds(
    lambda a, b: GaussianRational(rational(a.numerator, a.denominator),
                                  rational(b.numerator, b.denominator)),
    small_rats, small_rats)


class TestArithmetic:
    def test_basic_ops(self):
        a = gr(1, 2)
        b = gr(3, -1)
        assert a + b == gr(4, 1)
        assert a - b == gr(-2, 3)
        assert a * b == gr(5, 5)
        assert (a * b) / b == a

    def test_integer_mixing(self):
        assert gr(2, 1) + 3 == gr(5, 1)
        assert 3 * gr(2, 1) == gr(6, 3)
        assert 1 / gr(0, 1) == gr(0, -1)
        assert 5 - gr(2, 2) == gr(3, -2)

    def test_pow(self):
        assert gr(0, 1) ** 4 == gr(1, 0)
        assert gr(1, 1) ** 2 == gr(0, 2)
        with pytest.raises(ValueError):
            gr(1, 1) ** -1

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            gr(1) / gr(0)

    @given(gaussians, gaussians)
    def test_mul_commutes_and_conjugation_distributes(self, a, b):
        assert a * b == b * a
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()

    @given(gaussians)
    def test_abs2_matches_conjugate_product(self, a):
        assert a * a.conjugate() == GaussianRational(a.abs2(), 0)

    @given(gaussians, gaussians)
    def test_division_inverts_multiplication(self, a, b):
        if b.is_zero():
            return
        assert (a * b) / b == a


class TestBackendDiscipline:
    def test_float_contamination_rejected(self):
        with pytest.raises(BackendMismatch):
            gr(1) + 0.5
        with pytest.raises(BackendMismatch):
            gr(1) * (1 + 1j)
        with pytest.raises(BackendMismatch):
            rational(0.5)

    def test_backend_of(self):
        assert backend_of(gr(1)) == EXACT
        assert backend_of(1 + 0j) == FLOAT
        assert backend_of(2) == FLOAT

    def test_complex_conversion(self):
        z = GaussianRational(rational(3, 5), rational(4, 5))
        assert abs(complex(z) - (0.6 + 0.8j)) < 1e-15


class TestSerialization:
    def test_exact_round_trip(self):
        z = GaussianRational(rational(3, 7), rational(-2, 5))
        pair = scalar_to_pair(z)
        assert all(isinstance(x, str) for x in pair)
        assert scalar_from_pair(pair, EXACT) == z

    def test_float_round_trip(self):
        pair = scalar_to_pair(1.25 - 2j)
        assert scalar_from_pair(pair, FLOAT) == 1.25 - 2j

    def test_exact_refuses_float_pairs(self):
        with pytest.raises(ValueError):
            scalar_from_pair([0.5, 0], EXACT)

    def test_float_accepts_fraction_strings(self):
        assert scalar_from_pair(["1/2", "-1/4"], FLOAT) == 0.5 - 0.25j


class TestParseUnimodular:
    def test_plain_points(self):
        assert parse_unimodular("1") == gr(1)
        assert parse_unimodular("-1") == gr(-1)
        assert parse_unimodular("i") == gr(0, 1)
        assert parse_unimodular("-i") == gr(0, -1)

    def test_pythagorean_point(self):
        z = parse_unimodular("3/5+4/5i")
        assert z == GaussianRational(rational(3, 5), rational(4, 5))
        assert z.abs2() == 1

    def test_rejects_off_circle(self):
        with pytest.raises(ValueError):
            parse_unimodular("2")
        with pytest.raises(ValueError):
            parse_unimodular("1/2+1/2i")
        with pytest.raises(ValueError):
            parse_unimodular("")
