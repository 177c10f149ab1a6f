import pytest

from bidisk import fixtures
from bidisk.errors import PreconditionError
from bidisk.polycore import BivPoly, reflect
from bidisk.stability import check_semistable, require_semistable


class TestSemistable:
    def test_fixture_family(self):
        for p in [fixtures.p0(), fixtures.ex1(), fixtures.ex3()]:
            rep = check_semistable(p)
            assert rep.zero_free_verified
            assert rep.gcd_trivial
            assert rep.gcd_checked
            assert not rep.witnesses

    def test_float_fixture(self):
        rep = check_semistable(fixtures.ex2())
        assert rep.zero_free_verified
        assert rep.gcd_trivial

    def test_stable_family(self):
        for _name, p in fixtures.stable_fixtures():
            rep = check_semistable(p)
            assert rep.zero_free_verified
            assert rep.min_modulus_observed > 0

    def test_interior_zero_detected(self):
        p = BivPoly.exact([[-1], [2]])          # 2 z1 - 1, zero at z1 = 1/2
        rep = check_semistable(p)
        assert not rep.zero_free_verified
        assert rep.witnesses
        w1, w2 = rep.witnesses[0]
        # a None coordinate means the zero slice is independent of it
        assert abs(complex(p.to_float()(w1, w2 if w2 is not None else 0j))) < 1e-6

    def test_interior_zero_in_second_variable(self):
        p = BivPoly.exact([[-1, 0, 4]])         # 4 z2^2 - 1
        rep = check_semistable(p)
        assert not rep.zero_free_verified

    def test_self_reflective_product_fails_gcd(self):
        p = fixtures.p0()
        q = p * reflect(p)                      # contains both factors
        rep = check_semistable(q)
        assert not rep.gcd_trivial

    def test_require_semistable(self):
        require_semistable(fixtures.p0())
        with pytest.raises(PreconditionError):
            require_semistable(BivPoly.exact([[-1], [2]]))

    def test_atoms_all_semistable(self):
        for p in fixtures.atoms():
            rep = check_semistable(p)
            assert rep.zero_free_verified, repr(p)
            assert rep.gcd_trivial, repr(p)

    def test_random_products_semistable(self):
        for p in fixtures.random_semistable_products(8, seed=3):
            rep = check_semistable(p, resolution=(32, 256))
            assert rep.zero_free_verified
            assert rep.gcd_trivial
