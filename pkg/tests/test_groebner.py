import numpy as np
import pytest

from bidisk import groebner as gb
from bidisk import fixtures
from bidisk.polycore import BivPoly, reflect
from bidisk.scalars import EXACT, FLOAT, GaussianRational


def _gb_of(polys, field):
    return gb.buchberger([gb.bivpoly_to_dict(p) for p in polys], field)


class TestBuchberger:
    def test_trivial_ideal(self):
        one = BivPoly.exact([[1]])
        basis = _gb_of([one], gb.ExactField())
        assert gb.standard_monomials(basis) == []

    def test_point_ideal(self):
        # <z1 - 1, z2 - 1> has a single standard monomial
        a = BivPoly.exact([[-1], [1]])
        b = BivPoly.exact([[-1, 1]])
        basis = _gb_of([a, b], gb.ExactField())
        assert gb.standard_monomials(basis) == [(0, 0)]

    def test_fat_point(self):
        # <z1^2, z1 z2, z2^2> has quotient {1, z1, z2}
        polys = [BivPoly.exact(g) for g in
                 ([[0], [0], [1]], [[0, 0], [0, 1]], [[0, 0, 1]])]
        basis = _gb_of(polys, gb.ExactField())
        monos = set(gb.standard_monomials(basis))
        assert monos == {(0, 0), (1, 0), (0, 1)}

    def test_normal_form_membership(self):
        a = BivPoly.exact([[-1], [1]])          # z1 - 1
        b = BivPoly.exact([[-1, 1]])            # z2 - 1
        F = gb.ExactField()
        basis = _gb_of([a, b], F)
        pairs = [(gb.leading_term(g)[0], g) for g in basis]
        member = BivPoly.exact([[1], [-2], [1]])  # (1 - z1)^2
        nf = gb.reduce_poly(gb.bivpoly_to_dict(member), pairs, F)
        assert not nf
        non_member = BivPoly.exact([[1], [1]])
        nf2 = gb.reduce_poly(gb.bivpoly_to_dict(non_member), pairs, F)
        assert nf2


class TestMultiplicationMatrices:
    def test_eigenvalues_are_zero_coordinates(self):
        p = fixtures.p0()
        q = reflect(p)
        F = gb.ExactField()
        basis = _gb_of([p, q], F)
        monos = gb.standard_monomials(basis)
        assert len(monos) == 2          # Bezout: 2*1*1 = 2
        M1, M2 = gb.multiplication_matrices(basis, monos, F)
        e1 = np.linalg.eigvals(np.array(M1, dtype=complex))
        e2 = np.linalg.eigvals(np.array(M2, dtype=complex))
        # both coordinates of the unique common zero (1,1), doubled
        assert np.allclose(sorted(e1.real), [1, 1], atol=1e-9)
        assert np.allclose(sorted(e2.real), [1, 1], atol=1e-9)

    def test_matrices_commute(self):
        p = fixtures.ex1()
        q = reflect(p)
        F = gb.ExactField()
        basis = _gb_of([p, q], F)
        monos = gb.standard_monomials(basis)
        M1 = np.array(gb.multiplication_matrices(basis, monos, F)[0], dtype=complex)
        M2 = np.array(gb.multiplication_matrices(basis, monos, F)[1], dtype=complex)
        assert np.linalg.norm(M1 @ M2 - M2 @ M1) < 1e-9


class TestFloatField:
    def test_float_point_ideal(self):
        a = BivPoly.from_complex([[-0.5], [1.0]])    # z1 - 1/2
        b = BivPoly.from_complex([[-0.25, 1.0]])     # z2 - 1/4
        F = gb.FloatField(1e-10)
        basis = _gb_of([a, b], F)
        monos = gb.standard_monomials(basis)
        assert monos == [(0, 0)]
        M1, M2 = gb.multiplication_matrices(basis, monos, F)
        assert abs(M1[0][0] - 0.5) < 1e-12
        assert abs(M2[0][0] - 0.25) < 1e-12

    def test_float_quotient_dimension(self):
        p = fixtures.ex2()
        q = reflect(p)
        F = gb.FloatField(1e-10)
        basis = _gb_of([p, q], F)
        assert len(gb.standard_monomials(basis)) == 8  # Bezout: 2*2*2
