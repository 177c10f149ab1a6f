"""Worked examples used across the test suite and the demo scripts.

Each function builds a fresh object so callers can't contaminate each
other through shared coefficient lists.
"""

import math

from .polycore import BivPoly
from .scalars import rational, GaussianRational


def p0():
    """2 - z1 - z2, the running example: semi-stable, torus zero at (1,1)."""
    return BivPoly.exact([[2, -1], [-1, 0]])


def one_12():
    """The constant 1 carried at declared bidegree (1,2)."""
    return BivPoly.exact([[1, 0, 0], [0, 0, 0]])


def ex1():
    """4 - z1 - 3 z2 - z1 z2 + z2^2, bidegree (1,2).

    Unique Agler pair; single torus zero (1,1) of multiplicity 4; the
    boundary ladder at (1,1) reaches k=2.
    """
    return BivPoly.exact([[4, -3, 1], [-1, -1, 0]])


def ex2():
    """Bidegree (2,2) with coefficients involving sqrt(5); float backend.

    Restricting the associated inner function to two embedded disks gives
    disk automorphisms.  Torus zeros: (1,1) with multiplicity 6 and
    (-1,-1) with multiplicity 2.
    """
    s5 = math.sqrt(5.0)
    row0 = [1.0, (-9.0 - 6.0 * s5) / 18.0, (3.0 * s5 - 2.0) / 18.0]
    row1 = [(6.0 * s5 - 9.0) / 18.0, -7.0 / 9.0, 0.5]
    row2 = [(-3.0 * s5 - 2.0) / 18.0, 0.5, 0.0]
    return BivPoly.from_complex([row0, row1, row2])


def ex3():
    """4 - 5 z1 - 2 z2 + 2 z1 z2 + 3 z1^2 - z1^2 z2 - z1^3 z2, bidegree (3,1).

    Torus zero (1,1) of multiplicity 6; boundary ladder reaches k=4 but
    not 5.
    """
    return BivPoly.exact([[4, -2], [-5, 2], [3, -1], [0, -1]])


def goodman():
    """The three classical numerator/denominator pairs over 2 - z1 - z2.

    Returns [(name, q, p)]: g1 has absolutely summable Fourier
    coefficients, g2 square-summable but not summable, g3 neither.
    """
    den = p0()
    one_minus_z1 = BivPoly.exact([[1], [-1]])
    one_minus_z2 = BivPoly.exact([[1, -1]])
    q1 = BivPoly.exact([[1]])
    for _ in range(8):
        q1 = q1 * one_minus_z1
    for _ in range(8):
        q1 = q1 * one_minus_z2
    q2 = one_minus_z1 * one_minus_z2
    q3 = BivPoly.exact([[2]])
    return [("g1", q1, den), ("g2", q2, den), ("g3", q3, den)]


def stable_fixtures():
    """Polynomials zero-free on the closed bidisk, for the Gram model."""
    return [
        ("one_12", one_12()),
        ("4-z1-z2", BivPoly.exact([[4, -1], [-1, 0]])),
        ("3-z1-z2", BivPoly.exact([[3, -1], [-1, 0]])),
        ("5-2z1-2z2", BivPoly.exact([[5, -2], [-2, 0]])),
        ("6-z1-2z2-z1z2", BivPoly.exact([[6, -2], [-1, -1]])),
    ]


def atoms():
    """Semi-stable building blocks with Gaussian-rational torus zeros.

    Products of up to three of these (within bidegree (3,3)) stay
    semi-stable as long as no two factors share a reflected factor; the
    random-product generator checks that exactly.
    """
    i1 = GaussianRational(0, 1)
    return [
        BivPoly.exact([[2, -1], [-1, 0]]),            # zero (1,1)
        BivPoly.exact([[2, -1], [1, 0]]),             # zero (-1,1)
        BivPoly.exact([[2, 1], [-1, 0]]),             # zero (1,-1)
        BivPoly.exact([[2, 1], [1, 0]]),              # zero (-1,-1)
        BivPoly.exact([[2, -1], [i1, 0]]),            # zero (i,1)
        BivPoly.exact([[2, i1], [-1, 0]]),            # zero (1,i)
        BivPoly.exact([[3, -1], [-1, 0]]),            # stable, no torus zero
        BivPoly.exact([[2], [-1]]),                   # 2-z1, bidegree (1,0)
        BivPoly.exact([[2, -1]]),                     # 2-z2, bidegree (0,1)
        ex1(),                                        # bidegree (1,2)
    ]


def rational_torus_point():
    """A non-trivial exact torus point, (3/5 + 4/5 i, 1)."""
    return (GaussianRational(rational(3, 5), rational(4, 5)), GaussianRational(1))


def random_semistable_products(count, seed=0, max_bidegree=(3, 3)):
    """Random atom products within max_bidegree, certified semi-stable.

    Atoms are individually zero-free on the open bidisk, so products are
    too; what can fail for a product is coprimality with its reflection,
    and that is checked exactly, with failing draws redrawn.
    """
    import random as _random

    from .polycore import gcd, reflect

    rng = _random.Random(seed)
    pool = atoms()
    out = []
    guard = 0
    while len(out) < count:
        guard += 1
        if guard > 100 * (count + 1):
            raise RuntimeError("product generator keeps drawing degenerate pairs")
        p = pool[rng.randrange(len(pool))]
        for _ in range(rng.randint(0, 2)):
            q = pool[rng.randrange(len(pool))]
            n, m = p.bidegree
            qn, qm = q.bidegree
            if n + qn > max_bidegree[0] or m + qm > max_bidegree[1]:
                continue
            p = p * q
        if gcd(p, reflect(p)).natural_bidegree() != (0, 0):
            continue
        out.append(p)
    return out
