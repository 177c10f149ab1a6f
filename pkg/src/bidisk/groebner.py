"""Buchberger's algorithm for bivariate ideals, generic over the backend.

Monomial order is graded lexicographic with z1 > z2.  Polynomials are dicts
{(e1, e2): coefficient}.  The FLOAT instantiation normalizes every
polynomial to unit max-coefficient and drops terms below a relative
threshold; exact arithmetic needs neither.

Sized for the ideals this package meets (bidegrees up to about (6,6)),
where simplicity beats asymptotics.
"""

from __future__ import annotations

import heapq

from .errors import PreconditionError
from .scalars import EXACT, FLOAT, GaussianRational
from .polycore import BivPoly


class ExactField:
    backend = EXACT
    eps = 0

    @staticmethod
    def is_zero(x):
        return x.is_zero()

    @staticmethod
    def clean(poly):
        return {e: c for e, c in poly.items() if not c.is_zero()}

    @staticmethod
    def normalize(poly):
        """Make the leading coefficient 1."""
        if not poly:
            return poly
        lead = poly[max(poly, key=_order_key)]
        inv = GaussianRational(1) / lead
        return {e: c * inv for e, c in poly.items()}


class FloatField:
    backend = FLOAT

    def __init__(self, eps=1e-10):
        self.eps = eps

    def is_zero(self, x):
        return abs(x) <= self.eps

    def clean(self, poly):
        if not poly:
            return poly
        scale = max(abs(c) for c in poly.values())
        if scale <= self.eps:
            return {}
        cut = self.eps * scale
        return {e: c for e, c in poly.items() if abs(c) > cut}

    def normalize(self, poly):
        if not poly:
            return poly
        lead = poly[max(poly, key=_order_key)]
        return {e: c / lead for e, c in poly.items()}


def _order_key(e):
    # graded lex with z1 > z2; for two variables (total, e1) is enough
    return (e[0] + e[1], e[0])


def leading_term(poly):
    e = max(poly, key=_order_key)
    return e, poly[e]


def _divides(a, b):
    return a[0] <= b[0] and a[1] <= b[1]


def _lcm(a, b):
    return (max(a[0], b[0]), max(a[1], b[1]))


def reduce_poly(f, basis, field):
    """Full normal form of f modulo the list of (lt, poly) pairs."""
    f = dict(f)
    out = {}
    while f:
        e, c = leading_term(f)
        reducer = None
        for lt, g in basis:
            if _divides(lt, e):
                reducer = (lt, g)
                break
        if reducer is None:
            out[e] = c
            del f[e]
            continue
        lt, g = reducer
        shift = (e[0] - lt[0], e[1] - lt[1])
        factor = c / g[lt]
        for ge, gc in g.items():
            te = (ge[0] + shift[0], ge[1] + shift[1])
            f[te] = f.get(te, _zero_like(gc)) - factor * gc
            if field.is_zero(f[te]):
                del f[te]
        f = field.clean(f)
    return field.clean(out)


def _zero_like(c):
    return GaussianRational(0) if isinstance(c, GaussianRational) else 0j


def buchberger(gens, field):
    """Reduced Groebner basis of the ideal generated by gens."""
    G = []
    for g in gens:
        g = field.clean(dict(g))
        if g:
            G.append(field.normalize(g))
    if not G:
        return []
    lts = [leading_term(g)[0] for g in G]
    pairs = []
    counter = 0
    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            counter += 1
            heapq.heappush(pairs, (_sugar(G, lts, i, j), counter, i, j))
    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        li, lj = lts[i], lts[j]
        if li[0] + li[1] == 0 or lj[0] + lj[1] == 0:
            continue
        lcm = _lcm(li, lj)
        if lcm == (li[0] + lj[0], li[1] + lj[1]):
            continue  # coprime leading terms
        s = _s_poly(G[i], G[j], li, lj, lcm, field)
        r = reduce_poly(s, list(zip(lts, G)), field)
        if not r:
            continue
        r = field.normalize(r)
        G.append(r)
        lts.append(leading_term(r)[0])
        k = len(G) - 1
        for i2 in range(k):
            counter += 1
            heapq.heappush(pairs, (_sugar(G, lts, i2, k), counter, i2, k))
    # interreduce
    reduced = []
    for i, g in enumerate(G):
        others = [(lts[j], G[j]) for j in range(len(G)) if j != i
                  and not (lts[j] == lts[i] and j < i)]
        keep = True
        for lt, _ in others:
            if _divides(lt, lts[i]):
                keep = False
                break
        if keep:
            reduced.append((lts[i], g))
    final = []
    for idx, (lt, g) in enumerate(reduced):
        rest = [reduced[j] for j in range(len(reduced)) if j != idx]
        tail = reduce_poly(_tail(g, lt), rest, field)
        tail[lt] = g[lt]
        final.append(field.normalize(field.clean(tail)))
    final.sort(key=lambda g: _order_key(leading_term(g)[0]))
    return final


def _tail(g, lt):
    return {e: c for e, c in g.items() if e != lt}


def _sugar(G, lts, i, j):
    lcm = _lcm(lts[i], lts[j])
    di = max(e[0] + e[1] for e in G[i])
    dj = max(e[0] + e[1] for e in G[j])
    si = di + (lcm[0] - lts[i][0]) + (lcm[1] - lts[i][1])
    sj = dj + (lcm[0] - lts[j][0]) + (lcm[1] - lts[j][1])
    return max(si, sj)


def _s_poly(f, g, lf, lg, lcm, field):
    out = {}
    sf = (lcm[0] - lf[0], lcm[1] - lf[1])
    sg = (lcm[0] - lg[0], lcm[1] - lg[1])
    cf, cg = f[lf], g[lg]
    for e, c in f.items():
        te = (e[0] + sf[0], e[1] + sf[1])
        out[te] = out.get(te, _zero_like(c)) + c / cf
    for e, c in g.items():
        te = (e[0] + sg[0], e[1] + sg[1])
        out[te] = out.get(te, _zero_like(c)) - c / cg
    return field.clean(out)


def standard_monomials(gb):
    """Monomials under the staircase; raises if the quotient is infinite."""
    lts = [leading_term(g)[0] for g in gb]
    if any(lt == (0, 0) for lt in lts):
        return []
    b1 = min((e[0] for e in lts if e[1] == 0), default=None)
    b2 = min((e[1] for e in lts if e[0] == 0), default=None)
    if b1 is None or b2 is None:
        raise PreconditionError("ideal is not zero-dimensional")
    out = []
    for e1 in range(b1):
        for e2 in range(b2):
            e = (e1, e2)
            if not any(_divides(lt, e) for lt in lts):
                out.append(e)
    out.sort(key=_order_key)
    return out


def multiplication_matrices(gb, basis, field):
    """Matrices of multiplication by z1 and z2 on the quotient basis.

    Returns (M1, M2) as nested lists; column b holds the coordinates of
    z_i * basis[b] reduced to normal form.
    """
    pairs = [(leading_term(g)[0], g) for g in gb]
    index = {e: i for i, e in enumerate(basis)}
    D = len(basis)
    mats = []
    for var in (0, 1):
        M = [[_zf(field) for _ in range(D)] for _ in range(D)]
        for col, e in enumerate(basis):
            te = (e[0] + 1, e[1]) if var == 0 else (e[0], e[1] + 1)
            r = reduce_poly({te: _one_like(field)}, pairs, field)
            for me, c in r.items():
                if me not in index:
                    raise PreconditionError("normal form left the quotient basis")
                M[index[me]][col] = c
        mats.append(M)
    return mats


def _zf(field):
    return GaussianRational(0) if field.backend == EXACT else 0j


def _one_like(field):
    return GaussianRational(1) if field.backend == EXACT else 1 + 0j


def bivpoly_to_dict(p):
    out = {}
    for j in range(p.n + 1):
        for k in range(p.m + 1):
            c = p.c[j][k]
            if isinstance(c, GaussianRational):
                if not c.is_zero():
                    out[(j, k)] = c
            elif c != 0:
                out[(j, k)] = c
    return out


def dict_to_bivpoly(d, backend):
    if not d:
        return BivPoly.zero_poly(backend)
    n = max(e[0] for e in d)
    m = max(e[1] for e in d)
    z = GaussianRational(0) if backend == EXACT else 0j
    grid = [[z] * (m + 1) for _ in range(n + 1)]
    for (j, k), c in d.items():
        grid[j][k] = c
    return BivPoly(grid, backend)
