"""Bivariate polynomials with a declared bidegree, on two coefficient backends.

The declared bidegree matters: reflection of the constant 1 at bidegree
(1,2) is the monomial z1*z2^2, not 1.  All operations preserve or combine
declared bidegrees explicitly.

Coefficient grids are (n+1) x (m+1) nested lists, entry [j][k] holding the
coefficient of z1^j z2^k.  EXACT grids hold GaussianRational, FLOAT grids
hold python complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, PreconditionError
from .scalars import (EXACT, FLOAT, BackendMismatch, GaussianRational,
                      scalar_from_pair, scalar_to_pair, zero, one)

INF_ORDER = math.inf


def _coerce(x, backend):
    if backend == EXACT:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, int):
            return GaussianRational(x, 0)
        if isinstance(x, (float, complex)):
            raise BackendMismatch("float coefficient in EXACT grid")
        return GaussianRational(x, 0)
    if isinstance(x, GaussianRational):
        return complex(x)
    return complex(x)


class UniPoly:
    """Dense univariate polynomial over one backend, c[k] the z^k coefficient."""

    __slots__ = ("c", "backend")

    def __init__(self, coeffs, backend):
        self.backend = backend
        c = [_coerce(x, backend) for x in coeffs]
        while len(c) > 1 and _is0(c[-1]):
            c.pop()
        if not c:
            c = [zero(backend)]
        self.c = c

    @property
    def degree(self):
        return 0 if self.is_zero() else len(self.c) - 1

    def is_zero(self):
        return len(self.c) == 1 and _is0(self.c[0])

    def __eq__(self, other):
        return (isinstance(other, UniPoly) and self.backend == other.backend
                and self.c == other.c)

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        z = zero(self.backend)
        a = self.c + [z] * (n - len(self.c))
        b = other.c + [z] * (n - len(other.c))
        return UniPoly([x + y for x, y in zip(a, b)], self.backend)

    def __sub__(self, other):
        n = max(len(self.c), len(other.c))
        z = zero(self.backend)
        a = self.c + [z] * (n - len(self.c))
        b = other.c + [z] * (n - len(other.c))
        return UniPoly([x - y for x, y in zip(a, b)], self.backend)

    def __neg__(self):
        return UniPoly([-x for x in self.c], self.backend)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return self.scale(other)
        z = zero(self.backend)
        out = [z] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if _is0(a):
                continue
            for j, b in enumerate(other.c):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out, self.backend)

    def scale(self, s):
        s = _coerce(s, self.backend)
        return UniPoly([x * s for x in self.c], self.backend)

    def __call__(self, x):
        if self.backend == EXACT and isinstance(x, (GaussianRational, int)):
            if isinstance(x, int):
                x = GaussianRational(x, 0)
            acc = zero(EXACT)
            for ck in reversed(self.c):
                acc = acc * x + ck
            return acc
        x = complex(x)
        acc = 0j
        for ck in reversed(self.c):
            acc = acc * x + complex(ck)
        return acc

    def divmod(self, other, tol=0.0):
        """Polynomial division; exact over EXACT, thresholded over FLOAT."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        z = zero(self.backend)
        rem = list(self.c)
        q = [z] * max(1, len(rem) - len(other.c) + 1)
        d = other.degree
        lead = other.c[d]
        for k in range(len(rem) - 1 - d, -1, -1):
            coeff = rem[k + d]
            if _is0(coeff, tol):
                continue
            factor = coeff / lead
            q[k] = factor
            for i, b in enumerate(other.c):
                rem[k + i] = rem[k + i] - factor * b
        return UniPoly(q, self.backend), UniPoly(rem, self.backend)

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(one(self.backend) / self.c[self.degree])

    def deriv(self):
        if len(self.c) == 1:
            return UniPoly([zero(self.backend)], self.backend)
        return UniPoly([self.c[k] * k for k in range(1, len(self.c))], self.backend)

    def reflect(self, degree=None):
        """z^d * conj(p(1/conj(z))) at declared degree d."""
        d = self.degree if degree is None else degree
        if d < self.degree:
            raise PreconditionError("reflection degree below natural degree")
        z = zero(self.backend)
        padded = self.c + [z] * (d + 1 - len(self.c))
        return UniPoly([_conj(x) for x in reversed(padded)], self.backend)

    def to_array(self):
        return np.array([complex(x) for x in self.c], dtype=complex)

    def __repr__(self):
        return "UniPoly(%r)" % (self.c,)


def _is0(x, tol=0.0):
    if isinstance(x, GaussianRational):
        return x.is_zero()
    return abs(x) <= tol


def _conj(x):
    if isinstance(x, GaussianRational):
        return x.conjugate()
    return x.conjugate() if isinstance(x, complex) else complex(x).conjugate()


def unipoly_gcd(a, b):
    """Monic gcd over the exact field by the Euclidean algorithm."""
    if a.backend != EXACT or b.backend != EXACT:
        raise PreconditionError("exact gcd requires the EXACT backend")
    f, g = a, b
    while not g.is_zero():
        _, r = f.divmod(g)
        f, g = g, r
    return f.monic() if not f.is_zero() else f


class BivPoly:
    """Bivariate polynomial with declared bidegree and one coefficient backend."""

    __slots__ = ("c", "n", "m", "backend")

    def __init__(self, grid, backend, bidegree=None):
        rows = [[_coerce(x, backend) for x in row] for row in grid]
        if not rows or not rows[0]:
            rows = [[zero(backend)]]
        width = max(len(r) for r in rows)
        z = zero(backend)
        for r in rows:
            r.extend([z] * (width - len(r)))
        if bidegree is not None:
            n, m = bidegree
            if n + 1 < len(rows) or m + 1 < width:
                nat = _natural(rows)
                if nat[0] > n or nat[1] > m:
                    raise PreconditionError(
                        "declared bidegree %r below natural degree %r" % ((n, m), nat))
                rows = [r[:m + 1] for r in rows[:n + 1]]
                width = m + 1
            while len(rows) < n + 1:
                rows.append([z] * width)
            if width < m + 1:
                for r in rows:
                    r.extend([z] * (m + 1 - width))
                width = m + 1
        self.c = rows
        self.n = len(rows) - 1
        self.m = width - 1
        self.backend = backend

    # -- constructors ---------------------------------------------------

    @classmethod
    def exact(cls, grid, bidegree=None):
        return cls(grid, EXACT, bidegree)

    @classmethod
    def from_complex(cls, grid, bidegree=None):
        return cls(grid, FLOAT, bidegree)

    @classmethod
    def zero_poly(cls, backend, bidegree=(0, 0)):
        n, m = bidegree
        z = zero(backend)
        return cls([[z] * (m + 1) for _ in range(n + 1)], backend, bidegree)

    # -- basic structure ------------------------------------------------

    @property
    def bidegree(self):
        return (self.n, self.m)

    def at(self, j, k):
        return self.c[j][k]

    def natural_bidegree(self):
        return _natural(self.c)

    def is_zero(self):
        return all(_is0(x) for row in self.c for x in row)

    def with_bidegree(self, n, m):
        return BivPoly(self.c, self.backend, (n, m))

    def trimmed(self):
        return self.with_bidegree(*self.natural_bidegree())

    def __eq__(self, other):
        return (isinstance(other, BivPoly) and self.backend == other.backend
                and self.bidegree == other.bidegree and self.c == other.c)

    def max_norm(self):
        return max(abs(complex(x)) for row in self.c for x in row)

    # -- ring operations ------------------------------------------------

    def _check(self, other):
        if self.backend != other.backend:
            raise BackendMismatch("mixed EXACT/FLOAT polynomial arithmetic")

    def __add__(self, other):
        self._check(other)
        n, m = max(self.n, other.n), max(self.m, other.m)
        z = zero(self.backend)
        g = [[z] * (m + 1) for _ in range(n + 1)]
        for j in range(self.n + 1):
            for k in range(self.m + 1):
                g[j][k] = g[j][k] + self.c[j][k]
        for j in range(other.n + 1):
            for k in range(other.m + 1):
                g[j][k] = g[j][k] + other.c[j][k]
        return BivPoly(g, self.backend, (n, m))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BivPoly([[-x for x in row] for row in self.c], self.backend,
                       self.bidegree)

    def __mul__(self, other):
        if not isinstance(other, BivPoly):
            return self.scale(other)
        self._check(other)
        n, m = self.n + other.n, self.m + other.m
        z = zero(self.backend)
        g = [[z] * (m + 1) for _ in range(n + 1)]
        for j1 in range(self.n + 1):
            for k1 in range(self.m + 1):
                a = self.c[j1][k1]
                if _is0(a):
                    continue
                for j2 in range(other.n + 1):
                    for k2 in range(other.m + 1):
                        b = other.c[j2][k2]
                        if _is0(b):
                            continue
                        g[j1 + j2][k1 + k2] = g[j1 + j2][k1 + k2] + a * b
        return BivPoly(g, self.backend, (n, m))

    def scale(self, s):
        s = _coerce(s, self.backend)
        return BivPoly([[x * s for x in row] for row in self.c], self.backend,
                       self.bidegree)

    def conj_coeffs(self):
        return BivPoly([[_conj(x) for x in row] for row in self.c],
                       self.backend, self.bidegree)

    # -- evaluation -----------------------------------------------------

    def __call__(self, z1, z2):
        if self.backend == EXACT and isinstance(z1, GaussianRational) \
                and isinstance(z2, GaussianRational):
            acc = zero(EXACT)
            for row in reversed(self.c):
                racc = zero(EXACT)
                for ck in reversed(row):
                    racc = racc * z2 + ck
                acc = acc * z1 + racc
            return acc
        z1, z2 = complex(z1), complex(z2)
        acc = 0j
        for row in reversed(self.to_array()):
            racc = 0j
            for ck in reversed(row):
                racc = racc * z2 + ck
            acc = acc * z1 + racc
        return acc

    def eval_grid(self, Z1, Z2):
        """Vectorized evaluation on numpy arrays of points."""
        A = self.to_array()
        acc = np.zeros(np.broadcast(Z1, Z2).shape, dtype=complex)
        for row in A[::-1]:
            racc = np.zeros_like(acc)
            for ck in row[::-1]:
                racc = racc * Z2 + ck
            acc = acc * Z1 + racc
        return acc

    def to_array(self):
        return np.array([[complex(x) for x in row] for row in self.c],
                        dtype=complex)

    # -- calculus -------------------------------------------------------

    def deriv1(self):
        if self.n == 0:
            return BivPoly.zero_poly(self.backend, (0, self.m))
        g = [[self.c[j][k] * j for k in range(self.m + 1)]
             for j in range(1, self.n + 1)]
        return BivPoly(g, self.backend, (self.n - 1, self.m))

    def deriv2(self):
        if self.m == 0:
            return BivPoly.zero_poly(self.backend, (self.n, 0))
        g = [[self.c[j][k] * k for k in range(1, self.m + 1)]
             for j in range(self.n + 1)]
        return BivPoly(g, self.backend, (self.n, self.m - 1))

    # -- z2-main view (for gcd / resultants) ------------------------------

    def z2_main(self):
        """View as a polynomial in z2 with UniPoly-in-z1 coefficients."""
        return [UniPoly([self.c[j][k] for j in range(self.n + 1)], self.backend)
                for k in range(self.m + 1)]

    def swap_vars(self):
        g = [[self.c[j][k] for j in range(self.n + 1)] for k in range(self.m + 1)]
        return BivPoly(g, self.backend, (self.m, self.n))

    def to_float(self):
        if self.backend == FLOAT:
            return self
        return BivPoly([[complex(x) for x in row] for row in self.c], FLOAT,
                       self.bidegree)

    def __repr__(self):
        return "BivPoly(%s, bidegree=%s, %s)" % (pretty(self), self.bidegree,
                                                 self.backend)


def _natural(rows):
    n = m = 0
    any_nonzero = False
    for j, row in enumerate(rows):
        for k, x in enumerate(row):
            if not _is0(x):
                any_nonzero = True
                n = max(n, j)
                m = max(m, k)
    return (n, m) if any_nonzero else (0, 0)


def pretty(p, var1="z1", var2="z2"):
    """Short human-readable form, mostly for CLI text output."""
    terms = []
    for j, row in enumerate(p.c):
        for k, x in enumerate(row):
            if _is0(x):
                continue
            mono = ""
            if j:
                mono += var1 + ("^%d" % j if j > 1 else "")
            if k:
                mono += ("*" if mono else "") + var2 + ("^%d" % k if k > 1 else "")
            if isinstance(x, GaussianRational):
                s = repr(x)
            else:
                s = "%.6g" % x.real if abs(x.imag) < 1e-14 else "(%.6g%+.6gj)" % (x.real, x.imag)
            terms.append(s + ("*" + mono if mono else ""))
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# reflection and the z2 flip
# ---------------------------------------------------------------------------

def reflect(p):
    """Reflection z1^n z2^m conj(p(1/conj(z1), 1/conj(z2))) at the declared bidegree."""
    g = [[_conj(p.c[p.n - j][p.m - k]) for k in range(p.m + 1)]
         for j in range(p.n + 1)]
    return BivPoly(g, p.backend, p.bidegree)


def flip2(p):
    """q(z) = z2^m p(z1, 1/z2): the coefficient grid reversed along the z2 axis."""
    g = [[p.c[j][p.m - k] for k in range(p.m + 1)] for j in range(p.n + 1)]
    return BivPoly(g, p.backend, p.bidegree)


# ---------------------------------------------------------------------------
# gcd over the exact backend (z2 as main variable)
# ---------------------------------------------------------------------------

def _content(fs):
    g = UniPoly([0], EXACT)
    for f in fs:
        g = unipoly_gcd(g, f)
        if g.degree == 0 and not g.is_zero():
            break
    return g


def _divide_out(fs, d):
    out = []
    for f in fs:
        q, r = f.divmod(d)
        if not r.is_zero():
            raise PreconditionError("content division left a remainder")
        out.append(q)
    return out


def _prem(f, g):
    """Pseudo-remainder of z2-main coefficient lists of UniPoly."""
    f = list(f)
    dg = len(g) - 1
    lead = g[-1]
    while len(f) - 1 >= dg and not all(x.is_zero() for x in f):
        while len(f) > 1 and f[-1].is_zero():
            f.pop()
        df = len(f) - 1
        if df < dg:
            break
        top = f[-1]
        f = [x * lead for x in f]
        for i in range(dg + 1):
            f[df - dg + i] = f[df - dg + i] - top * g[i]
        f.pop()
        if not f:
            f = [UniPoly([0], EXACT)]
    return f


def gcd(p, q):
    """Exact gcd of two bivariate polynomials, primitive and normalized.

    Normalization makes the lexicographically-last nonzero grid entry
    (largest z1 power, then largest z2 power) equal to 1.
    """
    if p.backend != EXACT or q.backend != EXACT:
        raise PreconditionError("gcd requires the EXACT backend")
    if p.is_zero():
        return _normalize_gcd(q)
    if q.is_zero():
        return _normalize_gcd(p)
    f, g = p.trimmed().z2_main(), q.trimmed().z2_main()
    cf, cg = _content(f), _content(g)
    f, g = _divide_out(f, cf), _divide_out(g, cg)
    if len(f) < len(g):
        f, g = g, f
    while not all(x.is_zero() for x in g):
        r = _prem(f, g)
        while len(r) > 1 and r[-1].is_zero():
            r.pop()
        if not all(x.is_zero() for x in r):
            cr = _content(r)
            r = _divide_out(r, cr)
        f, g = g, r
    cont = unipoly_gcd(cf, cg)
    # assemble cont(z1) * prim(z1, z2) back into a grid
    prim = f
    n1 = max(u.degree for u in prim)
    rows = [[GaussianRational(0)] * len(prim) for _ in range(n1 + cont.degree + 1)]
    for k, u in enumerate(prim):
        w = u * cont
        for j, cj in enumerate(w.c):
            rows[j][k] = rows[j][k] + cj
    return _normalize_gcd(BivPoly(rows, EXACT).trimmed())


def _normalize_gcd(p):
    p = p.trimmed()
    if p.is_zero():
        return p
    lead = None
    for j in range(p.n, -1, -1):
        for k in range(p.m, -1, -1):
            if not _is0(p.c[j][k]):
                lead = p.c[j][k]
                break
        if lead is not None:
            break
    return p.scale(one(EXACT) / lead)


def gcd_is_constant(p, q):
    g = gcd(p, q)
    return g.natural_bidegree() == (0, 0) and not g.is_zero()


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------

def _sylvester(ac, bc, da, db, backend):
    """Sylvester matrix from coefficient vectors at formal degrees da, db."""
    size = da + db
    z = zero(backend)
    M = [[z] * size for _ in range(size)]
    for i in range(db):
        for j, aj in enumerate(ac):
            M[i][i + da - j] = aj  # row holds a_da ... a_0 shifted
    for i in range(da):
        for j, bj in enumerate(bc):
            M[db + i][i + db - j] = bj
    return M


def _exact_det(M):
    """Determinant by fraction elimination with pivoting."""
    n = len(M)
    M = [row[:] for row in M]
    det = one(EXACT)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not M[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return zero(EXACT)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = det * M[col][col]
        inv = one(EXACT) / M[col][col]
        for r in range(col + 1, n):
            if M[r][col].is_zero():
                continue
            f = M[r][col] * inv
            for c in range(col, n):
                M[r][c] = M[r][c] - f * M[col][c]
    return det


def resultant_z2(p, q):
    """Res_{z2}(p, q) as a univariate polynomial in z1, at declared degrees.

    EXACT: evaluation at integer nodes plus exact Lagrange interpolation.
    FLOAT: evaluation at roots of unity plus inverse FFT.
    """
    da, db = p.m, q.m
    if da == 0 and db == 0:
        return UniPoly([one(p.backend)], p.backend)
    bound = p.n * db + q.n * da
    if p.backend == EXACT:
        nodes = []
        t = 0
        while len(nodes) < bound + 1:
            nodes.append(GaussianRational(t))
            if t > 0:
                t = -t
            else:
                t = -t + 1
        vals = []
        for x in nodes:
            ac = [UniPoly([p.c[j][k] for j in range(p.n + 1)], EXACT)(x)
                  for k in range(da + 1)]
            bc = [UniPoly([q.c[j][k] for j in range(q.n + 1)], EXACT)(x)
                  for k in range(db + 1)]
            vals.append(_exact_det(_sylvester(ac, bc, da, db, EXACT)))
        return _lagrange(nodes, vals)
    L = max(bound + 1, 1)
    w = np.exp(2j * np.pi * np.arange(L) / L)
    A, B = p.to_array(), q.to_array()
    vals = np.empty(L, dtype=complex)
    for t in range(L):
        x = w[t]
        pows = x ** np.arange(max(p.n, q.n) + 1)
        ac = pows[:p.n + 1] @ A
        bc = pows[:q.n + 1] @ B
        M = np.zeros((da + db, da + db), dtype=complex)
        for i in range(db):
            for j in range(da + 1):
                M[i][i + da - j] = ac[j]
        for i in range(da):
            for j in range(db + 1):
                M[db + i][i + db - j] = bc[j]
        vals[t] = np.linalg.det(M)
    # nodes are e^{+2 pi i t/L}, so evaluation is an inverse DFT of the
    # coefficients; invert with a forward transform
    coeffs = np.fft.fft(vals) / L
    return UniPoly(list(coeffs), FLOAT)


def _lagrange(nodes, vals):
    acc = UniPoly([0], EXACT)
    for i, (xi, yi) in enumerate(zip(nodes, vals)):
        if yi.is_zero():
            continue
        num = UniPoly([1], EXACT)
        den = one(EXACT)
        for j, xj in enumerate(nodes):
            if i == j:
                continue
            num = num * UniPoly([-xj, GaussianRational(1)], EXACT)
            den = den * (xi - xj)
        acc = acc + num.scale(yi / den)
    return acc


# ---------------------------------------------------------------------------
# translations (used by the Fulton reduction and local analysis)
# ---------------------------------------------------------------------------

def translate(p, a, b):
    """p(z1 + a, z2 + b), exact on the EXACT backend."""
    a, b = _coerce(a, p.backend), _coerce(b, p.backend)
    rows = [_shift_vec(row, b, p.backend) for row in p.c]
    cols = [[rows[j][k] for j in range(p.n + 1)] for k in range(p.m + 1)]
    cols = [_shift_vec(col, a, p.backend) for col in cols]
    g = [[cols[k][j] for k in range(p.m + 1)] for j in range(p.n + 1)]
    return BivPoly(g, p.backend, p.bidegree)


def _shift_vec(coeffs, s, backend):
    # Taylor shift: sum_k c_k (t+s)^k, by synthetic division
    out = list(coeffs)
    if _is0(s):
        return out
    n = len(out)
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            out[k] = out[k] + s * out[k + 1]
    return out


# ---------------------------------------------------------------------------
# sparse d-variate polynomials and homogeneous expansions
# ---------------------------------------------------------------------------

class MPoly:
    """Sparse polynomial in d variables: exponent tuple -> coefficient."""

    __slots__ = ("terms", "d", "backend")

    def __init__(self, terms, d, backend):
        self.d = d
        self.backend = backend
        self.terms = {e: c for e, c in terms.items() if not _is0(c)}

    @classmethod
    def zero(cls, d, backend):
        return cls({}, d, backend)

    @classmethod
    def constant(cls, value, d, backend):
        return cls({(0,) * d: _coerce(value, backend)}, d, backend)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, zero(self.backend)) + c
        return MPoly(t, self.d, self.backend)

    def __sub__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, zero(self.backend)) - c
        return MPoly(t, self.d, self.backend)

    def __neg__(self):
        return MPoly({e: -c for e, c in self.terms.items()}, self.d, self.backend)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return self.scale(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, zero(self.backend)) + c1 * c2
        return MPoly(t, self.d, self.backend)

    def scale(self, s):
        s = _coerce(s, self.backend)
        return MPoly({e: c * s for e, c in self.terms.items()}, self.d,
                     self.backend)

    def __call__(self, point):
        acc = zero(self.backend)
        if self.backend == FLOAT or any(isinstance(x, (complex, float)) for x in point):
            acc = 0j
            for e, c in self.terms.items():
                term = complex(c)
                for x, k in zip(point, e):
                    term *= complex(x) ** k
                acc += term
            return acc
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                term = term * (x ** k)
            acc = acc + term
        return acc

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def homogeneous_part(self, j):
        return MPoly({e: c for e, c in self.terms.items() if sum(e) == j},
                     self.d, self.backend)

    def max_norm(self):
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        return (isinstance(other, MPoly) and self.d == other.d
                and self.backend == other.backend and self.terms == other.terms)

    def __repr__(self):
        names = ["zeta%d" % (i + 1) for i in range(self.d)]
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n + ("^%d" % k if k > 1 else "")
                for n, k in zip(names, e) if k)
            cs = repr(c) if isinstance(c, GaussianRational) else "%.6g" % c.real \
                if abs(complex(c).imag) < 1e-14 else repr(complex(c))
            parts.append(cs + ("*" + mono if mono else ""))
        return " + ".join(parts) if parts else "0"


def bivpoly_to_mpoly(p):
    t = {}
    for j in range(p.n + 1):
        for k in range(p.m + 1):
            if not _is0(p.c[j][k]):
                t[(j, k)] = p.c[j][k]
    return MPoly(t, 2, p.backend)


@dataclass
class HomogExpansion:
    """Forms of p(base - zeta) grouped by total degree."""

    base: tuple
    forms: list            # forms[j] is the degree-j MPoly
    order: object          # int, or INF_ORDER for the zero polynomial
    backend: str
    d: int = 2

    def form(self, j):
        if j < len(self.forms):
            return self.forms[j]
        zb = self.forms[0].backend if self.forms else self.backend
        return MPoly.zero(self.d, zb)

    def resubstitute(self):
        """Reassemble p(z) by substituting zeta = base - z; returns an MPoly in z."""
        total = MPoly.zero(self.d, self.backend)
        zs = []
        for i in range(self.d):
            e = [0] * self.d
            e[i] = 1
            mono = MPoly({tuple(e): one(self.backend)}, self.d, self.backend)
            zs.append(MPoly.constant(self.base[i], self.d, self.backend) - mono)
        for f in self.forms:
            for e, c in f.terms.items():
                term = MPoly.constant(c, self.d, self.backend)
                for i, k in enumerate(e):
                    for _ in range(k):
                        term = term * zs[i]
                total = total + term
        return total


def _check_torus_point(base, backend):
    for x in base:
        if backend == EXACT:
            if not isinstance(x, GaussianRational) or x.abs2() != 1:
                raise PreconditionError("expansion base must lie exactly on the torus")
        else:
            if abs(abs(complex(x)) - 1.0) > 1e-12:
                raise PreconditionError("expansion base must lie on the torus")


def homog_expand(p, base, d=2):
    """Expand p(base - zeta) into homogeneous forms in zeta.

    p may be a BivPoly (d=2) or an MPoly in d variables.  The order M is
    the least total degree with a nonzero form (INF_ORDER for p = 0).
    """
    if isinstance(p, BivPoly):
        if d != 2:
            raise PreconditionError("a BivPoly expands in d=2 variables")
        mp = bivpoly_to_mpoly(p)
    else:
        mp = p
        d = p.d
    if len(base) != d:
        raise PreconditionError("base point has wrong dimension")
    backend = mp.backend
    _check_torus_point(base, backend)
    # substitute z_i = base_i - zeta_i, expanding powers once per variable
    result = MPoly.zero(d, backend)
    unit = [None] * d
    for i in range(d):
        e = [0] * d
        e[i] = 1
        unit[i] = MPoly({tuple(e): one(backend)}, d, backend)
    maxdeg = [0] * d
    for e in mp.terms:
        for i in range(d):
            maxdeg[i] = max(maxdeg[i], e[i])
    # power tables of (base_i - zeta_i)^k
    tables = []
    for i in range(d):
        tab = [MPoly.constant(1, d, backend)]
        lin = MPoly.constant(base[i], d, backend) - unit[i]
        for _ in range(maxdeg[i]):
            tab.append(tab[-1] * lin)
        tables.append(tab)
    for e, c in mp.terms.items():
        term = MPoly.constant(c, d, backend)
        for i, k in enumerate(e):
            if k:
                term = term * tables[i][k]
        result = result + term
    D = result.total_degree()
    forms = [result.homogeneous_part(j) for j in range(D + 1)]
    order = INF_ORDER
    scale = max(result.max_norm(), 1.0)
    for j, f in enumerate(forms):
        if backend == EXACT:
            if not f.is_zero():
                order = j
                break
        else:
            if f.max_norm() > 1e-12 * scale:
                order = j
                break
    if order is INF_ORDER:
        forms = []
    return HomogExpansion(tuple(base), forms, order, backend, d)


def _mpoly_zeta2_order(f):
    return min((e[1] for e in f.terms), default=0)


def _dehomog(f, shift):
    """f with zeta2^shift divided out, written as UniPoly in t = zeta1/zeta2."""
    deg = f.total_degree()
    coeffs = [zero(f.backend)] * (deg - shift + 1) if deg >= shift else [zero(f.backend)]
    for (e1, e2), c in f.terms.items():
        coeffs[e1] = coeffs[e1] + c
    return UniPoly(coeffs, f.backend)


def homog_divide(A, B, tol=1e-8):
    """Divide homogeneous A by homogeneous B in two variables.

    Returns the homogeneous quotient MPoly, or None when B does not divide A.
    Exact on the EXACT backend; on FLOAT a relative remainder below tol
    counts as divisible.
    """
    if B.is_zero():
        raise PreconditionError("division by the zero form")
    if A.is_zero():
        return MPoly.zero(2, A.backend)
    if A.backend == FLOAT:
        cutA = 1e-12 * max(A.max_norm(), 1e-300)
        cutB = 1e-12 * max(B.max_norm(), 1e-300)
        A = MPoly({e: c for e, c in A.terms.items() if abs(c) > cutA}, 2, FLOAT)
        B = MPoly({e: c for e, c in B.terms.items() if abs(c) > cutB}, 2, FLOAT)
        if B.is_zero():
            raise PreconditionError("division by a numerically zero form")
        if A.is_zero():
            return MPoly.zero(2, FLOAT)
    da, db = A.total_degree(), B.total_degree()
    if da < db:
        return None
    alpha, beta = _mpoly_zeta2_order(A), _mpoly_zeta2_order(B)
    if beta > alpha:
        return None
    a, b = _dehomog(A, alpha), _dehomog(B, beta)
    if A.backend == EXACT:
        q, r = a.divmod(b)
        if not r.is_zero():
            return None
    else:
        q, r = a.divmod(b, tol=0.0)
        scale = max(max(abs(x) for x in a.c), 1e-300)
        if max(abs(complex(x)) for x in r.c) > tol * scale:
            return None
    # rehomogenize: quotient has degree da-db, zeta2 order alpha-beta
    qdeg = da - db
    t = {}
    for e1, c in enumerate(q.c):
        if _is0(c):
            continue
        e2 = qdeg - e1
        if e2 < 0:
            return None
        t[(e1, e2)] = c
    return MPoly(t, 2, A.backend)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def to_json_dict(p):
    return {
        "bidegree": [p.n, p.m],
        "backend": p.backend,
        "coeffs": [[scalar_to_pair(x) for x in row] for row in p.c],
    }


def from_json_dict(obj):
    if not isinstance(obj, dict):
        raise FormatError("polynomial JSON must be an object")
    try:
        n, m = obj["bidegree"]
        backend = obj["backend"]
        grid = obj["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("missing or malformed polynomial fields: %s" % exc)
    if backend not in (EXACT, FLOAT):
        raise FormatError("unknown backend %r" % backend)
    if not (isinstance(n, int) and isinstance(m, int) and n >= 0 and m >= 0):
        raise FormatError("bidegree must be a pair of nonnegative ints")
    if not isinstance(grid, list) or len(grid) != n + 1 \
            or any(not isinstance(r, list) or len(r) != m + 1 for r in grid):
        raise FormatError("coeffs grid must be (n+1) x (m+1)")
    try:
        rows = [[scalar_from_pair(x, backend) for x in row] for row in grid]
    except (ValueError, TypeError) as exc:
        raise FormatError("bad coefficient entry: %s" % exc)
    return BivPoly(rows, backend, (n, m))
