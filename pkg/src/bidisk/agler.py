"""Sums-of-squares systems for semi-stable polynomials.

Builds the canonical vector polynomials (E1, F1, E2, F2, G) realizing
|p|^2 - |ptilde|^2 = (1-|z1|^2)|E1|^2 + (1-|z2|^2)|F2|^2 (and the two
companion identities), verifies them by polarization, and assembles the
unitary transfer-function realization of ptilde/p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CrossCheckError, PreconditionError
from .polycore import BivPoly, UniPoly, flip2, reflect
from .scalars import EXACT, FLOAT, GaussianRational
from .stability import check_semistable, require_semistable


# ---------------------------------------------------------------------------
# vector polynomials
# ---------------------------------------------------------------------------

class VecPoly:
    """A column vector of bivariate polynomials with one shared bidegree."""

    def __init__(self, entries, bidegree=None, backend=FLOAT):
        self.entries = list(entries)
        if self.entries:
            self.backend = self.entries[0].backend
            if bidegree is None:
                bidegree = self.entries[0].bidegree
            self.entries = [e.with_bidegree(*bidegree) for e in self.entries]
        else:
            self.backend = backend
            if bidegree is None:
                bidegree = (0, 0)
        self.bidegree = tuple(bidegree)

    @classmethod
    def from_coeff_matrix(cls, M, bidegree):
        """Rows of M are coefficient grids, row-major over (z1 pow, z2 pow)."""
        n, m = bidegree
        entries = []
        for row in np.asarray(M, dtype=complex):
            grid = row.reshape(n + 1, m + 1)
            entries.append(BivPoly.from_complex(grid.tolist(), bidegree))
        return cls(entries, bidegree)

    @property
    def dim(self):
        return len(self.entries)

    def coeff_matrix(self):
        """dim x (n+1)(m+1) complex matrix, row-major monomial order."""
        n, m = self.bidegree
        M = np.zeros((self.dim, (n + 1) * (m + 1)), dtype=complex)
        for i, e in enumerate(self.entries):
            M[i] = e.to_array().reshape(-1)
        return M

    def coeff_stack(self):
        """dim x (n+1) x (m+1) complex array of coefficient grids."""
        n, m = self.bidegree
        A = np.zeros((self.dim, n + 1, m + 1), dtype=complex)
        for i, e in enumerate(self.entries):
            A[i] = e.to_array()
        return A

    def __call__(self, z1, z2):
        return np.array([e(z1, z2) for e in self.entries], dtype=complex)

    def eval_grid(self, Z1, Z2):
        if self.dim == 0:
            return np.zeros((0,) + np.broadcast(Z1, Z2).shape, dtype=complex)
        return np.stack([e.to_float().eval_grid(Z1, Z2) for e in self.entries])

    def reflected(self):
        """Componentwise reflection at the shared declared bidegree."""
        return VecPoly([reflect(e) for e in self.entries], self.bidegree,
                       self.backend)

    def to_float(self):
        return VecPoly([e.to_float() for e in self.entries], self.bidegree)

    def kernel_tensor(self):
        """K[a,b,c,d] = sum_e entry_e[a,b] * conj(entry_e[c,d])."""
        n, m = self.bidegree
        A = self.coeff_stack()
        if self.dim == 0:
            return np.zeros((n + 1, m + 1, n + 1, m + 1), dtype=complex)
        return np.einsum("eab,ecd->abcd", A, A.conj())

    def canonicalized(self):
        """Left-multiply by the unitary giving a positive-staircase form.

        Deterministic representative of the unitary-orbit: rows become the
        R factor of a QR decomposition of the coefficient matrix, with each
        pivot made real positive.
        """
        if self.dim == 0:
            return self
        M = self.coeff_matrix()
        U = _row_staircase_unitary(M)
        out = U @ M
        return VecPoly.from_coeff_matrix(out, self.bidegree)


def _row_staircase_unitary(M, tol=1e-12):
    """Unitary U such that U @ M is upper-staircase with positive pivots."""
    M = np.asarray(M, dtype=complex)
    r, K = M.shape
    U = np.eye(r, dtype=complex)
    A = M.copy()
    row = 0
    scale = max(np.max(np.abs(M)), 1e-300)
    for col in range(K):
        if row >= r:
            break
        seg = A[row:, col]
        nrm = np.linalg.norm(seg)
        if nrm <= tol * scale:
            continue
        # Householder mapping seg onto (nrm, 0, ..., 0)
        v = seg.copy()
        phase = v[0] / abs(v[0]) if abs(v[0]) > 0 else 1.0
        v[0] += phase * nrm
        v = v / np.linalg.norm(v)
        H = np.eye(len(seg), dtype=complex) - 2.0 * np.outer(v, v.conj())
        # H @ seg = -phase*nrm * e0; fold the phase correction into H
        H = H * (-np.conj(phase))
        A[row:, :] = H @ A[row:, :]
        U[row:, :] = H @ U[row:, :]
        row += 1
    return U


# ---------------------------------------------------------------------------
# tensor algebra for polarized identities
# ---------------------------------------------------------------------------

def _pq_tensor(p):
    """X[a,b,c,d] for conj(p(w)) p(z) - conj(ptilde(w)) ptilde(z)."""
    P = p.to_array()
    Pt = reflect(p).to_array()
    return (np.einsum("ab,cd->abcd", P, P.conj())
            - np.einsum("ab,cd->abcd", Pt, Pt.conj()))


def _mul_one_minus(K, axis):
    """Multiply a kernel tensor by (1 - conj(w_axis) z_axis).

    axis=1 shifts (a, c), axis=2 shifts (b, d).  Output gains one slot in
    the shifted directions.
    """
    s = list(K.shape)
    if axis == 1:
        s[0] += 1
        s[2] += 1
        out = np.zeros(s, dtype=complex)
        out[:-1, :, :-1, :] = K
        out[1:, :, 1:, :] -= K
    else:
        s[1] += 1
        s[3] += 1
        out = np.zeros(s, dtype=complex)
        out[:, :-1, :, :-1] = K
        out[:, 1:, :, 1:] -= K
    return out


def _divide_one_minus(X, axis):
    """Divide by (1 - conj(w_axis) z_axis); returns (quotient, residual).

    The residual is the largest boundary coefficient left over; it is zero
    exactly when X is divisible with quotient one slot shorter in the
    divided directions.
    """
    Y = np.zeros_like(X)
    A, B, C, D = X.shape
    if X.size == 0:
        shrink = (slice(None), slice(0, 0)) if axis == 2 else (slice(0, 0),)
        quot = X[:0, :0, :0, :0]
        return quot, 0.0
    if axis == 2:
        for b in range(B):
            for d in range(D):
                Y[:, b, :, d] = X[:, b, :, d]
                if b > 0 and d > 0:
                    Y[:, b, :, d] += Y[:, b - 1, :, d - 1]
        if B > 1:
            res = max(np.max(np.abs(Y[:, B - 1, :, :])),
                      np.max(np.abs(Y[:, :, :, D - 1])))
            quot = Y[:, :B - 1, :, :D - 1]
        else:
            # nothing to divide into: the numerator itself is the residue
            res = np.max(np.abs(Y)) if Y.size else 0.0
            quot = Y[:, :0, :, :0]
        return quot, float(res)
    for a in range(A):
        for c in range(C):
            Y[a, :, c, :] = X[a, :, c, :]
            if a > 0 and c > 0:
                Y[a, :, c, :] += Y[a - 1, :, c - 1, :]
    if A > 1:
        res = max(np.max(np.abs(Y[A - 1, :, :, :])),
                  np.max(np.abs(Y[:, :, C - 1, :])))
        quot = Y[:A - 1, :, :C - 1, :]
    else:
        res = np.max(np.abs(Y)) if Y.size else 0.0
        quot = Y[:0, :, :0, :]
    return quot, float(res)


def _pad_like(K, shape):
    out = np.zeros(shape, dtype=complex)
    sl = tuple(slice(0, s) for s in K.shape)
    out[sl] = K
    return out


def _vec_from_psd(K, rank_target, rel_tol=1e-9, clamp=False):
    """Factor the PSD kernel tensor K as a vector polynomial.

    K has shape (n1+1, m1+1, n1+1, m1+1) over monomials of the quotient
    bidegree.  The numeric rank must not exceed rank_target; exceeding it
    signals an inconsistency upstream.  With clamp=True the gates loosen
    to catastrophic levels and the top rank_target eigenpairs are kept:
    a seeding mode for callers that refine the result afterwards.
    """
    A, B = K.shape[0], K.shape[1]
    H = K.reshape(A * B, A * B).T  # H[(c,d),(a,b)] = K[a,b,c,d]
    H = 0.5 * (H + H.conj().T)
    if A * B == 0 or rank_target == 0:
        return VecPoly([], (max(A - 1, 0), max(B - 1, 0))), 0.0
    w, V = np.linalg.eigh(H)
    w = w[::-1]
    V = V[:, ::-1]
    top = max(w[0], 0.0)
    if top == 0.0:
        return VecPoly([], (A - 1, B - 1)), 0.0
    rank_gate = 1e-3 if clamp else rel_tol
    neg_gate = -1e-3 if clamp else -1e-6
    rank = int(np.sum(w > rank_gate * top))
    if rank > rank_target:
        excess = float(w[rank_target] / top)
        raise CrossCheckError(
            "kernel rank %d exceeds target dimension %d (relative eigenvalue %.3e)"
            % (rank, rank_target, excess))
    neg = float(min(w[-1], 0.0) / top)
    if neg < neg_gate:
        raise CrossCheckError("kernel is indefinite (relative eigenvalue %.3e)" % neg)
    if clamp:
        keep = min(int(np.sum(w > rel_tol * top)), rank_target)
    else:
        keep = min(rank, rank_target)
    J = (np.sqrt(np.maximum(w[:keep], 0.0))[:, None] * V[:, :keep].conj().T)
    vec = VecPoly.from_coeff_matrix(J, (A - 1, B - 1))
    return vec, neg


def _tensor_residual(p, pairs, g=None):
    """Max coefficient deviation of a polarized sums-of-squares identity.

    pairs is [(axis, VecPoly), ...]; g, when given, enters with the product
    factor (1-conj(w1)z1)(1-conj(w2)z2).
    """
    X = _pq_tensor(p.to_float())
    acc = np.zeros_like(X)
    for axis, vec in pairs:
        if vec.dim == 0:
            continue
        K = _mul_one_minus(vec.to_float().kernel_tensor(), axis)
        acc += _pad_like(K, X.shape)
    if g is not None and g.dim:
        K = _mul_one_minus(_mul_one_minus(g.to_float().kernel_tensor(), 1), 2)
        acc += _pad_like(K, X.shape)
    return float(np.max(np.abs(X - acc)))


def _exact_pair_residual(p, A1, A2):
    """Exact-arithmetic residual of the Agler identity (EXACT inputs only)."""
    n, m = p.bidegree
    pt = reflect(p)

    def add(t, key, val):
        t[key] = t.get(key, GaussianRational(0)) + val

    X = {}
    for a in range(n + 1):
        for b in range(m + 1):
            for c in range(n + 1):
                for d in range(m + 1):
                    v = (p.at(a, b) * p.at(c, d).conjugate()
                         - pt.at(a, b) * pt.at(c, d).conjugate())
                    if not v.is_zero():
                        add(X, (a, b, c, d), v)
    for axis, vec in ((1, A1), (2, A2)):
        vn, vm = vec.bidegree
        for e in vec.entries:
            for a in range(vn + 1):
                for b in range(vm + 1):
                    ca = e.at(a, b)
                    if ca.is_zero():
                        continue
                    for c in range(vn + 1):
                        for d in range(vm + 1):
                            cc = e.at(c, d)
                            if cc.is_zero():
                                continue
                            v = ca * cc.conjugate()
                            add(X, (a, b, c, d), -v)
                            if axis == 1:
                                add(X, (a + 1, b, c + 1, d), v)
                            else:
                                add(X, (a, b + 1, c, d + 1), v)
    worst = 0.0
    for v in X.values():
        if not v.is_zero():
            worst = max(worst, abs(complex(v)))
    return worst


def verify_agler(p, A1, A2):
    """Residual of |p|^2-|ptilde|^2 = (1-|z1|^2)|A1|^2 + (1-|z2|^2)|A2|^2.

    Polarized: the identity is expanded in (z1, z2, conj(w1), conj(w2)) and
    the largest coefficient deviation returned.  Exact inputs are verified
    in exact arithmetic, so a true identity returns exactly 0.0.
    """
    if (p.backend == EXACT and A1.backend == EXACT and A2.backend == EXACT):
        return _exact_pair_residual(p, A1, A2)
    return _tensor_residual(p, [(1, A1), (2, A2)])


# ---------------------------------------------------------------------------
# the one-variable matrix symbol T1 and its spectral factorization
# ---------------------------------------------------------------------------

class MatLaurent:
    """Hermitian matrix Laurent polynomial sum_t C_t z^t with C_-t = C_t*."""

    def __init__(self, size, band, stack):
        self.size = size
        self.band = band
        # stack[t + band] is C_t, shape (2*band+1, size, size)
        self.stack = np.asarray(stack, dtype=complex)

    def at(self, t):
        if abs(t) > self.band:
            return np.zeros((self.size, self.size), dtype=complex)
        return self.stack[t + self.band]

    def __call__(self, z):
        z = complex(z)
        out = np.zeros((self.size, self.size), dtype=complex)
        for t in range(-self.band, self.band + 1):
            out += self.stack[t + self.band] * (z ** t)
        return out

    def hermitian_defect(self):
        worst = 0.0
        for t in range(self.band + 1):
            worst = max(worst, float(np.max(np.abs(
                self.at(-t) - self.at(t).conj().T))))
        return worst

    def trimmed(self):
        band = self.band
        while band > 0 and np.max(np.abs(self.stack[band + self.band])) == 0 \
                and np.max(np.abs(self.stack[self.band - band])) == 0:
            band -= 1
        s = self.band - band
        return MatLaurent(self.size, band, self.stack[s:len(self.stack) - s])


class MatPoly:
    """Matrix polynomial E(z) = sum_k E_k z^k."""

    def __init__(self, coeffs):
        self.coeffs = [np.asarray(c, dtype=complex) for c in coeffs]
        self.shape = self.coeffs[0].shape if self.coeffs else (0, 0)
        self.size = self.shape[0]

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        z = complex(z)
        out = np.zeros(self.shape, dtype=complex)
        for k, C in enumerate(self.coeffs):
            out += C * (z ** k)
        return out

    def stack(self):
        return np.stack(self.coeffs) if self.coeffs else \
            np.zeros((0, 0, 0), dtype=complex)

    def det_unipoly(self):
        """det E(z) as a UniPoly, via evaluation at roots of unity."""
        if self.shape[0] != self.shape[1]:
            raise PreconditionError("determinant of a non-square matrix")
        deg = self.size * self.degree
        L = 1
        while L < deg + 1:
            L *= 2
        w = np.exp(2j * np.pi * np.arange(L) / L)
        vals = np.array([np.linalg.det(self(x)) for x in w])
        c = np.fft.fft(vals) / L
        return UniPoly(c[:deg + 1].tolist(), FLOAT)

    def conj_reflect(self, degree=None):
        """z^degree * conj(E)(1/z), coefficientwise reversal with conjugation."""
        d = self.degree if degree is None else degree
        out = [np.zeros((self.size, self.size), dtype=complex)
               for _ in range(d + 1)]
        for k, C in enumerate(self.coeffs):
            out[d - k] = C.conj()
        return MatPoly(out)


def _row_polys(p):
    """The z2-coefficient polynomials p_j(z2), j = 0..n, as UniPoly."""
    return [UniPoly(list(row), p.backend) for row in p.c]


def _laurent_corr(u, v, m):
    """Laurent coefficients of conj(u)(1/z) v(z), band -m..m, float."""
    uc = np.zeros(m + 1, dtype=complex)
    vc = np.zeros(m + 1, dtype=complex)
    for i, x in enumerate(u.c[:m + 1]):
        uc[i] = complex(x)
    for i, x in enumerate(v.c[:m + 1]):
        vc[i] = complex(x)
    out = np.zeros(2 * m + 1, dtype=complex)
    for t in range(-m, m + 1):
        s = 0.0 + 0.0j
        for k in range(m + 1):
            if 0 <= k + t <= m:
                s += np.conj(uc[k]) * vc[k + t]
        out[t + m] = s
    return out


def build_T1(p):
    """The n x n Laurent symbol with T1(z2) = E1(z2)* E1(z2) on the circle.

    Assembled from the Toeplitz-like coefficient matrices of p and its
    reflection: T1 = R*R - S*S where R holds p_0..p_{n-1} and S the
    reflected coefficients.
    """
    require_semistable(p)
    n, m = p.bidegree
    if n == 0:
        return MatLaurent(0, m, np.zeros((2 * m + 1, 0, 0)))
    rows = _row_polys(p)
    refl_rows = [r.reflect(m) for r in rows]
    stack = np.zeros((2 * m + 1, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            acc = np.zeros(2 * m + 1, dtype=complex)
            for k in range(min(i, j) + 1):
                acc += _laurent_corr(rows[i - k], rows[j - k], m)
                acc -= _laurent_corr(refl_rows[n - i + k], refl_rows[n - j + k], m)
            stack[:, i, j] = acc
    return MatLaurent(n, m, stack)


def _cluster_points(pts, radius, key):
    """Greedy clustering of complex points, returns [(mean, count)]."""
    pts = sorted(pts, key=key)
    clusters = []
    for r in pts:
        if clusters and abs(clusters[-1][0] / clusters[-1][1] - r) < radius:
            clusters[-1][0] += r
            clusters[-1][1] += 1
        else:
            clusters.append([r, 1])
    if len(clusters) > 1:
        # the angle sort cuts the circle at -pi; merge across the seam
        first, last = clusters[0], clusters[-1]
        if abs(first[0] / first[1] - last[0] / last[1]) < radius:
            first[0] += last[0]
            first[1] += last[1]
            clusters.pop()
    return [(tot / cnt, cnt) for tot, cnt in clusters]


def _torus_center_refine(c, band, theta0, mu):
    """Locate a 2*mu-fold torus zero of the Laurent symbol near theta0.

    T(e^{i theta}) is a nonnegative trig polynomial with a zero of order
    2*mu; Newton on its (2*mu-1)-th derivative is well conditioned there.
    """
    t = np.arange(-band, band + 1)

    def dk(theta, k):
        return float(np.real(np.sum(c * (1j * t) ** k * np.exp(1j * t * theta))))

    th = theta0
    for _ in range(60):
        g = dk(th, 2 * mu - 1)
        gp = dk(th, 2 * mu)
        if gp == 0.0:
            break
        step = g / gp
        th -= step
        if abs(step) < 1e-15:
            break
    return complex(np.exp(1j * th))


def _poly_root_refine(coeffs_desc, r0, mult):
    """Newton for a root of known multiplicity, run on the right derivative."""
    d = np.asarray(coeffs_desc, dtype=complex)
    for _ in range(mult - 1):
        d = np.polyder(d)
    dd = np.polyder(d)
    r = complex(r0)
    for _ in range(60):
        fv = np.polyval(d, r)
        fp = np.polyval(dd, r)
        if fp == 0:
            break
        step = fv / fp
        r -= step
        if abs(step) < 1e-15 * max(1.0, abs(r)):
            break
    return r


def _scalar_factor_from_roots(c, band, tol):
    """Scalar spectral factor by splitting and refining the Laurent roots.

    c is the coefficient array of length 2*band+1 (t = -band..band).  Roots
    inside the disk belong to the reflected factor; torus roots must pair
    up evenly and contribute half their multiplicity.  The annulus used to
    call a root "on the torus" is widened until the bookkeeping closes,
    because multiple roots smear far beyond machine epsilon.
    """
    poly = np.asarray(c, dtype=complex)
    hi = band
    while hi > 0 and abs(poly[hi + band]) <= 1e-13 * np.max(np.abs(poly)):
        hi -= 1
    lo = band - hi
    p2 = poly[lo:len(poly) - lo]
    d = hi
    if d == 0:
        v = p2[0].real
        if v < 0:
            raise PreconditionError("symbol is negative at degree zero")
        return np.array([math.sqrt(v)], dtype=complex)
    roots = np.roots(p2[::-1])
    best = None
    odd_seen = False
    for annulus in (2e-2, 5e-3, 1e-3, 1e-4):
        keep = []
        torus = []
        exterior = []
        for r in roots:
            a = abs(r)
            if 1.0 - annulus < a < 1.0 + annulus:
                torus.append(r)
            elif a >= 1.0 + annulus:
                exterior.append(r)
        ok = True
        for center, count in _cluster_points(torus, 3 * annulus,
                                             key=lambda r: (np.angle(r), abs(r))):
            if count % 2:
                ok = False
                odd_seen = True
                break
            mu = count // 2
            refined = _torus_center_refine(poly, band,
                                           float(np.angle(center)), mu)
            keep.extend([refined] * mu)
        if not ok:
            continue
        for center, count in _cluster_points(
                exterior, 1e-3, key=lambda r: (np.angle(r), abs(r))):
            refined = _poly_root_refine(p2[::-1], center, count)
            keep.extend([refined] * count)
        if len(keep) != d:
            continue
        B = np.poly(keep)[::-1] if keep else np.array([1.0 + 0j])  # ascending
        c0 = float(np.real(c[band]))
        gamma = math.sqrt(max(c0, 0.0) / float(np.sum(np.abs(B) ** 2)))
        e = gamma * B
        res = _scalar_residual(e, poly, band)
        if best is None or res < best[0]:
            best = (res, e)
        if res <= min(tol, 1e-12):
            break
    if best is None:
        if odd_seen:
            raise PreconditionError(
                "symbol has a torus zero of odd multiplicity; not "
                "factorable as |E|^2")
        raise CrossCheckError("root splitting never closed the bookkeeping")
    return best[1]


def _scalar_residual(e, c, band):
    """Largest coefficient error of |E|^2 against the Laurent symbol c."""
    worst = 0.0
    for t in range(band + 1):
        s = 0.0 + 0.0j
        for k in range(len(e) - t):
            s += np.conj(e[k]) * e[k + t]
        worst = max(worst, abs(s - c[t + band]))
    return worst


def _bauer_factor(T, eps, max_blocks=16384, settle=1e-11):
    """Spectral factor of T + eps*I by banded block Toeplitz Cholesky.

    The rows of the Cholesky factor converge to the (conjugated) factor
    coefficients; the last block row is read off once it stabilizes.
    """
    N, d = T.size, T.band
    blocks = [T.at(t) for t in range(-d, d + 1)]
    bw = d * N + (N - 1)
    prev = None
    K = max(8 * (d + 1), 64)
    while True:
        K = min(K, max_blocks)
        dim = K * N
        ab = np.zeros((bw + 1, dim), dtype=complex)
        reps = -(-dim // N)
        for r in range(bw + 1):
            # ab[r, j] = M[j + r, j] = C_{-delta}[a2, b2], which is periodic
            # in j with period N
            period = np.zeros(N, dtype=complex)
            for b2 in range(N):
                delta, a2 = divmod(b2 + r, N)
                if delta <= d:
                    period[b2] = blocks[d - delta][a2, b2]
            ab[r, :] = np.tile(period, reps)[:dim]
        ab[0, :] += eps
        try:
            L = scipy.linalg.cholesky_banded(ab, lower=True,
                                             check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise PreconditionError(
                "symbol is not positive semidefinite: %s" % exc)
        # read E_k^* from the last block row: M[(K-1)N+a, (K-1-k)N+b]
        Es = []
        base = (K - 1) * N
        for k in range(d + 1):
            blk = np.zeros((N, N), dtype=complex)
            for a in range(N):
                for b in range(N):
                    I = base + a
                    J = (K - 1 - k) * N + b
                    r = I - J
                    if 0 <= r <= bw:
                        blk[a, b] = L[r, J]
            Es.append(blk.conj().T)
        cur = np.stack(Es)
        if prev is not None and np.max(np.abs(cur - prev)) < settle * \
                max(np.max(np.abs(cur)), 1e-300):
            return MatPoly(list(cur))
        if K >= max_blocks:
            return MatPoly(list(cur))
        prev = cur
        K *= 2


def _factor_residual(E, T, samples=1024):
    """max over torus samples of ||T(w) - E(w)* E(w)||_max."""
    worst = 0.0
    for t in range(samples):
        w = np.exp(2j * np.pi * t / samples)
        R = T(w) - E(w).conj().T @ E(w)
        worst = max(worst, float(np.max(np.abs(R))))
    return worst


def _coeff_residual_vec(E, T):
    """Stacked residual of the coefficient equations sum_k E_k* E_{k+t} = C_t."""
    d = T.band
    out = []
    S = E.stack()
    for t in range(d + 1):
        R = np.zeros((T.size, T.size), dtype=complex)
        for k in range(d + 1 - t):
            R += S[k].conj().T @ S[k + t]
        R -= T.at(t)
        if t == 0:
            idx = np.triu_indices(T.size)
            out.append(R[idx].real)
            out.append(R[np.triu_indices(T.size, 1)].imag)
        else:
            out.append(R.reshape(-1).real)
            out.append(R.reshape(-1).imag)
    return np.concatenate(out) if out else np.zeros(0)


def _symbol_torus_pins(T):
    """Torus zeros of det T(z) with half multiplicities, [(zeta, h)].

    det T is a nonnegative Laurent symbol, so its torus zeros have even
    order 2h; the canonical factor's determinant must vanish there to
    order exactly h, and pinning those zeros onto the circle removes the
    flat directions that plain coefficient residuals cannot see.
    """
    N, d = T.size, T.band
    band = N * d
    if band == 0:
        return []
    L = 1
    while L < 2 * band + 2:
        L *= 2
    w = np.exp(2j * np.pi * np.arange(L) / L)
    vals = np.array([np.linalg.det(T(x)) for x in w])
    fc = np.fft.fft(vals) / L
    c = np.zeros(2 * band + 1, dtype=complex)
    for t in range(-band, band + 1):
        c[t + band] = fc[t % L]
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        return []
    hi = band
    while hi > 0 and abs(c[hi + band]) <= 1e-12 * scale:
        hi -= 1
    if hi == 0:
        return []
    lo = band - hi
    p2 = c[lo:len(c) - lo]
    roots = np.roots(p2[::-1])
    near = [r for r in roots if abs(abs(r) - 1.0) < 2e-2]
    gate = 1e-10 * float(np.sum(np.abs(c)))

    def val(theta):
        t = np.arange(-band, band + 1)
        return abs(float(np.real(np.sum(c * np.exp(1j * t * theta)))))

    pins = []
    for center, count in _cluster_points(near, 6e-2,
                                         key=lambda r: (np.angle(r), abs(r))):
        # a cluster can catch genuine off-circle roots along with a torus
        # zero, so the count only bounds the order; probe each order from
        # the top and keep the largest whose refined point zeroes det T
        for h in range(count // 2, 0, -1):
            zeta = _torus_center_refine(c, band, float(np.angle(center)), h)
            if abs(zeta - center) > 6e-2:
                continue
            if val(float(np.angle(zeta))) <= gate:
                pins.append((zeta, h))
                break
    return pins


def _newton_polish(E0, T, steps=60, pins=()):
    """Refine factor coefficients by Newton on the quadratic system.

    Gauge: E_0 upper triangular with real diagonal (the Cholesky/ QR
    convention), which removes exactly the unitary left freedom.  Each
    pin (zeta, h) adds the equations d^k det E(zeta) = 0 for k < h,
    which are exactly the directions the coefficient residuals leave
    flat (a factor zero pushed off the circle changes the symbol only
    at second order but the polarized kernel at first order).
    """
    N, d = T.size, T.band
    S = E0.stack().copy()
    # rotate into the gauge: E_0 upper triangular with nonnegative diagonal
    W = _gauge_unitary(S[0])
    for k in range(d + 1):
        S[k] = W @ S[k]

    def pack(S):
        xs = []
        # E_0: upper triangle, diagonal real
        for i in range(N):
            xs.append(S[0][i, i].real)
            for j in range(i + 1, N):
                xs.append(S[0][i, j].real)
                xs.append(S[0][i, j].imag)
        for k in range(1, d + 1):
            xs.append(S[k].reshape(-1).real)
            xs.append(S[k].reshape(-1).imag)
        return np.concatenate([np.atleast_1d(np.asarray(x, dtype=float))
                               for x in xs])

    def unpack(x):
        S = np.zeros((d + 1, N, N), dtype=complex)
        pos = 0
        for i in range(N):
            S[0][i, i] = x[pos]
            pos += 1
            for j in range(i + 1, N):
                S[0][i, j] = x[pos] + 1j * x[pos + 1]
                pos += 2
        for k in range(1, d + 1):
            cnt = N * N
            re = x[pos:pos + cnt].reshape(N, N)
            im = x[pos + cnt:pos + 2 * cnt].reshape(N, N)
            S[k] = re + 1j * im
            pos += 2 * cnt
        return S

    scale_T = max(float(np.max(np.abs(T.stack))), 1e-300)
    wgt = 1.0
    if pins:
        dc0 = np.asarray([complex(v) for v in MatPoly(list(S)).det_unipoly().c])
        wgt = scale_T / max(float(np.max(np.abs(dc0))), 1e-300)

    def resid(x):
        S = unpack(x)
        base = _coeff_residual_vec(MatPoly(list(S)), T)
        if not pins:
            return base
        dc = np.asarray([complex(v)
                         for v in MatPoly(list(S)).det_unipoly().c])
        desc = dc[::-1]
        extra = []
        for zeta, h in pins:
            dk = desc
            for _ in range(h):
                v = np.polyval(dk, zeta) * wgt
                extra.append(v.real)
                extra.append(v.imag)
                dk = np.polyder(dk)
        return np.concatenate([base, np.asarray(extra, dtype=float)])

    best_x, best_r = _svd_newton(resid, pack(S), steps)
    return MatPoly(list(unpack(best_x))), best_r


def _svd_newton(resid, x0, steps=60):
    """Damped Newton for least squares with a truncated-SVD step.

    The Jacobian is near-singular along directions that barely change the
    residual (factor zeros sliding along or flipping across the circle);
    those are truncated rather than followed.  Central differences are
    exact for the quadratic maps this is used on, up to roundoff.
    """
    x = x0.copy()
    f = resid(x)
    best_x, best_r = x.copy(), float(np.max(np.abs(f))) if f.size else 0.0
    nvar = x.size
    for _ in range(steps):
        if best_r < 1e-14:
            break
        J = np.zeros((f.size, nvar))
        h = 1e-7 * max(1.0, float(np.max(np.abs(x))))
        for i in range(nvar):
            xp = x.copy()
            xp[i] += h
            xm = x.copy()
            xm[i] -= h
            J[:, i] = (resid(xp) - resid(xm)) / (2 * h)
        try:
            Uj, sj, Vjt = np.linalg.svd(J, full_matrices=False)
        except np.linalg.LinAlgError:
            break
        moved = False
        for rcond in (1e-10, 1e-7, 1e-4):
            cut = sj > rcond * (sj[0] if sj.size else 1.0)
            if not np.any(cut):
                continue
            step = -(Vjt[cut].T @ ((Uj[:, cut].conj().T @ f) / sj[cut]))
            for scale in (1.0, 0.5, 0.25, 0.1, 0.02):
                xn = x + scale * step
                fn = resid(xn)
                rn = float(np.max(np.abs(fn))) if fn.size else 0.0
                if rn < 0.9 * best_r:
                    x, f = xn, fn
                    best_x, best_r = xn.copy(), rn
                    moved = True
                    break
            if moved:
                break
        if not moved or best_r < 1e-14:
            break
    return best_x, best_r


def _gauge_unitary(E0):
    """Unitary W making W @ E0 upper triangular with nonneg real diagonal."""
    N = E0.shape[0]
    Q, R = scipy.linalg.qr(E0)
    # E0 = Q R with R upper triangular; W = Q^H gives R; fix diag phases
    ph = np.ones(N, dtype=complex)
    for i in range(N):
        v = R[i, i]
        if abs(v) > 1e-300:
            ph[i] = np.conj(v) / abs(v)
    return np.diag(ph) @ Q.conj().T


def fejer_riesz(T, tol=1e-6, ladder=(1e-4, 1e-6, 1e-8, 1e-10, 1e-12)):
    """Spectral factor E with T(z) = E(z)*E(z) on the circle, det E outer.

    Scalar symbols are root-split directly.  Matrix symbols go through a
    regularization ladder (Bauer factorization of T + eps*I), Richardson
    extrapolation in sqrt(eps), and a Newton polish of the coefficient
    equations; acceptance is by the sampled residual.
    """
    T = T.trimmed()
    N, d = T.size, T.band
    if N == 0:
        return MatPoly([])
    herm = T.hermitian_defect()
    scale = max(float(np.max(np.abs(T.stack))), 1e-300)
    if herm > 1e-9 * scale:
        raise PreconditionError("symbol is not Hermitian on the circle")
    # PSD spot check
    for t in range(257):
        w = np.exp(2j * np.pi * t / 257)
        lam = np.linalg.eigvalsh(0.5 * (T(w) + T(w).conj().T))
        if lam[0] < -1e-7 * scale:
            raise PreconditionError(
                "symbol is indefinite on the circle (eigenvalue %.3e)" % lam[0])

    if N == 1:
        # root splitting with multiplicity-aware refinement is already
        # machine-accurate; the coefficient equations are singular at
        # torus zeros, so a Newton polish on them would drift
        e = _scalar_factor_from_roots(T.stack[:, 0, 0], d, tol)
        E = MatPoly([np.array([[x]]) for x in e])
    else:
        # Regularization ladder.  Simple torus zeros of det E move like
        # sqrt(eps), so shallow rungs extrapolate well in sqrt(eps) but
        # deep rungs converge too slowly to truncate; multiple zeros move
        # like eps^(1/2mu), so deep rungs converge fast and win outright.
        # Collect candidates from both regimes and keep the best residual.
        cand = []
        shallow = []
        for eps in ladder:
            try:
                Ec = _bauer_factor(T, eps * scale)
            except PreconditionError:
                continue
            cand.append(Ec)
            if eps >= 1e-8:
                shallow.append((math.sqrt(eps), Ec.stack()))
        if len(shallow) >= 2:
            (h1, s1), (h2, s2) = shallow[-2], shallow[-1]
            cand.append(MatPoly(list((h1 * s2 - h2 * s1) / (h1 - h2))))
        if len(shallow) >= 3:
            hs = [h for h, _ in shallow[-3:]]
            quad = np.zeros_like(shallow[0][1])
            for i in range(3):
                li = 1.0
                for j in range(3):
                    if j != i:
                        li *= hs[j] / (hs[j] - hs[i])
                quad = quad + shallow[-3 + i][1] * li
            cand.append(MatPoly(list(quad)))
        if not cand:
            raise PreconditionError(
                "regularized factorization failed at every rung")

        def rnorm(E):
            v = _coeff_residual_vec(E, T)
            return float(np.max(np.abs(v))) if v.size else 0.0

        best = min(cand, key=rnorm)
        pins = _symbol_torus_pins(T)
        polished, _ = _newton_polish(best, T, pins=pins)
        if pins:
            # the pinned polish trades a little coefficient residual for
            # exact torus zeros of det E, which downstream kernels need
            E = polished if rnorm(polished) <= tol else best
        else:
            E = polished if rnorm(polished) < rnorm(best) else best

    res = _factor_residual(E, T)
    if res > tol:
        raise CrossCheckError(
            "factorization residual %.3e exceeds tolerance %.1e" % (res, tol))
    # outer check: det E must not vanish inside the open disk.  Multiple
    # torus zeros of the determinant smear like eps^(1/k) under root
    # finding, so individual roots prove nothing; cluster means do.
    if N >= 1 and E.degree >= 1:
        detp = E.det_unipoly()
        dc = detp.to_array()
        nz = np.max(np.abs(dc)) if dc.size else 0.0
        if nz > 0:
            hi = len(dc) - 1
            while hi > 0 and abs(dc[hi]) <= 1e-10 * nz:
                hi -= 1
            if hi > 0:
                roots = np.roots(dc[hi::-1])
                clusters = _cluster_points(
                    list(roots), 2e-2, key=lambda r: (np.angle(r), abs(r)))
                bad = [c for c, k in clusters if abs(c) < 1.0 - 2e-3]
                if bad:
                    raise CrossCheckError(
                        "factor determinant vanishes inside the disk at %r"
                        % (bad[:3],))
    return E


# ---------------------------------------------------------------------------
# the canonical system
# ---------------------------------------------------------------------------

@dataclass
class AglerSystem:
    E1: VecPoly
    F1: VecPoly
    E2: VecPoly
    F2: VecPoly
    G: VecPoly | None
    E1_mat: MatPoly
    F1_mat: MatPoly
    E2_mat: MatPoly
    F2_mat: MatPoly
    identity_residual: float
    unique_pair: bool
    dim_G: int
    bidegree: tuple
    diagnostics: dict = field(default_factory=dict)


def _vec_to_mat_z2(vec, n, m):
    """E1-style: entries = rows of E(z2) Lambda_n(z1); returns E(z2)."""
    A = vec.coeff_stack()  # (n, n, m+1): entry, z1 pow, z2 pow
    coeffs = [A[:, :, k] for k in range(m + 1)]
    return MatPoly(coeffs) if n else MatPoly([])


def _vec_to_mat_z1(vec, n, m):
    """E2-style: entries = rows of E(z1) Lambda_m(z2); returns E(z1)."""
    A = vec.coeff_stack()  # (m, n+1, m): entry, z1 pow, z2 pow
    coeffs = [A[:, k, :] for k in range(n + 1)]
    return MatPoly(coeffs) if m else MatPoly([])


def _joint_system_polish(p, E1, F2, G, steps=40):
    """Joint Newton on both decomposition identities over (E1, F2, G).

    A one-variable factorization cannot place its factor closer to the
    canonical one than roundoff**(1/2h) along the directions a 2h-fold
    torus zero of the determinant leaves flat, and the pair identity
    alone admits the same drift (both kernels shift by a compensating
    term).  The second identity couples E1 to its own reflection, which
    sees that drift at first order, so polishing against both identities
    jointly recovers the canonical system to residual accuracy.
    """
    pf = p.to_float()
    X = _pq_tensor(pf)
    SA = E1.to_float().coeff_stack()
    SB = F2.to_float().coeff_stack()
    SG = G.to_float().coeff_stack() if G.dim else np.zeros((0, 0, 0))
    da, db, dg = SA.shape[0], SB.shape[0], SG.shape[0]
    if da == 0 and db == 0:
        return E1, F2, G, float(np.max(np.abs(X))) if X.size else 0.0

    def unpack(x):
        out = []
        pos = 0
        for S in (SA, SB, SG):
            cnt = S.size
            re = x[pos:pos + cnt].reshape(S.shape)
            im = x[pos + cnt:pos + 2 * cnt].reshape(S.shape)
            out.append(re + 1j * im)
            pos += 2 * cnt
        return out

    def resid(x):
        A, B, Gc = unpack(x)
        acc1 = np.zeros_like(X)
        acc3 = np.zeros_like(X)
        if da:
            KA = np.einsum("eab,ecd->abcd", A, A.conj())
            acc1 += _pad_like(_mul_one_minus(KA, 1), X.shape)
            Ar = A[:, ::-1, ::-1].conj()
            KAr = np.einsum("eab,ecd->abcd", Ar, Ar.conj())
            acc3 += _pad_like(_mul_one_minus(KAr, 1), X.shape)
        if db:
            KB = np.einsum("eab,ecd->abcd", B, B.conj())
            KBm = _pad_like(_mul_one_minus(KB, 2), X.shape)
            acc1 += KBm
            acc3 += KBm
        if dg:
            KG = np.einsum("eab,ecd->abcd", Gc, Gc.conj())
            acc3 += _pad_like(_mul_one_minus(_mul_one_minus(KG, 1), 2),
                              X.shape)
        R1 = X - acc1
        R3 = X - acc3
        return np.concatenate([R1.real.ravel(), R1.imag.ravel(),
                               R3.real.ravel(), R3.imag.ravel()])

    x0 = np.concatenate([np.concatenate([S.real.ravel(), S.imag.ravel()])
                         for S in (SA, SB, SG)])
    best_x, best_r = _svd_newton(resid, x0, steps)
    A, B, Gc = unpack(best_x)
    E1p = VecPoly.from_coeff_matrix(A.reshape(da, -1), E1.bidegree) if da else E1
    F2p = VecPoly.from_coeff_matrix(B.reshape(db, -1), F2.bidegree) if db else F2
    Gp = VecPoly.from_coeff_matrix(Gc.reshape(dg, -1), G.bidegree) if dg else G
    return E1p, F2p, Gp, best_r


def _canonical_halves(p):
    """(E1, F2) for p via the z1-side symbol and the tensor quotient."""
    n, m = p.bidegree
    if n > 0:
        T1 = build_T1(p)
        E1m = fejer_riesz(T1)
        # vector E1: entry i = sum_j E1m[i,j](z2) z1^j; the factor degree
        # can fall short of m when the symbol's outer band vanishes
        stack = np.zeros((m + 1, n, n), dtype=complex)
        got = E1m.stack()
        stack[:got.shape[0]] = got
        M = np.transpose(stack, (1, 2, 0)).reshape(n, n * (m + 1))
        E1 = VecPoly.from_coeff_matrix(M, (n - 1, m))
    else:
        E1 = VecPoly([], (0, m), p.backend)
    X = _pq_tensor(p.to_float())
    K1 = _mul_one_minus(E1.kernel_tensor(), 1) if n > 0 else 0.0
    Xp = X - (_pad_like(K1, X.shape) if n > 0 else 0.0)
    quot, bres = _divide_one_minus(Xp, 2)
    F2, neg = _vec_from_psd(quot, m, clamp=(n > 1))
    return E1, F2, bres, neg


def canonical_system(p):
    """The canonical sums-of-squares system of a semi-stable polynomial.

    Builds the max-min pair (E1, F2) through a one-variable spectral
    factorization on whichever variable gives the smaller matrix symbol,
    obtains the opposite pair by reflection, and extracts G from the
    kernel quotient.  All vectors are canonicalized (unitary staircase
    convention) before being returned.
    """
    require_semistable(p)
    n, m = p.bidegree
    diag = {}
    if m == 0 or (n != 0 and n <= m):
        E1, F2, bres, neg = _canonical_halves(p)
        diag["quotient_boundary_residual"] = bres
    else:
        # build on the swapped polynomial: its (E1, F2) are our (E2, F1)
        ps = p.swap_vars()
        E2s, F1s, bres, neg = _canonical_halves(ps)
        diag["quotient_boundary_residual"] = bres
        E2 = VecPoly([e.swap_vars() for e in E2s.entries], (n, m - 1))
        F1 = VecPoly([e.swap_vars() for e in F1s.entries], (n - 1, m))
        E1 = F1.reflected()
        F2 = E2.reflected()
    F1 = E1.reflected()
    E2 = F2.reflected()

    # G from the kernel quotient of the last identity, averaged over the
    # two equivalent difference quotients
    KE1 = E1.kernel_tensor()
    KF1 = F1.kernel_tensor()
    KE2 = E2.kernel_tensor()
    KF2 = F2.kernel_tensor()
    gq1, gb1 = _divide_one_minus(KE1 - KF1, 2)
    gq2, gb2 = _divide_one_minus(KE2 - KF2, 1)
    diag["g_boundary_residuals"] = (gb1, gb2)
    if gq1.size and gq2.size:
        KG = 0.5 * (gq1 + gq2)
    elif gq1.size:
        KG = gq1
    else:
        KG = gq2
    if n and m:
        scale = max(float(np.max(np.abs(KE1))), float(np.max(np.abs(KE2))),
                    1e-300)
        Gmat = KG.reshape(KG.shape[0] * KG.shape[1], -1).T
        Gmat = 0.5 * (Gmat + Gmat.conj().T)
        w, V = np.linalg.eigh(Gmat) if Gmat.size else \
            (np.zeros(0), np.zeros((0, 0)))
        top = float(w[-1]) if w.size else 0.0
        # an off-canonical pair (unavoidable when the one-variable symbol
        # determinant degenerates on the circle) shifts the quotient by an
        # indefinite kernel; genuine G components are positive, so gate
        # positives against the most negative eigenvalue
        neg_floor = float(max(-w[0], 0.0)) if w.size else 0.0
        gate = max(3.0 * neg_floor, 1e-9 * scale)
        diag["g_spectrum_gate"] = (top, neg_floor, gate)
        if top <= gate:
            dim_G = 0
            G = VecPoly([], (n - 1, m - 1))
        else:
            wd = w[::-1]
            Vd = V[:, ::-1]
            dim_G = int(np.sum(wd > max(1e-7 * top, gate)))
            dim_G = min(dim_G, n * m)
            J = (np.sqrt(np.maximum(wd[:dim_G], 0.0))[:, None]
                 * Vd[:, :dim_G].conj().T)
            G = VecPoly.from_coeff_matrix(J, (n - 1, m - 1))
    else:
        dim_G = 0
        G = VecPoly([], (max(n - 1, 0), max(m - 1, 0)))

    pf = p.to_float()

    def _system_residual(e1, f1, e2, f2, g):
        return max(
            _tensor_residual(pf, [(1, e1), (2, f2)]),
            _tensor_residual(pf, [(1, f1), (2, e2)]),
            _tensor_residual(pf, [(1, f1), (2, f2)], g=g),
        )

    residual = _system_residual(E1, F1, E2, F2, G)
    xscale = max(float(pf.max_norm()) ** 2, 1.0)
    if n and m and residual > 1e-11 * xscale:
        E1, F2, G, _ = _joint_system_polish(p, E1, F2, G)
        if G.dim:
            # drop components the polish drove to zero (quotient noise
            # that the gate let through)
            stacks = [g.to_array() for g in G.entries]
            mags = [float(np.max(np.abs(s))) if s.size else 0.0
                    for s in stacks]
            top_mag = max(mags) if mags else 0.0
            keep = [g for g, v in zip(G.entries, mags)
                    if v > 1e-6 * top_mag]
            if len(keep) != G.dim:
                G = VecPoly(keep, G.bidegree)
                E1, F2, G, _ = _joint_system_polish(p, E1, F2, G)
            dim_G = G.dim
        F1 = E1.reflected()
        E2 = F2.reflected()
        diag["joint_polish"] = True
        residual = _system_residual(E1, F1, E2, F2, G)

    E1 = E1.canonicalized()
    F1 = F1.canonicalized()
    E2 = E2.canonicalized()
    F2 = F2.canonicalized()
    G = G.canonicalized()

    residual = _system_residual(E1, F1, E2, F2, G)
    return AglerSystem(
        E1=E1, F1=F1, E2=E2, F2=F2, G=(G if dim_G else None),
        E1_mat=_vec_to_mat_z2(E1, n, m), F1_mat=_vec_to_mat_z2(F1, n, m),
        E2_mat=_vec_to_mat_z1(E2, n, m), F2_mat=_vec_to_mat_z1(F2, n, m),
        identity_residual=float(residual),
        unique_pair=(dim_G == 0), dim_G=dim_G, bidegree=(n, m),
        diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# isometries and transfer-function realizations
# ---------------------------------------------------------------------------

def intertwine(A, B, tol=1e-8):
    """The canonical isometry V with V A(z) = B(z).

    Requires |A(z)|^2 = |B(z)|^2 as polynomials (checked by polarization).
    The extension off span{A(z)} is chosen so A = B yields the identity.
    """
    GA = A.kernel_tensor()
    GB = B.kernel_tensor()
    shape = tuple(max(a, b) for a, b in zip(GA.shape, GB.shape))
    dev = float(np.max(np.abs(_pad_like(GA, shape) - _pad_like(GB, shape))))
    scale = max(float(np.max(np.abs(GA))), 1.0)
    if dev > tol * scale:
        raise PreconditionError(
            "norm identity |A|^2 = |B|^2 fails (deviation %.3e)" % dev)
    MA = A.coeff_matrix()
    MB = B.coeff_matrix()
    K = max(MA.shape[1], MB.shape[1])
    MA = np.pad(MA, ((0, 0), (0, K - MA.shape[1])))
    MB = np.pad(MB, ((0, 0), (0, K - MB.shape[1])))
    na, nb = A.dim, B.dim
    Ua, s, Vh = np.linalg.svd(MA, full_matrices=True)
    rank = int(np.sum(s > 1e-12 * (s[0] if s.size else 1.0)))
    W = MB @ Vh.conj().T[:, :rank] @ np.diag(1.0 / s[:rank])
    # complete W over the A-side null directions, as far as the target
    # dimension allows; the completion fixes A = B to the identity
    want = min(na, nb) - rank
    if want > 0:
        Uext = Ua[:, rank:rank + want]
        P = np.eye(nb, dtype=complex) - W @ W.conj().T
        C = P @ np.pad(Uext, ((0, max(nb - na, 0)), (0, 0)))[:nb, :]
        Q = _orthonormal_columns(C, want)
        V = np.concatenate([W, Q], axis=1) @ \
            np.concatenate([Ua[:, :rank], Uext], axis=1).conj().T
    else:
        V = W @ Ua[:, :rank].conj().T
    return V


def _orthonormal_columns(C, want):
    """Orthonormalize the columns of C, extending canonically if short."""
    got = []
    n = C.shape[0]
    for j in range(C.shape[1]):
        v = C[:, j].copy()
        for u in got:
            v -= u * (u.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-10:
            got.append(v / nv)
        if len(got) == want:
            break
    j = 0
    while len(got) < want and j < n:
        v = np.zeros(n, dtype=complex)
        v[j] = 1.0
        for u in got:
            v -= u * (u.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-10:
            got.append(v / nv)
        j += 1
    return np.stack(got, axis=1) if got else np.zeros((n, 0), dtype=complex)


@dataclass
class Realization:
    U: np.ndarray
    N: int
    M: int
    A: complex
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    unitarity_residual: float
    transfer_residual: float
    d_spectral_radius: float


def _stacked_vec(p, A1, A2, shift):
    """Entries (p, z1 A1, z2 A2) or (ptilde, A1, A2) as one VecPoly."""
    z1 = BivPoly.from_complex([[0.0], [1.0]])
    z2 = BivPoly.from_complex([[0.0, 1.0]])
    entries = []
    if shift:
        entries.append(p.to_float())
        entries.extend((z1 * e.to_float()) for e in A1.entries)
        entries.extend((z2 * e.to_float()) for e in A2.entries)
    else:
        entries.append(reflect(p).to_float())
        entries.extend(e.to_float() for e in A1.entries)
        entries.extend(e.to_float() for e in A2.entries)
    nb = max((e.bidegree[0] for e in entries), default=0)
    mb = max((e.bidegree[1] for e in entries), default=0)
    entries = [e.with_bidegree(nb, mb) for e in entries]
    return VecPoly(entries, (nb, mb))


def realize(p, A1, A2, tol=1e-8, points=100, seed=20111):
    """Unitary colligation U with transfer function ptilde/p.

    U maps (p, z1 A1, z2 A2) to (ptilde, A1, A2); the Agler identity makes
    the two stacked vectors pointwise equinormed, so the intertwining
    matrix is unitary.  The transfer function A + B Delta (I - D Delta)^-1 C
    is then checked against ptilde/p at random interior points.
    """
    res = verify_agler(p, A1, A2)
    scale = max(float(p.to_float().max_norm()) ** 2, 1.0)
    if res > 1e-8 * scale:
        raise PreconditionError(
            "not an Agler pair (polarized residual %.3e)" % res)
    lhs = _stacked_vec(p, A1, A2, shift=True)
    rhs = _stacked_vec(p, A1, A2, shift=False)
    U = intertwine(lhs, rhs)
    N, M = A1.dim, A2.dim
    size = 1 + N + M
    unit = float(np.max(np.abs(U.conj().T @ U - np.eye(size))))
    A = complex(U[0, 0])
    B = U[0:1, 1:]
    C = U[1:, 0:1]
    D = U[1:, 1:]
    rng = np.random.default_rng(seed)
    pf = p.to_float()
    ptf = reflect(p).to_float()
    worst = 0.0
    for _ in range(points):
        r1, r2 = rng.uniform(0, 0.95, 2)
        t1, t2 = rng.uniform(0, 2 * np.pi, 2)
        z1 = r1 * np.exp(1j * t1)
        z2 = r2 * np.exp(1j * t2)
        delta = np.diag([z1] * N + [z2] * M)
        inner = np.linalg.solve(np.eye(N + M) - D @ delta, C)
        val = A + (B @ delta @ inner)[0, 0] if N + M else A
        want = ptf(z1, z2) / pf(z1, z2)
        worst = max(worst, abs(val - want))
    if worst > tol:
        raise CrossCheckError(
            "transfer function mismatch %.3e exceeds %.1e" % (worst, tol))
    rho = float(np.max(np.abs(np.linalg.eigvals(D)))) if N + M else 0.0
    return Realization(U=U, N=N, M=M, A=A, B=B, C=C, D=D,
                       unitarity_residual=unit, transfer_residual=worst,
                       d_spectral_radius=rho)


# ---------------------------------------------------------------------------
# torus identity for |A_j|^2
# ---------------------------------------------------------------------------

def eont_residual(p, vec, axis=1, samples=1000, seed=4441):
    """Deviation of |A(z)|^2 from n|p|^2 - 2 Re(conj(p) z d p) on the torus.

    axis=1 compares against the z1 form (degree n), axis=2 the z2 form.
    Returns the max absolute deviation over the sampled torus points,
    relative to max(1, |p|_max^2).
    """
    n, m = p.bidegree
    pf = p.to_float()
    dp = pf.deriv1() if axis == 1 else pf.deriv2()
    deg = n if axis == 1 else m
    rng = np.random.default_rng(seed)
    th = rng.uniform(0, 2 * np.pi, size=(2, samples))
    Z1 = np.exp(1j * th[0])
    Z2 = np.exp(1j * th[1])
    P = pf.eval_grid(Z1, Z2)
    Dp = dp.eval_grid(Z1, Z2)
    Zax = Z1 if axis == 1 else Z2
    rhs = deg * np.abs(P) ** 2 - 2 * np.real(np.conj(P) * Zax * Dp)
    V = vec.eval_grid(Z1, Z2)
    lhs = np.sum(np.abs(V) ** 2, axis=0) if vec.dim else np.zeros_like(rhs)
    scale = max(float(pf.max_norm()) ** 2, 1.0)
    return float(np.max(np.abs(lhs - rhs)) / scale)


# ---------------------------------------------------------------------------
# the Gram model of L^2(1/|p|^2) for stable p
# ---------------------------------------------------------------------------

@dataclass
class GramReport:
    grid: int
    gram_delta: float
    dim_G: int
    T1: np.ndarray
    T2star: np.ndarray
    joint_eigenvalues: list
    expected_zeros: list
    spectrum_deviation: float
    zero_count_matches: bool
    e1_kernel_deviation: float


def _fourier_weights(p, n, m, base_grid=256, max_grid=4096):
    """hat(1/|p|^2)(s, t) for |s| <= n, |t| <= m, grid-doubled to 1e-9.

    The torus samples of p come from a zero-padded 2D FFT of its grid.
    """
    pf = p.to_float()
    C = pf.to_array()
    L = base_grid
    prev = None
    while True:
        Cpad = np.zeros((L, L), dtype=complex)
        Cpad[:C.shape[0], :C.shape[1]] = C
        vals = np.fft.ifft2(Cpad) * (L * L)
        mags = np.abs(vals)
        if np.min(mags) < 1e-9 * max(pf.max_norm(), 1.0):
            raise PreconditionError(
                "polynomial vanishes on the torus grid; the weight "
                "1/|p|^2 is not integrable")
        W = 1.0 / mags ** 2
        F = np.fft.ifft2(W)
        cur = np.zeros((2 * n + 1, 2 * m + 1), dtype=complex)
        for s in range(-n, n + 1):
            for u in range(-m, m + 1):
                cur[s + n, u + m] = F[s % L, u % L]
        delta = float(np.max(np.abs(cur - prev))) if prev is not None else \
            float("inf")
        if delta < 1e-9 or L >= max_grid:
            return cur, L, (delta if prev is not None else 0.0)
        prev = cur
        L *= 2


def _gram(coeff, idx_a, idx_b, n, m):
    """Gram matrix G[i,j] = <mono_j, mono_i> for monomial index lists."""
    G = np.zeros((len(idx_a), len(idx_b)), dtype=complex)
    for i, (a1, b1) in enumerate(idx_a):
        for j, (a2, b2) in enumerate(idx_b):
            G[i, j] = coeff[(a2 - a1) + n, (b2 - b1) + m]
    return G


def _complement_basis(coeff, big, small, n, m):
    """Orthonormal basis (in monomial coords over big) of big minus small."""
    if not big:
        return np.zeros((0, 0), dtype=complex)
    Gbb = _gram(coeff, big, big, n, m)
    if small:
        Gsb = _gram(coeff, small, big, n, m)
        ns = scipy.linalg.null_space(Gsb, rcond=1e-10)
    else:
        ns = np.eye(len(big), dtype=complex)
    if ns.shape[1] == 0:
        return np.zeros((len(big), 0), dtype=complex)
    # orthonormalize columns wrt the Gram inner product
    M = ns.conj().T @ Gbb @ ns
    M = 0.5 * (M + M.conj().T)
    w, V = np.linalg.eigh(M)
    keep = w > 1e-12 * max(w[-1], 1e-300)
    cols = V[:, keep] / np.sqrt(w[keep])
    return ns @ cols


def gram_model(p, base_grid=256):
    """Numerical model of L^2(1/|p|^2) for p zero-free on the closed bidisk.

    Builds the Gram matrix of monomials, the compressed multiplication
    operators on G, their joint eigenvalues, and cross-checks the joint
    spectrum against the common zeros of (flip2 p, reflect flip2 p) inside
    the open bidisk located independently by the intersection machinery.
    """
    from . import intersect as ix

    rep = check_semistable(p, resolution=(24, 192))
    if rep.witnesses:
        raise PreconditionError("polynomial has zeros in the open bidisk")
    n, m = p.bidegree
    coeff, L, delta = _fourier_weights(p, n, m, base_grid)

    monos_G = [(a, b) for a in range(n) for b in range(m)]
    dim_G = len(monos_G)
    if dim_G:
        Ggram = _gram(coeff, monos_G, monos_G, n, m)
        Z1m = [(a + 1, b) for (a, b) in monos_G]
        Z2s = [(a, b - 1) for (a, b) in monos_G]
        R1 = _gram(coeff, monos_G, Z1m, n, m)   # <z1 g_j, g_i>
        R2 = _gram(coeff, monos_G, Z2s, n, m)   # <conj(z2) g_j, g_i>
        T1 = np.linalg.solve(Ggram, R1)
        T2s = np.linalg.solve(Ggram, R2)
    else:
        T1 = np.zeros((0, 0), dtype=complex)
        T2s = np.zeros((0, 0), dtype=complex)

    joint = _joint_eigs(T1, T2s)

    q = flip2(p)
    qt = reflect(q)
    zrep = ix.common_zeros(q, qt)
    expected = []
    for z in zrep.zeros:
        a, b = z.point
        if a is ix.INFINITY or b is ix.INFINITY:
            continue
        if abs(a) < 1.0 - 1e-8 and abs(b) < 1.0 - 1e-8:
            expected.extend([(a, b)] * z.multiplicity)
    count_ok = len(expected) == dim_G

    dev = _match_point_sets(joint, expected)

    # kernel comparison: Gram-model E1 vs the canonical construction
    if n:
        big = [(a, b) for a in range(n) for b in range(m + 1)]
        small = [(a, b + 1) for a in range(n) for b in range(m)]
        C1 = _complement_basis(coeff, big, small, n, m)
        K_gram = np.zeros((n, m + 1, n, m + 1), dtype=complex)
        if C1.size:
            V = np.zeros((C1.shape[1], n, m + 1), dtype=complex)
            for col in range(C1.shape[1]):
                for i, (a, b) in enumerate(big):
                    V[col, a, b] = C1[i, col]
            K_gram = np.einsum("eab,ecd->abcd", V, V.conj())
        K_can = canonical_system(p).E1.kernel_tensor()
        e1_dev = float(np.max(np.abs(K_gram - K_can)))
    else:
        e1_dev = 0.0

    return GramReport(
        grid=L, gram_delta=delta, dim_G=dim_G, T1=T1, T2star=T2s,
        joint_eigenvalues=joint, expected_zeros=expected,
        spectrum_deviation=dev, zero_count_matches=count_ok,
        e1_kernel_deviation=e1_dev,
    )


def _joint_eigs(T1, T2s, cluster_tol=1e-6):
    """Joint eigenvalues of a commuting pair, with multiplicity.

    Eigenvalues of T1 are clustered; for each cluster an ordered Schur
    form isolates the invariant subspace, on which T2s is compressed and
    its eigenvalues read off.
    """
    k = T1.shape[0]
    if k == 0:
        return []
    w1 = np.linalg.eigvals(T1)
    scale = max(1.0, float(np.max(np.abs(w1))))
    clusters = []
    for lam in w1:
        for c in clusters:
            if abs(c[0] / c[1] - lam) < cluster_tol * scale:
                c[0] += lam
                c[1] += 1
                break
        else:
            clusters.append([lam, 1])
    out = []
    for total, count in clusters:
        center = total / count
        radius = cluster_tol * scale * (count + 1)

        def near(lam, center=center, radius=radius):
            return bool(abs(lam - center) < radius)

        T, Z, sdim = scipy.linalg.schur(T1, output="complex", sort=near)
        sdim = int(sdim)
        if sdim == 0:
            continue
        V = Z[:, :sdim]
        sub = V.conj().T @ T2s @ V
        lam1 = complex(np.mean(np.diag(T)[:sdim]))
        for v in np.linalg.eigvals(sub):
            out.append((lam1, complex(v)))
    return out


def _match_point_sets(got, want):
    """Greedy matching deviation between two point multisets in C^2."""
    if len(got) != len(want):
        return float("inf")
    rem = list(want)
    worst = 0.0
    for g in got:
        if not rem:
            return float("inf")
        dists = [max(abs(g[0] - w[0]), abs(g[1] - w[1])) for w in rem]
        kbest = int(np.argmin(dists))
        worst = max(worst, dists[kbest])
        rem.pop(kbest)
    return worst
