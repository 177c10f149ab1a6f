"""Common zeros of a polynomial pair on C-infinity x C-infinity.

Zeros are located in four affine charts (each coordinate either kept or
inverted through the declared bidegree), eliminated by resultant, and
matched by residual.  Multiplicity at a point is the dimension of the
joint generalized eigenspace of the multiplication matrices on the
quotient ring, computed from the kernel of stacked D-th powers.  An
independent Fulton-style reduction is available as a cross-check.

Defective zeros splinter under floating point (a k-fold eigenvalue smears
over a radius of roughly eps**(1/k)), so located points are clustered at
an escalating tolerance, re-anchored to small-denominator Gaussian
rationals when a residual check certifies them, and the whole report is
accepted only when the multiplicities sum to the Bezout count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import PreconditionError, CrossCheckError
from .scalars import EXACT, FLOAT, GaussianRational, rational
from .polycore import (BivPoly, UniPoly, reflect, flip2, gcd, translate,
                       resultant_z2, unipoly_gcd)
from . import groebner as gb

INFINITY = float("inf")

REGION_TORUS = "T2"
REGION_DISK_OUT = "DxDinv"
REGION_OUT_DISK = "DinvxD"
REGION_OTHER = "other"

CHART_NAMES = ("FF", "IF", "FI", "II")

_CLUSTER_LADDER = (1e-6, 1e-4, 1e-2, 5e-2, 2e-1)
_REGION_TOL = 1e-8
_SNAP_DENOM = 40


@dataclass
class LocatedZero:
    point: tuple          # per coordinate: complex, or INFINITY
    multiplicity: int
    region: str
    chart: str
    exact_point: tuple | None = None  # set when coordinates were certified exactly


@dataclass
class IntersectionReport:
    zeros: list
    total: int
    bidegrees: tuple
    torus_total: int
    disk_total: int
    diagnostics: dict = field(default_factory=dict)


def _chart_poly(p, rev1, rev2):
    grid = [row[:] for row in p.c]
    if rev1:
        grid = grid[::-1]
    if rev2:
        grid = [row[::-1] for row in grid]
    return BivPoly(grid, p.backend)


def _roots(coeffs, floor=0.0):
    """Roots of a complex polynomial given ascending coefficients.

    floor is an absolute noise level (from the ambient problem's scale);
    a polynomial whose coefficients all sit below it counts as identically
    zero and returns None.
    """
    arr = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(arr)) if arr.size else 0.0
    if scale <= floor:
        return None  # identically zero at this noise level
    keep = len(arr)
    cut = max(1e-13 * scale, floor)
    while keep > 1 and abs(arr[keep - 1]) <= cut:
        keep -= 1
    arr = arr[:keep]
    if len(arr) == 1:
        return np.array([], dtype=complex)
    return np.roots(arr[::-1])


def _squarefree_exact(r):
    """Exact squarefree part of a univariate polynomial, monic."""
    if r.degree <= 1:
        return r.monic()
    g = unipoly_gcd(r, r.deriv())
    if g.degree == 0:
        return r.monic()
    q, _ = r.divmod(g)
    return q.monic()


def _affine_common_zeros(q1, q2):
    """Raw float common zeros of a chart pair, duplicates included."""
    f1, f2 = q1.to_float().trimmed(), q2.to_float().trimmed()
    if f1.is_zero() or f2.is_zero():
        raise PreconditionError("chart polynomial vanished identically")
    if f1.m == 0 and f2.m == 0:
        return []  # no z2 dependence; trivial gcd means no common root at all
    if q1.backend == EXACT:
        # a k-fold resultant root costs eps**(1/k) accuracy numerically,
        # which for large k defeats every later tolerance; strip the
        # multiplicities exactly first so the rootfinder only ever sees
        # simple roots
        res = _squarefree_exact(resultant_z2(q1.trimmed(), q2.trimmed()))
        rcoeffs = [complex(c) for c in res.c]
        rroots = _roots(rcoeffs, floor=0.0)
    else:
        res = resultant_z2(f1, f2)
        rcoeffs = [complex(c) for c in res.c]
        rfloor = 1e-10 * max(max(abs(c) for c in rcoeffs), 1.0)
        rroots = _roots(rcoeffs, floor=rfloor)
    if rroots is None:
        raise CrossCheckError("resultant vanished identically despite trivial gcd")
    pts = []
    for a in rroots:
        # the slice floor is loose on purpose: a resultant root of
        # multiplicity k is computed with error around eps**(1/k), and a
        # line component of one factor must still read as the zero slice.
        # Misreads are cheap; they surface as multiplicity-0 candidates
        # and are discarded downstream.
        growth1 = max(1.0, abs(a)) ** f1.n
        growth2 = max(1.0, abs(a)) ** f2.n
        c1 = _slice_coeffs(f1, a)
        c2 = _slice_coeffs(f2, a)
        r1 = _roots(c1, floor=1e-6 * f1.max_norm() * growth1)
        r2 = _roots(c2, floor=1e-6 * f2.max_norm() * growth2)
        if r1 is None and r2 is None:
            raise CrossCheckError("pair degenerates on a whole line z1=%s" % a)
        if r1 is None:
            for b in (r2 if r2 is not None else []):
                pts.append((complex(a), complex(b)))
            continue
        if r2 is None:
            for b in r1:
                pts.append((complex(a), complex(b)))
            continue
        for b in _match_partners(r1, r2):
            pts.append((complex(a), complex(b)))
    return pts


def _slice_coeffs(f, a):
    """Coefficients in z2 of f(a, z2)."""
    out = []
    for k in range(f.m + 1):
        acc = 0j
        for j in range(f.n, -1, -1):
            acc = acc * a + complex(f.c[j][k])
        out.append(acc)
    return out


def _match_partners(r1, r2, tol=5e-2):
    """Pair up z2-roots of the two slices; a common zero shows in both.

    The tolerance is deliberately loose: near a high-multiplicity zero the
    two slices' roots can drift apart by several orders more than simple
    roots would.  Spurious matches are harmless downstream, where they
    resolve to multiplicity zero and are discarded.
    """
    out = []
    used = [False] * len(r2)
    for b in r1:
        best, bi = None, -1
        for i, b2 in enumerate(r2):
            if used[i]:
                continue
            d = abs(b - b2)
            if best is None or d < best:
                best, bi = d, i
        if bi >= 0 and best <= tol * (1.0 + abs(b)):
            used[bi] = True
            out.append((b + r2[bi]) / 2.0)
    return out


def _chordal(u, v):
    if u == INFINITY and v == INFINITY:
        return 0.0
    if u == INFINITY:
        return 1.0 / (1.0 + abs(v) ** 2) ** 0.5
    if v == INFINITY:
        return 1.0 / (1.0 + abs(u) ** 2) ** 0.5
    return abs(u - v) / ((1.0 + abs(u) ** 2) * (1.0 + abs(v) ** 2)) ** 0.5


def _sphere_dist(P, Q):
    return max(_chordal(P[0], Q[0]), _chordal(P[1], Q[1]))


def _to_sphere(pt, rev1, rev2, tol):
    a, b = pt
    if rev1:
        a = INFINITY if abs(a) <= tol else 1.0 / a
    if rev2:
        b = INFINITY if abs(b) <= tol else 1.0 / b
    return (a, b)


def _from_sphere(P, rev1, rev2):
    """Chart-local coordinates of a sphere point, or None if not finite there."""
    def back(u, rev):
        if rev:
            if u == INFINITY:
                return 0j
            u = complex(u)
            return None if u == 0j else 1.0 / u
        return None if u == INFINITY else complex(u)
    a = back(P[0], rev1)
    b = back(P[1], rev2)
    if a is None or b is None:
        return None
    return (a, b)


def _snap_candidates(x, radius, max_denom=_SNAP_DENOM):
    """Small-denominator Gaussian rationals within radius of x, nearest first."""
    seen = set()
    out = []
    for d in range(1, max_denom + 1):
        nr = round(x.real * d)
        ni = round(x.imag * d)
        cand = GaussianRational(rational(nr, d), rational(ni, d))
        key = (cand.re, cand.im)
        if key in seen:
            continue
        err = abs(complex(cand) - x)
        if err <= radius:
            seen.add(key)
            out.append((err, len(out), cand))
    out.sort(key=lambda t: (t[0], t[1]))
    return [c for _, _, c in out]


def _try_snap(q1, q2, pt, tol):
    """Certify a cluster center as an exact Gaussian-rational common zero.

    Candidates only propose; acceptance is by evaluation.  The radius floor
    of 1e-3 covers the splinter spread of defective clusters that the
    ladder has not yet merged.  On the exact backend a wrong proposal can
    never pass, so candidates are tried nearest first; on the float
    backend proximity is no tiebreaker (a near-miss candidate can sit
    right at the residual gate when the zero is multiple), so the
    candidate with the smallest residual wins.
    """
    a, b = pt
    if q1.backend == EXACT:
        radius = max(2.0 * tol, 1e-3)
        for sa in _snap_candidates(a, radius):
            for sb in _snap_candidates(b, radius):
                if _is_exact_zero(q1, sa, sb) and _is_exact_zero(q2, sa, sb):
                    return (sa, sb)
        return None
    radius = min(max(2.0 * tol, 1e-3), 5e-2)
    scale1 = max(q1.max_norm(), 1.0)
    scale2 = max(q2.max_norm(), 1.0)
    best = None
    for sa in _snap_candidates(a, radius):
        for sb in _snap_candidates(b, radius):
            za, zb = complex(sa), complex(sb)
            r = max(abs(q1(za, zb)) / scale1, abs(q2(za, zb)) / scale2)
            if r <= 1e-6 and (best is None or r < best[0]):
                best = (r, (sa, sb))
    return None if best is None else best[1]


def _is_exact_zero(q, a, b):
    v = q(a, b)
    return v.is_zero()


def _classify(P, tol=_REGION_TOL):
    def side(u):
        if u == INFINITY:
            return +1
        r = abs(u)
        if r > 1.0 + tol:
            return +1
        if r < 1.0 - tol:
            return -1
        return 0
    s1, s2 = side(P[0]), side(P[1])
    if s1 == 0 and s2 == 0:
        return REGION_TORUS
    if s1 < 0 and s2 > 0:
        return REGION_DISK_OUT
    if s1 > 0 and s2 < 0:
        return REGION_OUT_DISK
    return REGION_OTHER


class _QuotientModel:
    """Groebner data of <p1, p2>: quotient basis and multiplication matrices."""

    def __init__(self, p1, p2, backend, eps=1e-10):
        if backend == EXACT:
            F = gb.ExactField()
            g1, g2 = p1, p2
        else:
            F = gb.FloatField(eps)
            g1, g2 = p1.to_float(), p2.to_float()
        basis_gb = gb.buchberger(
            [gb.bivpoly_to_dict(g1), gb.bivpoly_to_dict(g2)], F)
        self.backend = backend
        self.field = F
        self.gb = basis_gb
        self.monomials = gb.standard_monomials(basis_gb)
        self.dim = len(self.monomials)
        if self.dim:
            self.M1, self.M2 = gb.multiplication_matrices(
                basis_gb, self.monomials, F)
        else:
            self.M1, self.M2 = [], []

    def local_dimension(self, lam, anchors=None, cap=0.35, same_tol=1e-7):
        """dim of the joint generalized eigenspace at lam (float route).

        The multiplication matrices commute, so the generalized eigenspace
        of M1 for the eigenvalue cluster at lam[0] is M2-invariant; the
        dimension we want is the size of lam[1]'s cluster in the compressed
        M2.  Eigenvalues are claimed for lam by nearest-anchor assignment:
        anchors should hold every located zero (in this chart's
        coordinates) so that a defective cluster's eps**(1/k) smear cannot
        be mistaken for a neighbouring zero.  Without anchors, everything
        within cap of lam is claimed, which overcounts when another zero
        sits closer than cap.
        """
        if self.dim == 0:
            return 0
        la, lb = complex(lam[0]), complex(lam[1])
        others1 = []
        others2 = []
        if anchors:
            for u, v in anchors:
                u, v = complex(u), complex(v)
                # anchors sharing lam's z1 (within location accuracy) must
                # pool: selecting only part of a shared M1 eigenvalue cloud
                # would compress M2 onto a non-invariant subspace
                if abs(u - la) <= same_tol:
                    if abs(v - lb) > same_tol:
                        others2.append(v)
                else:
                    others1.append(u)
        A1 = np.array(self.M1, dtype=complex)
        A2 = np.array(self.M2, dtype=complex)

        def claimed(x, target, rivals):
            d = abs(x - target)
            if d > cap:
                return False
            return all(d <= abs(x - w) for w in rivals)

        T, Z, sdim = scipy.linalg.schur(
            A1, output="complex", sort=lambda x: claimed(x, la, others1))
        if sdim == 0:
            return 0
        V = Z[:, :sdim]
        C = V.conj().T @ A2 @ V
        eig2 = np.linalg.eigvals(C)
        return int(sum(1 for x in eig2 if claimed(x, lb, others2)))

    def local_dimension_exact(self, lam):
        if self.dim == 0:
            return 0
        D = self.dim
        l1 = _as_gr(lam[0])
        l2 = _as_gr(lam[1])
        B1 = _mat_sub_scalar(self.M1, l1)
        B2 = _mat_sub_scalar(self.M2, l2)
        P1 = _mat_pow(B1, D)
        P2 = _mat_pow(B2, D)
        stacked = P1 + P2
        return D - _exact_rank(stacked, D)


def _as_gr(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return GaussianRational(x)
    raise PreconditionError("exact route needs Gaussian-rational coordinates")


def _mat_sub_scalar(M, s):
    D = len(M)
    out = [[M[i][j] - s if i == j else M[i][j] for j in range(D)] for i in range(D)]
    return out


def _mat_mul(A, B):
    D = len(A)
    zero = GaussianRational(0)
    out = [[zero] * D for _ in range(D)]
    for i in range(D):
        Ai = A[i]
        for k in range(D):
            a = Ai[k]
            if a.is_zero():
                continue
            Bk = B[k]
            row = out[i]
            for j in range(D):
                b = Bk[j]
                if not b.is_zero():
                    row[j] = row[j] + a * b
    return out


def _mat_pow(A, e):
    D = len(A)
    out = [[GaussianRational(1 if i == j else 0) for j in range(D)] for i in range(D)]
    base = A
    while e:
        if e & 1:
            out = _mat_mul(out, base)
        base = _mat_mul(base, base) if e > 1 else base
        e >>= 1
    return out


def _exact_rank(rows, width):
    """Rank by fraction-free-enough Gaussian elimination."""
    mat = [row[:] for row in rows]
    rank = 0
    col = 0
    nrows = len(mat)
    while rank < nrows and col < width:
        piv = None
        for r in range(rank, nrows):
            if not mat[r][col].is_zero():
                piv = r
                break
        if piv is None:
            col += 1
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = GaussianRational(1) / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(nrows):
            if r != rank and not mat[r][col].is_zero():
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    return rank


def multiplicity(p1, p2, lam, model=None):
    """Intersection multiplicity of <p1, p2> at the point lam.

    Returns 0 when lam is not a common zero.  Coordinates may include
    INFINITY; such points are routed through the matching inverted chart.
    """
    a, b = lam
    rev1 = a == INFINITY
    rev2 = b == INFINITY
    if rev1 or rev2:
        q1 = _chart_poly(p1, rev1, rev2)
        q2 = _chart_poly(p2, rev1, rev2)
        za = 0 if rev1 else a
        zb = 0 if rev2 else b
        return multiplicity(q1, q2, (za, zb))
    exact_pt = (isinstance(a, (GaussianRational, int))
                and isinstance(b, (GaussianRational, int)))
    if p1.backend == EXACT and exact_pt:
        if not _is_exact_zero(p1, _as_gr(a), _as_gr(b)) \
                or not _is_exact_zero(p2, _as_gr(a), _as_gr(b)):
            return 0
        if model is None:
            model = _QuotientModel(p1, p2, EXACT)
        return model.local_dimension_exact((a, b))
    f1, f2 = p1.to_float(), p2.to_float()
    za, zb = complex(a), complex(b)
    s1, s2 = max(f1.max_norm(), 1.0), max(f2.max_norm(), 1.0)
    if abs(f1(za, zb)) > 1e-5 * s1 or abs(f2(za, zb)) > 1e-5 * s2:
        return 0
    if model is None:
        # keep exact arithmetic through Buchberger whenever the inputs
        # allow it; float Groebner bases are a last resort for float data
        model = _QuotientModel(p1, p2, p1.backend)
    return model.local_dimension((za, zb))


def common_zeros(p1, p2):
    """Locate all common zeros of the pair on C∞ x C∞ with multiplicities."""
    if p1.backend != p2.backend:
        raise PreconditionError("mixed backends")
    if p1.is_zero() or p2.is_zero():
        raise PreconditionError("zero polynomial")
    if p1.backend == EXACT:
        g = gcd(p1, p2)
        if g.natural_bidegree() != (0, 0):
            raise PreconditionError("input pair has a common factor")
    n1, m1 = p1.bidegree
    n2, m2 = p2.bidegree
    bezout = n1 * m2 + n2 * m1

    raw = []  # (chart_index, local point)
    charts = []
    for idx, (rev1, rev2) in enumerate(((0, 0), (1, 0), (0, 1), (1, 1))):
        q1 = _chart_poly(p1, rev1, rev2)
        q2 = _chart_poly(p2, rev1, rev2)
        charts.append((q1, q2, rev1, rev2))
        for pt in _affine_common_zeros(q1, q2):
            raw.append((idx, pt))
    if not raw and bezout > 0:
        raise CrossCheckError(
            "no common zeros found but Bezout total is %d" % bezout)

    failures = []
    for tol in _CLUSTER_LADDER:
        try:
            zeros, dropped = _resolve_clusters(raw, charts, tol)
        except (CrossCheckError, PreconditionError) as exc:
            failures.append((tol, str(exc)))
            continue
        total = sum(z.multiplicity for z in zeros)
        if total == bezout:
            sep = _separation_suspect(zeros)
            if sep is not None:
                failures.append((tol, sep))
                continue
            torus = sum(z.multiplicity for z in zeros if z.region == REGION_TORUS)
            disk = sum(z.multiplicity for z in zeros
                       if _inside_disk(z.point[0]) and _inside_disk(z.point[1]))
            zeros.sort(key=_zero_sort_key)
            return IntersectionReport(
                zeros=zeros, total=total,
                bidegrees=((n1, m1), (n2, m2)),
                torus_total=torus, disk_total=disk,
                diagnostics={"cluster_tol": tol, "discarded_matches": dropped},
            )
        failures.append((tol, "multiplicity sum %d != Bezout %d" % (total, bezout)))
    raise CrossCheckError(
        "could not reconcile multiplicities with the Bezout count: %s" % failures)


def _separation_suspect(zeros):
    """Detect splinters of one defective zero posing as distinct zeros.

    Splits of a multiplicity-k eigenvalue cloud can divide the local
    dimension consistently and so fool the Bezout gate.  Two located zeros
    that are not both exactly certified and sit closer together than the
    eps**(1/k) defect radius of their combined multiplicity are therefore
    treated as one unresolved zero, which sends the caller to the next
    rung of the clustering ladder.
    """
    for i in range(len(zeros)):
        for j in range(i + 1, len(zeros)):
            if zeros[i].exact_point is not None \
                    and zeros[j].exact_point is not None:
                continue  # certified distinct
            k = zeros[i].multiplicity + zeros[j].multiplicity
            limit = 3.0 * 2.2e-16 ** (1.0 / k)
            if _sphere_dist(zeros[i].point, zeros[j].point) < limit:
                return ("zeros %r and %r closer than the defect radius %.2g"
                        % (zeros[i].point, zeros[j].point, limit))
    return None


def _inside_disk(u):
    return u != INFINITY and abs(u) < 1.0 - _REGION_TOL


def _zero_sort_key(z):
    def coord(u):
        return (1, 0.0, 0.0) if u == INFINITY else (0, round(u.real, 6), round(u.imag, 6))
    return (coord(z.point[0]), coord(z.point[1]))


def _resolve_clusters(raw, charts, tol):
    sphere = []
    for idx, pt in raw:
        _, _, rev1, rev2 = charts[idx]
        sphere.append(_to_sphere(pt, rev1, rev2, tol))
    groups = []  # list of lists of raw indices
    for i, P in enumerate(sphere):
        placed = False
        for grp in groups:
            if _sphere_dist(sphere[grp[0]], P) <= tol:
                grp.append(i)
                placed = True
                break
        if not placed:
            groups.append([i])

    # anchor every group to a chart and, when certifiable, an exact point
    anchored = []
    for grp in groups:
        # snap each chart's sub-cluster first: certified points carry no
        # float smear, so preferences taken on them are reproducible even
        # for defective zeros whose raw eigenvalues scatter at eps**(1/k)
        candidates = []
        seen_idx = set()
        for i in grp:
            seen_idx.add(raw[i][0])
        for idx in sorted(seen_idx):
            members = [raw[i][1] for i in grp if raw[i][0] == idx]
            center = (sum(p[0] for p in members) / len(members),
                      sum(p[1] for p in members) / len(members))
            snapped = _try_snap(charts[idx][0], charts[idx][1], center, tol)
            candidates.append((idx, center, snapped))
        certified = [c for c in candidates if c[2] is not None]
        if certified:
            def key(c):
                a, b = c[2]
                return (max(abs(complex(a)), abs(complex(b))), c[0])
            anchored.append(min(certified, key=key))
        else:
            def key(c):
                # quantized coarsely enough that defective smear still ties
                return (round(max(abs(c[1][0]), abs(c[1][1])) * 1e3), c[0])
            anchored.append(min(candidates, key=key))

    # clusters that splintered below the true defect radius snap to the
    # same certified point, possibly anchored in different charts; merge
    # on sphere coordinates before counting
    merged = []
    kept_sph = []  # (exact sphere point or None, float sphere point)
    for idx, center, snapped in anchored:
        _, _, rev1, rev2 = charts[idx]
        if snapped is not None:
            esph = _exact_sphere(snapped, rev1, rev2)
            fsph = _to_sphere((complex(snapped[0]), complex(snapped[1])),
                              rev1, rev2, 1e-12)
        else:
            esph = None
            fsph = _to_sphere(center, rev1, rev2, 1e-12)
        dup = False
        for oesph, ofsph in kept_sph:
            if esph is not None and oesph is not None:
                if _same_exact_point(esph, oesph):
                    dup = True
                    break
            elif esph is None and oesph is None:
                if _sphere_dist(fsph, ofsph) <= tol:
                    dup = True
                    break
        if not dup:
            merged.append((idx, center, snapped))
            kept_sph.append((esph, fsph))

    # sphere locations of every kept cluster; multiplicity evaluation needs
    # them as rival anchors so eigenvalue claiming stays unambiguous
    spheres = []
    for idx, center, snapped in merged:
        _, _, rev1, rev2 = charts[idx]
        loc = (complex(snapped[0]), complex(snapped[1])) \
            if snapped is not None else center
        spheres.append(_to_sphere(loc, rev1, rev2, 1e-12))

    # one quotient model per chart, Buchberger run on the pair's own
    # backend: float Groebner bases degrade badly on exact-origin pairs
    # with clustered structure, so exact pairs keep exact elimination and
    # only the final eigenvalue claiming happens in floats
    models = {}
    zeros = []
    dropped = []
    for idx, center, snapped in merged:
        q1, q2, rev1, rev2 = charts[idx]
        if idx not in models:
            models[idx] = _QuotientModel(q1, q2, q1.backend)
        if snapped is not None and q1.backend == EXACT:
            mult = models[idx].local_dimension_exact(snapped)
            local = (complex(snapped[0]), complex(snapped[1]))
            exact_local = snapped
        else:
            if snapped is not None:
                center = (complex(snapped[0]), complex(snapped[1]))
            anchors = []
            for P in spheres:
                loc = _from_sphere(P, rev1, rev2)
                if loc is not None:
                    anchors.append(loc)
            mult = models[idx].local_dimension(
                center, anchors=anchors, same_tol=max(1e-6, 2.0 * tol))
            local = center
            exact_local = snapped if snapped is not None else None
        if mult < 1:
            # not actually a common zero (a loose partner match); discard
            dropped.append((CHART_NAMES[idx], local))
            continue
        point = _to_sphere(local, rev1, rev2, 1e-12)
        exact_point = None
        if exact_local is not None:
            exact_point = _exact_sphere(exact_local, rev1, rev2)
        zeros.append(LocatedZero(
            point=point, multiplicity=mult,
            region=_classify(point), chart=CHART_NAMES[idx],
            exact_point=exact_point,
        ))
    return zeros, dropped


def _exact_sphere(pt, rev1, rev2):
    a, b = pt
    if rev1:
        a = INFINITY if a.is_zero() else GaussianRational(1) / a
    if rev2:
        b = INFINITY if b.is_zero() else GaussianRational(1) / b
    return (a, b)


def _same_exact_point(P, Q):
    """Equality of exact sphere points whose coords are INFINITY or exact."""
    def same(u, v):
        u_inf = not isinstance(u, GaussianRational)
        v_inf = not isinstance(v, GaussianRational)
        if u_inf or v_inf:
            return u_inf and v_inf
        return u == v
    return same(P[0], Q[0]) and same(P[1], Q[1])


def fulton_reduce(p1, p2, lam, budget=400):
    """Intersection multiplicity by the axiomatic reduction rules.

    Exact backend only, finite lam.  Serves as an independent oracle for
    multiplicity(); the two must agree wherever both apply.
    """
    if p1.backend != EXACT or p2.backend != EXACT:
        raise PreconditionError("reduction rules run on the exact backend")
    a, b = _as_gr(lam[0]), _as_gr(lam[1])
    f = translate(p1, a, b)
    g = translate(p2, a, b)
    return _fulton_at_origin(f, g, [budget])


def _fulton_at_origin(f, g, budget):
    if budget[0] <= 0:
        raise PreconditionError("reduction step budget exhausted")
    budget[0] -= 1
    f, g = f.trimmed(), g.trimmed()
    if f.is_zero() or g.is_zero():
        raise PreconditionError("zero polynomial in reduction")
    fz = f.at(0, 0)
    gz = g.at(0, 0)
    if not fz.is_zero() or not gz.is_zero():
        return 0
    # degrees of the axis restrictions f(t,0), g(t,0); None when identically 0
    df = _axis_degree(f)
    dg = _axis_degree(g)
    if df is None and dg is None:
        raise PreconditionError("pair shares the factor z2 at the point")
    if df is None:
        f, g = g, f
        df, dg = dg, df
    if dg is None:
        # z2 divides g: split off the axis factor
        q = _divide_z2(g)
        return _axis_order(f) + _fulton_at_origin(f, q, budget)
    if df > dg:
        f, g = g, f
        df, dg = dg, df
    # kill the leading axis term of g against f; the axis degree of g
    # strictly drops, which is what makes the recursion terminate
    corr = _shift_z1(f, dg - df).scale(g.at(dg, 0) / f.at(df, 0))
    return _fulton_at_origin(f, g - corr, budget)


def _axis_order(f):
    for j in range(f.n + 1):
        if not f.at(j, 0).is_zero():
            return j
    return None


def _axis_degree(f):
    for j in range(f.n, -1, -1):
        if not f.at(j, 0).is_zero():
            return j
    return None


def _divide_z2(f):
    grid = [row[1:] for row in f.c]
    if not grid or not grid[0]:
        grid = [[GaussianRational(0)]]
    return BivPoly(grid, f.backend)


def _shift_z1(f, k):
    zero_row = [GaussianRational(0)] * (f.m + 1)
    grid = [zero_row[:] for _ in range(k)] + [row[:] for row in f.c]
    return BivPoly(grid, f.backend)


def torus_multiplicity_total(p):
    """N_T2 for the pair (p, reflect(p)), certified by two routes.

    Route one sums torus multiplicities directly.  Route two counts the
    open-bidisk zeros of the variable-flipped pair and uses the balance
    2nm = 2 N_D2 + N_T2.  Disagreement raises.
    """
    n, m = p.bidegree
    rep = common_zeros(p, reflect(p))
    direct = rep.torus_total
    q = flip2(p)
    rep2 = common_zeros(q, reflect(q))
    balance = 2 * n * m - 2 * rep2.disk_total
    if direct != balance:
        raise CrossCheckError(
            "torus count %d disagrees with bidisk balance %d" % (direct, balance))
    return direct
