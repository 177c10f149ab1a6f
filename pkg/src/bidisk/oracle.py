"""Brute-force verification routes that don't share code with the main ones.

Three independent checks live here: torus quadrature for membership of a
rational function in L^2(T^2), Fourier-coefficient trend classification,
and intersection multiplicities read off the order of vanishing of a
resultant after a random shear.  Each exists to confirm (or refute) a
result the structured algorithms produce by an unrelated method, so none
of them may import from intersect, agler, or ideal.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import CrossCheckError, PreconditionError
from .polycore import BivPoly, resultant_z2, translate
from .scalars import EXACT, GaussianRational
from .stability import check_semistable

CONVERGENT = "CONVERGENT"
DIVERGENT = "DIVERGENT"
INCONCLUSIVE = "INCONCLUSIVE"

PLATEAU = "PLATEAU"
GROWTH = "GROWTH"

_BASE_GRID = 128
_SING_FACTOR = 10.0
_REFINE = 16


@dataclass
class ConvergenceVerdict:
    """Quadrature estimates across grid doublings and their classification."""

    estimates: list  # [(grid, estimate)]
    verdict: str
    growth: float  # fitted exponent of estimate vs. grid size

    def __bool__(self):
        return self.verdict == CONVERGENT


@dataclass
class FourierReport:
    """Low-order Fourier coefficients of q/p plus partial-sum trends."""

    coefficients: np.ndarray  # (J+1, K+1), entry [j,k] multiplies z1^j z2^k
    box: tuple
    grid: int
    radius: float
    box_ladder: list = field(default_factory=list)
    l1_partials: list = field(default_factory=list)
    l2_partials: list = field(default_factory=list)
    weighted_l1_partials: list = field(default_factory=list)
    l1_trend: str = INCONCLUSIVE
    l2_trend: str = INCONCLUSIVE
    weighted_l1_trend: str = INCONCLUSIVE
    l1_fit: float = 0.0
    l2_fit: float = 0.0


def _tensor_eval(f, w1, w2):
    """Evaluate f on the product grid w1 x w2 via separated Vandermonde."""
    A = f.to_array()
    V1 = w1[:, None] ** np.arange(A.shape[0])[None, :]
    V2 = w2[:, None] ** np.arange(A.shape[1])[None, :]
    return (V1 @ A) @ V2.T


def _require_zero_free(p):
    rep = check_semistable(p, resolution=(16, 128))
    if not rep.zero_free_verified:
        raise PreconditionError(
            "denominator vanishes inside the bidisk; witnesses %r"
            % rep.witnesses[:3])


def _fit_exponent(sizes, vals):
    """Least-squares slope of log(estimate) against log(size)."""
    pts = [(s, v) for s, v in zip(sizes, vals) if v > 0]
    if len(pts) < 2:
        return 0.0
    pts = pts[-4:]
    xs = np.log([s for s, _ in pts])
    ys = np.log([v for _, v in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def _rel_steps(vals):
    out = []
    for a, b in zip(vals, vals[1:]):
        denom = max(abs(b), 1e-300)
        out.append(abs(b - a) / denom)
    return out


def _classify_estimates(sizes, vals):
    """Shared verdict rule: plateau beats growth, both need three points."""
    if len(vals) < 3:
        return INCONCLUSIVE, _fit_exponent(sizes, vals)
    rels = _rel_steps(vals)
    fit = _fit_exponent(sizes, vals)
    if rels[-1] < 0.01 and rels[-2] < 0.01:
        return CONVERGENT, fit
    increasing = all(b > a for a, b in zip(vals[-4:], vals[-3:]))
    if increasing and fit > 0.15:
        return DIVERGENT, fit
    return INCONCLUSIVE, fit


def _quad_estimate(q, p, L):
    """Mean of |q/p|^2 over the L x L torus grid with singular-cell rescue.

    The plain estimate is the trapezoid rule, which on a periodic grid is
    the mean of the corner values.  Cells where some corner has |p| below
    10/L get their corner average replaced by a 16x local mean sampled at
    cell-interior points, which never coincide with grid corners, so
    torus zeros of p sitting on the coarse grid are stepped around rather
    than divided by.
    """
    t = np.arange(L)
    w = np.exp(2j * np.pi * t / L)
    Q = _tensor_eval(q, w, w)
    P = _tensor_eval(p, w, w)
    pa = np.abs(P)
    qa2 = np.abs(Q) ** 2
    del Q, P
    with np.errstate(divide="ignore", invalid="ignore"):
        v = qa2 / pa ** 2
    v = np.where(np.isfinite(v), v, 0.0)
    cells = (v + np.roll(v, -1, 0) + np.roll(v, -1, 1)
             + np.roll(np.roll(v, -1, 0), -1, 1)) / 4.0
    near = pa < _SING_FACTOR / L
    flagged = (near | np.roll(near, -1, 0) | np.roll(near, -1, 1)
               | np.roll(np.roll(near, -1, 0), -1, 1))
    js, ks = np.nonzero(flagged)
    if js.size:
        sub = (np.arange(_REFINE) + 0.5) / _REFINE
        a1 = (js[:, None] + sub[None, :]) / L
        a2 = (ks[:, None] + sub[None, :]) / L
        W1 = np.exp(2j * np.pi * a1)[:, :, None]
        W2 = np.exp(2j * np.pi * a2)[:, None, :]
        qs2 = np.abs(q.eval_grid(W1, W2)) ** 2
        ps2 = np.abs(p.eval_grid(W1, W2)) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            vs = qs2 / ps2
        vs = np.where(np.isfinite(vs), vs, 0.0)
        cells[js, ks] = vs.mean(axis=(1, 2))
    return float(cells.mean())


def l2_quadrature(q, p, max_grid=2048):
    """Estimate the squared L^2(T^2) norm of q/p across grid doublings."""
    if q.is_zero():
        return ConvergenceVerdict([(_BASE_GRID, 0.0)], CONVERGENT, 0.0)
    _require_zero_free(p)
    sizes = []
    L = _BASE_GRID
    while L <= max_grid:
        sizes.append(L)
        L *= 2
    if not sizes:
        raise PreconditionError("max_grid below the base grid %d" % _BASE_GRID)
    estimates = [(L, _quad_estimate(q, p, L)) for L in sizes]
    verdict, fit = _classify_estimates([e[0] for e in estimates],
                                       [e[1] for e in estimates])
    return ConvergenceVerdict(estimates, verdict, fit)


def _trend(vals):
    """Partial-sum trend: PLATEAU, GROWTH, or neither, from the last steps."""
    if len(vals) < 3:
        return INCONCLUSIVE
    rels = _rel_steps(vals)
    if rels[-1] < 0.01 and rels[-2] < 0.01:
        return PLATEAU
    if rels[-1] > 0.02 and rels[-2] > 0.02:
        return GROWTH
    return INCONCLUSIVE


def fourier_report(q, p, box):
    """Fourier coefficients of q/p on [0,J]x[0,K] plus summability trends.

    Samples live on a torus of radius slightly inside 1, where p cannot
    vanish, so the transform never meets the boundary singularities; the
    radius damping is divided back out per coefficient.  The grid is at
    least four times the box in each direction, and the residual aliasing
    tail is additionally damped by radius^grid = e^-6.
    """
    J, K = box
    if J < 0 or K < 0:
        raise PreconditionError("coefficient box must be non-negative")
    _require_zero_free(p)
    L = 1
    while L < 4 * (max(J, K) + 1):
        L *= 2
    r = math.exp(-6.0 / L)
    w = r * np.exp(2j * np.pi * np.arange(L) / L)
    V = _tensor_eval(q, w, w) / _tensor_eval(p, w, w)
    # sampling at e^{+2 pi i t/L} nodes is an inverse DFT of the
    # coefficients, so the forward transform over L^2 recovers them
    A = np.fft.fft2(V) / (L * L)
    damp1 = r ** np.arange(J + 1)
    damp2 = r ** np.arange(K + 1)
    coeff = A[:J + 1, :K + 1] / damp1[:, None] / damp2[None, :]

    mags = np.abs(coeff)
    jj = np.arange(J + 1)[:, None] + 1.0
    kk = np.arange(K + 1)[None, :] + 1.0
    ladder = []
    s = 2
    while s <= min(J, K):
        ladder.append(s)
        s *= 2
    l1 = [float(mags[:s + 1, :s + 1].sum()) for s in ladder]
    l2 = [float((mags[:s + 1, :s + 1] ** 2).sum()) for s in ladder]
    wl1 = [float((mags * jj * kk)[:s + 1, :s + 1].sum()) for s in ladder]
    return FourierReport(
        coefficients=coeff, box=(J, K), grid=L, radius=r,
        box_ladder=ladder, l1_partials=l1, l2_partials=l2,
        weighted_l1_partials=wl1,
        l1_trend=_trend(l1), l2_trend=_trend(l2),
        weighted_l1_trend=_trend(wl1),
        l1_fit=_fit_exponent(ladder, l1), l2_fit=_fit_exponent(ladder, l2))


def _draw_gaussian_int(rng):
    while True:
        a = rng.randint(-7, 7)
        b = rng.randint(-7, 7)
        if a * a + b * b <= 49:
            return GaussianRational(a, b)


def _shear(f, alpha):
    """Substitute z1 -> u + alpha*v, z2 -> v; exact coefficients."""
    n, m = f.bidegree
    zero = GaussianRational(0)
    grid = [[zero] * (n + m + 1) for _ in range(n + 1)]
    apow = [GaussianRational(1)]
    for _ in range(n):
        apow.append(apow[-1] * alpha)
    for j in range(n + 1):
        for k in range(m + 1):
            c = f.at(j, k)
            if c.is_zero():
                continue
            for i in range(j + 1):
                grid[i][j - i + k] = grid[i][j - i + k] \
                    + c * math.comb(j, i) * apow[j - i]
    return BivPoly(grid, EXACT)


def _as_exact(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return GaussianRational(x)
    raise PreconditionError("resultant oracle needs exact coordinates")


def resultant_multiplicity(p1, p2, lam, seed=0):
    """Multiplicity of the common zero lam by resultant vanishing order.

    A random shear puts the pair in general position; the order of the
    resultant in the remaining variable at the (translated) origin then
    counts the local multiplicity.  Degenerate shear directions overcount,
    so the value is only trusted once two independent shears agree; five
    attempts without agreement raise rather than guess.
    """
    if p1.backend != EXACT or p2.backend != EXACT:
        raise PreconditionError("resultant oracle runs on the exact backend")
    a, b = _as_exact(lam[0]), _as_exact(lam[1])
    f = translate(p1, a, b).trimmed()
    g = translate(p2, a, b).trimmed()
    if not f.at(0, 0).is_zero() or not g.at(0, 0).is_zero():
        raise PreconditionError("lam is not a common zero of the pair")
    rng = random.Random(seed)
    seen = []
    for _ in range(5):
        alpha = _draw_gaussian_int(rng)
        F = _shear(f, alpha).trimmed()
        G = _shear(g, alpha).trimmed()
        res = resultant_z2(F, G)
        if res.is_zero():
            continue
        order = 0
        while order < len(res.c) and res.c[order].is_zero():
            order += 1
        if order in seen:
            return order
        seen.append(order)
    raise CrossCheckError(
        "shear multiplicities never agreed twice: %r (seed %r)" % (seen, seed))
