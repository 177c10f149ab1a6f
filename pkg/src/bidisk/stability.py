"""Semi-stability certification.

Semi-stable means: no zeros in the open bidisk, and no common factor
with the reflection.  The common-factor half is exact.  The zero-free
half is a sampling certificate: on concentric circles |z1| = r < 1 we
count the roots of z2 -> p(z1, z2) inside the unit disk (companion
matrix eigenvalues), excluding a thin collar at |z2| = 1 because
semi-stable polynomials are allowed, and expected, to vanish on the
torus itself.  Then the same sweep with the variables swapped.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .scalars import EXACT
from .polycore import BivPoly, reflect, gcd

DEFAULT_RESOLUTION = (64, 512)
DEFAULT_COLLAR = 1e-6


@dataclass
class SemistabilityReport:
    gcd_trivial: bool
    zero_free_verified: bool
    resolution: tuple
    min_modulus_observed: float
    witnesses: list = field(default_factory=list)
    gcd_checked: bool = True  # False when the backend made the exact test impossible


def _interior_root_witnesses(p, radii, angles, collar):
    """Zeros of p with the first variable swept over circles in D.

    Returns (min |root clearance|, list of offending (z1, z2) samples).
    For each sampled z1, roots of the z2-slice are batched through
    numpy's companion eigenvalues.
    """
    f = p if p.backend != EXACT else p.to_float()
    witnesses = []
    min_mod = 1.0
    theta = 2.0 * np.pi * np.arange(angles) / angles
    ring = np.exp(1j * theta)
    A = f.to_array()  # (n+1, m+1)
    norm = max(f.max_norm(), 1.0)
    m = f.m
    if m == 0:
        # no z2 dependence: p(z1) root moduli via one companion call
        roots = np.roots(A[::-1, 0]) if f.n > 0 else np.array([])
        for root in roots:
            if abs(root) < 1.0 - collar:
                witnesses.append((complex(root), None))
        if roots.size:
            min_mod = min(min_mod, float(np.min(np.abs(roots))))
        return min_mod, witnesses
    for r in radii:
        z1 = r * ring
        pows = z1[:, None] ** np.arange(f.n + 1)[None, :]
        C = pows @ A  # (angles, m+1): z2-slice coefficients per sample
        lead_ok = np.abs(C[:, m]) > 1e-9 * norm
        if np.any(lead_ok):
            rows = C[lead_ok]
            monic = rows[:, :m] / rows[:, m:m + 1]
            comp = np.zeros((rows.shape[0], m, m), dtype=complex)
            if m > 1:
                idx = np.arange(1, m)
                comp[:, idx, idx - 1] = 1.0
            comp[:, :, m - 1] = -monic
            eig = np.linalg.eigvals(comp)  # (samples, m)
            mods = np.abs(eig)
            min_mod = min(min_mod, float(np.min(mods)))
            bad = mods < 1.0 - collar
            if np.any(bad):
                src = np.nonzero(lead_ok)[0]
                for si, sj in zip(*np.nonzero(bad)):
                    witnesses.append((complex(z1[src[si]]), complex(eig[si, sj])))
        # degenerate leading coefficients: do those the slow careful way
        for s in np.nonzero(~lead_ok)[0]:
            row = C[s]
            deg = m
            while deg > 0 and abs(row[deg]) <= 1e-14 * norm:
                deg -= 1
            if deg == 0:
                if abs(row[0]) <= 1e-12 * norm:
                    witnesses.append((complex(z1[s]), None))
                    min_mod = 0.0
                continue
            roots = np.roots(row[deg::-1])
            mods = np.abs(roots)
            min_mod = min(min_mod, float(np.min(mods)))
            for root in roots[mods < 1.0 - collar]:
                witnesses.append((complex(z1[s]), complex(root)))
    return min_mod, witnesses


def check_semistable(p, resolution=DEFAULT_RESOLUTION, threshold=DEFAULT_COLLAR):
    """Certify (to the stated resolution) the semi-stability hypothesis.

    The gcd part is exact when the backend allows it.  The zero-free part
    is a sampling certificate, never a proof.
    """
    if p.is_zero():
        raise PreconditionError("zero polynomial")
    steps, angles = resolution

    if p.backend == EXACT:
        g = gcd(p, reflect(p))
        gcd_trivial = g.natural_bidegree() == (0, 0)
        gcd_checked = True
    else:
        # float backend: certify via the resultant not vanishing identically
        gcd_trivial = _float_coprime(p, reflect(p))
        gcd_checked = False

    radii = [(i + 1) / (steps + 1) for i in range(steps)]
    mod1, wit1 = _interior_root_witnesses(p, radii, angles, threshold)
    mod2, wit2 = _interior_root_witnesses(p.swap_vars(), radii, angles, threshold)
    witnesses = wit1 + [(b, a) for (a, b) in wit2]
    return SemistabilityReport(
        gcd_trivial=gcd_trivial,
        zero_free_verified=(not witnesses),
        resolution=(steps, angles),
        min_modulus_observed=min(mod1, mod2),
        witnesses=witnesses[:32],
        gcd_checked=gcd_checked,
    )


def _float_coprime(p, q):
    """Heuristic coprimality for float inputs via both resultants."""
    from .polycore import resultant_z2
    r1 = resultant_z2(p, q)
    r2 = resultant_z2(p.swap_vars(), q.swap_vars())
    def nonzero(r):
        coeffs = [abs(complex(c)) for c in r.c]
        top = max(coeffs) if coeffs else 0.0
        scale = max(p.max_norm(), 1.0) ** (q.n + q.m) * max(q.max_norm(), 1.0) ** (p.n + p.m)
        return top > 1e-10 * scale
    return nonzero(r1) and nonzero(r2)


def require_semistable(p):
    """Gate used by the construction pipeline; raises on failure."""
    rep = check_semistable(p)
    if not rep.gcd_trivial:
        raise PreconditionError("p shares a factor with its reflection")
    if not rep.zero_free_verified:
        raise PreconditionError(
            "zeros of p detected inside the bidisk, witness %r" % (rep.witnesses[:1],))
    return rep
