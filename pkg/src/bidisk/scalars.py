"""Scalar arithmetic for the two coefficient backends.

EXACT coefficients are Gaussian rationals (rational real and imaginary
parts), FLOAT coefficients are machine complex numbers.  The two backends
never mix inside one polynomial; operations that would mix them raise
BackendMismatch.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    def _rat(x=0, y=None):
        return _mpq(x) if y is None else _mpq(x, y)
except ImportError:  # pragma: no cover - gmpy2 is normally available
    def _rat(x=0, y=None):
        return Fraction(x) if y is None else Fraction(x, y)

EXACT = "exact"
FLOAT = "float"


class BackendMismatch(TypeError):
    """Raised when EXACT and FLOAT scalars meet in one operation."""


def rational(x=0, y=None):
    """Build an exact rational from ints, strings like '3/4', or rationals."""
    if isinstance(x, float) or isinstance(y, float):
        raise BackendMismatch("refusing to build an exact rational from a float")
    if isinstance(x, str):
        x = x.strip()
        if x.startswith("+"):  # gmpy2's parser rejects an explicit plus sign
            x = x[1:]
    return _rat(x) if y is None else _rat(x, y)


class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_rat()) else rational(re)
        self.im = im if type(im) is type(_rat()) else rational(im)

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_pair(cls, pair):
        re, im = pair
        return cls(rational(str(re)) if isinstance(re, str) else rational(re),
                   rational(str(im)) if isinstance(im, str) else rational(im))

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, int):
            return GaussianRational(other, 0)
        if isinstance(other, (complex, float)):
            raise BackendMismatch("cannot mix EXACT and FLOAT scalars")
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational((self.re * other.re + self.im * other.im) / d,
                                (self.im * other.re - self.re * other.im) / d)

    def __rtruediv__(self, other):
        return GaussianRational(other, 0) / self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = GaussianRational(1, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- structure ------------------------------------------------------

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def abs2(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, int):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return "(%s%s%si)" % (self.re, "+" if self.im >= 0 else "-", abs(self.im))


GR_ZERO = GaussianRational(0, 0)
GR_ONE = GaussianRational(1, 0)


def backend_of(x):
    if isinstance(x, GaussianRational):
        return EXACT
    if isinstance(x, (complex, float, int)):
        return FLOAT
    raise TypeError("not a scalar: %r" % (x,))


def zero(backend):
    return GR_ZERO if backend == EXACT else 0j


def one(backend):
    return GR_ONE if backend == EXACT else 1 + 0j


def conj(x):
    return x.conjugate()


def as_complex(x):
    return complex(x)


def is_zero(x, tol=0.0):
    if isinstance(x, GaussianRational):
        return x.is_zero()
    return abs(x) <= tol


def _format_rat(q):
    return str(q)


def scalar_to_pair(x):
    """Serialize a scalar to the JSON [re, im] pair."""
    if isinstance(x, GaussianRational):
        return [_format_rat(x.re), _format_rat(x.im)]
    x = complex(x)
    return [x.real, x.imag]


def scalar_from_pair(pair, backend):
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ValueError("coefficient entries must be [re, im] pairs")
    re, im = pair
    if backend == EXACT:
        if isinstance(re, float) or isinstance(im, float):
            raise ValueError("exact coefficients must be ints or 'a/b' strings")
        return GaussianRational.from_pair((re, im))
    if isinstance(re, str) or isinstance(im, str):
        re = Fraction(re) if isinstance(re, str) else re
        im = Fraction(im) if isinstance(im, str) else im
        return complex(float(re), float(im))
    return complex(re, im)


def parse_unimodular(text):
    """Parse an exact point on the unit circle, e.g. '1', '-1', '3/5+4/5i'.

    Returns a GaussianRational with |z| = 1 exactly; raises ValueError
    otherwise.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty point component")
    if s in ("i", "+i"):
        z = GaussianRational(0, 1)
    elif s == "-i":
        z = GaussianRational(0, -1)
    elif s.endswith("i"):
        body = s[:-1]
        # split the imaginary part off at the last +/- that is not inside
        # a fraction sign position 0
        k = max(body.rfind("+", 1), body.rfind("-", 1))
        if k == -1:
            z = GaussianRational(0, rational(body))
        else:
            re_part, im_part = body[:k], body[k:]
            if im_part in ("+", "-"):
                im_part += "1"
            z = GaussianRational(rational(re_part), rational(im_part))
    else:
        z = GaussianRational(rational(s), 0)
    if z.abs2() != 1:
        raise ValueError("point component %r is not unimodular" % text)
    return z
