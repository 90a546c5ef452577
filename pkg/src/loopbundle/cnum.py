"""Complex and quaternion scalars that also accept dual-number parts.

Loop products are written once against this layer: plain ``complex`` is
used on the float fast path, and ``C2`` (a pair of possibly-dual reals)
whenever derivatives are being propagated.
"""

from .dual import Dual, has_dual, primal

_NUMBERS = (int, float)


class C2:
    """Complex number whose real/imaginary parts may be dual numbers."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0.0):
        self.re = re
        self.im = im

    def __add__(self, other):
        other = _coerce(other)
        return C2(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return C2(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return C2(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n2 = other.re * other.re + other.im * other.im
        return C2((self.re * other.re + self.im * other.im) / n2,
                  (self.im * other.re - self.re * other.im) / n2)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return C2(-self.re, -self.im)

    def __repr__(self):
        return f"C2({self.re!r}, {self.im!r})"


def _coerce(x):
    if isinstance(x, C2):
        return x
    if isinstance(x, (Dual,) + _NUMBERS):
        return C2(x, 0.0)
    if isinstance(x, complex):
        return C2(x.real, x.imag)
    raise TypeError(f"cannot coerce {type(x)!r} to C2")


def mkc(re, im=0.0):
    """Build a complex scalar; picks the fast path when both parts are float."""
    if isinstance(re, Dual) or isinstance(im, Dual):
        return C2(re, im)
    return complex(re, im)


def creal(z):
    return z.re if isinstance(z, C2) else z.real


def cimag(z):
    return z.im if isinstance(z, C2) else z.imag


def cconj(z):
    if isinstance(z, C2):
        return C2(z.re, -z.im)
    return z.conjugate()


def cabs2(z):
    if isinstance(z, C2):
        return z.re * z.re + z.im * z.im
    return z.real * z.real + z.imag * z.imag


def cprimal(z):
    """Complex value with all dual parts stripped."""
    if isinstance(z, C2):
        return complex(primal(z.re), primal(z.im))
    return complex(z)


def from_coords(p):
    """Vector of 2n reals -> list of n complex scalars (Re, Im interleaved)."""
    return [mkc(p[2 * i], p[2 * i + 1]) for i in range(len(p) // 2)]


def to_coords(zs):
    out = []
    for z in zs:
        out.append(creal(z))
        out.append(cimag(z))
    return out


# Quaternions over the complex scalars above, as length-4 lists (1, i, j, k).

def qmul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return [a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2]


def qconj(q):
    return [q[0], -q[1], -q[2], -q[3]]


def qnorm2(q):
    # Multiplicative norm q q^+; a complex scalar for complexified quaternions.
    return q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]


def qinv(q, norm2=None):
    n2 = qnorm2(q) if norm2 is None else norm2
    return [c / n2 for c in qconj(q)]


def qadd(p, q):
    return [x + y for x, y in zip(p, q)]


def qscale(s, q):
    return [s * c for c in q]
