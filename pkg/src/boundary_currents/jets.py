"""
Truncated Taylor series ("jets") along a Wirtinger direction.

A jet stores the Taylor coefficients of a smooth function u(x, y) along the
complexified increment (x, y) -> (x + s/2, y + i s/2).  Under that shift z is
fixed and z-bar moves by s, so coefficient m equals (1/m!) d^m u / d zbar^m.
Arithmetic on jets is exact (Leibniz / Faa di Bruno through series algebra),
which is how the test-form module gets derivative oracles with no finite
differencing.
"""

from math import factorial

import numpy as np

__all__ = ["Jet", "coordinate_jets", "jexp", "jlog", "jpow", "jsqrt"]


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def constant(cls, value, order, shape=None):
        shape = np.shape(value) if shape is None else tuple(shape)
        c = np.zeros((order + 1,) + shape, dtype=complex)
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivatives(self):
        """Return d^m/dzbar^m for m = 0..order, stacked along axis 0."""
        fact = np.array([factorial(m) for m in range(self.order + 1)], dtype=float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def d(self):
        """Derivative along the jet direction; the order drops by one."""
        m = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * m)

    def truncate(self, order):
        return Jet(self.c[: order + 1])

    def masked(self, keep):
        """Zero every coefficient where ``keep`` is False."""
        return Jet(np.where(keep, self.c, 0.0))

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        c = np.zeros_like(self.c)
        c[0] = other
        return Jet(c)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.c + other.c)
        c = self.c.copy()
        c[0] = c[0] + other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        a, b = self.c, other.c
        n = min(a.shape[0], b.shape[0])
        out = np.zeros(np.broadcast_shapes(a[:n].shape, b[:n].shape), dtype=complex)
        for m in range(n):
            for k in range(m + 1):
                out[m] += a[k] * b[m - k]
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.c
        out = np.zeros_like(a)
        inv0 = 1.0 / a[0]
        out[0] = inv0
        for m in range(1, a.shape[0]):
            acc = np.zeros_like(a[0])
            for k in range(1, m + 1):
                acc = acc + a[k] * out[m - k]
            out[m] = -inv0 * acc
        return Jet(out)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(1.0, self.order, self.c.shape[1:])
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base
                p >>= 1
            return out
        return jpow(self, p)


def coordinate_jets(z, order, direction="zbar"):
    """Jets of x and y at the points ``z`` along a Wirtinger direction.

    ``direction='zbar'`` yields d/dzbar derivatives, ``'z'`` yields d/dz.
    """
    z = np.asarray(z, dtype=complex)
    shape = (order + 1,) + z.shape
    x = np.zeros(shape, dtype=complex)
    y = np.zeros(shape, dtype=complex)
    x[0] = z.real
    y[0] = z.imag
    if order >= 1:
        x[1] = 0.5
        y[1] = 0.5j if direction == "zbar" else -0.5j
    return Jet(x), Jet(y)


def jexp(a):
    c = a.c
    out = np.zeros_like(c)
    out[0] = np.exp(c[0])
    for m in range(1, c.shape[0]):
        acc = np.zeros_like(c[0])
        for k in range(1, m + 1):
            acc = acc + k * c[k] * out[m - k]
        out[m] = acc / m
    return Jet(out)


def jlog(a):
    c = a.c
    out = np.zeros_like(c)
    out[0] = np.log(c[0])
    for m in range(1, c.shape[0]):
        acc = np.zeros_like(c[0])
        for k in range(1, m):
            acc = acc + k * out[k] * c[m - k]
        out[m] = (c[m] - acc / m) / c[0]
    return Jet(out)


def jpow(a, p):
    """Principal-branch power a**p for non-integer ``p``; needs a[0] != 0."""
    c = a.c
    out = np.zeros_like(c)
    out[0] = c[0] ** p
    for m in range(1, c.shape[0]):
        acc = np.zeros_like(c[0])
        for k in range(1, m + 1):
            acc = acc + ((p + 1) * k - m) * c[k] * out[m - k]
        out[m] = acc / (m * c[0])
    return Jet(out)


def jsqrt(a):
    return jpow(a, 0.5)
