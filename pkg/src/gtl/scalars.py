"""Exact complex rationals and helpers for mixing them with floats.

Structure constants of a finite groupoid algebra are integers, so every
algebraic identity can be checked exactly over Q(i).  Floats only enter
through eigendecompositions; :func:`close` compares the two worlds.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Union

__all__ = [
    "QQi",
    "Scalar",
    "as_exact",
    "is_exact",
    "close",
    "parse_rational",
    "format_rational",
    "to_complex",
]


class QQi:
    """An element ``re + im*i`` of the Gaussian rationals.

    Parts are ``int`` when integral and ``Fraction`` otherwise; ints keep
    the common integer case fast.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _norm(re)
        self.im = _norm(im)

    @staticmethod
    def _coerce(other):
        if type(other) is QQi:
            return other
        if isinstance(other, (int, Fraction)):
            return _new(_norm(other), 0)
        return None

    def __add__(self, other):
        o = other if type(other) is QQi else QQi._coerce(other)
        if o is None:
            return complex(self) + other
        return _new(_norm(self.re + o.re), _norm(self.im + o.im))

    __radd__ = __add__

    def __sub__(self, other):
        o = other if type(other) is QQi else QQi._coerce(other)
        if o is None:
            return complex(self) - other
        return _new(_norm(self.re - o.re), _norm(self.im - o.im))

    def __rsub__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return other - complex(self)
        return o - self

    def __mul__(self, other):
        o = other if type(other) is QQi else QQi._coerce(other)
        if o is None:
            return complex(self) * other
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return _new(_norm(a * c), 0)
        return _new(_norm(a * c - b * d), _norm(a * d + b * c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return complex(self) / other
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("QQi division by zero")
        n = Fraction(n)
        return _new(_norm((self.re * o.re + self.im * o.im) / n), _norm((self.im * o.re - self.re * o.im) / n))

    def __rtruediv__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __neg__(self):
        return _new(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return _new(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return abs(complex(self))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if type(other) is QQi:
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        if isinstance(other, numbers.Complex):
            return complex(self) == complex(other)
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"QQi({self.re})"
        return f"QQi({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        if not self.re:
            return f"{format_rational(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(self.im))}i"


def _norm(x):
    if type(x) is int:
        return x
    if type(x) is Fraction:
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, (int, Fraction)):
        return _norm(Fraction(x)) if not isinstance(x, int) else int(x)
    raise TypeError(f"not a rational: {x!r}")


def _new(re, im):
    q = object.__new__(QQi)
    q.re = re
    q.im = im
    return q


Scalar = Union[QQi, complex]

ZERO = QQi(0)
ONE = QQi(1)


def is_exact(x) -> bool:
    return isinstance(x, (QQi, int, Fraction))


def as_exact(x) -> QQi:
    """Coerce ints/Fractions/QQi to QQi; floats are rejected."""
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def to_complex(x) -> complex:
    return complex(x)


def close(a, b, tol: float) -> bool:
    """Exact comparison when both sides are exact, absolute tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return as_exact(a) == as_exact(b)
    return abs(complex(a) - complex(b)) <= tol


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a finite decimal string into a Fraction."""
    if not isinstance(text, str):
        if isinstance(text, int) and not isinstance(text, bool):
            return Fraction(text)
        raise ValueError(f"rational must be given as a string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
