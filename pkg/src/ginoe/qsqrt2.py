"""Exact arithmetic in the quadratic field Q(sqrt 2).

Every exact probability produced by this package is a number ``a + b*sqrt2``
with rational ``a`` and ``b``.  :class:`QSqrt2` stores the pair of reduced
:class:`fractions.Fraction` objects, so equality is componentwise and exact.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

__all__ = ["QSqrt2", "SQRT2", "ONE", "ZERO", "parse", "render", "to_json", "from_json"]

RationalLike = Union[int, Fraction]
_Coercible = Union["QSqrt2", int, Fraction]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class QSqrt2:
    """Immutable element ``a + b*sqrt(2)`` of Q(sqrt 2)."""

    __slots__ = ("_a", "_b")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0) -> None:
        object.__setattr__(self, "_a", _as_fraction(a))
        object.__setattr__(self, "_b", _as_fraction(b))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("QSqrt2 is immutable")

    @property
    def a(self) -> Fraction:
        """Rational part."""
        return self._a

    @property
    def b(self) -> Fraction:
        """Coefficient of sqrt(2)."""
        return self._b

    # -- coercion ---------------------------------------------------------
    @staticmethod
    def _coerce(x: object) -> "QSqrt2 | None":
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, Fraction) or (isinstance(x, int) and not isinstance(x, bool)):
            return QSqrt2(x, 0)
        return None

    # -- ring operations --------------------------------------------------
    def __add__(self, other: _Coercible) -> "QSqrt2":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QSqrt2(self._a + y._a, self._b + y._b)

    __radd__ = __add__

    def __sub__(self, other: _Coercible) -> "QSqrt2":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QSqrt2(self._a - y._a, self._b - y._b)

    def __rsub__(self, other: _Coercible) -> "QSqrt2":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y - self

    def __neg__(self) -> "QSqrt2":
        return QSqrt2(-self._a, -self._b)

    def __pos__(self) -> "QSqrt2":
        return self

    def __mul__(self, other: _Coercible) -> "QSqrt2":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        a1, b1, a2, b2 = self._a, self._b, y._a, y._b
        return QSqrt2(a1 * a2 + 2 * b1 * b2, a1 * b2 + a2 * b1)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 2 b^2`` (product with the conjugate)."""
        return self._a * self._a - 2 * self._b * self._b

    def conjugate(self) -> "QSqrt2":
        """Galois conjugate ``a - b*sqrt(2)``."""
        return QSqrt2(self._a, -self._b)

    def inverse(self) -> "QSqrt2":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(sqrt2)")
        nrm = self.norm()
        return QSqrt2(self._a / nrm, -self._b / nrm)

    def __truediv__(self, other: _Coercible) -> "QSqrt2":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt2)")
            return QSqrt2(self._a / other, self._b / other)
        return self * y.inverse()

    def __rtruediv__(self, other: _Coercible) -> "QSqrt2":
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y * self.inverse()

    def __pow__(self, k: int) -> "QSqrt2":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison -------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(2)`` without floating point."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the term of larger magnitude wins
        cmp = self._a * self._a - 2 * self._b * self._b
        return sa if cmp > 0 else sb

    def __eq__(self, other: object) -> bool:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self._a == y._a and self._b == y._b

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def _cmp(self, other: object) -> int | None:
        y = self._coerce(other)
        if y is None:
            return None
        return (self - y).sign()

    def __lt__(self, other: _Coercible) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other: _Coercible) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other: _Coercible) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other: _Coercible) -> bool:
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __bool__(self) -> bool:
        return bool(self._a) or bool(self._b)

    # -- conversion -------------------------------------------------------
    def __float__(self) -> float:
        """Nearly correctly rounded float value.

        sqrt(2) is approximated with integer square roots at a working
        precision that grows until the cancellation between ``a`` and
        ``b*sqrt2`` leaves at least 70 significant bits.
        """
        if self._b == 0:
            return float(self._a)
        p, q = self._a.numerator, self._a.denominator
        r, s = self._b.numerator, self._b.denominator
        big_n, big_m, den = p * s, r * q, q * s
        sgn_m = 1 if big_m > 0 else -1
        m2 = 2 * big_m * big_m
        k = 80 + max(big_n.bit_length(), big_m.bit_length())
        while True:
            t = math.isqrt(m2 << (2 * k))  # floor(|M| sqrt2 2^k), error < 1
            num = (big_n << k) + sgn_m * t
            if abs(num).bit_length() > 72:
                return float(Fraction(num, den << k))
            k *= 2

    def __complex__(self) -> complex:
        return complex(float(self))

    def __repr__(self) -> str:
        return f"QSqrt2({render(self)!r})"

    def __str__(self) -> str:
        return render(self)


ZERO = QSqrt2(0, 0)
ONE = QSqrt2(1, 0)
SQRT2 = QSqrt2(0, 1)

_RAT = r"[+-]?\d+(?:/\d+)?"
_GRAMMAR = re.compile(
    rf"^\s*(?P<a>{_RAT})\s*(?:(?P<op>[+-])\s*(?P<b>\d+(?:/\d+)?)\s*\*\s*sqrt2)?\s*$"
)


def _parse_rational(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def parse(text: str) -> QSqrt2:
    """Parse ``"R"``, ``"R + R*sqrt2"`` or ``"R - R*sqrt2"``."""
    m = _GRAMMAR.match(text)
    if m is None:
        raise ValueError(f"malformed Q(sqrt2) literal: {text!r}")
    a = _parse_rational(m.group("a"))
    b = Fraction(0)
    if m.group("b") is not None:
        b = _parse_rational(m.group("b"))
        if m.group("op") == "-":
            b = -b
    return QSqrt2(a, b)


def render(x: QSqrt2) -> str:
    """Canonical text form; ``parse(render(x)) == x``."""
    if x.b == 0:
        return str(x.a)
    op = "+" if x.b > 0 else "-"
    return f"{x.a} {op} {abs(x.b)}*sqrt2"


def render_common(x: QSqrt2) -> str:
    """Human form over a common denominator, e.g. ``(3 - 2√2)/8``."""
    den = math.lcm(x.a.denominator, x.b.denominator)
    num_a = x.a.numerator * (den // x.a.denominator)
    num_b = x.b.numerator * (den // x.b.denominator)
    if num_b == 0:
        body = f"{num_a}"
        return body if den == 1 else f"{body}/{den}"
    root = "√2" if abs(num_b) == 1 else f"{abs(num_b)}√2"
    if num_a == 0:
        body = root if num_b > 0 else f"-{root}"
    else:
        op = "+" if num_b > 0 else "−"
        body = f"({num_a} {op} {root})"
    return body if den == 1 else f"{body}/{den}"


def to_json(x: QSqrt2) -> dict:
    return {"a": str(x.a), "b": str(x.b)}


def from_json(obj: dict) -> QSqrt2:
    try:
        return QSqrt2(_parse_rational(str(obj["a"])), _parse_rational(str(obj["b"])))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed Q(sqrt2) JSON: {obj!r}") from exc
