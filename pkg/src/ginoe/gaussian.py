"""Gaussian rationals Q(i): exact complex scalars for the discrete-measure oracle."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

__all__ = ["QI"]

_Rat = Union[int, Fraction]


class QI:
    """Immutable ``re + im·i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: _Rat = 0, im: _Rat = 0) -> None:
        # int parts stay int (fast Gaussian-integer arithmetic); others become Fraction
        self.re = re if isinstance(re, (int, Fraction)) else Fraction(re)
        self.im = im if isinstance(im, (int, Fraction)) else Fraction(im)

    @staticmethod
    def _coerce(x: object) -> "QI | None":
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return QI(x, 0)
        return None

    def __add__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QI(self.re + y.re, self.im + y.im)

    __radd__ = __add__

    def __sub__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QI(self.re - y.re, self.im - y.im)

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y - self

    def __neg__(self) -> "QI":
        return QI(-self.re, -self.im)

    def __mul__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return QI(self.re * y.re - self.im * y.im, self.re * y.im + self.im * y.re)

    __rmul__ = __mul__

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def __eq__(self, other: object) -> bool:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self.re == y.re and self.im == y.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"QI({self.re}, {self.im})"


I = QI(0, 1)
