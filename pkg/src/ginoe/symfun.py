"""Integer partitions and the zonal polynomials Z_(1^l) on power sums.

The zonal functions are generic over the scalar: anything supporting ``+``,
``*``, unary ``-`` and multiplication by :class:`fractions.Fraction` works
(``QSqrt2``, ``Fraction``, ``complex``, ``float``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Sequence

__all__ = [
    "Partition",
    "partitions",
    "partition_count",
    "zonal_partition_sum",
    "zonal_recursive",
    "zonal_generating_series",
]


@dataclass(frozen=True, order=True)
class Partition:
    """Partition in frequency form: ``parts = ((l_1, s_1), ..., (l_g, s_g))``, l_j decreasing."""

    parts: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        prev = None
        for part, mult in self.parts:
            if part <= 0 or mult <= 0:
                raise ValueError("parts and multiplicities must be positive")
            if prev is not None and part >= prev:
                raise ValueError("parts must be strictly decreasing")
            prev = part

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "Partition":
        """Build from a plain multiset of parts, e.g. ``[2, 1, 1]``."""
        counts: dict[int, int] = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        return cls(tuple(sorted(counts.items(), reverse=True)))

    @property
    def size(self) -> int:
        return sum(p * s for p, s in self.parts)

    @property
    def length(self) -> int:
        """Number of parts counted with multiplicity."""
        return sum(s for _, s in self.parts)

    def as_list(self) -> list[int]:
        return [p for p, s in self.parts for _ in range(s)]

    def to_json(self) -> list[list[int]]:
        return [[p, s] for p, s in self.parts]

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.as_list()) + ")"


def _descending(total: int, largest: int) -> Iterator[list[int]]:
    if total == 0:
        yield []
        return
    for first in range(min(total, largest), 0, -1):
        for rest in _descending(total - first, first):
            yield [first] + rest


def partitions(ell: int) -> list[Partition]:
    """All partitions of ``ell`` in reverse-lexicographic order."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    return [Partition.from_list(p) for p in _descending(ell, ell)]


def partition_count(ell: int) -> int:
    return len(partitions(ell))


def _power(x: Any, k: int, one: Any) -> Any:
    out = one
    for _ in range(k):
        out = out * x
    return out


def zonal_partition_sum(p: Sequence[Any], one: Any = 1) -> Any:
    """Z_(1^l)(p_1..p_l) = (-1)^l l! Σ_{|λ|=l} Π_j (1/σ_j!) (-p_{l_j}/l_j)^{σ_j}."""
    ell = len(p)
    total: Any = 0 * one
    for lam in partitions(ell):
        term: Any = one
        for part, mult in lam.parts:
            term = term * _power(p[part - 1] * Fraction(-1, part), mult, one)
            term = term * Fraction(1, math.factorial(mult))
        total = total + term
    return total * ((-1) ** ell * math.factorial(ell))


def zonal_recursive(p: Sequence[Any], one: Any = 1) -> Any:
    """Z_l = (l-1)! Σ_{r<l} ((-1)^(l-r-1)/r!) p_{l-r} Z_r with Z_0 = 1."""
    z: list[Any] = [one]
    for ell in range(1, len(p) + 1):
        acc: Any = 0 * one
        for r in range(ell):
            coeff = Fraction((-1) ** (ell - r - 1), math.factorial(r))
            acc = acc + p[ell - r - 1] * z[r] * coeff
        z.append(acc * math.factorial(ell - 1))
    return z[-1]


def zonal_generating_series(p: Sequence[Any], one: Any = 1) -> list[Any]:
    """Coefficients ``Z_(1^r)/r!`` for r = 0..len(p).

    Truncation of ``exp(Σ_r (-1)^(r-1) p_r z^r / r)``; equals ``det(1 + zA)``
    when ``p_r = tr A^r``.
    """
    out: list[Any] = [one]
    for ell in range(1, len(p) + 1):
        acc: Any = 0 * one
        # Newton: ell e_ell = Σ_{r=1}^{ell} (-1)^(r-1) p_r e_{ell-r}
        for r in range(1, ell + 1):
            acc = acc + p[r - 1] * out[ell - r] * ((-1) ** (r - 1))
        out.append(acc * Fraction(1, ell))
    return out
