"""Exact building blocks of the real Ginibre ensemble.

Contents
--------
* base integrals ``I_m = ∫_0^∞ y^(2m+1) e^(y²) erfc(√2 y) dy`` (exact, in Q(√2));
* rational polynomials, Hermite and generalized Laguerre expansions;
* skew-orthogonal polynomials ``q_j`` (and the tilded odd-size variants) with
  their normalizations ``h_j = √π (2j)!/4^j``;
* the reduced ``⌊n/2⌋ × ⌊n/2⌋`` matrix ``rho`` and the ``n × n`` matrix
  ``sigma`` whose trace powers drive every probability;
* the antisymmetric coefficient matrix ``mu`` of the complex-sector kernel
  (floating point, since it carries ``1/√π``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .qsqrt2 import ZERO, QSqrt2, from_json, to_json

__all__ = [
    "PolyRational",
    "SqrtPiScaled",
    "BaseIntegralTable",
    "RhoMatrix",
    "SigmaMatrix",
    "base_integral",
    "base_integral_table",
    "base_integral_numeric",
    "hermite",
    "laguerre_series",
    "laguerre_poly",
    "skew_polys",
    "SkewPolys",
    "h_norm",
    "rho_even_entry",
    "rho_matrix",
    "sigma_matrix",
    "trace_power",
    "trace_powers",
    "closed_form_trace",
    "mat_mul",
    "mu_matrix",
]


# ---------------------------------------------------------------------------
# rational polynomials
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PolyRational:
    """Polynomial with rational coefficients; ``coefficients[k]`` multiplies x^k."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        coeffs = [Fraction(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def monomial(cls, degree: int, coeff: Fraction | int = 1) -> "PolyRational":
        return cls((Fraction(0),) * degree + (Fraction(coeff),))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __add__(self, other: "PolyRational") -> "PolyRational":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return PolyRational(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "PolyRational":
        return PolyRational(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "PolyRational") -> "PolyRational":
        return self + (-other)

    def scale(self, c: Fraction | int) -> "PolyRational":
        return PolyRational(tuple(c * x for x in self.coefficients))

    def __mul__(self, other: "PolyRational") -> "PolyRational":
        if not self.coefficients or not other.coefficients:
            return PolyRational(())
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, x in enumerate(self.coefficients):
            if x:
                for j, y in enumerate(other.coefficients):
                    out[i + j] += x * y
        return PolyRational(tuple(out))

    def shift(self, k: int) -> "PolyRational":
        """Multiply by x^k."""
        if not self.coefficients:
            return self
        return PolyRational((Fraction(0),) * k + self.coefficients)

    def __call__(self, x):
        """Horner evaluation; works for float, complex and numpy arrays."""
        acc = 0.0 * x
        for c in reversed(self.coefficients):
            acc = acc * x + float(c)
        return acc

    def as_float_array(self, length: int | None = None) -> np.ndarray:
        n = len(self.coefficients) if length is None else length
        out = np.zeros(n)
        for k, c in enumerate(self.coefficients):
            out[k] = float(c)
        return out


_ZERO_POLY = PolyRational(())
_X = PolyRational((Fraction(0), Fraction(1)))


@lru_cache(maxsize=None)
def hermite(j: int) -> PolyRational:
    """Physicists' Hermite polynomial H_j (with H_{-1} = 0)."""
    if j < 0:
        return _ZERO_POLY
    if j == 0:
        return PolyRational((Fraction(1),))
    # H_{j} = 2x H_{j-1} - 2(j-1) H_{j-2}
    return (hermite(j - 1) * _X).scale(2) - hermite(j - 2).scale(2 * (j - 1))


def _inv_factorial(k: int) -> Fraction:
    """1/k!, with the convention 1/k! = 0 for negative integers k."""
    if k < 0:
        return Fraction(0)
    return Fraction(1, math.factorial(k))


@lru_cache(maxsize=None)
def laguerre_series(n: int, a: int) -> tuple[Fraction, ...]:
    """Coefficients ``c_j`` with ``L_n^a(-w) = Σ_j c_j w^j``.

    Uses ``c_j = (n+a)! / (j! (n-j)! (a+j)!)`` with reciprocal factorials of
    negative integers read as zero; a negative degree gives the zero
    polynomial.  For a negative upper index ``a = -k`` (k ≤ n) this agrees
    with ``L_n^{-k}(w) = w^k / (-n)_k · L_{n-k}^k(w)``.
    """
    if n < 0:
        return ()
    if n + a < 0:
        raise ValueError(f"L_{n}^{a} with n + a < 0 is not supported")
    top = math.factorial(n + a)
    return tuple(
        top * _inv_factorial(j) * _inv_factorial(n - j) * _inv_factorial(a + j)
        for j in range(n + 1)
    )


def laguerre_poly(n: int, a: int) -> PolyRational:
    """``L_n^a(x)`` as a polynomial in x (same conventions as :func:`laguerre_series`)."""
    return PolyRational(
        tuple(c * (-1) ** j for j, c in enumerate(laguerre_series(n, a)))
    )


# ---------------------------------------------------------------------------
# base integrals
# ---------------------------------------------------------------------------
def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


@lru_cache(maxsize=None)
def base_integral(m: int) -> QSqrt2:
    """Exact ``I_m = ∫_0^∞ y^(2m+1) e^(y²) erfc(√2 y) dy``.

    Integration by parts gives ``I_0 = (√2 - 1)/2`` and
    ``I_m = -m I_{m-1} + (2m-1)!! √2 / 2^(m+1)``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return QSqrt2(Fraction(-1, 2), Fraction(1, 2))
    return -m * base_integral(m - 1) + QSqrt2(0, Fraction(_double_factorial(2 * m - 1), 2 ** (m + 1)))


def base_integral_numeric(m: int) -> float:
    """Adaptive quadrature of the defining integral (independent check).

    ``e^(y²) erfc(√2 y)`` is written as ``erfcx(√2 y) e^(-y²)`` to avoid
    overflow.  The integrand peaks near ``y = √m``, so the range is split there.
    """
    def f(y: float) -> float:
        return y ** (2 * m + 1) * special.erfcx(math.sqrt(2.0) * y) * math.exp(-y * y)

    peak = math.sqrt(max(m, 0.5))
    edges = [0.0, peak / 2, peak, 2 * peak, 4 * peak + 10.0, np.inf]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
    return total


@dataclass(frozen=True)
class BaseIntegralTable:
    """Entries ``values[m] = I_m`` for m = 0..len-1."""

    values: tuple[QSqrt2, ...]

    def __getitem__(self, m: int) -> QSqrt2:
        return self.values[m]

    def __len__(self) -> int:
        return len(self.values)


def base_integral_table(m_max: int) -> BaseIntegralTable:
    return BaseIntegralTable(tuple(base_integral(m) for m in range(m_max + 1)))


def _integrate_odd_monomials(terms: dict[int, Fraction]) -> QSqrt2:
    """Σ_m c_m I_m for a map m -> c_m (monomial y^(2m+1) has coefficient c_m)."""
    total = ZERO
    for m, c in terms.items():
        if c:
            if m < 0:
                raise ValueError("integrand not integrable at y = 0")
            total = total + c * base_integral(m)
    return total


# ---------------------------------------------------------------------------
# skew-orthogonal polynomials
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SqrtPiScaled:
    """The number ``coeff · √π``; only ratios of such numbers are stored exactly."""

    coeff: Fraction

    def __truediv__(self, other: "SqrtPiScaled") -> Fraction:
        return self.coeff / other.coeff

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(math.pi)


def h_norm(j: int) -> SqrtPiScaled:
    """``h_j = √π (2j)! / 2^(2j)``."""
    return SqrtPiScaled(Fraction(math.factorial(2 * j), 4 ** j))


def _q_plain(j: int) -> PolyRational:
    if j % 2 == 0:
        return hermite(j).scale(Fraction(1, 2 ** j))
    k = (j - 1) // 2
    return (hermite(j) - hermite(j - 2).scale(4 * k)).scale(Fraction(1, 2 ** j))


@dataclass(frozen=True)
class SkewPolys:
    """Skew-orthogonal polynomials for matrix size ``n``.

    ``q[j]`` are the plain polynomials, ``q_tilde[j]`` the variants entering the
    odd-``n`` kernel (identical to ``q`` for even ``n``), ``h[j]`` the norms.
    """

    n: int
    q: tuple[PolyRational, ...]
    q_tilde: tuple[PolyRational, ...]
    h: tuple[SqrtPiScaled, ...]


@lru_cache(maxsize=None)
def skew_polys(n: int) -> SkewPolys:
    if n < 1:
        raise ValueError("n must be >= 1")
    q = tuple(_q_plain(j) for j in range(n))
    h = tuple(h_norm(j) for j in range((n + 1) // 2))
    if n % 2 == 0:
        return SkewPolys(n, q, q, h)
    m = (n - 1) // 2
    tilde = list(q)
    factor_m = Fraction(4 ** m * math.factorial(m), math.factorial(2 * m))
    for j in range(m):
        c = Fraction(math.factorial(2 * j), 4 ** j * math.factorial(j)) * factor_m
        tilde[2 * j] = q[2 * j] - q[2 * m].scale(c)
    return SkewPolys(n, q, tuple(tilde), h)


def mu_matrix(n: int) -> np.ndarray:
    """Antisymmetric ``mu`` with ``D_n(x,y) = ½ e^{-(x²+y²)/2} Σ q_j(x) mu_jk q_k(y)``.

    Built on the *plain* ``q_j``.  Even n: 2×2 blocks ``[[0, -1/h_j], [1/h_j, 0]]``.
    Odd n = 2m+1: additionally ``mu[2m, 2j+1] = c_m / j!`` and
    ``mu[2j+1, 2m] = -c_m / j!`` with ``c_m = m!/h_m``.
    """
    mu = np.zeros((n, n))
    for j in range(n // 2):
        hj = float(h_norm(j))
        mu[2 * j, 2 * j + 1] = -1.0 / hj
        mu[2 * j + 1, 2 * j] = 1.0 / hj
    if n % 2 == 1:
        m = (n - 1) // 2
        c_m = math.factorial(m) / float(h_norm(m))
        for j in range(m):
            mu[2 * m, 2 * j + 1] = c_m / math.factorial(j)
            mu[2 * j + 1, 2 * m] = -c_m / math.factorial(j)
    return mu


# ---------------------------------------------------------------------------
# rho and sigma
# ---------------------------------------------------------------------------
@lru_cache(maxsize=None)
def rho_even_entry(alpha: int, beta: int) -> QSqrt2:
    """Exact value of the even-size rho entry formula at (alpha, beta).

    ∫_0^∞ y^(2(β-α)-1) e^{y²} erfc(√2y) [(2α+1) L^{2(β-α)-1}_{2α+1}(-2y²)
    + 2y² L^{2(β-α)+1}_{2α-1}(-2y²)] dy, expanded into odd monomials.
    Valid for any alpha, beta >= 0 (the odd-size formula needs beta = m).
    """
    d = beta - alpha
    terms: dict[int, Fraction] = {}
    # y^(2d-1) * (2y^2)^j = 2^j y^(2(d-1+j)+1)
    for j, c in enumerate(laguerre_series(2 * alpha + 1, 2 * d - 1)):
        if c:
            m = d - 1 + j
            terms[m] = terms.get(m, Fraction(0)) + (2 * alpha + 1) * c * 2 ** j
    # 2y^2 * y^(2d-1) * (2y^2)^j = 2^(j+1) y^(2(d+j)+1)
    for j, c in enumerate(laguerre_series(2 * alpha - 1, 2 * d + 1)):
        if c:
            m = d + j
            terms[m] = terms.get(m, Fraction(0)) + c * 2 ** (j + 1)
    return _integrate_odd_monomials(terms)


def _rho_odd_entry(alpha: int, beta: int, m: int) -> QSqrt2:
    factor = Fraction((-4) ** (m - beta) * math.factorial(m) * math.factorial(2 * beta),
                      math.factorial(2 * m) * math.factorial(beta))
    return rho_even_entry(alpha, beta) - factor * rho_even_entry(alpha, m)


Matrix = tuple[tuple[QSqrt2, ...], ...]


@dataclass(frozen=True)
class RhoMatrix:
    """Reduced ⌊n/2⌋ × ⌊n/2⌋ matrix for matrix size ``n``."""

    n: int
    parity: str
    entries: Matrix

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "parity": self.parity,
            "entries": [[to_json(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RhoMatrix":
        entries = tuple(tuple(from_json(x) for x in row) for row in obj["entries"])
        return cls(int(obj["n"]), str(obj["parity"]), entries)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float).reshape(
            self.size, self.size
        )


@dataclass(frozen=True)
class SigmaMatrix:
    """n × n matrix with checkerboard sparsity."""

    n: int
    entries: Matrix

    @property
    def size(self) -> int:
        return self.n

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)


@lru_cache(maxsize=None)
def rho_matrix(n: int) -> RhoMatrix:
    if n < 2:
        raise ValueError("rho_matrix requires n >= 2")
    half = n // 2
    if n % 2 == 0:
        entries = tuple(tuple(rho_even_entry(a, b) for b in range(half)) for a in range(half))
        return RhoMatrix(n, "even", entries)
    m = half
    entries = tuple(tuple(_rho_odd_entry(a, b, m) for b in range(m)) for a in range(m))
    return RhoMatrix(n, "odd", entries)


def _signed_even(alpha: int, beta: int) -> QSqrt2:
    """(-1)^(β-α) times the even-size rho entry (the even–even sigma entry)."""
    v = rho_even_entry(alpha, beta)
    return v if (beta - alpha) % 2 == 0 else -v


@lru_cache(maxsize=None)
def sigma_matrix(n: int) -> SigmaMatrix:
    """``sigma = 2i (mu chi)`` with the factor i absorbed (entries are real)."""
    if n < 2:
        raise ValueError("sigma_matrix requires n >= 2")
    s = [[ZERO] * n for _ in range(n)]
    h = [h_norm(j) for j in range(n // 2 + 1)]
    if n % 2 == 0:
        half = n // 2
        for a in range(half):
            for b in range(half):
                s[2 * a][2 * b] = _signed_even(a, b)
        for a in range(half):
            for b in range(half):
                s[2 * a + 1][2 * b + 1] = (h[b] / h[a]) * s[2 * b][2 * a]
        return SigmaMatrix(n, tuple(tuple(r) for r in s))

    m = n // 2
    # c_m / c_j with c_j = j!/h_j
    c_ratio = [Fraction(math.factorial(m), math.factorial(j)) * (h[j] / h[m]) for j in range(m + 1)]
    for b in range(m + 1):
        for a in range(m):
            s[2 * a][2 * b] = _signed_even(a, b)
        acc = ZERO
        for j in range(m):
            acc = acc + c_ratio[j] * _signed_even(j, b)
        s[2 * m][2 * b] = -acc
    for a in range(m):
        for b in range(m):
            first = (h[b] / h[a]) * _signed_even(b, a)
            second = (h[b] / h[m]) * Fraction(math.factorial(m), math.factorial(a)) * _signed_even(b, m)
            s[2 * a + 1][2 * b + 1] = first - second
    return SigmaMatrix(n, tuple(tuple(r) for r in s))


def mat_mul(x: Sequence[Sequence[QSqrt2]], y: Sequence[Sequence[QSqrt2]]) -> Matrix:
    n, k, p = len(x), len(y), len(y[0]) if y else 0
    out = []
    for i in range(n):
        row = []
        xi = x[i]
        for j in range(p):
            acc = ZERO
            for t in range(k):
                a = xi[t]
                if a:
                    b = y[t][j]
                    if b:
                        acc = acc + a * b
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _trace(x: Matrix) -> QSqrt2:
    total = ZERO
    for i in range(len(x)):
        total = total + x[i][i]
    return total


def trace_power(mat: RhoMatrix | SigmaMatrix, j: int) -> QSqrt2:
    """Exact ``tr M^j``."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return trace_powers(mat, j)[j - 1]


def trace_powers(mat: RhoMatrix | SigmaMatrix, j_max: int) -> tuple[QSqrt2, ...]:
    """``(tr M, tr M², …, tr M^j_max)`` computed with one chain of products."""
    out = []
    power = mat.entries
    for j in range(1, j_max + 1):
        if j > 1:
            power = mat_mul(power, mat.entries)
        out.append(_trace(power))
    return tuple(out)


@lru_cache(maxsize=None)
def closed_form_trace(n: int) -> QSqrt2:
    """``tr rho = 2 ∫_0^∞ y e^{y²} erfc(√2 y) L²_{n-2}(-2y²) dy`` (exact)."""
    if n < 2:
        raise ValueError("closed_form_trace requires n >= 2")
    terms = {j: 2 * c * 2 ** j for j, c in enumerate(laguerre_series(n - 2, 2))}
    return _integrate_odd_monomials(terms)

