"""Probabilities of real-eigenvalue counts, generating function and moments.

``p_{n,k}`` is the probability that an ``n × n`` matrix with independent
standard normal entries has exactly ``k`` real eigenvalues.  With
``l = (n-k)/2`` complex pairs,

    p_{n,k} = p_{n,n} / l! · Z_(1^l)(tr rho, tr rho², …, tr rho^l),
    p_{n,n} = 2^{-n(n-1)/4},

and all values lie in Q(√2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import mpmath
from scipy import special

from .kernels import RhoMatrix, closed_form_trace, rho_matrix, trace_powers
from .qsqrt2 import ONE, ZERO, QSqrt2
from .symfun import zonal_generating_series, zonal_partition_sum

__all__ = [
    "ProbabilityTable",
    "GenFuncPoly",
    "prob_all_real",
    "prob_nk",
    "prob_table",
    "prob_table_float",
    "generating_function",
    "moment_real_count",
    "expected_real_count",
    "expected_real_count_asymptotic",
    "prob_one_pair",
    "prob_one_pair_asymptotic",
    "one_pair_asymptotic_ratio",
    "legendre_sum_S",
    "tau_series",
    "tau_series_exact",
    "c1_coefficients",
]


@dataclass(frozen=True)
class ProbabilityTable:
    """Exact ``p_{n,k}`` for every k with ``n - k`` even."""

    n: int
    rows: dict[int, QSqrt2] = field(default_factory=dict)

    def __getitem__(self, k: int) -> QSqrt2:
        return self.rows.get(k, ZERO)

    def total(self) -> QSqrt2:
        acc = ZERO
        for v in self.rows.values():
            acc = acc + v
        return acc

    def floats(self) -> dict[int, float]:
        return {k: float(v) for k, v in self.rows.items()}


@dataclass(frozen=True)
class GenFuncPoly:
    """``G_n(z) = Σ_l c_l z^l`` with ``c_l = p_{n,n-2l}``."""

    n: int
    coefficients: tuple[QSqrt2, ...]

    def __call__(self, z):
        acc = ZERO if isinstance(z, (int, Fraction, QSqrt2)) else 0.0
        for c in reversed(self.coefficients):
            acc = acc * z + (c if not isinstance(acc, float) else float(c))
        return acc


def prob_all_real(n: int) -> QSqrt2:
    """``p_{n,n} = 2^{-n(n-1)/4}`` exactly (a power of 2, possibly times √2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    twice = n * (n - 1) // 2  # 2 * exponent, an integer
    base = Fraction(1, 2 ** (twice // 2))
    if twice % 2 == 0:
        return QSqrt2(base, 0)
    # 2^{-k-1/2} = 2^{-k-1} √2
    return QSqrt2(0, base / 2)


def _rho(n: int, rho: RhoMatrix | None) -> RhoMatrix:
    if rho is None:
        return rho_matrix(n)
    if rho.n != n:
        raise ValueError(f"rho is for n={rho.n}, expected n={n}")
    return rho


def prob_nk(n: int, k: int, rho: RhoMatrix | None = None) -> QSqrt2:
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if (n - k) % 2:
        return ZERO
    ell = (n - k) // 2
    if ell == 0:
        return prob_all_real(n)
    p = trace_powers(_rho(n, rho), ell)
    z = zonal_partition_sum(p, one=ONE)
    return prob_all_real(n) * z * Fraction(1, math.factorial(ell))


def prob_table(n: int, rho: RhoMatrix | None = None) -> ProbabilityTable:
    """All exact ``p_{n,k}``; the zonal values come from one Newton recursion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return ProbabilityTable(1, {1: ONE})
    gf = generating_function(n, rho)
    rows = {n - 2 * ell: c for ell, c in enumerate(gf.coefficients)}
    return ProbabilityTable(n, dict(sorted(rows.items())))


def generating_function(n: int, rho: RhoMatrix | None = None) -> GenFuncPoly:
    """``G_n(z) = p_{n,n} det(1 + z rho)`` via Newton's identities on tr rho^j."""
    if n < 2:
        raise ValueError("n must be >= 2")
    r = _rho(n, rho)
    p = trace_powers(r, r.size)
    det_coeffs = zonal_generating_series(p, one=ONE)
    pnn = prob_all_real(n)
    return GenFuncPoly(n, tuple(pnn * c for c in det_coeffs))


def prob_table_float(n: int, dps: int | None = None) -> tuple[dict[int, float], float]:
    """Float probabilities, intended for n above the exact-mode cap.

    ``G_n(z) = p_{n,n} det(1 + z rho)`` is evaluated in multiprecision at the
    ``N = ⌊n/2⌋ + 1`` roots of unity and its coefficients recovered by a
    discrete Fourier transform.  Cancellation inside the determinants grows
    with n, so the working precision defaults to ``20 + n`` digits.  Returns
    ``(table, err)``; ``err`` is the larger of ``|Σ p - 1|`` and the largest
    imaginary part left in the coefficients (zero up to rounding).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return {1: 1.0}, 0.0
    rho = rho_matrix(n)
    size = rho.size
    points = size + 1
    with mpmath.workdps(dps if dps is not None else 20 + n):
        root2 = mpmath.sqrt(2)
        r = mpmath.matrix([[mpmath.mpf(x.a.numerator) / x.a.denominator
                            + mpmath.mpf(x.b.numerator) / x.b.denominator * root2 for x in row]
                           for row in rho.entries])
        pnn = mpmath.mpf(2) ** (-mpmath.mpf(n * (n - 1)) / 4)
        eye = mpmath.eye(size)
        vals: list = [None] * points
        for j in range(points // 2 + 1):
            vals[j] = pnn * mpmath.det(eye + mpmath.expjpi(mpmath.mpf(2 * j) / points) * r)
            if j:
                vals[points - j] = mpmath.conj(vals[j])  # rho is real
        coeffs = [mpmath.fsum(vals[j] * mpmath.expjpi(-mpmath.mpf(2 * j * ell) / points)
                              for j in range(points)) / points for ell in range(size + 1)]
        total = mpmath.fsum(c.real for c in coeffs)
        err = max([abs(total - 1)] + [abs(c.imag) for c in coeffs])
        table = {n - 2 * ell: float(c.real) for ell, c in enumerate(coeffs)}
    return dict(sorted(table.items())), float(err)


def moment_real_count(n: int, q: int, rho: RhoMatrix | None = None) -> QSqrt2:
    """``E[N_r^q] = p_{n,n} (n - 2z d/dz)^q det(1 + z rho) |_{z=1}``."""
    if q < 0:
        raise ValueError("q must be >= 0")
    if n == 1:
        return ONE
    coeffs = list(generating_function(n, rho).coefficients)
    for _ in range(q):
        # (n - 2z d/dz) z^l = (n - 2l) z^l
        coeffs = [c * (n - 2 * ell) for ell, c in enumerate(coeffs)]
    total = ZERO
    for c in coeffs:
        total = total + c
    return total


def expected_real_count(n: int) -> float:
    """``E_n = 1/2 + √2 ₂F₁(1, -1/2; n; 1/2) / B(n, 1/2)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    # ₂F₁(1, -1/2; n; 1/2) = Σ_k (-1/2)_k / (n)_k 2^{-k}
    term, total, k = 1.0, 1.0, 0
    while abs(term) >= 1e-17 * abs(total):
        term *= (k - 0.5) / (n + k) * 0.5
        total += term
        k += 1
    log_beta = special.gammaln(n) + special.gammaln(0.5) - special.gammaln(n + 0.5)
    return 0.5 + math.sqrt(2.0) * total * math.exp(-log_beta)


def expected_real_count_asymptotic(n: int, order: int = 2) -> float:
    """Large-n series ``√(2n/π)(1 - 3/(8n) - 3/(128n²) + 27/(1024n³) + 499/(32768n⁴)) + 1/2``.

    ``order`` selects how many correction terms are kept (0..4).
    """
    corrections = [1.0, -3 / 8, -3 / 128, 27 / 1024, 499 / 32768]
    s = sum(c / n ** j for j, c in enumerate(corrections[: order + 1]))
    return math.sqrt(2 * n / math.pi) * s + 0.5


# ---------------------------------------------------------------------------
# one complex pair
# ---------------------------------------------------------------------------
def _legendre(k: int, x: float) -> float:
    p_prev, p = 1.0, x
    if k == 0:
        return p_prev
    for j in range(1, k):
        p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
    return p


def legendre_sum_S(n: int) -> float:
    """``S_n = (1/√2) Σ_{j=0}^{⌊n/2⌋} 3^{j+α/2} P_{2j+α}(2/√3) - (⌊n/2⌋+1)/2``, α = n mod 2."""
    alpha = n % 2
    x = 2.0 / math.sqrt(3.0)
    s = sum(3.0 ** (j + alpha / 2) * _legendre(2 * j + alpha, x) for j in range(n // 2 + 1))
    return s / math.sqrt(2.0) - 0.5 * (n // 2 + 1)


def prob_one_pair(n: int, route: Literal["zonal", "laguerre", "legendre"] = "zonal"):
    """``p_{n,n-2}`` by one of three independent routes.

    * ``zonal``    – exact, from ``tr rho`` of the reduced matrix;
    * ``laguerre`` – exact, ``2 p_{n,n} ∫ y e^{y²} erfc(√2y) L²_{n-2}(-2y²)^… dy``;
    * ``legendre`` – float, Legendre polynomials at ``2/√3``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if route == "zonal":
        return prob_nk(n, n - 2)
    if route == "laguerre":
        return prob_all_real(n) * closed_form_trace(n)
    if route == "legendre":
        return 2.0 * float(prob_all_real(n)) * legendre_sum_S(n - 2)
    raise ValueError(f"unknown route {route!r}")


def prob_one_pair_asymptotic(n: int) -> float:
    """Leading large-n estimate ``p_{n,n} 3^{n+1/2} / (8 √(π n))``."""
    log_val = (-n * (n - 1) / 4) * math.log(2) + (n + 0.5) * math.log(3) - math.log(8 * math.sqrt(math.pi * n))
    return math.exp(log_val)


def one_pair_asymptotic_ratio(n: int) -> float:
    """Exact ``p_{n,n-2}`` divided by :func:`prob_one_pair_asymptotic` (p_{n,n} cancels)."""
    tr = float(closed_form_trace(n))
    return tr / (3.0 ** (n + 0.5) / (8 * math.sqrt(math.pi * n)))


def c1_coefficients(k_max: int) -> list[int]:
    """Taylor coefficients of ``1/((1-z)(1-z²))``: ``⌊k/2⌋ + 1``."""
    return [k // 2 + 1 for k in range(k_max + 1)]


def _binom_series(exponent: Fraction, scale: int, length: int) -> list[Fraction]:
    """Coefficients of ``(1 + scale·z)^exponent``."""
    out, c = [], Fraction(1)
    for k in range(length):
        out.append(c)
        c = c * (exponent - k) / (k + 1) * scale
    return out


def tau_series_exact(N: int) -> list[QSqrt2]:
    """Exact Taylor coefficients of ``τ(z) = (-1 + √2 √((1-z)/(1-3z))) / (2(1-z²)(1-z))``."""
    L = N + 1
    a = _binom_series(Fraction(1, 2), -1, L)
    b = _binom_series(Fraction(-1, 2), -3, L)
    root = [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(L)]
    c1 = c1_coefficients(N)
    out = []
    for k in range(L):
        conv = sum(root[i] * c1[k - i] for i in range(k + 1))
        out.append(QSqrt2(Fraction(-c1[k], 2), conv / 2))
    return out


def tau_series(N: int) -> list[float]:
    """``S_0..S_N`` from the Legendre sum (float)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return [legendre_sum_S(k) for k in range(N + 1)]

