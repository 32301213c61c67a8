"""Pfaffians, the complex-sector kernel and the Pfaffian integration theorem.

Conventions
-----------
For a bilinear kernel ``Q(x, y) = ½ Σ_jk q_j(x) mu_jk q_k(y)`` with
antisymmetric ``mu`` and a measure ``dπ`` on the complex plane put

    ς_jk = ½ ∫ dπ(z) q_j(z) q_k(z̄),        υ = 2i (mu ς - mu ςᵀ).

Then for ``w = (z_1, z̄_1, …, z_l, z̄_l)``

    ∫ Π dπ(z_j) pf[Q(w_a, w_b)] = (i/2)^l Z_(1^l)(½ tr υ, …, ½ tr υ^l).

For the real Ginibre ensemble ``dπ(z) = e^{-(z²+z̄²)/2} erfc(√2 Im z) θ(Im z) d²z``
and ``υ`` equals the exact matrix ``sigma`` of :mod:`ginoe.kernels`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from scipy import special

from .kernels import PolyRational, h_norm, mu_matrix, sigma_matrix, skew_polys
from .probabilities import prob_all_real
from .gaussian import QI
from .symfun import zonal_recursive

__all__ = [
    "pfaffian",
    "pfaffian_exact",
    "pfaffian_float",
    "pfaffian_batch",
    "DiscreteMeasure",
    "KernelContext",
    "kernel_context",
    "kernel_D",
    "jpdf_complex",
    "ginoe_measure",
    "varsigma",
    "upsilon",
    "theorem_rhs",
    "theorem_lhs",
    "pfaffian_theorem_check",
    "theorem_report",
    "theorem_exact",
    "TheoremReport",
    "ExactInstance",
    "random_instance",
    "projecting_mu",
    "projection_failure_check",
    "one_pair_integral",
]


# ---------------------------------------------------------------------------
# Pfaffians
# ---------------------------------------------------------------------------
def pfaffian_exact(a: Sequence[Sequence[Any]]) -> Any:
    """Expansion along the first row; exact for any commutative-ring scalar.

    Intended for dimension ≤ 12 ((dim-1)!! terms).
    """
    dim = len(a)
    if dim % 2:
        raise ValueError("Pfaffian requires an even dimension")

    def rec(idx: tuple[int, ...]) -> Any:
        if not idx:
            return 1
        first, rest = idx[0], idx[1:]
        total: Any = 0
        for pos, j in enumerate(rest):
            entry = a[first][j]
            if entry == 0:
                continue
            sub = rec(rest[:pos] + rest[pos + 1:])
            term = entry * sub
            total = total + term if pos % 2 == 0 else total - term
        return total

    return rec(tuple(range(dim)))


def pfaffian_float(a: np.ndarray) -> complex | float:
    """Skew-symmetric Gaussian elimination (Parlett–Reid) with pivoting."""
    a = np.array(a, dtype=complex if np.iscomplexobj(a) else float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    if n % 2:
        raise ValueError("Pfaffian requires an even dimension")
    result = 1.0 + 0.0 * a.flat[0] if n else 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            result = -result
        pivot = a[k, k + 1]
        if pivot == 0:
            return 0.0 * result
        result = result * pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return result


def pfaffian(a: Any) -> Any:
    """Dispatch: numpy arrays use elimination, nested sequences the exact expansion."""
    if isinstance(a, np.ndarray):
        return pfaffian_float(a)
    return pfaffian_exact(a)


def pfaffian_batch(a: np.ndarray) -> np.ndarray:
    """Pfaffians of a stack ``(..., 2l, 2l)`` by vectorized first-row expansion."""
    dim = a.shape[-1]
    if dim % 2:
        raise ValueError("Pfaffian requires an even dimension")
    if dim == 0:
        return np.ones(a.shape[:-2], dtype=a.dtype)
    if dim == 2:
        return a[..., 0, 1]
    total = np.zeros(a.shape[:-2], dtype=a.dtype)
    for j in range(1, dim):
        keep = [i for i in range(1, dim) if i != j]
        minor = a[..., keep, :][..., :, keep]
        sign = 1.0 if j % 2 == 1 else -1.0
        total = total + sign * a[..., 0, j] * pfaffian_batch(minor)
    return total


# ---------------------------------------------------------------------------
# measures and kernels
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite measure ``Σ_m w_m δ(z - ζ_m)`` on the complex plane."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex).ravel()
        wts = np.asarray(self.weights, dtype=complex).ravel()
        if pts.size < 1 or pts.size != wts.size:
            raise ValueError("need M >= 1 points with matching weights")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def size(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class KernelContext:
    """Polynomials ``q_j`` and antisymmetric ``mu`` defining ``Q(x,y) = ½ qᵀ(x) mu q(y)``."""

    n: int
    q: tuple[PolyRational, ...]
    mu: np.ndarray

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu)
        if mu.shape != (self.n, self.n) or len(self.q) != self.n:
            raise ValueError("shape mismatch between mu and q")
        if not np.allclose(mu, -mu.T, rtol=0, atol=1e-14 * max(1.0, float(np.max(np.abs(mu))))):
            raise ValueError("mu must be antisymmetric")
        object.__setattr__(self, "mu", mu)

    def qvec(self, z: np.ndarray) -> np.ndarray:
        """Array of shape ``(n, *z.shape)`` with ``q_j(z)``."""
        z = np.asarray(z, dtype=complex)
        return np.stack([p(z) for p in self.q]) if self.n else np.zeros((0,) + z.shape)

    def Q(self, x, y):
        """Polynomial part ``½ Σ q_j(x) mu_jk q_k(y)`` (broadcasts over x, y)."""
        qx, qy = self.qvec(x), self.qvec(y)
        return 0.5 * np.einsum("j...,jk,k...->...", qx, self.mu, qy)


def kernel_context(n: int) -> KernelContext:
    """Real-Ginibre kernel on plain ``q_j`` with the ``mu`` of :func:`ginoe.kernels.mu_matrix`."""
    return KernelContext(n, skew_polys(n).q, mu_matrix(n))


def kernel_D(n: int, x, y):
    """``D_n(x,y) = ½ e^{-(x²+y²)/2} Σ_{j<⌊n/2⌋} [q_{2j+1}(x) q_{2j}(y) - q_{2j}(x) q_{2j+1}(y)] / h_j``.

    For odd n the even-index polynomials are the tilded ones.
    """
    sp = skew_polys(n)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    acc = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for j in range(n // 2):
        qe, qo = sp.q_tilde[2 * j], sp.q_tilde[2 * j + 1]
        acc = acc + (qo(x) * qe(y) - qe(x) * qo(y)) / float(h_norm(j))
    out = 0.5 * np.exp(-(x * x + y * y) / 2) * acc
    return out[()] if out.ndim == 0 else out


def jpdf_complex(n: int, k: int, points: Sequence[complex]) -> float:
    """Density of ``l = (n-k)/2`` complex pairs at ``z_1..z_l`` (upper half plane).

    The Gaussian factors of the kernel are collected per point
    (each z_j enters once as z_j and once as z̄_j), which keeps the weight
    ``erfc(√2 y) e^{y²} = erfcx(√2 y) e^{-y²}`` finite for large y.
    """
    if not 0 <= k <= n or (n - k) % 2:
        raise ValueError("n - k must be a non-negative even number")
    ell = (n - k) // 2
    z = np.asarray(points, dtype=complex).ravel()
    if z.size != ell:
        raise ValueError(f"expected {ell} points, got {z.size}")
    if ell == 0:
        return float(prob_all_real(n))
    if np.any(z.imag <= 0):
        raise ValueError("points must lie in the upper half plane")
    ctx = kernel_context(n)
    w = np.empty(2 * ell, dtype=complex)
    w[0::2], w[1::2] = z, z.conj()
    block = ctx.Q(w[:, None], w[None, :])
    x, y = z.real, z.imag
    weight = np.prod(special.erfcx(math.sqrt(2.0) * y) * np.exp(-x * x - y * y))
    pref = float(prob_all_real(n)) / math.factorial(ell) * (2 / 1j) ** ell
    val = pref * weight * pfaffian_float(block)
    scale = max(abs(val), 1e-300)
    if abs(val.imag) > 1e-10 * scale and abs(val.imag) > 1e-300:
        raise ArithmeticError(f"non-real density value {val}")
    return float(val.real)


def ginoe_measure(nx: int = 40, nt: int = 160) -> DiscreteMeasure:
    """Tensor quadrature of the real-Ginibre complex-sector measure.

    x: Gauss–Hermite (weight e^{-x²}); y = t/(1-t) with Gauss–Legendre in t.
    The weight ``e^{-(z²+z̄²)/2} erfc(√2 y) = e^{-x²} erfcx(√2 y) e^{-y²}``.
    """
    xs, wx = np.polynomial.hermite.hermgauss(nx)
    ts, wt = np.polynomial.legendre.leggauss(nt)
    ts, wt = 0.5 * (ts + 1.0), 0.5 * wt
    ys = ts / (1.0 - ts)
    wy = wt / (1.0 - ts) ** 2 * special.erfcx(math.sqrt(2.0) * ys) * np.exp(-ys * ys)
    pts = (xs[:, None] + 1j * ys[None, :]).ravel()
    wts = (wx[:, None] * wy[None, :]).ravel()
    return DiscreteMeasure(pts, wts.astype(complex))


def varsigma(ctx: KernelContext, measure: DiscreteMeasure) -> np.ndarray:
    """``ς_jk = ½ Σ_m w_m q_j(ζ_m) q_k(ζ̄_m)``."""
    qz = ctx.qvec(measure.points)
    qzb = ctx.qvec(measure.points.conj())
    return 0.5 * np.einsum("m,jm,km->jk", measure.weights, qz, qzb)


def upsilon(ctx: KernelContext, measure: DiscreteMeasure) -> np.ndarray:
    """``υ_αβ = i Σ_k mu_αk ∫ dπ [q_k(z) q_β(z̄) - q_β(z) q_k(z̄)] = 2i mu (ς - ςᵀ)``."""
    s = varsigma(ctx, measure)
    return 2j * ctx.mu @ (s - s.T)


def theorem_rhs(ups: np.ndarray, ell: int) -> complex:
    """``(i/2)^l Z_(1^l)(½ tr υ, …, ½ tr υ^l)``."""
    p, power = [], np.eye(ups.shape[0], dtype=complex)
    for _ in range(ell):
        power = power @ ups
        p.append(0.5 * np.trace(power))
    return (0.5j) ** ell * complex(zonal_recursive(p, one=1.0 + 0j))


def theorem_lhs(ctx: KernelContext, measure: DiscreteMeasure, ell: int) -> complex:
    """Brute-force ``Σ_{m_1..m_l} Π w_{m_j} pf[Q(w_a, w_b)]`` over all M^l tuples."""
    pts = measure.points
    u = np.empty(2 * pts.size, dtype=complex)
    u[0::2], u[1::2] = pts, pts.conj()
    gram = ctx.Q(u[:, None], u[None, :])
    tuples = np.array(list(itertools.product(range(pts.size), repeat=ell)), dtype=int)
    idx = np.empty((tuples.shape[0], 2 * ell), dtype=int)
    idx[:, 0::2], idx[:, 1::2] = 2 * tuples, 2 * tuples + 1
    blocks = gram[idx[:, :, None], idx[:, None, :]]
    pf = pfaffian_batch(blocks)
    wprod = np.prod(measure.weights[tuples], axis=1)
    terms = wprod * pf
    # deterministic pairwise reduction
    return complex(np.sum(terms))


@dataclass(frozen=True)
class ExactInstance:
    """A discrete-measure instance with every ingredient rational (or Gaussian rational).

    ``q`` have rational coefficients, ``mu`` is a rational antisymmetric matrix,
    points and weights lie in Q(i).  Float views feed the numerical engine;
    the exact data feed :func:`theorem_exact`.
    """

    q: tuple[PolyRational, ...]
    mu: tuple[tuple[Fraction, ...], ...]
    points: tuple[QI, ...]
    weights: tuple[QI, ...]

    @property
    def n(self) -> int:
        return len(self.q)

    def context(self) -> KernelContext:
        mu = np.array([[float(x) for x in row] for row in self.mu], dtype=float).reshape(self.n, self.n)
        return KernelContext(self.n, self.q, mu)

    def measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(np.array([complex(z) for z in self.points]),
                               np.array([complex(w) for w in self.weights]))


def _grid_rational(rng: np.random.Generator, nonzero: bool = False) -> Fraction:
    while True:
        val = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 5)))
        if val or not nonzero:
            return val


def random_instance(n: int, rng: np.random.Generator, n_points: int = 5) -> ExactInstance:
    """Random instance on the grid (-3..3)/(1..4).

    q_j has degree exactly j; mu is resampled until it has full even rank;
    points have real part in [-3/2, 3/2] and |imaginary part| in [1/2, 3/2]
    (quarter-integer grid), weights are nonzero Gaussian rationals.
    """
    q = []
    for j in range(n):
        coeffs = [_grid_rational(rng) for _ in range(j)] + [_grid_rational(rng, nonzero=True)]
        q.append(PolyRational(tuple(coeffs)))
    full_rank = 2 * (n // 2)
    while True:
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                mu[i][j] = _grid_rational(rng)
                mu[j][i] = -mu[i][j]
        fmu = np.array([[float(x) for x in row] for row in mu])
        if np.linalg.matrix_rank(fmu) == full_rank:
            break
    points, weights = [], []
    for _ in range(n_points):
        re = Fraction(int(rng.integers(-6, 7)), 4)
        im = Fraction(int(rng.integers(2, 7)), 4) * (1 if rng.integers(2) else -1)
        points.append(QI(re, im))
        weights.append(QI(_grid_rational(rng), _grid_rational(rng, nonzero=True)))
    return ExactInstance(tuple(q), tuple(tuple(r) for r in mu), tuple(points), tuple(weights))


def _lcm_den(values) -> int:
    return math.lcm(1, *(Fraction(v).denominator for v in values))


def _eval_int(coeffs: Sequence[int], z: QI) -> QI:
    acc = QI(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _mat_mul_qi(x, y):
    n = len(x)
    return [[sum((x[a][k] * y[k][b] for k in range(n) if x[a][k] and y[k][b]), QI(0)) for b in range(n)]
            for a in range(n)]


def _exact_sides(inst: ExactInstance, ell: int) -> tuple[QI, QI]:
    """Both sides of the theorem in exact arithmetic.

    Denominators are cleared first so the bulk runs over Gaussian integers:
    with ``z = Z/s``, ``q_j(z) = Q_j(Z)/d_j``, ``mu_jk/(d_j d_k) = M_jk/d_mu`` and
    ``w = W/d_w`` the identity becomes ``lhs_int = i^l Z_(1^l)(½ tr U^j)`` where
    ``lhs_int`` uses the kernel ``Qᵀ M Q`` and weights W, and
    ``U = i M (S - Sᵀ)`` with ``S_jk = Σ W Q_j(Z) Q_k(Z̄)`` (the zonal polynomial
    is weighted-homogeneous, so the scale factors cancel).
    """
    n = inst.n
    s_p = _lcm_den([c for z in inst.points for c in (z.re, z.im)])
    pts = [QI(int(z.re * s_p), int(z.im * s_p)) for z in inst.points]
    q_int, d = [], []
    for p in inst.q:
        scaled = [c / Fraction(s_p) ** k for k, c in enumerate(p.coefficients)]
        dj = _lcm_den(scaled)
        d.append(dj)
        q_int.append([int(c * dj) for c in scaled])
    mu_p = [[inst.mu[j][k] / (d[j] * d[k]) for k in range(n)] for j in range(n)]
    d_mu = _lcm_den([x for row in mu_p for x in row])
    M = [[int(x * d_mu) for x in row] for row in mu_p]
    d_w = _lcm_den([c for w in inst.weights for c in (w.re, w.im)])
    W = [QI(int(w.re * d_w), int(w.im * d_w)) for w in inst.weights]

    vecs = []
    for z in pts:
        vecs.append([_eval_int(c, z) for c in q_int])
        vecs.append([_eval_int(c, z.conjugate()) for c in q_int])
    m_vecs = [[sum((M[i][k] * v[k] for k in range(n) if M[i][k]), QI(0)) for i in range(n)] for v in vecs]
    gram = [[sum((va[i] * mvb[i] for i in range(n)), QI(0)) for mvb in m_vecs] for va in vecs]
    # pf is invariant under permuting the (z_j, z̄_j) pairs and vanishes when a
    # point repeats, so only l-subsets contribute, each l! times.
    lhs_int = QI(0)
    for subset in itertools.combinations(range(len(pts)), ell):
        idx = [i for m in subset for i in (2 * m, 2 * m + 1)]
        wprod = QI(1)
        for m in subset:
            wprod = wprod * W[m]
        lhs_int = lhs_int + wprod * pfaffian_exact([[gram[a][b] for b in idx] for a in idx])
    lhs_int = lhs_int * math.factorial(ell)

    S = [[QI(0)] * n for _ in range(n)]
    for w, m in zip(W, range(len(pts))):
        a, b = vecs[2 * m], vecs[2 * m + 1]
        for j in range(n):
            wa = w * a[j]
            for k in range(n):
                S[j][k] = S[j][k] + wa * b[k]
    diff = [[S[j][k] - S[k][j] for k in range(n)] for j in range(n)]
    U = [[QI(0, 1) * sum((M[a][k] * diff[k][b] for k in range(n) if M[a][k]), QI(0)) for b in range(n)]
         for a in range(n)]
    p_sums, power = [], U
    for j in range(ell):
        if j:
            power = _mat_mul_qi(power, U)
        p_sums.append(sum((power[a][a] for a in range(n)), QI(0)) * Fraction(1, 2))
    rhs_int = zonal_recursive(p_sums, one=QI(1))
    for _ in range(ell):
        rhs_int = rhs_int * QI(0, 1)
    scale = Fraction(1, 2 * d_mu * d_w) ** ell
    return lhs_int * scale, rhs_int * scale


@dataclass(frozen=True)
class TheoremReport:
    """Exact lhs/rhs of the integration theorem plus the float engine's error."""

    n: int
    ell: int
    M: int
    lhs: complex
    rhs: complex
    exact_equal: bool
    float_lhs: complex

    @property
    def abs_err(self) -> float:
        return 0.0 if self.exact_equal else abs(self.lhs - self.rhs)

    @property
    def rel_err(self) -> float:
        if self.exact_equal:
            return 0.0
        return self.abs_err / max(abs(self.rhs), 1e-300)

    def ok(self, tol: float = 1e-10) -> bool:
        return self.rel_err <= tol

    def to_json(self, seed: int | None = None) -> dict:
        return {
            "n": self.n, "ell": self.ell, "M": self.M,
            "lhs": [self.lhs.real, self.lhs.imag], "rhs": [self.rhs.real, self.rhs.imag],
            "abs_err": self.abs_err, "rel_err": self.rel_err,
            "exact_equal": self.exact_equal, "seed": seed,
        }


def theorem_exact(inst: ExactInstance, ell: int) -> tuple[QI, QI]:
    """Exact ``(lhs, rhs)`` over Q(i): brute-force integrated Pfaffian vs zonal formula."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return _exact_sides(inst, ell)


def theorem_report(inst: ExactInstance, ell: int) -> TheoremReport:
    lhs, rhs = theorem_exact(inst, ell)
    float_lhs = theorem_lhs(inst.context(), inst.measure(), ell)
    return TheoremReport(inst.n, ell, len(inst.points), complex(lhs), complex(rhs), lhs == rhs, float_lhs)


def pfaffian_theorem_check(ctx: KernelContext, measure: DiscreteMeasure, ell: int) -> tuple[complex, complex]:
    """Float ``(lhs, rhs)`` for any discrete measure (brute force vs zonal)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return theorem_lhs(ctx, measure, ell), theorem_rhs(upsilon(ctx, measure), ell)


def projecting_mu(q: Sequence[PolyRational], measure: DiscreteMeasure) -> np.ndarray:
    """Antisymmetric ``mu`` making ``υ = -2i·1`` (the projection property).

    ``υ = 2i mu (ς - ςᵀ) = -2i`` gives ``mu = -(ς - ςᵀ)^{-1}``; needs even n.
    """
    n = len(q)
    if n % 2:
        raise ValueError("a projecting kernel needs an even number of polynomials")
    dummy = KernelContext(n, tuple(q), np.zeros((n, n)))
    s = varsigma(dummy, measure)
    mu = -np.linalg.inv(s - s.T)
    return 0.5 * (mu - mu.T)


@dataclass(frozen=True)
class ProjectionReport:
    n: int
    deviation: float
    upsilon: np.ndarray
    sigma_error: float

    def to_json(self) -> dict:
        return {"n": self.n, "deviation": self.deviation, "sigma_error": self.sigma_error}


def projection_failure_check(n: int, measure: DiscreteMeasure | None = None) -> ProjectionReport:
    """``max |υ_αβ + 2i δ_αβ|`` for the real-Ginibre measure, plus ``max |υ - sigma|``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    measure = ginoe_measure() if measure is None else measure
    ups = upsilon(kernel_context(n), measure)
    dev = float(np.max(np.abs(ups + 2j * np.eye(n))))
    sig = sigma_matrix(n).to_numpy()
    return ProjectionReport(n, dev, ups, float(np.max(np.abs(ups - sig))))


def one_pair_integral(n: int, measure: DiscreteMeasure | None = None) -> complex:
    """``∫ dα(z) D_n(z, z̄)`` with ``dα = erfc(√2 Im z) θ(Im z) d²z`` by quadrature."""
    measure = ginoe_measure() if measure is None else measure
    ctx = kernel_context(n)
    return complex(np.sum(measure.weights * ctx.Q(measure.points, measure.points.conj())))
