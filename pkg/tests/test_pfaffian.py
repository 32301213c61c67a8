from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from ginoe.gaussian import QI
from ginoe.kernels import PolyRational, sigma_matrix
from ginoe.pfaffian import (
    DiscreteMeasure,
    KernelContext,
    ginoe_measure,
    jpdf_complex,
    kernel_context,
    kernel_D,
    one_pair_integral,
    pfaffian,
    pfaffian_batch,
    pfaffian_exact,
    pfaffian_float,
    pfaffian_theorem_check,
    projecting_mu,
    projection_failure_check,
    random_instance,
    theorem_exact,
    theorem_lhs,
    theorem_report,
    theorem_rhs,
    upsilon,
    varsigma,
)
from ginoe.probabilities import prob_nk
from ginoe.strings import enumerate_expansion


# ---------------------------------------------------------------- oracles
def det_fraction(a):
    """Exact determinant by fraction-valued Gaussian elimination."""
    m = [[Fraction(x) for x in row] for row in a]
    n, det = len(m), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n):
                m[r][k] -= f * m[c][k]
    return det


def random_skew(rng: random.Random, dim: int):
    a = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            a[i][j] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            a[j][i] = -a[i][j]
    return a


def pf_by_strings(a) -> complex:
    """Pfaffian as the (2l)!-term signed sum over orderings divided by 2^l l!."""
    ell = len(a) // 2
    total = 0
    for t in enumerate_expansion(ell):
        term = t.sign
        for x, y in t.kernels:
            term *= a[x][y]
        total += term
    return total / (2 ** ell * math.factorial(ell))


# ---------------------------------------------------------------- Pfaffians
def test_pfaffian_small_examples():
    assert pfaffian_exact([]) == 1
    assert pfaffian_exact([[0, 3], [-3, 0]]) == 3
    rng = random.Random(1)
    a = random_skew(rng, 4)
    assert pfaffian_exact(a) == a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2]


def test_pfaffian_sign_convention():
    for ell in range(1, 5):
        j = np.zeros((2 * ell, 2 * ell))
        for b in range(ell):
            j[2 * b, 2 * b + 1], j[2 * b + 1, 2 * b] = 1, -1
        assert pfaffian_float(j) == pytest.approx(1.0)
        assert pfaffian_exact(j.astype(int).tolist()) == 1
        assert pfaffian_batch(j[None])[0] == pytest.approx(1.0)


@pytest.mark.parametrize("dim", [2, 4, 6, 8, 10])
def test_pfaffian_squared_is_det_exact(dim):
    rng = random.Random(dim)
    for _ in range(3):
        a = random_skew(rng, dim)
        assert pfaffian_exact(a) ** 2 == det_fraction(a)


@pytest.mark.parametrize("dim", [2, 4, 6, 8, 10, 12])
def test_pfaffian_float_routes(dim):
    rng = np.random.default_rng(dim)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    a = g - g.T
    pf = pfaffian_float(a)
    assert pf ** 2 == pytest.approx(np.linalg.det(a), rel=1e-9)
    assert pfaffian(a) == pf
    if dim <= 8:
        assert pfaffian_batch(a[None])[0] == pytest.approx(pf, rel=1e-10)
        assert pfaffian_exact(a.tolist()) == pytest.approx(pf, rel=1e-10)


def test_pfaffian_matches_string_expansion():
    rng = np.random.default_rng(3)
    for ell in (1, 2, 3):
        g = rng.standard_normal((2 * ell, 2 * ell))
        a = g - g.T
        assert pf_by_strings(a) == pytest.approx(pfaffian_float(a), rel=1e-12, abs=1e-12)


def test_pfaffian_rejects_odd_dimension():
    with pytest.raises(ValueError):
        pfaffian_exact([[0]])
    with pytest.raises(ValueError):
        pfaffian_float(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        pfaffian_batch(np.zeros((2, 3, 3)))
    with pytest.raises(ValueError):
        pfaffian_float(np.zeros((2, 4)))


# ---------------------------------------------------------------- Gaussian rationals
def test_gaussian_rationals():
    z = QI(Fraction(1, 2), 3)
    assert z * z.conjugate() == QI(Fraction(37, 4))
    assert z - z == QI(0) and not (z - z)
    assert complex(z) == 0.5 + 3j
    assert QI(0, 1) * QI(0, 1) == -1


# ---------------------------------------------------------------- kernel
def test_kernel_D_antisymmetric():
    x = np.array([0.3 + 0.2j, -1.1 + 0.7j, 0.5])
    y = np.array([1.2 - 0.4j, 0.1 + 1.5j, -0.8])
    for n in range(2, 9):
        assert np.allclose(kernel_D(n, x, y), -kernel_D(n, y, x), rtol=1e-13, atol=1e-14)


def test_kernel_D_two():
    x, y = 0.7 + 0.3j, -0.4 + 1.1j
    expected = (x - y) / (2 * math.sqrt(math.pi)) * np.exp(-(x * x + y * y) / 2)
    assert kernel_D(2, x, y) == pytest.approx(expected, rel=1e-14)


def test_kernel_context_matches_D():
    # Q carries the polynomial part; D adds the Gaussian factor (for even n, q = q̃)
    x, y = 0.2 + 0.5j, 1.3 - 0.2j
    for n in (2, 4, 6):
        ctx = kernel_context(n)
        assert np.exp(-(x * x + y * y) / 2) * ctx.Q(x, y) == pytest.approx(kernel_D(n, x, y), rel=1e-12)


# ---------------------------------------------------------------- j.p.d.f.
def test_jpdf_all_real_sector():
    assert jpdf_complex(5, 5, []) == float(prob_nk(5, 5))


def test_jpdf_permutation_invariant_and_positive():
    z = [0.3 + 0.4j, -0.9 + 1.2j, 0.5 + 0.1j]
    v = jpdf_complex(6, 0, z)
    assert v > 0
    assert jpdf_complex(6, 0, [z[2], z[0], z[1]]) == pytest.approx(v, rel=1e-10)
    assert jpdf_complex(7, 1, z) > 0


def test_jpdf_coincident_points_vanish():
    assert abs(jpdf_complex(4, 0, [0.3 + 0.4j, 0.3 + 0.4j])) < 1e-14


def test_jpdf_one_pair_odd_quadrature():
    val, _ = integrate.dblquad(lambda y, x: jpdf_complex(3, 1, [complex(x, y)]),
                               -math.inf, math.inf, 0, math.inf, epsabs=1e-11, epsrel=1e-10)
    assert val == pytest.approx(float(prob_nk(3, 1)), abs=1e-8)


def test_jpdf_rejects_bad_input():
    with pytest.raises(ValueError):
        jpdf_complex(4, 1, [1j])
    with pytest.raises(ValueError):
        jpdf_complex(4, 2, [1j, 2j])
    with pytest.raises(ValueError):
        jpdf_complex(4, 2, [-1j])


# ---------------------------------------------------------------- measures, υ
def test_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure(np.array([1j, 2j]), np.array([1.0]))
    with pytest.raises(ValueError):
        DiscreteMeasure(np.array([]), np.array([]))
    with pytest.raises(ValueError):
        KernelContext(2, skew_q(2), np.eye(2))
    with pytest.raises(ValueError):
        KernelContext(3, skew_q(2), np.zeros((3, 3)))


def skew_q(n):
    return tuple(PolyRational((0,) * j + (1,)) for j in range(n))


def test_upsilon_vanishes_on_real_points_and_zero_weights():
    ctx = kernel_context(4)
    real = DiscreteMeasure(np.array([0.5, -1.0, 2.0]), np.array([1.0, 2.0, 0.5j]))
    assert np.allclose(upsilon(ctx, real), 0, atol=1e-14)
    zero = DiscreteMeasure(np.array([0.5 + 1j, 1j]), np.zeros(2))
    assert np.allclose(upsilon(ctx, zero), 0)
    s = varsigma(ctx, real)
    assert np.allclose(s, s.T)


@pytest.mark.parametrize("n", range(2, 7))
def test_upsilon_equals_sigma(n):
    ups = upsilon(kernel_context(n), ginoe_measure())
    assert np.max(np.abs(ups - sigma_matrix(n).to_numpy())) < 1e-8


# ---------------------------------------------------------------- integration theorem
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("ell", [1, 2, 3])
def test_theorem_exact_instances(n, ell):
    rng = np.random.default_rng(100 * n + ell)
    for _ in range(5):
        inst = random_instance(n, rng)
        lhs, rhs = theorem_exact(inst, ell)
        assert lhs == rhs
        rep = theorem_report(inst, ell)
        assert rep.exact_equal and rep.ok()
        assert abs(rep.float_lhs - rep.lhs) <= 1e-6 * max(1.0, abs(rep.rhs))


def test_theorem_structural_zero():
    # the Pfaffian of an odd-rank kernel block vanishes: l pairs need rank >= 2l
    rng = np.random.default_rng(7)
    inst = random_instance(2, rng)
    lhs, rhs = theorem_exact(inst, 2)
    assert lhs == rhs == QI(0)


def test_theorem_ell_one_specialization():
    rng = np.random.default_rng(9)
    inst = random_instance(4, rng)
    ctx, meas = inst.context(), inst.measure()
    lhs, rhs = pfaffian_theorem_check(ctx, meas, 1)
    assert rhs == pytest.approx(0.25j * np.trace(upsilon(ctx, meas)), rel=1e-12)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_theorem_float_engine_on_ginoe_measure():
    # coarse tensor grid keeps the M^l brute force small
    meas = ginoe_measure(6, 8)
    ctx = kernel_context(4)
    lhs, rhs = pfaffian_theorem_check(ctx, meas, 2)
    assert lhs == pytest.approx(rhs, rel=1e-9)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_projecting_control(n):
    meas = ginoe_measure(8, 10)
    q = skew_q(n)
    ctx = KernelContext(n, q, projecting_mu(q, meas))
    ups = upsilon(ctx, meas)
    assert np.max(np.abs(ups + 2j * np.eye(n))) < 1e-10
    for ell in range(1, n // 2 + 1):
        expected = math.gamma(n / 2 + 1) / math.gamma(n / 2 + 1 - ell)
        assert theorem_rhs(ups, ell) == pytest.approx(expected, rel=1e-10)
    if n == 4:
        assert theorem_lhs(ctx, meas, 2) == pytest.approx(2.0, rel=1e-8)
    if n == 2:  # rank-2 kernel: two pairs cannot be placed, 1/Γ(0) = 0
        assert abs(theorem_lhs(ctx, meas, 2)) < 1e-10
        assert abs(theorem_rhs(ups, 2)) < 1e-10


def test_projecting_mu_requires_even_n():
    with pytest.raises(ValueError):
        projecting_mu(skew_q(3), ginoe_measure(4, 4))
    with pytest.raises(ValueError):
        theorem_exact(random_instance(2, np.random.default_rng(0)), 0)


@pytest.mark.parametrize("n", range(2, 7))
def test_projection_fails_for_ginoe(n):
    rep = projection_failure_check(n)
    assert rep.deviation > 0.1
    assert rep.sigma_error < 1e-8
    assert set(rep.to_json()) == {"n", "deviation", "sigma_error"}


@pytest.mark.parametrize("n", range(2, 9))
def test_one_pair_integral(n):
    tr = sum(float(sigma_matrix(n).entries[i][i]) for i in range(n))
    assert one_pair_integral(n) == pytest.approx(0.25j * tr, abs=1e-12)
