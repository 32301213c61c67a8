from __future__ import annotations

import math

import numpy as np
import pytest

from ginoe.pfaffian import random_instance, theorem_lhs, theorem_rhs, upsilon, varsigma
from ginoe.strings import (
    MAX_ELL,
    StringTerm,
    census_rows,
    count_special,
    diagram_count,
    enumerate_expansion,
    equivalence_classes,
    handedness,
    is_adjacent,
    loop_decomposition,
    partition_census,
    predicted_census,
    single_loop_matchings,
    string_value,
    symbolic_integration,
    topology_sum,
)
from ginoe.symfun import Partition, partitions


def double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def sym(label: str) -> int:
    """'2' -> z_2, '2b' -> conj(z_2), mapped to the internal symbol index."""
    j = int(label.rstrip("b")) - 1
    return 2 * j + (1 if label.endswith("b") else 0)


def term_from(kernels, sign=1) -> StringTerm:
    return StringTerm(tuple(sym(s) for pair in kernels for s in pair), sign)


# ---------------------------------------------------------------- enumeration
@pytest.mark.parametrize("ell,terms,classes,size", [(1, 2, 1, 2), (2, 24, 3, 8), (3, 720, 15, 48)])
def test_term_and_class_counts(ell, terms, classes, size):
    ts = enumerate_expansion(ell)
    assert len(ts) == terms
    cls = equivalence_classes(ts)
    assert len(cls) == classes
    assert {len(c) for c in cls} == {size}


def test_signs_balance():
    for ell in range(1, 4):
        signs = [t.sign for t in enumerate_expansion(ell)]
        assert sum(signs) == 0 and set(signs) == {1, -1}


def test_equivalent_strings_share_sign():
    # swapping arguments inside a kernel flips the sign and the antisymmetric kernel; reordering
    # kernels keeps both, so each class has a well-defined signed value
    for cls in equivalence_classes(enumerate_expansion(3)):
        rng = np.random.default_rng(0)
        g = rng.standard_normal((6, 6))
        a = g - g.T
        vals = {round(t.sign * math.prod(a[x][y] for x, y in t.kernels), 12) for t in cls}
        assert len(vals) == 1


def test_worked_example_topology():
    t = term_from([("1", "1b"), ("2", "3b"), ("2b", "3")])
    assert loop_decomposition(t) == Partition.from_list([2, 1])
    assert not is_adjacent(t)
    assert t.label().endswith("(1 1̄)(2 3̄)(2̄ 3)")


def test_adjacent_example_and_handedness():
    t = term_from([("1", "2"), ("2b", "1b")])
    assert is_adjacent(t)
    assert loop_decomposition(t) == Partition.from_list([2])
    assert sum(handedness(t)) == 2
    with pytest.raises(ValueError):
        handedness(term_from([("1", "2"), ("1b", "2b")]))


def test_ell_two_special_counts():
    c = count_special(2)
    assert c.loop_like_longest == 16
    assert c.adjacent == 8
    assert c.handedness_counts == {0: 2, 1: 4, 2: 2}
    assert c.adjacency_classes == 2
    assert set(c.adjacency_class_sizes) == {4}


@pytest.mark.parametrize("ell", range(1, MAX_ELL + 1))
def test_special_counts_closed_forms(ell):
    c = count_special(ell)
    assert c.mismatches() == []
    assert c.n_terms == math.factorial(2 * ell)
    assert c.n_classes == double_factorial(2 * ell - 1)
    assert set(c.class_sizes) == {double_factorial(2 * ell)}
    assert c.loop_like_longest == double_factorial(2 * ell) * double_factorial(2 * ell - 2)
    assert c.adjacent == double_factorial(2 * ell)
    assert c.handedness_counts == {a: math.factorial(ell) * math.comb(ell, a) for a in range(ell + 1)}
    assert c.adjacency_classes == double_factorial(2 * ell - 2)
    assert set(c.adjacency_class_sizes) == {2 * ell}
    assert c.to_json()["pass"] is True


def test_ell_bounds():
    for bad in (0, MAX_ELL + 1):
        with pytest.raises(ValueError):
            enumerate_expansion(bad)


# ---------------------------------------------------------------- diagrams and census
def test_diagram_count_examples():
    assert diagram_count(Partition.from_list([2, 1]), 3) == 3
    assert diagram_count(Partition.from_list([1, 1, 1]), 3) == 1
    assert diagram_count(Partition.from_list([3]), 3) == 1
    assert diagram_count(Partition.from_list([2, 2]), 4) == 3
    assert diagram_count(Partition.from_list([2, 1, 1]), 4) == 6
    with pytest.raises(ValueError):
        diagram_count(Partition.from_list([2]), 3)


def test_single_loop_matchings():
    assert [single_loop_matchings(L) for L in range(1, 5)] == [1, 2, 8, 48]


@pytest.mark.parametrize("ell", range(1, MAX_ELL + 1))
def test_census_matches_prediction(ell):
    census = partition_census(ell)
    assert len(census) == [1, 2, 3, 5][ell - 1]
    assert sum(census.values()) == math.factorial(2 * ell)
    for lam, count in census.items():
        assert count == predicted_census(lam, ell)
    # every label grouping is a distinct diagram: Σ_λ diagram_count = set partitions of l
    assert sum(diagram_count(lam, ell) for lam in partitions(ell)) == [1, 2, 5, 15][ell - 1]


def test_census_rows():
    rows = census_rows(2)
    assert len(rows) == 24
    assert {r["class_id"] for r in rows} == {0, 1, 2}
    assert sum(1 for r in rows if r["handedness"]) == 8
    assert {r["partition"] for r in rows} == {"(2)", "(1,1)"}


# ---------------------------------------------------------------- symbolic integration
def random_upsilon(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


@pytest.mark.parametrize("ell", range(1, MAX_ELL + 1))
def test_symbolic_integration_matches_zonal(ell):
    for seed in range(3):
        ups = random_upsilon(5, seed)
        expected = theorem_rhs(ups, ell)
        scale = max(1.0, abs(expected))
        assert abs(symbolic_integration(ell, ups) - expected) <= 1e-12 * scale * 10 ** ell
        assert abs(symbolic_integration(ell, ups, method="topology") - expected) <= 1e-12 * scale * 10 ** ell


def test_ell_one_is_single_loop_weight():
    ups = random_upsilon(4, 11)
    assert symbolic_integration(1, ups) == pytest.approx(0.25j * np.trace(ups), rel=1e-13)
    assert topology_sum(1, ups) == pytest.approx(-0.5 / 2j * np.trace(ups), rel=1e-13)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_projecting_upsilon_gives_gamma_ratio(n):
    ups = -2j * np.eye(n)
    for ell in range(1, min(MAX_ELL, n // 2) + 1):
        expected = math.gamma(n / 2 + 1) / math.gamma(n / 2 + 1 - ell)
        assert symbolic_integration(ell, ups).real == pytest.approx(expected, rel=1e-12)
        assert abs(symbolic_integration(ell, ups).imag) < 1e-12 * expected


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_symbolic_integration_matches_brute_force(ell):
    inst = random_instance(4, np.random.default_rng(40 + ell))
    ctx, meas = inst.context(), inst.measure()
    lhs = theorem_lhs(ctx, meas, ell)
    s = varsigma(ctx, meas)
    via_letters = symbolic_integration(ell, X=ctx.mu @ s, Y=-ctx.mu @ s.T)
    via_ups = symbolic_integration(ell, upsilon(ctx, meas))
    tol = 1e-9 * max(1.0, abs(lhs))
    assert abs(via_letters - lhs) <= tol
    assert abs(via_ups - lhs) <= tol


def test_string_value_single_kernel():
    # the two orderings of one kernel read different letters; only their sum is a function of X + Y
    x = random_upsilon(3, 1)
    y = random_upsilon(3, 2)
    t_forward, t_backward = enumerate_expansion(1)
    assert string_value(t_forward, x, y) == pytest.approx(-np.trace(y), rel=1e-14)
    assert string_value(t_backward, x, y) == pytest.approx(-np.trace(x), rel=1e-14)


def test_symbolic_integration_rejects():
    with pytest.raises(ValueError):
        symbolic_integration(2)
    with pytest.raises(ValueError):
        symbolic_integration(2, np.eye(2), method="bogus")
