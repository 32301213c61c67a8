"""Combinatorics of the ordered Pfaffian expansion.

The Pfaffian of the ``2l × 2l`` matrix ``[Q(w_a, w_b)]`` with
``w = (z_1, z̄_1, …, z_l, z̄_l)`` is expanded as

    pf = 1/(2^l l!) Σ_{σ ∈ S_2l} sgn σ Π_j Q(w_σ(2j-1), w_σ(2j)).

Each summand is a *string*: an ordered list of ``l`` kernels, each holding an
ordered pair of symbols.  Symbols are encoded as integers ``2j + c``
(``j`` the pair index, ``c = 0`` for ``z_j`` and ``c = 1`` for ``z̄_j``), so the
conjugate of symbol ``s`` is ``s ^ 1``.

Integrating over ``z_1..z_l`` glues kernels that share a pair index.  Every
pair index occurs exactly twice, so the glued kernels form disjoint cycles
(loops); the multiset of loop lengths is the string's topology class.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .symfun import Partition, partitions

__all__ = [
    "StringTerm",
    "enumerate_expansion",
    "equivalence_classes",
    "loop_decomposition",
    "is_adjacent",
    "handedness",
    "count_special",
    "SpecialCounts",
    "diagram_count",
    "single_loop_matchings",
    "partition_census",
    "predicted_census",
    "symbolic_integration",
    "string_value",
    "topology_sum",
    "census_rows",
]

MAX_ELL = 4


@dataclass(frozen=True)
class StringTerm:
    """One term of the ordered expansion: ``perm`` lists the symbols in slot order."""

    perm: tuple[int, ...]
    sign: int

    @property
    def ell(self) -> int:
        return len(self.perm) // 2

    @property
    def kernels(self) -> tuple[tuple[int, int], ...]:
        p = self.perm
        return tuple((p[2 * i], p[2 * i + 1]) for i in range(len(p) // 2))

    def matching(self) -> frozenset[frozenset[int]]:
        """Unordered set of unordered kernel pairs — the equivalence-class key."""
        return frozenset(frozenset(k) for k in self.kernels)

    def label(self) -> str:
        def sym(s: int) -> str:
            return f"{s // 2 + 1}" + ("̄" if s & 1 else "")

        body = "".join(f"({sym(a)} {sym(b)})" for a, b in self.kernels)
        return ("+" if self.sign > 0 else "-") + body


def _parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def _check_ell(ell: int) -> None:
    if not 1 <= ell <= MAX_ELL:
        raise ValueError(f"ell must be in 1..{MAX_ELL}")


def enumerate_expansion(ell: int) -> list[StringTerm]:
    """All ``(2l)!`` signed strings."""
    _check_ell(ell)
    return [StringTerm(p, _parity(p)) for p in itertools.permutations(range(2 * ell))]


def equivalence_classes(terms: Iterable[StringTerm]) -> list[list[StringTerm]]:
    """Group strings that differ by permuting kernels or swapping arguments inside kernels."""
    groups: dict[frozenset, list[StringTerm]] = {}
    for t in terms:
        groups.setdefault(t.matching(), []).append(t)
    return list(groups.values())


def _loops(term: StringTerm) -> list[list[int]]:
    """Kernel indices of each loop, in traversal order."""
    where: dict[int, int] = {}
    for idx, (a, b) in enumerate(term.kernels):
        where[a] = idx
        where[b] = idx
    kernels = term.kernels
    unvisited = set(range(len(kernels)))
    loops = []
    while unvisited:
        start = min(unvisited)
        loop, k, exit_sym = [], start, kernels[start][1]
        while True:
            loop.append(k)
            unvisited.discard(k)
            nxt = where[exit_sym ^ 1]
            if nxt == start and (exit_sym ^ 1) in kernels[start]:
                break
            a, b = kernels[nxt]
            exit_sym = b if a == exit_sym ^ 1 else a
            k = nxt
        loops.append(loop)
    return loops


def loop_decomposition(term: StringTerm) -> Partition:
    """Topology class: the partition of ``l`` into loop lengths."""
    return Partition.from_list([len(loop) for loop in _loops(term)])


def is_adjacent(term: StringTerm) -> bool:
    """Each kernel's second argument is conjugate to the next kernel's first (cyclically)."""
    k = term.kernels
    return all(k[i][1] ^ 1 == k[(i + 1) % len(k)][0] for i in range(len(k)))


def handedness(term: StringTerm) -> tuple[int, int]:
    """``(α_L, α_R)`` for an adjacent string.

    At each of the ``l`` junctions (including the wrap-around) the exit symbol
    is followed by its conjugate; ``z_j → z̄_j`` counts as right-handed,
    ``z̄_j → z_j`` as left-handed.
    """
    if not is_adjacent(term):
        raise ValueError("handedness is defined for adjacent strings only")
    right = sum(1 for a, b in term.kernels if b & 1 == 0)
    return term.ell - right, right


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


@dataclass(frozen=True)
class SpecialCounts:
    ell: int
    n_terms: int
    n_classes: int
    class_sizes: tuple[int, ...]
    loop_like_longest: int
    adjacent: int
    handedness_counts: dict[int, int]
    adjacency_classes: int
    adjacency_class_sizes: tuple[int, ...]

    def expected(self) -> dict:
        """Closed-form values the enumerated counts should match."""
        ell = self.ell
        return {
            "n_terms": math.factorial(2 * ell),
            "n_classes": _double_factorial(2 * ell - 1),
            "class_size": _double_factorial(2 * ell),
            "loop_like_longest": _double_factorial(2 * ell) * _double_factorial(2 * ell - 2),
            "adjacent": _double_factorial(2 * ell),
            "handedness_counts": {a: math.factorial(ell) * math.comb(ell, a) for a in range(ell + 1)},
            "adjacency_classes": _double_factorial(2 * ell - 2),
            "adjacency_class_size": 2 * ell,
        }

    def mismatches(self) -> list[str]:
        e = self.expected()
        out = []
        if self.n_terms != e["n_terms"]:
            out.append("n_terms")
        if self.n_classes != e["n_classes"]:
            out.append("n_classes")
        if set(self.class_sizes) != {e["class_size"]}:
            out.append("class_sizes")
        if self.loop_like_longest != e["loop_like_longest"]:
            out.append("loop_like_longest")
        if self.adjacent != e["adjacent"]:
            out.append("adjacent")
        if self.handedness_counts != e["handedness_counts"]:
            out.append("handedness_counts")
        if self.adjacency_classes != e["adjacency_classes"]:
            out.append("adjacency_classes")
        if set(self.adjacency_class_sizes) != {e["adjacency_class_size"]}:
            out.append("adjacency_class_sizes")
        return out

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "n_terms": self.n_terms,
            "n_classes": self.n_classes,
            "class_sizes": sorted(set(self.class_sizes)),
            "loop_like_longest": self.loop_like_longest,
            "adjacent": self.adjacent,
            "handedness_counts": {str(k): v for k, v in self.handedness_counts.items()},
            "adjacency_classes": self.adjacency_classes,
            "adjacency_class_sizes": sorted(set(self.adjacency_class_sizes)),
            "expected": {k: ({str(a): b for a, b in v.items()} if isinstance(v, dict) else v)
                         for k, v in self.expected().items()},
            "pass": not self.mismatches(),
        }


def count_special(ell: int) -> SpecialCounts:
    """Enumerate the full expansion and count the special string families."""
    terms = enumerate_expansion(ell)
    classes = equivalence_classes(terms)
    longest = sum(1 for t in terms if len(_loops(t)) == 1)
    adjacent = [t for t in terms if is_adjacent(t)]
    hand = Counter(handedness(t)[0] for t in adjacent)
    adj_classes = equivalence_classes(adjacent)
    return SpecialCounts(
        ell=ell,
        n_terms=len(terms),
        n_classes=len(classes),
        class_sizes=tuple(len(c) for c in classes),
        loop_like_longest=longest,
        adjacent=len(adjacent),
        handedness_counts={a: hand.get(a, 0) for a in range(ell + 1)},
        adjacency_classes=len(adj_classes),
        adjacency_class_sizes=tuple(len(c) for c in adj_classes),
    )


def diagram_count(lam: Partition, ell: int) -> int:
    """``l! Π_j 1/((l_j!)^{σ_j} σ_j!)``: ways to group the l pair labels into loops of sizes λ."""
    if lam.size != ell:
        raise ValueError("partition size does not match ell")
    den = 1
    for part, mult in lam.parts:
        den *= math.factorial(part) ** mult * math.factorial(mult)
    return math.factorial(ell) // den


def single_loop_matchings(length: int) -> int:
    """Number of equivalence classes forming one loop through ``length`` labels: (2L-2)!!."""
    return _double_factorial(2 * length - 2)


def partition_census(ell: int) -> dict[Partition, int]:
    """Number of strings in each topology class, by enumeration."""
    census: Counter = Counter(loop_decomposition(t) for t in enumerate_expansion(ell))
    return {lam: census.get(lam, 0) for lam in partitions(ell)}


def predicted_census(lam: Partition, ell: int) -> int:
    """Strings of topology ``lam``: label groupings × loop matchings × (2l)!! orderings per class."""
    loops = 1
    for part, mult in lam.parts:
        loops *= single_loop_matchings(part) ** mult
    return diagram_count(lam, ell) * loops * _double_factorial(2 * ell)


def census_rows(ell: int) -> list[dict]:
    """Per-term rows: index, sign, topology class, handedness (if adjacent), class id."""
    terms = enumerate_expansion(ell)
    class_id: dict[frozenset, int] = {}
    rows = []
    for i, t in enumerate(terms):
        key = t.matching()
        cid = class_id.setdefault(key, len(class_id))
        hand = handedness(t) if is_adjacent(t) else None
        rows.append({
            "term": i,
            "sign": t.sign,
            "partition": str(loop_decomposition(t)),
            "handedness": "" if hand is None else f"H({hand[0]},{hand[1]})",
            "class_id": cid,
        })
    return rows


# ---------------------------------------------------------------------------
# symbolic integration
# ---------------------------------------------------------------------------
def string_value(term: StringTerm, X: np.ndarray, Y: np.ndarray) -> complex:
    """Integrated value of one string in terms of the letters X = mu ς and Y = -mu ςᵀ.

    Walking a loop, a kernel read forward contributes ``mu`` and one read
    backwards ``muᵀ = -mu``; leaving through ``z`` and re-entering at ``z̄``
    contributes ``ς``, the opposite order ``ςᵀ``.  The ½ of each kernel
    cancels the 2 of each ``ς``, so a loop is ``tr Π (±X or ±Y)``.
    """
    kernels = term.kernels
    where: dict[int, tuple[int, int]] = {}
    for idx, (a, b) in enumerate(kernels):
        where[a] = (idx, 0)
        where[b] = (idx, 1)
    value: complex = term.sign
    for loop in _loops(term):
        start = loop[0]
        mat = np.eye(X.shape[0], dtype=complex)
        k, forward = start, True
        for _ in range(len(loop)):
            a, b = kernels[k]
            exit_sym = b if forward else a
            k_sign = 1 if forward else -1
            nk, slot = where[exit_sym ^ 1]
            # exit at z (even symbol) → ς ; exit at z̄ → ςᵀ
            letter = X if exit_sym & 1 == 0 else -Y  # mu ς = X, mu ςᵀ = -Y
            mat = mat @ (k_sign * letter)
            k, forward = nk, slot == 0
        value *= np.trace(mat)
    return complex(value)


def symbolic_integration(ell: int, ups: np.ndarray | None = None, *,
                         X: np.ndarray | None = None, Y: np.ndarray | None = None,
                         method: str = "strings") -> complex:
    """Integrated Pfaffian ``∫ Π dπ pf[Q]`` reconstructed combinatorially.

    ``method="strings"`` sums :func:`string_value` over all (2l)! strings and
    divides by ``2^l l!``; pass the letters ``X``, ``Y`` directly or a matrix
    ``υ = 2i (X + Y)`` (then ``X = Y = υ/(4i)``, valid because the sum is a
    polynomial in ``X + Y``).  ``method="topology"`` uses the loop weights
    ``C_L(L) = -½ (L-1)!/(2i)^L tr υ^L`` summed over topology classes.
    """
    _check_ell(ell)
    if method == "topology":
        if ups is None:
            ups = 2j * (X + Y)
        return topology_sum(ell, ups)
    if method != "strings":
        raise ValueError(f"unknown method {method!r}")
    if X is None or Y is None:
        if ups is None:
            raise ValueError("need either ups or both X and Y")
        X = Y = np.asarray(ups, dtype=complex) / 4j
    total = 0j
    for term in enumerate_expansion(ell):
        total += string_value(term, X, Y)
    return total / (2 ** ell * math.factorial(ell))


def topology_sum(ell: int, ups: np.ndarray) -> complex:
    """Σ_λ (diagrams of class λ) Π_j C_L(l_j)^{σ_j}."""
    ups = np.asarray(ups, dtype=complex)
    traces, power = [], np.eye(ups.shape[0], dtype=complex)
    for _ in range(ell):
        power = power @ ups
        traces.append(np.trace(power))

    def c_loop(length: int) -> complex:
        return -0.5 * math.factorial(length - 1) / (2j) ** length * traces[length - 1]

    total = 0j
    for lam in partitions(ell):
        term = complex(diagram_count(lam, ell))
        for part, mult in lam.parts:
            term *= c_loop(part) ** mult
        total += term
    return total
