"""Seeded sampling of real Gaussian matrices and real-eigenvalue statistics.

Sample ``i`` of a run with master seed ``s`` is drawn from a Philox4x64
counter-based generator with key ``s`` and the sample index placed in the
most significant counter word, so every sample has its own stream and a run
is bit-identical regardless of how samples are split among workers.  Normal
variates use NumPy's ziggurat (``Generator.standard_normal``).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, special

__all__ = [
    "MCConfig",
    "MCRunResult",
    "sample_matrix",
    "count_real_eigs",
    "real_eigenvalues",
    "run_mc",
    "real_eigenvalue_sample",
    "density_real",
    "density_complex",
    "density_profiles",
]

_MASK64 = (1 << 64) - 1
_CHUNK = 2000


@dataclass(frozen=True)
class MCConfig:
    n: int
    samples: int
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.samples < 0:
            raise ValueError("samples must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class MCRunResult:
    n: int
    samples: int
    seed: int
    counts: dict[int, int] = field(default_factory=dict)
    elapsed: float = 0.0

    def frequencies(self) -> dict[int, float]:
        if self.samples == 0:
            return {}
        return {k: c / self.samples for k, c in self.counts.items()}

    def z_scores(self, exact: dict[int, float]) -> dict[int, float]:
        """Binomial z-score of each cell against exact probabilities."""
        out = {}
        for k, p in exact.items():
            c = self.counts.get(k, 0)
            sd = math.sqrt(self.samples * p * (1 - p))
            if sd == 0:
                out[k] = 0.0 if c == self.samples * p else math.inf
            else:
                out[k] = (c - self.samples * p) / sd
        return out


def _generator(master_seed: int, index: int) -> np.random.Generator:
    bitgen = np.random.Philox(key=master_seed & _MASK64, counter=[0, 0, 0, index & _MASK64])
    return np.random.Generator(bitgen)


def sample_matrix(n: int, master_seed: int, index: int = 0) -> np.ndarray:
    """The ``index``-th ``n × n`` standard normal matrix of stream ``master_seed``."""
    return _generator(master_seed, index).standard_normal((n, n))


def _schur_blocks(T: np.ndarray) -> list[tuple[int, int]]:
    n = T.shape[0]
    blocks, i = [], 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            blocks.append((i, 2))
            i += 2
        else:
            blocks.append((i, 1))
            i += 1
    return blocks


def count_real_eigs(M: np.ndarray) -> int:
    """Number of 1×1 diagonal blocks in the real Schur form of ``M``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix required")
    if M.shape[0] == 0:
        return 0
    T, _ = linalg.schur(M, output="real")
    return sum(1 for _, size in _schur_blocks(T) if size == 1)


def real_eigenvalues(M: np.ndarray) -> np.ndarray:
    """Real eigenvalues read off the 1×1 blocks of the real Schur form."""
    T, _ = linalg.schur(np.asarray(M, dtype=float), output="real")
    return np.array([T[i, i] for i, size in _schur_blocks(T) if size == 1])


def _count_chunk(args: tuple[int, int, int, int]) -> dict[int, int]:
    n, seed, start, stop = args
    counts: dict[int, int] = {}
    for idx in range(start, stop):
        k = count_real_eigs(sample_matrix(n, seed, idx))
        counts[k] = counts.get(k, 0) + 1
    return counts


def run_mc(cfg: MCConfig) -> MCRunResult:
    """Count real eigenvalues over ``cfg.samples`` seeded matrices.

    Work is split into fixed chunks of sample indices; results are merged by
    integer addition, so the output does not depend on ``workers``.
    """
    t0 = time.perf_counter()
    chunks = [(cfg.n, cfg.master_seed, s, min(s + _CHUNK, cfg.samples))
              for s in range(0, cfg.samples, _CHUNK)]
    total: dict[int, int] = {}
    if cfg.workers == 1 or len(chunks) <= 1:
        parts = map(_count_chunk, chunks)
        for part in parts:
            for k, c in part.items():
                total[k] = total.get(k, 0) + c
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for part in pool.map(_count_chunk, chunks):
                for k, c in part.items():
                    total[k] = total.get(k, 0) + c
    return MCRunResult(cfg.n, cfg.samples, cfg.master_seed, dict(sorted(total.items())),
                       time.perf_counter() - t0)


def real_eigenvalue_sample(n: int, samples: int, master_seed: int) -> np.ndarray:
    """All real eigenvalues from ``samples`` seeded matrices, concatenated."""
    out = [real_eigenvalues(sample_matrix(n, master_seed, i)) for i in range(samples)]
    return np.concatenate(out) if out else np.zeros(0)


# ---------------------------------------------------------------------------
# mean densities
# ---------------------------------------------------------------------------
def density_real(x, n: int):
    """Mean density of real eigenvalues at ``x`` (the δ(y) factor dropped).

    (1/√(2π)) [Γ(n-1, x²)/Γ(n-1) + 2^{n/2-3/2}/Γ(n-1) |x|^{n-1} e^{-x²/2} γ((n-1)/2, x²/2)]
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    x = np.asarray(x, dtype=float)
    x2 = x * x
    first = special.gammaincc(n - 1, x2)
    a = (n - 1) / 2
    # |x|^{n-1} e^{-x²/2} γ(a, x²/2) / Γ(n-1) evaluated in logs
    with np.errstate(divide="ignore"):
        log_term = ((n - 1) * np.log(np.abs(x)) - x2 / 2 + special.gammaln(a)
                    + np.log(special.gammainc(a, x2 / 2)) - special.gammaln(n - 1))
    second = 2.0 ** (n / 2 - 1.5) * np.exp(log_term)
    second = np.where(x == 0, 0.0, second)
    return (first + second) / math.sqrt(2 * math.pi)


def density_complex(x, y, n: int):
    """Mean density of non-real eigenvalues at ``x + iy`` (symmetric in y).

    √(2/π) Γ(n-1, x²+y²)/Γ(n-1) |y| e^{2y²} erfc(√2|y|)
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    return (math.sqrt(2 / math.pi) * special.gammaincc(n - 1, x * x + y * y)
            * y * special.erfcx(math.sqrt(2.0) * y))


def density_profiles(n: int, xs: np.ndarray, ys: np.ndarray | None = None) -> dict[str, np.ndarray]:
    """Tabulate both densities: ``real`` on ``xs``, ``complex`` on the grid ``xs × ys``."""
    xs = np.asarray(xs, dtype=float)
    out = {"x": xs, "real": density_real(xs, n)}
    if ys is not None:
        ys = np.asarray(ys, dtype=float)
        out["y"] = ys
        out["complex"] = density_complex(xs[:, None], ys[None, :], n)
    return out
