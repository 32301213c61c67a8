"""Exact and numerical real-eigenvalue statistics of real Gaussian random matrices."""

from __future__ import annotations

__version__ = "1.0.0"

from .qsqrt2 import QSqrt2, parse, render
from .kernels import rho_matrix, sigma_matrix, trace_power
from .probabilities import (
    expected_real_count,
    generating_function,
    moment_real_count,
    prob_nk,
    prob_table,
    prob_table_float,
)
from .pfaffian import pfaffian
from .montecarlo import MCConfig, run_mc

__all__ = [
    "__version__",
    "QSqrt2",
    "parse",
    "render",
    "rho_matrix",
    "sigma_matrix",
    "trace_power",
    "prob_nk",
    "prob_table",
    "prob_table_float",
    "generating_function",
    "moment_real_count",
    "expected_real_count",
    "pfaffian",
    "MCConfig",
    "run_mc",
]
