"""Command-line interface: ``ginoe <command> ...``.

Every command builds a JSON-able payload with a ``rows`` list; the payload is
printed as JSON, CSV (the rows) or a human-readable table.  Exit codes:
0 success, 2 verification failure, 3 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import importlib.resources
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .kernels import RhoMatrix, closed_form_trace, rho_matrix, sigma_matrix, trace_powers
from .montecarlo import MCConfig, density_profiles, real_eigenvalue_sample, run_mc
from .pfaffian import (
    ginoe_measure,
    kernel_context,
    projecting_mu,
    projection_failure_check,
    random_instance,
    theorem_report,
    theorem_rhs,
    upsilon,
    KernelContext,
)
from .probabilities import (
    expected_real_count,
    expected_real_count_asymptotic,
    generating_function,
    moment_real_count,
    one_pair_asymptotic_ratio,
    prob_one_pair,
    prob_table,
    prob_table_float,
)
from .qsqrt2 import QSqrt2, render, render_common
from .strings import MAX_ELL, census_rows, count_special, diagram_count, partition_census, predicted_census

__all__ = ["main", "build_parser", "Config", "load_rho", "load_schema", "EXIT_OK", "EXIT_VERIFY", "EXIT_INPUT"]

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_INPUT = 3
SCHEMA_VERSION = 1
CACHE_ENV = "GINOE_CACHE_DIR"


class InputError(Exception):
    """Invalid user input; maps to exit code 3."""


@dataclass(frozen=True)
class Config:
    exact_n_cap: int = 20
    output_format: str = "json"
    cache_dir: Path | None = None
    float_tolerance: float = 1e-10

    def __post_init__(self) -> None:
        if self.exact_n_cap < 1:
            raise InputError("--exact-cap must be positive")
        if self.float_tolerance <= 0:
            raise InputError("--tol must be positive")


# ---------------------------------------------------------------------------
# rho cache
# ---------------------------------------------------------------------------
def _rho_bytes(rho: RhoMatrix) -> bytes:
    return (json.dumps(rho.to_json(), sort_keys=True, indent=1) + "\n").encode()


def load_rho(n: int, cache_dir: Path | None) -> RhoMatrix:
    """``rho_matrix(n)``, read from / written to ``cache_dir/rho_<n>.json`` when a cache is set."""
    if cache_dir is None:
        return rho_matrix(n)
    path = Path(cache_dir) / f"rho_{n}.json"
    if path.exists():
        rho = RhoMatrix.from_json(json.loads(path.read_text()))
        if rho.n == n:
            return rho
    rho = rho_matrix(n)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(_rho_bytes(rho))
    tmp.replace(path)
    return rho


def load_schema(command: str) -> dict:
    """The JSON schema shipped for ``command``'s output."""
    res = importlib.resources.files("ginoe") / "schemas" / f"{command}.v{SCHEMA_VERSION}.json"
    return json.loads(res.read_text())


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------
def _envelope(command: str, **body: Any) -> dict:
    return {"schema": f"ginoe.{command}", "schema_version": SCHEMA_VERSION,
            "version": __version__, **body}


def _exact_fields(x: QSqrt2) -> dict:
    return {"exact": render(x), "exact_common": render_common(x), "float": float(x)}


def _check_cap(n: int, cfg: Config, what: str) -> None:
    if n > cfg.exact_n_cap:
        raise InputError(
            f"{what} for n={n} exceeds the exact-mode cap ({cfg.exact_n_cap}); "
            f"rerun with --float, or raise the cap with --exact-cap {n} (cost grows quickly with n)")


def _nonneg(name: str, value: int) -> int:
    if value < 0:
        raise InputError(f"{name} must be >= 0")
    return value


def _ok(result: bool) -> str:
    return "PASS" if result else "FAIL"


# ---------------------------------------------------------------------------
# commands: each returns (payload, exit_code)
# ---------------------------------------------------------------------------
def cmd_probs(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    n = args.n
    if n < 1:
        raise InputError("n must be >= 1")
    if args.float:
        table, err = prob_table_float(n)
        rows = [{"n": n, "k": k, "exact_a": None, "exact_b": None, "float": v} for k, v in table.items()]
        return _envelope("probs", n=n, mode="float", route="det(1+z*rho) at roots of unity (multiprecision)",
                         error_estimate=err, rows=rows), EXIT_OK
    _check_cap(n, cfg, "exact probabilities")
    rho = load_rho(n, cfg.cache_dir) if n >= 2 else None
    table = prob_table(n, rho)
    rows = [{"n": n, "k": k, "exact_a": str(v.a), "exact_b": str(v.b), "float": float(v)}
            for k, v in table.rows.items()]
    display = [{"k": k, **_exact_fields(v)} for k, v in table.rows.items()]
    total = table.total()
    return _envelope("probs", n=n, mode="exact", route="zonal-newton", total=render(total),
                     normalized=total == 1, exact={str(k): render(v) for k, v in table.rows.items()},
                     exact_common={str(k): render_common(v) for k, v in table.rows.items()},
                     rows=rows, display_rows=display), EXIT_OK


def cmd_genfunc(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    n = args.n
    if n < 2:
        raise InputError("n must be >= 2")
    _check_cap(n, cfg, "the exact generating function")
    gf = generating_function(n, load_rho(n, cfg.cache_dir))
    rows = [{"power": ell, "k": n - 2 * ell, **_exact_fields(c)} for ell, c in enumerate(gf.coefficients)]
    return _envelope("genfunc", n=n, route="p_nn*det(1+z*rho)", rows=rows), EXIT_OK


def cmd_moments(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    n, q = args.n, _nonneg("q", args.q)
    if n < 1:
        raise InputError("n must be >= 1")
    _check_cap(n, cfg, "exact moments")
    rho = load_rho(n, cfg.cache_dir) if n >= 2 else None
    value = moment_real_count(n, q, rho)
    row = {"n": n, "q": q, **_exact_fields(value)}
    return _envelope("moments", route="(n-2z d/dz)^q G_n(z) at z=1", rows=[row]), EXIT_OK


def cmd_en(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    n = args.n
    if n < 1:
        raise InputError("n must be >= 1")
    series = expected_real_count(n)
    rows = [{"route": "hypergeometric-series", "order": None, "value": series, "relative_difference": 0.0}]
    for order in range(5):
        a = expected_real_count_asymptotic(n, order)
        rows.append({"route": "asymptotic", "order": order, "value": a,
                     "relative_difference": abs(a - series) / series})
    if n <= cfg.exact_n_cap:
        m = moment_real_count(n, 1, load_rho(n, cfg.cache_dir) if n >= 2 else None)
        rows.append({"route": "generating-function", "order": None, "value": float(m),
                     "relative_difference": abs(float(m) - series) / series})
    return _envelope("en", n=n, rows=rows), EXIT_OK


# ----------------------------------------------------------------- verify
def _verify_traces(args: argparse.Namespace, cfg: Config) -> list[dict]:
    n_max = args.n if args.n is not None else 10
    if n_max < 2:
        raise InputError("--n must be >= 2")
    cases = []
    for n in range(2, n_max + 1):
        rho = load_rho(n, cfg.cache_dir)
        tr_rho = trace_powers(rho, 4)
        tr_sig = trace_powers(sigma_matrix(n), 4)
        for j in range(1, 5):
            ok = tr_sig[j - 1] == 2 * tr_rho[j - 1]
            cases.append({"case": f"tr sigma^{j} = 2 tr rho^{j}", "n": n, "j": j, "pass": ok,
                          "detail": render(tr_rho[j - 1])})
        ok = closed_form_trace(n) == tr_rho[0]
        cases.append({"case": "closed-form tr rho", "n": n, "j": 1, "pass": ok,
                      "detail": render(closed_form_trace(n))})
    return cases


def _verify_pfaffian(args: argparse.Namespace, cfg: Config) -> list[dict]:
    ns = [args.n] if args.n is not None else [2, 3, 4, 5, 6]
    ells = [args.ell] if args.ell is not None else [1, 2, 3]
    if any(n < 1 for n in ns) or any(ell < 1 for ell in ells):
        raise InputError("--n and --ell must be >= 1")
    if any(n > 8 for n in ns) or any(ell > 4 for ell in ells):
        raise InputError("brute-force oracle limited to n <= 8 and ell <= 4")
    instances = _nonneg("--instances", args.instances)
    rng = np.random.default_rng(args.seed)
    cases = []
    for n in ns:
        for ell in ells:
            worst, exact_ok, float_worst, worst_rep = 0.0, True, 0.0, None
            for _ in range(instances):
                rep = theorem_report(random_instance(n, rng), ell)
                if worst_rep is None or rep.rel_err > worst:
                    worst_rep = rep
                worst = max(worst, rep.rel_err)
                exact_ok &= rep.exact_equal
                # structural zeros (2l > rank mu) have rhs == 0 exactly: use the absolute error
                ferr = abs(rep.float_lhs - rep.rhs) / (abs(rep.rhs) if rep.rhs else 1.0)
                float_worst = max(float_worst, ferr)
            cases.append({"case": "integration theorem (exact Q(i) oracle)", "n": n, "ell": ell,
                          "instances": instances, "max_rel_err": worst, "float_max_rel_err": float_worst,
                          "worst": worst_rep.to_json(args.seed) if worst_rep else None,
                          "pass": exact_ok and worst <= cfg.float_tolerance})
    # projecting control: upsilon = -2i * identity ⇒ rhs = Γ(n/2+1)/Γ(n/2+1-ell)
    for n in [n for n in ns if n % 2 == 0]:
        ctx = kernel_context(n)
        measure = ginoe_measure(20, 40)
        mu = projecting_mu(ctx.q, measure)
        ups = upsilon(KernelContext(n, ctx.q, mu), measure)
        for ell in ells:
            rhs = theorem_rhs(ups, ell)
            h = n // 2
            expect = math.gamma(h + 1) / math.gamma(h + 1 - ell) if ell <= h else 0.0
            err = abs(rhs - expect) / max(1.0, abs(expect))
            cases.append({"case": "projecting control Gamma ratio", "n": n, "ell": ell,
                          "value": rhs.real, "expected": expect, "max_rel_err": err,
                          "pass": err <= cfg.float_tolerance})
    return cases


_PARTITION_NUMBERS = (1, 1, 2, 3, 5, 7)  # p(0)..p(5)


def _verify_strings(args: argparse.Namespace, cfg: Config) -> list[dict]:
    ells = [args.ell] if args.ell is not None else list(range(1, MAX_ELL + 1))
    if any(not 1 <= ell <= MAX_ELL for ell in ells):
        raise InputError(f"--ell must be in 1..{MAX_ELL}")
    cases = []
    for ell in ells:
        sc = count_special(ell)
        mism = sc.mismatches()
        cases.append({"case": "closed-form string counts", "ell": ell, "pass": not mism,
                      "detail": ",".join(mism) or "all counts match", "counts": sc.to_json()})
        census = partition_census(ell)
        rows = [{"partition": str(lam), "diagrams": diagram_count(lam, ell), "enumerated": c,
                 "predicted": predicted_census(lam, ell)} for lam, c in census.items()]
        ok = all(r["enumerated"] == r["predicted"] for r in rows)
        ok &= len(rows) == _PARTITION_NUMBERS[ell]
        cases.append({"case": "topology census vs diagram counts", "ell": ell, "pass": ok,
                      "detail": f"{len(rows)} partitions", "census": rows})
    return cases


def _verify_projection(args: argparse.Namespace, cfg: Config) -> list[dict]:
    ns = [args.n] if args.n is not None else [2, 3, 4, 5, 6]
    if any(n < 2 for n in ns):
        raise InputError("--n must be >= 2")
    measure = ginoe_measure()
    cases = []
    for n in ns:
        rep = projection_failure_check(n, measure)
        cases.append({"case": "projection property fails for the real-Ginibre measure", "n": n,
                      "deviation": rep.deviation, "sigma_error": rep.sigma_error,
                      "pass": rep.deviation > 0.1 and rep.sigma_error < 1e-8})
        if n % 2 == 0:
            ctx = kernel_context(n)
            mu = projecting_mu(ctx.q, measure)
            ups = upsilon(KernelContext(n, ctx.q, mu), measure)
            dev = float(np.max(np.abs(ups + 2j * np.eye(n))))
            cases.append({"case": "engineered projecting control", "n": n, "deviation": dev,
                          "pass": dev < cfg.float_tolerance})
    return cases


def _verify_one_pair(args: argparse.Namespace, cfg: Config) -> list[dict]:
    n_max = args.n if args.n is not None else 12
    if n_max < 4:
        raise InputError("--n must be >= 4")
    cases = []
    for n in range(4, n_max + 1):
        z = float(prob_one_pair(n, "zonal"))
        lag = float(prob_one_pair(n, "laguerre"))
        leg = prob_one_pair(n, "legendre")
        err = max(abs(z - lag), abs(z - leg)) / z
        cases.append({"case": "one-pair routes agree", "n": n, "zonal": z, "laguerre": lag,
                      "legendre": leg, "max_rel_err": err, "pass": err <= cfg.float_tolerance})
    r50, r100 = one_pair_asymptotic_ratio(50), one_pair_asymptotic_ratio(100)
    cases.append({"case": "asymptotic ratio", "n": 50, "ratio": r50, "pass": 0.95 <= r50 <= 1.05})
    cases.append({"case": "asymptotic ratio improves", "n": 100, "ratio": r100,
                  "pass": abs(r100 - 1) < abs(r50 - 1)})
    return cases


VERIFY_SUITES: dict[str, Callable[[argparse.Namespace, Config], list[dict]]] = {
    "traces": _verify_traces,
    "pfaffian-theorem": _verify_pfaffian,
    "strings": _verify_strings,
    "projection": _verify_projection,
    "one-pair": _verify_one_pair,
}


def cmd_verify(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    cases = VERIFY_SUITES[args.suite](args, cfg)
    passed = all(c["pass"] for c in cases)
    rows = [{"case": c["case"], "n": c.get("n"), "ell": c.get("ell", c.get("j")),
             "value": c.get("max_rel_err", c.get("deviation", c.get("ratio"))),
             "pass": c["pass"]} for c in cases]
    payload = _envelope("verify", suite=args.suite, seed=args.seed, passed=passed, cases=cases, rows=rows)
    return payload, EXIT_OK if passed else EXIT_VERIFY


def cmd_census(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    if not 1 <= args.ell <= MAX_ELL:
        raise InputError(f"ell must be in 1..{MAX_ELL}")
    return _envelope("census", ell=args.ell, rows=census_rows(args.ell)), EXIT_OK


# ----------------------------------------------------------------- mc / density
def _exact_floats(n: int, cfg: Config) -> tuple[dict[int, float], str]:
    if n == 1:
        return {1: 1.0}, "exact"
    if n <= cfg.exact_n_cap:
        return prob_table(n, load_rho(n, cfg.cache_dir)).floats(), "exact"
    return prob_table_float(n)[0], "float"


def cmd_mc(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    if args.n < 1:
        raise InputError("n must be >= 1")
    try:
        mc_cfg = MCConfig(args.n, _nonneg("samples", args.samples), args.seed, args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    res = run_mc(mc_cfg)
    exact, route = _exact_floats(args.n, cfg)
    z = res.z_scores(exact) if res.samples else {}
    freqs = res.frequencies()
    rows = [{"k": k, "count": res.counts.get(k, 0), "frequency": freqs.get(k, 0.0) if res.samples else None,
             "exact": p, "z": z.get(k)} for k, p in exact.items()]
    max_z = max((abs(v) for v in z.values()), default=0.0)
    return _envelope("mc", n=res.n, samples=res.samples, seed=res.seed, workers=mc_cfg.workers,
                     elapsed=res.elapsed, exact_route=route, counts={str(k): c for k, c in res.counts.items()},
                     max_abs_z=max_z, rows=rows), EXIT_OK


def _density_rows(n: int, xmin: float, xmax: float, points: int, ys: list[float]) -> list[dict]:
    xs = np.linspace(xmin, xmax, points)
    prof = density_profiles(n, xs, np.array(ys) if ys else None)
    rows = []
    for i, x in enumerate(xs):
        row = {"x": float(x), "real": float(prof["real"][i])}
        for j, y in enumerate(ys):
            row[f"complex_y={y:g}"] = float(prof["complex"][i, j])
        rows.append(row)
    return rows


def cmd_density(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    if args.n < 2:
        raise InputError("n must be >= 2")
    if args.points < 2 or not args.xmax > args.xmin:
        raise InputError("need --points >= 2 and --xmax > --xmin")
    rows = _density_rows(args.n, args.xmin, args.xmax, args.points, args.y or [])
    return _envelope("density", n=args.n, ys=args.y or [], rows=rows), EXIT_OK


# ----------------------------------------------------------------- report
def cmd_report(args: argparse.Namespace, cfg: Config) -> tuple[dict, int]:
    """Write tables (CSV + JSON) and figures (PNG) for one n into ``--outdir``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = args.n
    if n < 2:
        raise InputError("n must be >= 2")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    def dump(name: str, payload: dict) -> None:
        (outdir / f"{name}.json").write_text(json.dumps(payload, indent=2) + "\n")
        (outdir / f"{name}.csv").write_text(_csv_text(payload["rows"]))
        written.extend([f"{name}.json", f"{name}.csv"])

    mc_args = argparse.Namespace(n=n, samples=args.samples, seed=args.seed, workers=args.workers)
    mc_payload, _ = cmd_mc(mc_args, cfg)
    dump("probabilities", mc_payload)

    half = max(3.0, 1.5 * math.sqrt(n))
    dens_rows = _density_rows(n, -half, half, 201, [])
    dump("density_real", _envelope("density", n=n, ys=[], rows=dens_rows))

    ks = [r["k"] for r in mc_payload["rows"]]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([k - 0.2 for k in ks], [r["exact"] for r in mc_payload["rows"]], width=0.4, label="exact")
    if args.samples:
        ax.bar([k + 0.2 for k in ks], [r["frequency"] for r in mc_payload["rows"]], width=0.4,
               label=f"sampled ({args.samples})")
    ax.set_xlabel("number of real eigenvalues k")
    ax.set_ylabel("probability")
    ax.set_title(f"n = {n}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(outdir / "probabilities.png", dpi=120)
    plt.close(fig)
    written.append("probabilities.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [r["x"] for r in dens_rows]
    ax.plot(xs, [r["real"] for r in dens_rows], label="mean density")
    hist_samples = min(args.samples, 20000)
    if hist_samples:
        ev = real_eigenvalue_sample(n, hist_samples, args.seed)
        counts, edges = np.histogram(ev, bins=60, range=(-half, half))
        ax.stairs(counts / (hist_samples * (edges[1] - edges[0])), edges, label="sampled")
    ax.set_xlabel("x")
    ax.set_ylabel("density of real eigenvalues")
    ax.legend()
    fig.tight_layout()
    fig.savefig(outdir / "density_real.png", dpi=120)
    plt.close(fig)
    written.append("density_real.png")

    gx = np.linspace(-half, half, 121)
    gy = np.linspace(0.0, half, 61)
    grid = density_profiles(n, gx, gy)["complex"]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    im = ax.pcolormesh(gx, gy, grid.T, shading="auto")
    fig.colorbar(im, ax=ax, label="density of complex eigenvalues")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    fig.tight_layout()
    fig.savefig(outdir / "density_complex.png", dpi=120)
    plt.close(fig)
    written.append("density_complex.png")

    rows = [{"file": f} for f in written]
    return _envelope("report", n=n, outdir=str(outdir), files=written, rows=rows), EXIT_OK


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------
def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        fields: list[str] = []
        for r in rows:
            fields.extend(k for k in r if k not in fields)
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in fields})
    return buf.getvalue()


def _pretty_text(payload: dict) -> str:
    lines = []
    skip = ("rows", "display_rows", "cases", "counts", "exact", "exact_common", "schema",
            "schema_version", "version")
    head = {k: v for k, v in payload.items() if k not in skip}
    lines.append("  ".join(f"{k}={v}" for k, v in head.items()))
    rows = payload.get("display_rows", payload.get("rows", []))
    if rows:
        fields: list[str] = []
        for r in rows:
            fields.extend(k for k in r if k not in fields)

        def fmt(v: Any) -> str:
            if v is None:
                return "-"
            if isinstance(v, bool):
                return _ok(v)
            if isinstance(v, float):
                return f"{v:.6f}" if 1e-6 <= abs(v) < 1e6 or v == 0 else f"{v:.6g}"
            return str(v)

        table = [fields] + [[fmt(r.get(f)) for f in fields] for r in rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(fields))]
        for row in table:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render_payload(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        return _csv_text(payload.get("rows", []))
    return _pretty_text(payload)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # invalid usage is exit code 3, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", "--format", dest="fmt", choices=["json", "csv", "pretty"], default=None,
                        help="output format (default: json)")
    common.add_argument("-o", "--output", dest="output", default=None, help="write output to this file")
    common.add_argument("--cache-dir", default=None,
                        help=f"directory for cached rho matrices (env {CACHE_ENV}); off when unset")
    common.add_argument("--exact-cap", type=int, default=None, help="largest n for exact mode (default 20)")
    common.add_argument("--tol", type=float, default=None, help="float tolerance for checks (default 1e-10)")

    p = _Parser(prog="ginoe", description="Real-eigenvalue statistics of real Gaussian random matrices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("probs", parents=[common], help="probabilities p_{n,k} of k real eigenvalues")
    s.add_argument("n", type=int)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact values in Q[sqrt2] (default)")
    mode.add_argument("--float", action="store_true", help="floating point, any n")
    s.set_defaults(func=cmd_probs)

    s = sub.add_parser("genfunc", parents=[common], help="coefficients of the generating function")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_genfunc)

    s = sub.add_parser("moments", parents=[common], help="exact moment E[k^q]")
    s.add_argument("n", type=int)
    s.add_argument("q", type=int)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("en", parents=[common], help="expected number of real eigenvalues")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_en)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=sorted(VERIFY_SUITES))
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--ell", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--instances", type=int, default=100, help="random instances per case (pfaffian-theorem)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("census", parents=[common], help="per-term census of the ordered Pfaffian expansion")
    s.add_argument("ell", type=int)
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("mc", parents=[common], help="Monte Carlo counts with z-scores vs exact")
    s.add_argument("n", type=int)
    s.add_argument("samples", type=int)
    s.add_argument("seed", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("density", parents=[common], help="tabulate mean eigenvalue densities")
    s.add_argument("n", type=int)
    s.add_argument("--xmin", type=float, default=-4.0)
    s.add_argument("--xmax", type=float, default=4.0)
    s.add_argument("--points", type=int, default=81)
    s.add_argument("--y", type=float, action="append", help="imaginary part(s) for the complex density")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("report", parents=[common], help="write CSV/JSON tables and PNG figures")
    s.add_argument("n", type=int)
    s.add_argument("--outdir", required=True)
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_report)
    return p


def _config(args: argparse.Namespace) -> Config:
    cache = args.cache_dir or os.environ.get(CACHE_ENV) or None
    return Config(
        exact_n_cap=args.exact_cap if args.exact_cap is not None else 20,
        output_format=args.fmt or "json",
        cache_dir=Path(cache) if cache else None,
        float_tolerance=args.tol if args.tol is not None else 1e-10,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        payload, code = args.func(args, cfg)
    except (InputError, ValueError) as exc:
        print(f"ginoe: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = render_payload(payload, cfg.output_format)
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
