"""Command-line front end.

Subcommands: ``analyze``, ``verify``, ``hs``, ``nevanlinna`` and ``lp-check``.
Settings come from built-in defaults, then an optional flat ``key=value``
config file, then flags. Reports are CSV (default) or JSON lines and are
written once, atomically.

Exit codes: 0 success, 1 a verification failed, 2 unparseable map or
config, 3 the map or a precondition was rejected, 4 numerical
nonconvergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .criteria import (
    HS,
    boundedness_diagnostic,
    chain_check,
    compactness_diagnostic,
    hs_bracket,
    hs_criterion,
    lemma31_bounds,
    lemma32_identity,
    univalent_ratio_diagnostic,
)
from .errors import HardyOpsError, MapError, MapSemanticError, MapSyntaxError, NumericalError
from .kernels import KernelSpec, derivative_at, kernel_norm_sq, kernel_series, reproduce, tail_order
from .maps import Affine, Blaschke, Mobius, Monomial, SelfMap
from .mapspec import parse_complex, parse_map
from .nevanlinna import counting_grid, littlewood_paley_check
from .operators import OperatorHandle, column_norms_sq, hs_sum_adaptive
from .quadrature import GridSpec, moment_integral, moment_integral_quadrature
from .series import PowerSeries, h2_norm_sq

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3, 4

REPORT_FIELDS = ("section", "criterion", "radius", "value", "verdict", "note")
HS_FIELDS = ("M", "partial_sum", "increment", "lower_bracket", "upper_bracket")
NEVANLINNA_FIELDS = ("radius", "theta", "re", "im", "value", "preimages")
CONFIG_KEYS = {"map", "order", "radii", "angular", "tol", "format", "out", "max_m", "coeffs"}
LP_THRESHOLD = 1e-4
SEED = 20240601


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    map_spec: Optional[str]
    n: int
    grid: GridSpec
    output_format: str
    output_path: Optional[str]
    max_m: Optional[int] = None
    coeffs: Optional[str] = None


# --------------------------------------------------------------------------
# configuration


def read_config_file(path: str) -> Dict[str, str]:
    """Flat ``key=value`` lines; ``#`` comments and blank lines are ignored."""
    out: Dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for no, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{no}: unknown key {key!r}")
        out[key] = value
    return out


def _as_int(name, value):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    merged: Dict[str, object] = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    n = _as_int("order", merged.get("order", 1))
    if n < 1:
        raise ConfigError("order must be at least 1")
    fmt = str(merged.get("format", "csv"))
    if fmt not in ("csv", "jsonl"):
        raise ConfigError("format must be csv or jsonl")
    grid = GridSpec()
    try:
        grid = grid.with_overrides(
            k_max=_as_int("radii", merged["radii"]) if "radii" in merged else None,
            angular=_as_int("angular", merged["angular"]) if "angular" in merged else None,
            tol=float(merged["tol"]) if "tol" in merged else None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    max_m = _as_int("max_m", merged["max_m"]) if "max_m" in merged else None
    return RunConfig(
        map_spec=merged.get("map"),
        n=n,
        grid=grid,
        output_format=fmt,
        output_path=merged.get("out"),
        max_m=max_m,
        coeffs=merged.get("coeffs"),
    )


def _load_map(cfg: RunConfig) -> SelfMap:
    if not cfg.map_spec:
        raise ConfigError("a map is required (--map)")
    return parse_map(cfg.map_spec)


# --------------------------------------------------------------------------
# output


def fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_rows(rows: Sequence[Dict[str, object]], fields: Sequence[str], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for row in rows:
            w.writerow([fmt_value(row.get(f)) for f in fields])
    else:
        for row in rows:
            rec = {f: _json_value(row.get(f)) for f in fields}
            buf.write(json.dumps(rec, sort_keys=False) + "\n")
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def write_atomic(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".hardyops-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _row(section, criterion, radius=None, value=None, verdict=None, note=None):
    return {
        "section": section,
        "criterion": criterion,
        "radius": radius,
        "value": value,
        "verdict": verdict,
        "note": note,
    }


# --------------------------------------------------------------------------
# commands


def _config_rows(cfg: RunConfig, phi: Optional[SelfMap]) -> List[Dict[str, object]]:
    rows = [_row("config", "version", note=__version__)]
    if phi is not None:
        rows.append(_row("config", "map", note=phi.render()))
    rows += [
        _row("config", "order", value=cfg.n),
        _row("config", "radii", value=len(cfg.grid.radii)),
        _row("config", "angular", value=cfg.grid.angular_nodes),
        _row("config", "tol", value=cfg.grid.rel_tol),
    ]
    return rows


def _diagnostic_rows(diag) -> List[Dict[str, object]]:
    rows = [_row("diagnostic", diag.criterion, r, v) for r, v in diag.evidence]
    note = "last ratios " + " ".join(fmt_value(x) for x in diag.ratios)
    rows.append(_row("diagnostic", diag.criterion, verdict=diag.verdict, note=note))
    return rows


def cmd_analyze(cfg: RunConfig) -> List[Dict[str, object]]:
    phi = _load_map(cfg)
    op = OperatorHandle(phi, cfg.n)
    rows = _config_rows(cfg, phi)
    if phi.supports_preimages:
        rows += _diagnostic_rows(boundedness_diagnostic(op, cfg.grid))
        rows += _diagnostic_rows(compactness_diagnostic(op, cfg.grid))
    else:
        for name in ("boundedness", "compactness"):
            rows.append(_row("diagnostic", name, verdict="skipped", note="no preimage solver"))
    if phi.univalent:
        rows += _diagnostic_rows(univalent_ratio_diagnostic(op, cfg.grid))
    hs = hs_criterion(op, cfg.grid)
    rows += [_row("diagnostic", "hilbert-schmidt", r, v) for r, v in hs.evidence]
    rows.append(
        _row("diagnostic", "hilbert-schmidt", value=hs.limit_value, verdict=hs.verdict,
             note=f"radial limit {hs.radial.verdict}")
    )
    return rows


def cmd_hs(cfg: RunConfig) -> List[Dict[str, object]]:
    phi = _load_map(cfg)
    op = OperatorHandle(phi, cfg.n)
    if cfg.max_m is not None:
        if cfg.max_m < cfg.n:
            raise ConfigError("max_m must be at least the order")
        cols = column_norms_sq(op, cfg.max_m, cfg.grid)
        sums = np.cumsum(cols)
    else:
        res = hs_sum_adaptive(op, cfg.grid)
        sums, cols = res.partial_sums, res.columns
    lower = upper = None
    if hs_criterion(op, cfg.grid).verdict == HS:
        b = hs_bracket(op, cfg.grid)
        lower, upper = b.lower, b.upper
    rows = []
    for i, (s, inc) in enumerate(zip(sums, cols)):
        rows.append(
            {"M": cfg.n + i, "partial_sum": float(s), "increment": float(inc),
             "lower_bracket": lower, "upper_bracket": upper}
        )
    return rows


def cmd_nevanlinna(cfg: RunConfig) -> List[Dict[str, object]]:
    phi = _load_map(cfg)
    OperatorHandle(phi, cfg.n)  # validates the self-map
    nodes = cfg.grid.angular_nodes
    theta = 2 * np.pi * np.arange(nodes) / nodes
    rows = []
    for r in cfg.grid.radii:
        w = r * np.exp(1j * theta)
        vals = counting_grid(phi, w)
        _, counts = phi.counting_batch(w)
        for t, z, v, c in zip(theta, w, vals, counts):
            rows.append({"radius": r, "theta": float(t), "re": float(z.real),
                         "im": float(z.imag), "value": float(v), "preimages": int(c)})
    return rows


def _parse_coeffs(text: Optional[str]) -> PowerSeries:
    if not text:
        return PowerSeries.monomial(1)
    body = text.strip().strip("[]")
    try:
        return PowerSeries([parse_complex(tok.strip()) for tok in body.split(",")])
    except ValueError as exc:
        raise ConfigError(f"bad coefficient list {text!r}: {exc}") from None


def cmd_lp_check(cfg: RunConfig) -> List[Dict[str, object]]:
    phi = _load_map(cfg)
    OperatorHandle(phi, cfg.n)
    f = _parse_coeffs(cfg.coeffs)
    rep = littlewood_paley_check(f, phi, cfg.grid)
    ok = rep.residual < LP_THRESHOLD
    rows = _config_rows(cfg, phi)
    rows.append(_row("lp", "lhs", value=rep.lhs))
    rows.append(_row("lp", "rhs", value=rep.rhs))
    rows.append(_row("lp", "residual", value=rep.residual, verdict="pass" if ok else "fail",
                     note=f"threshold {LP_THRESHOLD!r}"))
    return rows


# verify suites ---------------------------------------------------------------


def _check(criterion, value, threshold, note=None):
    ok = bool(value < threshold)
    return _row("verify", criterion, value=float(value), verdict="pass" if ok else "fail",
                note=note or f"threshold {threshold!r}")


def suite_kernels(grid: GridSpec) -> List[Dict[str, object]]:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        deg = int(rng.integers(0, 31))
        f = PowerSeries(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        for _ in range(10):
            w = complex(*rng.uniform(-0.65, 0.65, 2))
            n = int(rng.integers(0, 4))
            worst = max(worst, abs(reproduce(f, KernelSpec(w, n)) - derivative_at(f, n, w)))
    norm_err = 0.0
    for w in (0.0, 0.3, 0.5 + 0.5j, -0.8, 0.9j, 0.95):
        s = kernel_series(KernelSpec(w), tail_order(w))
        norm_err = max(norm_err, abs(h2_norm_sq(s) - kernel_norm_sq(w)))
    return [_check("reproducing", worst, 1e-12), _check("kernel-norm", norm_err, 1e-10)]


def _lp_catalog():
    return [Affine(0.5, 0.0), Affine(0.3, 0.4), Monomial(2), Monomial(3), Mobius(0.5),
            Mobius(0.3 + 0.4j), Blaschke((0.5, -0.5)), Blaschke((0.3, 0.2j))]


def suite_lp(grid: GridSpec) -> List[Dict[str, object]]:
    rng = np.random.default_rng(SEED)
    rows = [_check("lp z o z^2", littlewood_paley_check(PowerSeries.monomial(1), Monomial(2), grid).residual, LP_THRESHOLD)]
    for phi in _lp_catalog():
        deg = int(rng.integers(1, 9))
        f = PowerSeries(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        rep = littlewood_paley_check(f, phi, grid)
        rows.append(_check(f"lp {phi.render()}", rep.residual, LP_THRESHOLD))
    return rows


def suite_lemmas(grid: GridSpec) -> List[Dict[str, object]]:
    worst = max(
        lemma32_identity(n, x).residual for n in (1, 2, 3) for x in (0.0, 0.1, 0.25, 0.5, 0.9)
    )
    rng = np.random.default_rng(SEED)
    bad = 0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        alphas = rng.uniform(0.01, 10.0, n + 1)
        x = float(rng.uniform(0.0, 0.99))
        b = lemma31_bounds(alphas, n, x)
        if not (b.beta > 0 and b.lower <= b.value * (1 + 1e-12) and b.value <= b.upper * (1 + 1e-12)):
            bad += 1
    return [_check("lemma32 residual", worst, 1e-7), _check("lemma31 violations", bad, 1)]


def suite_moments(grid: GridSpec) -> List[Dict[str, object]]:
    worst = 0.0
    for n in (1, 2, 3):
        for m in range(n + 1, n + 11):
            exact = moment_integral(m, n)
            worst = max(worst, abs(moment_integral_quadrature(m, n).value - exact) / exact)
    return [_check("moment relative error", worst, 1e-8)]


def suite_chain(grid: GridSpec) -> List[Dict[str, object]]:
    rows = []
    for phi in (Affine(0.5, 0.0), Mobius(0.2), Monomial(2)):
        for n in (1, 2):
            op = OperatorHandle(phi, n)
            for lam in (0.8, 0.9, 0.95):
                rep = chain_check(op, lam, grid)
                rows.append(
                    _row("verify", f"chain {phi.render()} n={n} lambda={lam!r}",
                         value=min(rep.A - rep.B, rep.B - rep.C),
                         verdict="pass" if rep.holds else "fail",
                         note=f"A={rep.A!r} B={rep.B!r} C={rep.C!r}")
                )
    return rows


SUITES = {
    "kernels": suite_kernels,
    "lp": suite_lp,
    "lemmas": suite_lemmas,
    "moments": suite_moments,
    "chain": suite_chain,
}


def cmd_verify(cfg: RunConfig, suite: str) -> List[Dict[str, object]]:
    names = list(SUITES) if suite == "all" else [suite]
    rows = _config_rows(cfg, None)
    for name in names:
        rows += [dict(r, section=f"verify:{name}") for r in SUITES[name](cfg.grid)]
    return rows


# --------------------------------------------------------------------------
# argument parsing and dispatch


def _common(p: argparse.ArgumentParser, with_map: bool = True):
    if with_map:
        p.add_argument("--map", help="map spec, e.g. \"affine a=0.5 b=0\"")
    p.add_argument("--order", help="derivative order n (default 1)")
    p.add_argument("--radii", help="number of dyadic radii 1 - 2^-k (default 14)")
    p.add_argument("--angular", help="angular nodes, a power of two (default 512)")
    p.add_argument("--tol", help="relative quadrature tolerance (default 1e-6)")
    p.add_argument("--format", choices=("csv", "jsonl"))
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--config", help="flat key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardyops", description="Diagnostics for f -> f^(n) o phi on the Hardy space."
    )
    parser.add_argument("--version", action="version", version=f"hardyops {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("analyze", help="boundedness, compactness and HS verdicts"))
    v = sub.add_parser("verify", help="run identity and inequality suites")
    v.add_argument("suite", choices=tuple(SUITES) + ("all",))
    _common(v, with_map=False)
    h = sub.add_parser("hs", help="HS partial sums with brackets")
    _common(h)
    h.add_argument("--max-m", dest="max_m", help="last column index (default adaptive)")
    _common(sub.add_parser("nevanlinna", help="dump N_phi on the polar grid"))
    lp = sub.add_parser("lp-check", help="Littlewood-Paley residual for one f")
    _common(lp)
    lp.add_argument("--coeffs", help="coefficients of f, e.g. \"[1,0.5i,-2]\" (default z)")
    return parser


def _verify_failed(rows) -> bool:
    return any(r.get("verdict") == "fail" for r in rows)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "analyze":
            rows, fields = cmd_analyze(cfg), REPORT_FIELDS
        elif args.command == "verify":
            rows, fields = cmd_verify(cfg, args.suite), REPORT_FIELDS
        elif args.command == "hs":
            rows, fields = cmd_hs(cfg), HS_FIELDS
        elif args.command == "nevanlinna":
            rows, fields = cmd_nevanlinna(cfg), NEVANLINNA_FIELDS
        else:
            rows, fields = cmd_lp_check(cfg), REPORT_FIELDS
        write_atomic(render_rows(rows, fields, cfg.output_format), cfg.output_path)
    except (ConfigError, MapSyntaxError, MapSemanticError) as exc:
        print(f"hardyops: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericalError as exc:
        print(f"hardyops: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (MapError, HardyOpsError) as exc:
        print(f"hardyops: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.command in ("verify", "lp-check") and _verify_failed(rows):
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
