"""End-to-end acceptance checks against closed-form oracles.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible with
``pytest -s`` or in the ``-v`` live log) before asserting.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import Affine, Blaschke, Mobius, Monomial, catalog, random_poly
from hardyops.criteria import (
    BOUNDED,
    COMPACT,
    HS,
    NOT_HS,
    UNBOUNDED,
    boundedness_diagnostic,
    chain_check,
    compactness_diagnostic,
    hs_bracket,
    hs_criterion,
    lemma31_bounds,
    lemma32_identity,
    univalent_ratio_diagnostic,
)
from hardyops.kernels import KernelSpec, derivative_at, kernel_series, reproduce, tail_order
from hardyops.nevanlinna import counting_mass, counting_mass_from_norm, littlewood_paley_check
from hardyops.operators import OperatorHandle, hs_partial_sum, hs_sum_adaptive, norm_lower_bound
from hardyops.quadrature import moment_integral, moment_integral_quadrature
from hardyops.series import PowerSeries, h2_norm_sq


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def disk_point(rng, rmax):
    return math.sqrt(rng.uniform(0, rmax**2)) * np.exp(2j * np.pi * rng.uniform())


def test_criterion_01_reproducing_identity(report):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        f = random_poly(rng, 30)
        for _ in range(50):
            w = disk_point(rng, 0.95)
            n = int(rng.integers(0, 4))
            err = abs(reproduce(f, KernelSpec(w, n)) - derivative_at(f, n, w))
            worst = max(worst, err)
    elapsed = time.perf_counter() - start
    report(1, worst < 1e-12 and elapsed < 5.0, f"max error {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_kernel_norm(report):
    rng = np.random.default_rng(102)
    points = [disk_point(rng, 0.95) for _ in range(200)] + [0.95, -0.95j, 0.0]
    worst = 0.0
    for w in points:
        M = tail_order(w)
        err = abs(h2_norm_sq(kernel_series(KernelSpec(w), M)) - 1 / (1 - abs(w) ** 2))
        worst = max(worst, err)
    report(2, worst < 1e-10, f"max error {worst:.2e} over {len(points)} points")


def test_criterion_03_littlewood_paley(report):
    rng = np.random.default_rng(103)
    maps = [Affine(0.5, 0.0), Affine(0.3, 0.4), Monomial(1), Monomial(2), Monomial(3),
            Mobius(0.5), Mobius(0.3 + 0.4j), Blaschke((0.5, -0.5)), Blaschke((0.3, 0.2j))]
    start = time.perf_counter()
    closed = littlewood_paley_check(PowerSeries([0, 1]), Monomial(2))
    worst = abs(closed.lhs - 1) + abs(closed.rhs - 1)
    for m in maps:
        for _ in range(2):
            worst = max(worst, littlewood_paley_check(random_poly(rng, 8), m).residual)
    elapsed = time.perf_counter() - start
    report(3, worst < 1e-4 and elapsed < 60.0, f"max residual {worst:.2e}, {elapsed:.1f} s")


def test_criterion_04_counting_mass(report):
    worst, largest = 0.0, 0.0
    for m in catalog():
        value = counting_mass(m)
        worst = max(worst, abs(value - counting_mass_from_norm(m)))
        largest = max(largest, value)
    report(4, worst < 1e-6 and largest < 1, f"max error {worst:.2e}, max mass {largest:.4f}")


def test_criterion_05_moment_integral(report):
    worst = 0.0
    for n in (1, 2, 3):
        for m in range(n + 1, n + 11):
            exact = math.gamma(2 * n + 2) / (2 ** (2 * n + 1) * (m - n) ** (2 * n + 2))
            assert moment_integral(m, n) == pytest.approx(exact, rel=1e-14)
            quad = moment_integral_quadrature(m, n).value
            worst = max(worst, abs(quad - exact) / exact)
    spot = moment_integral_quadrature(2, 1).value
    report(5, worst < 1e-8 and abs(spot - 0.75) < 1e-8 * 0.75,
           f"max rel error {worst:.2e}, spot {spot!r}")


def test_criterion_06_lemma32(report):
    worst = 0.0
    for n in (1, 2, 3):
        for x in (0.0, 0.1, 0.25, 0.5, 0.9):
            worst = max(worst, lemma32_identity(n, x).residual)
    spot = lemma32_identity(1, 0.25)
    ok = worst < 1e-7 and abs(spot.lhs_partial - 80 / 27) < 1e-9 and abs(spot.rhs_closed - 80 / 27) < 1e-12
    report(6, ok, f"max residual {worst:.2e}, spot {spot.lhs_partial!r} / {spot.rhs_closed!r}")


def test_criterion_07_lemma31(report):
    rng = np.random.default_rng(107)
    bad, min_beta = 0, math.inf
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        alphas = rng.uniform(0.01, 10.0, size=n + 1)
        x = rng.uniform(0, 0.999)
        b = lemma31_bounds(alphas, n, x)
        min_beta = min(min_beta, b.beta)
        bad += not (b.lower <= b.value <= b.upper and b.beta > 0)
    report(7, bad == 0 and min_beta > 0, f"{bad} violations, min beta {min_beta:.3e}")


def test_criterion_08_hs_closed_form(report):
    op = OperatorHandle(Affine(0.5, 0.0), 1)
    total = hs_sum_adaptive(op)
    err_sum = abs(total.value - 80 / 27) / (80 / 27)
    crit = hs_criterion(op)
    err_lim = abs(crit.limit_value - 64 / 27) / (64 / 27)
    br = hs_bracket(op)
    ok = (total.converged and err_sum < 1e-6 and crit.verdict == HS and err_lim < 1e-6
          and abs(br.lower - 64 / 27) < 1e-6 and abs(br.upper - 192 / 27) < 1e-6
          and br.lower <= 80 / 27 <= br.upper)
    report(8, ok, f"sum rel err {err_sum:.1e} at M={total.M}, limit rel err {err_lim:.1e}, "
                  f"bracket [{br.lower:.6f}, {br.upper:.6f}]")


def test_criterion_09_chain(report):
    worst, count = -math.inf, 0
    for phi in (Affine(0.5, 0.0), Mobius(0.2), Monomial(2)):
        for n in (1, 2):
            for lam in (0.8, 0.9, 0.95):
                r = chain_check(OperatorHandle(phi, n), lam)
                worst = max(worst, r.B - r.A, r.C - r.B)
                count += 1
    report(9, count == 18 and worst < 1e-6, f"{count} instances, worst violation {worst:.2e}")


def test_criterion_10_diagnostics(report):
    found = []
    for n in (1, 2, 3):
        op = OperatorHandle(Monomial(1), n)
        found.append(boundedness_diagnostic(op).verdict == UNBOUNDED)
        found.append(hs_criterion(op).verdict == NOT_HS)
    half = OperatorHandle(Affine(0.5, 0.0), 1)
    found.append(boundedness_diagnostic(half).verdict == BOUNDED)
    found.append(compactness_diagnostic(half).verdict == COMPACT)
    found.append(hs_criterion(half).verdict == HS)
    found.append(univalent_ratio_diagnostic(OperatorHandle(Affine(0.5, 0.5), 1)).verdict == UNBOUNDED)
    found.append(boundedness_diagnostic(OperatorHandle(Mobius(0.3), 1)).verdict == UNBOUNDED)
    report(10, all(found), f"{sum(found)}/{len(found)} expected verdicts")


def test_criterion_11_monotonicity(report):
    rng = np.random.default_rng(111)
    maps = catalog()
    drops = 0
    for _ in range(20):
        op = OperatorHandle(maps[int(rng.integers(len(maps)))], int(rng.integers(1, 4)))
        Ms = sorted(set(int(v) for v in rng.integers(op.n, 48, size=4)))
        sums = [hs_partial_sum(op, M) for M in Ms]
        norms = [norm_lower_bound(op, M) for M in Ms]
        drops += sum(b < a for a, b in zip(sums, sums[1:]))
        drops += sum(b < a for a, b in zip(norms, norms[1:]))
    report(11, drops == 0, f"{drops} decreases over 20 instances")


def test_criterion_12_determinism(tmp_path, report):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("map = blaschke zeros=[0.5,-0.5]\norder = 2\n")
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        subprocess.run([sys.executable, "-m", "hardyops", "analyze", "--config", str(cfg),
                        "--out", str(out)], check=True, env=dict(os.environ))
        outputs.append(out.read_bytes())
    report(12, outputs[0] == outputs[1] and len(outputs[0]) > 0,
           f"{len(outputs[0])} bytes, identical={outputs[0] == outputs[1]}")
