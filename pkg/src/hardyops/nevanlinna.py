"""The Nevanlinna counting function and the area identities built on it."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import PreconditionFailure
from .maps import SelfMap, preimages, to_series
from .quadrature import Estimate, GridSpec, disk_integral, disk_mean
from .series import DEFAULT_ORDER, PowerSeries, compose, derivative, evaluate, h2_norm_sq

AT_ZERO_TOL = 1e-12
_SCAN = 256
_BISECT = 48


@dataclass(frozen=True)
class CountingFunctionValue:
    """``N_phi(w)``; ``value`` is ``math.inf`` exactly when ``w = phi(0)``."""

    value: float
    preimage_count: int

    @property
    def infinite(self) -> bool:
        return math.isinf(self.value)


def counting_function(m: SelfMap, w: complex) -> CountingFunctionValue:
    """``sum log(1/|z|)`` over the preimages ``z`` of ``w`` in the disk."""
    w = complex(w)
    zs = preimages(m, w)
    if abs(w - m.at_zero) < AT_ZERO_TOL:
        return CountingFunctionValue(math.inf, len(zs))
    return CountingFunctionValue(float(sum(-math.log(abs(z)) for z in zs)), len(zs))


def counting_grid(m: SelfMap, w) -> np.ndarray:
    """Vectorized ``N_phi`` on an array of points; ``inf`` at ``phi(0)``."""
    w = np.asarray(w, dtype=np.complex128)
    vals, _ = m.counting_batch(w)
    return np.where(np.abs(w - m.at_zero) < AT_ZERO_TOL, np.inf, vals)


def sheet_breaks(m: SelfMap):
    """Kink finder for integrands that contain ``N_phi``.

    ``N_phi`` is smooth except where a preimage crosses the unit circle,
    i.e. where the preimage count changes. Along each ray the count is
    scanned at 256 points and every change is located by bisection. Rays
    are padded with their reach so the result is rectangular.
    """

    def breaks(centre, theta, reach):
        unit = np.exp(1j * theta)
        frac = (np.arange(_SCAN) + 0.5) / _SCAN
        s = reach[:, None] * frac[None, :]
        _, counts = m.counting_batch(centre + s * unit[:, None])
        change = np.diff(counts, axis=1) != 0
        n_breaks = change.sum(axis=1)
        K = int(n_breaks.max()) if n_breaks.size else 0
        out = np.repeat(reach[:, None], max(K, 0), axis=1)
        if K == 0:
            return out
        rows, cols = np.nonzero(change)
        lo = s[rows, cols].copy()
        hi = s[rows, cols + 1].copy()
        c_lo = counts[rows, cols]
        u = unit[rows]
        for _ in range(_BISECT):
            mid = 0.5 * (lo + hi)
            _, c_mid = m.counting_batch(centre + mid * u)
            same = c_mid == c_lo
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        slot = np.zeros_like(rows)
        for i in range(1, rows.size):
            slot[i] = slot[i - 1] + 1 if rows[i] == rows[i - 1] else 0
        out[rows, slot] = 0.5 * (lo + hi)
        return out

    return breaks


def _counting_integrand(m: SelfMap, weight=None):
    def g(w):
        vals, _ = m.counting_batch(w)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        return vals if weight is None else vals * weight(w)

    return g


def counting_integral(m: SelfMap, grid: GridSpec = GridSpec(), weight=None) -> Estimate:
    """``int_D weight(w) N_phi(w) dA(w)`` with the log singularity at
    ``phi(0)`` and the sheet kinks handled by the quadrature layout."""
    return disk_integral(
        _counting_integrand(m, weight), grid, singularity=m.at_zero, breaks=sheet_breaks(m)
    )


def counting_mass(m: SelfMap, grid: GridSpec = GridSpec()) -> float:
    """``int_D N_phi dA`` by quadrature."""
    return counting_integral(m, grid).value


def counting_mass_from_norm(m: SelfMap, order: int = DEFAULT_ORDER) -> float:
    """``(||phi||^2 - |phi(0)|^2) / 2`` from the Maclaurin coefficients."""
    s = to_series(m, order)
    return 0.5 * (h2_norm_sq(s) - abs(m.at_zero) ** 2)


class LittlewoodPaleyReport(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def littlewood_paley_check(
    f: PowerSeries, m: SelfMap, grid: GridSpec = GridSpec(), order: int = DEFAULT_ORDER
) -> LittlewoodPaleyReport:
    """Compare ``||f o phi||^2`` with ``|f(phi(0))|^2 + 2 int |f'|^2 N_phi dA``.

    The left side comes from the composed series, the right side from disk
    quadrature; the residual is ``|lhs - rhs| / max(1, lhs)``.
    """
    # coefficients 0..order of f o phi only involve phi's first order+1 terms
    phi = to_series(m, order, tail_tol=None)
    lhs = h2_norm_sq(compose(f, phi, order))
    boundary = abs(complex(evaluate(f, m.at_zero))) ** 2
    if f.truncation_order == 0:
        area = 0.0
    else:
        df = derivative(f, 1)
        area = counting_integral(m, grid, weight=lambda w: np.abs(evaluate(df, w)) ** 2).value
    rhs = boundary + 2.0 * area
    return LittlewoodPaleyReport(lhs, rhs, abs(lhs - rhs) / max(1.0, lhs))


class SubMeanReport(NamedTuple):
    lhs: float
    rhs_mean: float
    holds: bool


def sub_mean_value_check(
    m: SelfMap, a: complex, radius: float, grid: GridSpec = GridSpec()
) -> SubMeanReport:
    """``N_phi(a)`` against its average over the disk of ``radius`` about ``a``.

    The disk must lie in D and must not contain ``phi(0)``.
    """
    a = complex(a)
    if not (radius > 0 and abs(a) + radius < 1):
        raise PreconditionFailure("averaging disk must lie inside the unit disk")
    if abs(m.at_zero - a) <= radius:
        raise PreconditionFailure(f"averaging disk contains phi(0) = {m.at_zero}")
    lhs = counting_function(m, a).value
    est = disk_mean(_counting_integrand(m), a, radius, grid, breaks=sheet_breaks(m))
    tol = max(est.error, grid.rel_tol * max(1.0, abs(est.value)))
    return SubMeanReport(lhs, est.value, lhs <= est.value + tol)
