"""Reproducing kernels of H^2 and the derivative-evaluation functionals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import PowerSeries, falling_factorial


@dataclass(frozen=True)
class KernelSpec:
    """The kernel representing ``f -> f^(n)(w)``."""

    w: complex
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        if not abs(self.w) < 1:
            raise ValueError(f"kernel point must lie in the open disk, got |w|={abs(self.w)}")
        if self.n < 0:
            raise ValueError("kernel derivative order must be >= 0")


def tail_order(w: complex, tol: float = 1e-14, n: int = 0) -> int:
    """Smallest ``M`` with ``sum_{m>M} |coef_m(K_w^(n))|^2 < tol``.

    For ``n = 0`` this is the geometric tail ``|w|^(2(M+1)) / (1-|w|^2)``,
    which gives ``M >= log(tol (1-|w|^2)) / (2 log|w|) - 1``.
    """
    r = abs(complex(w))
    if r == 0:
        return n
    if n == 0:
        M = math.log(tol * (1 - r * r)) / (2 * math.log(r)) - 1
        return max(0, math.ceil(M))
    # tail terms (m!/(m-n)!)^2 r^(2(m-n)) decay geometrically past the peak;
    # the tail is bounded by term * q / (1 - q) with q the term ratio
    m = n
    while True:
        m += 1
        q = ((m + 1) / (m + 1 - n)) ** 2 * r * r
        term = falling_factorial(m + 1, n) ** 2 * r ** (2 * (m + 1 - n))
        if q < 1 and term / (1 - q) < tol:
            return m


def kernel_series(kern: KernelSpec, M: int) -> PowerSeries:
    """Maclaurin expansion of ``n! z^n / (1 - conj(w) z)^(n+1)`` to order ``M``."""
    n = kern.n
    if M < n:
        raise ValueError("truncation order must be at least the derivative order")
    m = np.arange(n, M + 1)
    c = np.zeros(M + 1, dtype=np.complex128)
    c[n:] = falling_factorial(m, n) * np.conj(kern.w) ** (m - n)
    return PowerSeries(c)


def _ld_powers(w: complex, count: int) -> np.ndarray:
    p = np.empty(count, dtype=np.clongdouble)
    if count:
        p[0] = 1
        p[1:] = np.clongdouble(w)
        p = np.cumprod(p)
    return p


def _ld_falling(m: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(m.size, dtype=np.longdouble)
    for i in range(n):
        out *= m.astype(np.longdouble) - i
    return out


def reproduce(f: PowerSeries, kern: KernelSpec) -> complex:
    """Inner product ``<f, K_w^(n)>`` computed from coefficients.

    Equals ``f^(n)(w)`` up to the truncation of ``f``. Accumulated in
    extended precision so the result is correctly rounded in practice.
    """
    a = f.coefficients.astype(np.clongdouble)
    n = kern.n
    if a.size <= n:
        return 0j
    m = np.arange(n, a.size)
    k = _ld_falling(m, n) * _ld_powers(kern.w, m.size)
    return complex(np.sum(a[n:] * k))


def derivative_at(f: PowerSeries, n: int, w: complex) -> complex:
    """``f^(n)(w)`` by differentiating then evaluating (Horner), in
    extended precision."""
    a = f.coefficients.astype(np.clongdouble)
    if a.size <= n:
        return 0j
    c = _ld_falling(np.arange(n, a.size), n) * a[n:]
    z = np.clongdouble(w)
    acc = np.clongdouble(0)
    for coef in c[::-1]:
        acc = acc * z + coef
    return complex(acc)


def normalized_kernel(w: complex, M: int) -> PowerSeries:
    """``K_w / ||K_w|| = sqrt(1-|w|^2) / (1 - conj(w) z)`` to order ``M``."""
    w = complex(w)
    if not abs(w) < 1:
        raise ValueError("normalized kernel needs |w| < 1")
    m = np.arange(M + 1)
    return PowerSeries(math.sqrt(1 - abs(w) ** 2) * np.conj(w) ** m)


def kernel_norm_sq(w: complex) -> float:
    """Closed form ``||K_w||^2 = 1 / (1 - |w|^2)``."""
    return 1.0 / (1.0 - abs(complex(w)) ** 2)
