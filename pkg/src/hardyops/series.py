"""Truncated power series with complex coefficients.

Every analytic function in the package is carried as a :class:`PowerSeries`:
the Maclaurin coefficients ``a[0..M]`` of a function on the unit disk. The
Hardy-space norm is the l2 norm of the coefficient vector.

Composition is done by sampling on a circle of radius ``rho < 1`` and
inverting with an FFT, because a composed map with ``g(0) != 0`` makes each
output coefficient depend on the whole tail of ``f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from . import backend
from .errors import SamplingRadiusFailure, ToleranceFailure

DEFAULT_ORDER = 256
COMPOSE_TOL = 1e-10
_ADMISSIBLE_MARGIN = 1e-6
_MAX_SAMPLES = 1 << 22
_BOUNDARY_R = 1.0 - 1e-9

ArrayLike = Union[complex, float, np.ndarray]


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Coefficients ``a[0..M]`` of ``sum a[m] z**m``; immutable."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.complex128).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=np.complex128)
        if not np.all(np.isfinite(c)):
            raise ValueError("power series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def monomial(cls, m: int, scale: complex = 1.0) -> "PowerSeries":
        c = np.zeros(m + 1, dtype=np.complex128)
        c[m] = scale
        return cls(c)

    @classmethod
    def zero(cls, order: int = 0) -> "PowerSeries":
        return cls(np.zeros(order + 1, dtype=np.complex128))

    @property
    def truncation_order(self) -> int:
        return self.coefficients.size - 1

    def __len__(self):
        return self.coefficients.size

    def __getitem__(self, m):
        return self.coefficients[m]

    def __call__(self, z: ArrayLike):
        return evaluate(self, z)

    def truncate(self, order: int) -> "PowerSeries":
        c = np.zeros(order + 1, dtype=np.complex128)
        k = min(order, self.truncation_order) + 1
        c[:k] = self.coefficients[:k]
        return PowerSeries(c)

    def _aligned(self, other: "PowerSeries"):
        n = max(len(self), len(other))
        a = np.zeros(n, dtype=np.complex128)
        b = np.zeros(n, dtype=np.complex128)
        a[: len(self)] = self.coefficients
        b[: len(other)] = other.coefficients
        return a, b

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        a, b = self._aligned(other)
        return PowerSeries(a + b)

    def __sub__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        a, b = self._aligned(other)
        return PowerSeries(a - b)

    def __neg__(self):
        return PowerSeries(-self.coefficients)

    def __mul__(self, scalar):
        if isinstance(scalar, PowerSeries):
            return multiply(self, scalar)
        return PowerSeries(self.coefficients * complex(scalar))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        a, b = self._aligned(other)
        return bool(np.array_equal(a, b))

    def __repr__(self):
        return f"PowerSeries(order={self.truncation_order}, coefficients={self.coefficients!r})"


def as_series(obj: Union[PowerSeries, Iterable[complex]]) -> PowerSeries:
    if isinstance(obj, PowerSeries):
        return obj
    return PowerSeries(np.asarray(list(obj), dtype=np.complex128))


def falling_factorial(m, k: int):
    """``m (m-1) ... (m-k+1)``; works elementwise on integer arrays."""
    if np.ndim(m) == 0:
        return math.perm(int(m), k) if m >= k else 0
    m = np.asarray(m, dtype=np.float64)
    out = np.ones_like(m)
    for i in range(k):
        out *= m - i
    return np.where(m >= k, out, 0.0)


def derivative(s: PowerSeries, k: int) -> PowerSeries:
    """Term-by-term ``k``-th derivative; order drops by ``k`` (floored at 0)."""
    if k < 1:
        raise ValueError("derivative order must be >= 1")
    M = s.truncation_order
    if k > M:
        return PowerSeries.zero(0)
    m = np.arange(k, M + 1)
    return PowerSeries(falling_factorial(m, k) * s.coefficients[k:])


def evaluate(s: PowerSeries, z: ArrayLike):
    """Horner evaluation of the truncated polynomial on the closed disk."""
    zz = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(zz) > 1.0 + 1e-12):
        raise ValueError("evaluate: points must satisfy |z| <= 1")
    out = backend.horner(s.coefficients, zz)
    return out[()] if out.ndim == 0 else out


def _evaluate_unchecked(s: PowerSeries, z: np.ndarray) -> np.ndarray:
    return backend.horner(s.coefficients, z)


def multiply(a: PowerSeries, b: PowerSeries, order: int | None = None) -> PowerSeries:
    """Cauchy product truncated to ``order`` (default: the smaller order)."""
    if order is None:
        order = min(a.truncation_order, b.truncation_order)
    c = np.convolve(a.coefficients[: order + 1], b.coefficients[: order + 1])
    return PowerSeries(c[: order + 1]).truncate(order)


def h2_norm_sq(s: PowerSeries) -> float:
    c = s.coefficients
    return float(np.sum(c.real**2 + c.imag**2))


def hinf_estimate(s: PowerSeries, angular_samples: int = 4096) -> float:
    """Boundary sup-norm estimate, a lower estimate of the true sup.

    Samples ``|s|`` on ``angular_samples`` equispaced points of the circle of
    radius ``1 - 1e-9``.
    """
    if angular_samples < 64:
        raise ValueError("angular_samples must be >= 64")
    theta = 2 * np.pi * np.arange(angular_samples) / angular_samples
    z = _BOUNDARY_R * np.exp(1j * theta)
    return float(np.max(np.abs(_evaluate_unchecked(s, z))))


def _next_pow2(n: int) -> int:
    return 1 << max(0, (int(n) - 1).bit_length())


def sampling_radius(g: Callable[[np.ndarray], np.ndarray], order: int) -> float:
    """Largest admissible circle for sampling ``f(g(.))``.

    Candidates are ``1 - 1/(order+1)`` (when above 0.95), then
    0.95, 0.90, ..., 0.05; a radius is admissible when ``|g| < 1 - 1e-6`` on
    a dense sample of the circle.
    """
    candidates = [round(0.95 - 0.05 * i, 2) for i in range(19)]
    near_one = 1.0 - 1.0 / (order + 1)
    if near_one > 0.95:
        candidates.insert(0, near_one)
    nodes = max(1024, 4 * _next_pow2(order + 1))
    theta = 2 * np.pi * np.arange(nodes) / nodes
    unit = np.exp(1j * theta)
    for rho in candidates:
        if np.max(np.abs(g(rho * unit))) < 1.0 - _ADMISSIBLE_MARGIN:
            return rho
    raise SamplingRadiusFailure("no sampling circle is mapped inside the disk")


def compose_callable(
    f: PowerSeries,
    g: Callable[[np.ndarray], np.ndarray],
    order: int,
    tol: float = COMPOSE_TOL,
) -> PowerSeries:
    """Coefficients ``0..order`` of ``f(g(z))`` where ``g`` is any vectorized
    analytic self-map evaluator."""
    rho = sampling_radius(g, order)
    nodes = max(64, 2 * _next_pow2(order + 1))
    scale = rho ** -np.arange(order + 1)

    def recover(N):
        theta = 2 * np.pi * np.arange(N) / N
        vals = _evaluate_unchecked(f, g(rho * np.exp(1j * theta)))
        c = np.fft.fft(vals)[: order + 1] / N
        return c * scale, float(np.max(np.abs(vals)))

    prev, _ = recover(nodes)
    while True:
        nodes *= 2
        cur, vmax = recover(nodes)
        ref = max(vmax, float(np.max(np.abs(cur))), 1e-300)
        err = float(np.max(np.abs(cur - prev))) / ref
        if err <= tol:
            return PowerSeries(cur)
        if nodes >= _MAX_SAMPLES:
            raise ToleranceFailure(
                f"composition aliasing estimate {err:.3e} exceeds tolerance {tol:.1e}"
            )
        prev = cur


def compose(f: PowerSeries, g: PowerSeries, M_out: int, tol: float = COMPOSE_TOL) -> PowerSeries:
    """Coefficients ``0..M_out`` of ``f o g`` by circle sampling and inverse FFT.

    Raises
    ------
    SamplingRadiusFailure
        If ``g`` maps no candidate circle strictly inside the disk.
    ToleranceFailure
        If the sample-doubling error estimate stays above ``tol``.
    """
    return compose_callable(f, lambda z: _evaluate_unchecked(g, z), M_out, tol)
