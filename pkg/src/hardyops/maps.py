"""Catalog of analytic self-maps of the unit disk.

Each family evaluates vectorized, expands into a Maclaurin series, and (where
possible) solves ``phi(z) = w`` inside the disk. Polynomial and Blaschke
preimages come from companion-matrix eigenvalues; the univalent families use
closed-form inverses.

Univalence is a declared flag per family and is never inferred numerically.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import (
    NotInImage,
    NotSelfMap,
    NotUnivalent,
    RootFindingFailure,
    ToleranceFailure,
    UnsupportedMap,
)
from .series import PowerSeries, compose, multiply

RESIDUAL_TOL = 1e-9
CLUSTER_TOL = 1e-7
BOUNDARY_R = 1.0 - 1e-9
SERIES_TAIL_TOL = 1e-8


def format_complex(v: complex) -> str:
    """Render a complex number in the map-spec literal syntax (round-trips)."""
    v = complex(v)
    re, im = v.real, v.imag
    if im == 0.0:
        return repr(re)
    if re == 0.0:
        return f"{im!r}i"
    sign = "+" if im > 0 else ""
    return f"{re!r}{sign}{im!r}i"


class SelfMap(ABC):
    """Base class of the self-map families."""

    family: str = ""

    @abstractmethod
    def __call__(self, z):
        """Evaluate on an array of points."""

    @abstractmethod
    def coefficients(self, count: int) -> np.ndarray:
        """First ``count`` Maclaurin coefficients."""

    @abstractmethod
    def render(self) -> str:
        """Map-spec text that parses back to an equal map."""

    @property
    def univalent(self) -> bool:
        return False

    @property
    def label(self) -> str:
        return self.render()

    @property
    def at_zero(self) -> complex:
        return complex(self(np.zeros(1, dtype=np.complex128))[0])

    @property
    def supports_preimages(self) -> bool:
        return True

    def preimages(self, w: complex) -> List[complex]:
        raise UnsupportedMap(f"{self.family} has no preimage procedure")

    def counting_batch(self, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """``(N_phi(w), preimage_count)`` on an array; finite values only.

        The caller is responsible for excluding ``phi(0)``; the raw log sum
        is returned there.
        """
        w = np.asarray(w, dtype=np.complex128)
        vals = np.zeros(w.shape)
        counts = np.zeros(w.shape, dtype=np.int64)
        for idx, wi in np.ndenumerate(w):
            zs = self.preimages(complex(wi))
            counts[idx] = len(zs)
            vals[idx] = sum(-math.log(abs(z)) if z != 0 else math.inf for z in zs)
        return vals, counts

    def inverse(self, w: complex) -> complex:
        raise UnsupportedMap(f"{self.family} has no closed-form inverse")


def _check_roots(m: SelfMap, w: complex, roots: np.ndarray) -> List[complex]:
    inside = [complex(z) for z in roots if abs(z) < 1.0]
    out = []
    for z in inside:
        res = abs(complex(m(np.array([z]))[0]) - w)
        if res >= RESIDUAL_TOL:
            raise RootFindingFailure(
                f"{m.family}: preimage {z} of {w} has residual {res:.2e}"
            )
        out.append(z)
    return out


def cluster_roots(roots, tol: float = CLUSTER_TOL) -> List[complex]:
    """Merge roots closer than ``tol``; each cluster is reported at its mean,
    repeated by its size (so multiplicities are kept)."""
    remaining = sorted((complex(z) for z in roots), key=lambda z: (z.real, z.imag))
    out: List[complex] = []
    used = [False] * len(remaining)
    for i, z in enumerate(remaining):
        if used[i]:
            continue
        group = [z]
        used[i] = True
        for j in range(i + 1, len(remaining)):
            if not used[j] and abs(remaining[j] - z) < tol:
                group.append(remaining[j])
                used[j] = True
        centre = sum(group) / len(group)
        out.extend([centre] * len(group))
    return out


def companion_matrix(coeffs: np.ndarray) -> np.ndarray:
    """Companion matrix of the polynomial with ascending ``coeffs``.

    Works on stacked coefficient rows of shape ``(..., d+1)``.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    d = c.shape[-1] - 1
    mat = np.zeros(c.shape[:-1] + (d, d), dtype=np.complex128)
    if d > 1:
        idx = np.arange(d - 1)
        mat[..., idx + 1, idx] = 1.0
    mat[..., :, d - 1] = -c[..., :d] / c[..., d : d + 1]
    return mat


def _polyval(coeffs, z):
    acc = np.zeros(np.broadcast(z, coeffs[..., 0]).shape, dtype=np.complex128)
    for k in range(coeffs.shape[-1] - 1, -1, -1):
        acc = acc * z + coeffs[..., k]
    return acc


def _polish(coeffs, roots, steps: int = 3):
    """A few Newton steps on each root; ``coeffs`` broadcast against roots."""
    c = np.asarray(coeffs, dtype=np.complex128)
    d = c.shape[-1] - 1
    dc = c[..., 1:] * np.arange(1, d + 1)
    z = roots.copy()
    for _ in range(steps):
        p = _polyval(c[..., None, :], z)
        dp = _polyval(dc[..., None, :], z)
        ok = np.abs(dp) > 1e-14 * (1 + np.abs(p))
        step = np.where(ok, p / np.where(ok, dp, 1.0), 0.0)
        z = np.where(np.abs(step) < 1e-2, z - step, z)
    return z


def polynomial_roots(coeffs) -> np.ndarray:
    """Roots of an ascending-coefficient polynomial via companion eigenvalues."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=np.complex128), "b")
    if c.size <= 1:
        return np.zeros(0, dtype=np.complex128)
    roots = np.linalg.eigvals(companion_matrix(c))
    return _polish(c, roots[None, :])[0] if c.size > 2 else roots


def _batched_counting(m: SelfMap, polys: np.ndarray, w: np.ndarray):
    """Counting values from a stack of preimage polynomials (rows match ``w``)."""
    roots = np.linalg.eigvals(companion_matrix(polys))
    if polys.shape[-1] > 2:
        roots = _polish(polys, roots)
    inside = np.abs(roots) < 1.0
    if np.any(inside):
        zin = np.where(inside, roots, 0.0)
        res = np.abs(m(zin) - w[:, None])
        bad = inside & (res >= RESIDUAL_TOL)
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            raise RootFindingFailure(
                f"{m.family}: preimage {roots[i, j]} of {w[i]} has residual {res[i, j]:.2e}"
            )
    with np.errstate(divide="ignore"):
        logs = np.where(inside, -np.log(np.where(inside, np.abs(roots), 1.0)), 0.0)
    return logs.sum(axis=-1), inside.sum(axis=-1)


# --------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class Affine(SelfMap):
    """``a z + b``; a self-map iff ``|a| + |b| <= 1``."""

    a: complex
    b: complex = 0.0
    family = "affine"

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def __call__(self, z):
        return self.a * np.asarray(z, dtype=np.complex128) + self.b

    def coefficients(self, count):
        c = np.zeros(count, dtype=np.complex128)
        c[0] = self.b
        if count > 1:
            c[1] = self.a
        return c

    def render(self):
        return f"affine a={format_complex(self.a)} b={format_complex(self.b)}"

    @property
    def univalent(self):
        return self.a != 0

    def preimages(self, w):
        if self.a == 0:
            return []
        z = (complex(w) - self.b) / self.a
        return _check_roots(self, complex(w), np.array([z]))

    def counting_batch(self, w):
        w = np.asarray(w, dtype=np.complex128)
        if self.a == 0:
            return np.zeros(w.shape), np.zeros(w.shape, dtype=np.int64)
        r = np.abs((w - self.b) / self.a)
        inside = r < 1.0
        with np.errstate(divide="ignore"):
            vals = np.where(inside, -np.log(np.where(inside, r, 1.0)), 0.0)
        return vals, inside.astype(np.int64)

    def inverse(self, w):
        if self.a == 0:
            raise NotInImage("constant map has no inverse")
        return (complex(w) - self.b) / self.a


@dataclass(frozen=True)
class Mobius(SelfMap):
    """The involutive automorphism ``(lam - z) / (1 - conj(lam) z)``."""

    lam: complex
    family = "mobius"

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if not abs(self.lam) < 1:
            raise ValueError(f"mobius parameter must satisfy |lambda| < 1, got {abs(self.lam)}")

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (self.lam - z) / (1 - np.conj(self.lam) * z)

    def coefficients(self, count):
        lam = self.lam
        m = np.arange(1, count)
        c = np.empty(count, dtype=np.complex128)
        c[0] = lam
        c[1:] = -(1 - abs(lam) ** 2) * np.conj(lam) ** (m - 1)
        return c

    def render(self):
        return f"mobius lambda={format_complex(self.lam)}"

    @property
    def univalent(self):
        return True

    def preimages(self, w):
        return _check_roots(self, complex(w), np.array([self.inverse(w)]))

    def counting_batch(self, w):
        z = self(w)
        r = np.abs(z)
        with np.errstate(divide="ignore"):
            vals = -np.log(r)
        return vals, np.ones(np.shape(w), dtype=np.int64)

    def inverse(self, w):
        w = complex(w)
        return (self.lam - w) / (1 - self.lam.conjugate() * w)


@dataclass(frozen=True)
class Monomial(SelfMap):
    """``scale * z**k`` with ``|scale| <= 1``."""

    k: int
    scale: complex = 1.0
    family = "monomial"

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("monomial power k must be a positive integer")
        object.__setattr__(self, "k", int(self.k))

    def __call__(self, z):
        return self.scale * np.asarray(z, dtype=np.complex128) ** self.k

    def coefficients(self, count):
        c = np.zeros(count, dtype=np.complex128)
        if self.k < count:
            c[self.k] = self.scale
        return c

    def render(self):
        return f"monomial k={self.k} scale={format_complex(self.scale)}"

    @property
    def univalent(self):
        return self.k == 1 and self.scale != 0

    def preimages(self, w):
        if self.scale == 0:
            return []
        coeffs = np.zeros(self.k + 1, dtype=np.complex128)
        coeffs[0] = -complex(w)
        coeffs[self.k] = self.scale
        return cluster_roots(_check_roots(self, complex(w), polynomial_roots(coeffs)))

    def counting_batch(self, w):
        w = np.asarray(w, dtype=np.complex128)
        if self.scale == 0:
            return np.zeros(w.shape), np.zeros(w.shape, dtype=np.int64)
        # all k preimages share the modulus (|w|/|scale|)^(1/k)
        ratio = np.abs(w) / abs(self.scale)
        inside = ratio < 1.0
        with np.errstate(divide="ignore"):
            vals = np.where(inside, -np.log(np.where(inside, ratio, 1.0)), 0.0)
        return vals, np.where(inside, self.k, 0)

    def inverse(self, w):
        if not self.univalent:
            raise NotUnivalent("monomial with k > 1 is not univalent")
        return complex(w) / self.scale


@dataclass(frozen=True)
class Poly(SelfMap):
    """Polynomial ``sum c[j] z**j``; self-map property checked by validation."""

    coeffs: Tuple[complex, ...]
    family = "poly"

    def __post_init__(self):
        c = tuple(complex(v) for v in self.coeffs)
        if not c:
            raise ValueError("poly needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    def _array(self):
        return np.array(self.coeffs, dtype=np.complex128)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        acc = np.zeros(z.shape, dtype=np.complex128)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def coefficients(self, count):
        c = np.zeros(count, dtype=np.complex128)
        k = min(count, len(self.coeffs))
        c[:k] = self._array()[:k]
        return c

    def render(self):
        return "poly coeffs=[" + ",".join(format_complex(c) for c in self.coeffs) + "]"

    def _preimage_poly(self, w):
        c = np.trim_zeros(self._array(), "b")
        c = np.broadcast_to(c, np.shape(w) + c.shape).copy()
        c[..., 0] -= w
        return c

    def preimages(self, w):
        c = self._preimage_poly(complex(w))
        if c.size <= 1:
            return []
        return cluster_roots(_check_roots(self, complex(w), polynomial_roots(c)))

    def counting_batch(self, w):
        w = np.asarray(w, dtype=np.complex128)
        flat = w.ravel()
        polys = self._preimage_poly(flat)
        if polys.shape[-1] <= 1:
            return np.zeros(w.shape), np.zeros(w.shape, dtype=np.int64)
        vals, counts = _batched_counting(self, polys, flat)
        return vals.reshape(w.shape), counts.reshape(w.shape)


@dataclass(frozen=True)
class Blaschke(SelfMap):
    """Finite Blaschke product ``rotation * prod (z - a) / (1 - conj(a) z)``.

    ``rotation`` is a unimodular complex constant.
    """

    zeros: Tuple[complex, ...]
    rotation: complex = 1.0
    family = "blaschke"

    def __post_init__(self):
        zs = tuple(complex(v) for v in self.zeros)
        if not zs:
            raise ValueError("blaschke product needs at least one zero")
        if any(abs(a) >= 1 for a in zs):
            raise ValueError("blaschke zeros must lie in the open disk")
        rot = complex(self.rotation)
        if abs(abs(rot) - 1.0) > 1e-12:
            raise ValueError(f"blaschke rotation must be unimodular, got |rotation|={abs(rot)}")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "rotation", rot)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = np.full(z.shape, self.rotation, dtype=np.complex128)
        for a in self.zeros:
            out = out * (z - a) / (1 - np.conj(a) * z)
        return out

    def coefficients(self, count):
        out = PowerSeries(np.array([self.rotation] + [0] * (count - 1)))
        m = np.arange(1, count)
        for a in self.zeros:
            f = np.empty(count, dtype=np.complex128)
            f[0] = -a
            f[1:] = (1 - abs(a) ** 2) * np.conj(a) ** (m - 1)
            out = multiply(out, PowerSeries(f), count - 1)
        return out.coefficients.copy()

    def render(self):
        zs = ",".join(format_complex(a) for a in self.zeros)
        return f"blaschke zeros=[{zs}] rotation={format_complex(self.rotation)}"

    @property
    def univalent(self):
        return len(self.zeros) == 1

    def _preimage_poly(self, w):
        num = np.polynomial.polynomial.polyfromroots(np.array(self.zeros)).astype(np.complex128)
        den = np.array([1.0 + 0j])
        for a in self.zeros:
            den = np.polynomial.polynomial.polymul(den, np.array([1.0, -np.conj(a)]))
        w = np.asarray(w, dtype=np.complex128)
        return self.rotation * num - w[..., None] * den

    def preimages(self, w):
        c = self._preimage_poly(complex(w))
        return cluster_roots(_check_roots(self, complex(w), polynomial_roots(c)))

    def counting_batch(self, w):
        w = np.asarray(w, dtype=np.complex128)
        flat = w.ravel()
        vals, counts = _batched_counting(self, self._preimage_poly(flat), flat)
        return vals.reshape(w.shape), counts.reshape(w.shape)

    def inverse(self, w):
        if not self.univalent:
            raise NotUnivalent("blaschke product of degree > 1 is not univalent")
        zs = self.preimages(w)
        if not zs:
            raise NotInImage(f"{w} has no preimage")
        return zs[0]


@dataclass(frozen=True)
class Contact(SelfMap):
    """``1 - (1 - z)**alpha`` for ``0 < alpha <= 1``: boundary contact at 1.

    On the real axis ``1 - phi(x) = (1 - x)**alpha``, and the inverse is
    ``1 - (1 - w)**(1/alpha)``.
    """

    alpha: float
    family = "contact"

    def __post_init__(self):
        a = float(self.alpha)
        if not (0 < a <= 1):
            raise ValueError("contact exponent must satisfy 0 < alpha <= 1")
        object.__setattr__(self, "alpha", a)

    def __call__(self, z):
        u = 1 - np.asarray(z, dtype=np.complex128)
        safe = np.where(u == 0, 1.0, u)
        return np.where(u == 0, 1.0, 1 - safe**self.alpha)

    def coefficients(self, count):
        # (1-z)^alpha = sum b_m z^m with b_m = b_{m-1} (m-1-alpha)/m
        b = np.empty(count)
        b[0] = 1.0
        for m in range(1, count):
            b[m] = b[m - 1] * (m - 1 - self.alpha) / m
        c = -b.astype(np.complex128)
        c[0] = 0.0
        return c

    def render(self):
        return f"contact alpha={self.alpha!r}"

    @property
    def univalent(self):
        return True

    def _raw_inverse(self, w):
        v = 1 - np.asarray(w, dtype=np.complex128)
        return 1 - v ** (1.0 / self.alpha)

    def preimages(self, w):
        z = complex(self._raw_inverse(complex(w)))
        if not abs(z) < 1:
            return []
        # principal-branch inverse may land off the sheet; residual decides
        if abs(complex(self(np.array([z]))[0]) - w) >= RESIDUAL_TOL:
            return []
        return [z]

    def counting_batch(self, w):
        w = np.asarray(w, dtype=np.complex128)
        z = self._raw_inverse(w)
        inside = np.abs(z) < 1.0
        back = self(np.where(inside, z, 0.0))
        inside &= np.abs(back - w) < RESIDUAL_TOL
        with np.errstate(divide="ignore"):
            vals = np.where(inside, -np.log(np.where(inside, np.abs(z), 1.0)), 0.0)
        return vals, inside.astype(np.int64)

    def inverse(self, w):
        zs = self.preimages(w)
        if not zs:
            raise NotInImage(f"{w} is not in the image of {self.render()}")
        return zs[0]


@dataclass(frozen=True)
class Compose(SelfMap):
    """``left o right``."""

    left: SelfMap
    right: SelfMap
    family = "compose"

    def __call__(self, z):
        return self.left(self.right(z))

    def coefficients(self, count):
        order = count - 1
        inner = PowerSeries(self.right.coefficients(count))
        outer_order = max(order, 64)
        outer = PowerSeries(self.left.coefficients(4 * outer_order + 1))
        return compose(outer, inner, order).coefficients.copy()

    def render(self):
        return f"compose({self.left.render()} ; {self.right.render()})"

    @property
    def univalent(self):
        return self.left.univalent and self.right.univalent

    def preimages(self, w):
        out = []
        for u in self.left.preimages(w):
            out.extend(self.right.preimages(u))
        return out

    def inverse(self, w):
        if not self.univalent:
            raise NotUnivalent("composition of maps that are not both univalent")
        return self.right.inverse(self.left.inverse(w))


def identity() -> Monomial:
    return Monomial(1, 1.0)


def zero_map() -> Affine:
    return Affine(0.0, 0.0)


# --------------------------------------------------------------------------
# operations


def to_series(m: SelfMap, M: int, tail_tol: Optional[float] = SERIES_TAIL_TOL) -> PowerSeries:
    """Truncated Maclaurin expansion of ``m`` to order ``M``.

    The H^2 tail beyond ``M`` is estimated from coefficients up to ``4(M+1)``
    plus a power-law remainder; ``ToleranceFailure`` if it exceeds
    ``tail_tol``. Pass ``tail_tol=None`` to skip the check (coefficients
    ``0..M`` are exact either way).
    """
    if tail_tol is None:
        return PowerSeries(m.coefficients(M + 1))
    K = 4 * (M + 1)
    c = m.coefficients(K)
    tail = float(np.sum(np.abs(c[M + 1 :]) ** 2)) + float(abs(c[-1]) ** 2) * K
    if tail > tail_tol:
        raise ToleranceFailure(
            f"series tail of {m.render()} at order {M} is about {tail:.2e} (> {tail_tol:.1e})"
        )
    return PowerSeries(c[: M + 1])


class ValidationReport(NamedTuple):
    passed: bool
    sup: float
    argmax: complex


def validate_self_map(m: SelfMap, samples: int = 4096) -> ValidationReport:
    """Sample ``|m|`` on the circle of radius ``1 - 1e-9``; passes when the
    sampled sup is at most ``1 + 1e-9``."""
    if samples < 256:
        raise ValueError("validation needs at least 256 samples")
    theta = 2 * np.pi * np.arange(samples) / samples
    z = BOUNDARY_R * np.exp(1j * theta)
    vals = np.abs(m(z))
    i = int(np.argmax(vals))
    sup = float(vals[i])
    return ValidationReport(sup <= 1 + 1e-9, sup, complex(z[i]))


def require_self_map(m: SelfMap, samples: int = 4096) -> ValidationReport:
    rep = validate_self_map(m, samples)
    if not rep.passed:
        raise NotSelfMap(
            f"{m.render()} leaves the disk: |phi| = {rep.sup:.12g} at z = {rep.argmax:.6g}",
            witness=rep.argmax,
        )
    return rep


def preimages(m: SelfMap, w: complex) -> List[complex]:
    """All solutions of ``m(z) = w`` in the disk, repeated by multiplicity."""
    w = complex(w)
    if not abs(w) < 1:
        raise ValueError("preimages: |w| must be < 1")
    return m.preimages(w)


def inverse_at(m: SelfMap, w: complex) -> complex:
    """The unique preimage of ``w`` under a univalent map."""
    if not m.univalent:
        raise NotUnivalent(f"{m.render()} is not declared univalent")
    zs = preimages(m, w)
    if not zs:
        raise NotInImage(f"{w} has no preimage under {m.render()}")
    return zs[0]


def mobius_involution_error(lam: complex, points) -> float:
    """``max |alpha(alpha(u)) - u|`` on ``points``."""
    a = Mobius(lam)
    u = np.asarray(points, dtype=np.complex128)
    return float(np.max(np.abs(a(a(u)) - u)))
