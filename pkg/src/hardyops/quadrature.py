"""Circle means, normalized-area disk integrals and radial limits.

Circle means use the equispaced trapezoid rule, which is spectrally accurate
for smooth periodic integrands; nodes are doubled (reusing the previous
samples) until two levels agree. Disk integrals use polar coordinates about a
chosen centre with Gauss-Legendre in the radial direction and the trapezoid
rule in angle. A logarithmic singularity at the centre is absorbed by the
substitution ``s = b t**2`` on the innermost panel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import QuadratureError

DIVERGENCE_RATIO = 1.5
CONVERGENCE_CONTRACTION = 0.75
MAX_CIRCLE_NODES = 1 << 21
MAX_DISK_LEVELS = 3
_CHUNK = 1 << 18


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def dyadic_radii(k_max: int = 14) -> Tuple[float, ...]:
    return tuple(1.0 - 2.0**-k for k in range(1, k_max + 1))


@dataclass(frozen=True)
class GridSpec:
    """Radii, node counts and tolerance shared by the numerical procedures."""

    radii: Tuple[float, ...] = field(default_factory=dyadic_radii)
    angular_nodes: int = 512
    radial_nodes: int = 128
    rel_tol: float = 1e-6

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii or any(not (0 < r < 1) for r in radii):
            raise ValueError("radii must lie in (0, 1)")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")
        if not (_is_pow2(self.angular_nodes) and _is_pow2(self.radial_nodes)):
            raise ValueError("node counts must be powers of two")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")

    def with_overrides(self, k_max=None, angular=None, tol=None) -> "GridSpec":
        kw = {}
        if k_max is not None:
            kw["radii"] = dyadic_radii(k_max)
        if angular is not None:
            kw["angular_nodes"] = angular
        if tol is not None:
            kw["rel_tol"] = tol
        return replace(self, **kw)


class Estimate(NamedTuple):
    value: float
    error: float


# --------------------------------------------------------------------------
# circle means


def circle_mean(
    g: Callable[[np.ndarray], np.ndarray],
    r: float,
    nodes: int = 512,
    rel_tol: float = 1e-10,
    max_nodes: int = MAX_CIRCLE_NODES,
) -> Estimate:
    """``(1/2pi) int_0^2pi g(r e^{it}) dt`` by the trapezoid rule.

    Nodes double until successive levels agree to ``rel_tol`` relative to the
    mean of ``|g|``; the returned error is the last level difference.
    Complex-valued ``g`` gives a complex value.
    """
    if not 0 < r < 1:
        raise ValueError("circle_mean needs 0 < r < 1")
    if not _is_pow2(nodes):
        raise ValueError("node count must be a power of two")
    theta = 2 * np.pi * np.arange(nodes) / nodes
    vals = np.asarray(g(r * np.exp(1j * theta)))
    total = vals.sum()
    abs_total = np.abs(vals).sum()
    n = nodes
    prev = total / n
    while True:
        theta = 2 * np.pi * (np.arange(n) + 0.5) / n
        vals = np.asarray(g(r * np.exp(1j * theta)))
        total = total + vals.sum()
        abs_total = abs_total + np.abs(vals).sum()
        n *= 2
        cur = total / n
        err = abs(cur - prev)
        if err <= rel_tol * max(abs_total / n, 1e-300):
            break
        if n >= max_nodes:
            raise QuadratureError(
                f"circle mean at r={r} did not converge (difference {err:.2e} at {n} nodes)"
            )
        prev = cur
    if not np.iscomplexobj(cur):
        cur = float(cur)
    elif abs(cur.imag) <= 1e-15 * (abs_total / n) and not np.iscomplexobj(vals):
        cur = float(cur.real)
    return Estimate(cur, float(err))


# --------------------------------------------------------------------------
# polar integrals


BreakFn = Callable[[complex, np.ndarray, np.ndarray], np.ndarray]


def _gauss_legendre01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


def _polar_integral(
    g: Callable[[np.ndarray], np.ndarray],
    centre: complex,
    reach: Callable[[np.ndarray], np.ndarray],
    radial_nodes: int,
    angular_nodes: int,
    breaks: Optional[BreakFn],
) -> Tuple[float, float]:
    """``int int g(c + s e^{it}) s ds dt`` over ``0 <= s <= reach(t)``.

    Returns the integral and the same integral of ``|g|``.
    """
    theta = 2 * np.pi * np.arange(angular_nodes) / angular_nodes
    rho = reach(theta)
    if breaks is not None:
        b = np.asarray(breaks(centre, theta, rho), dtype=float)
        b = np.minimum(np.sort(b, axis=1), rho[:, None])
        edges = np.concatenate([np.zeros((theta.size, 1)), b, rho[:, None]], axis=1)
    else:
        edges = np.stack([np.zeros_like(rho), rho], axis=1)
    t, wt = _gauss_legendre01(radial_nodes)
    unit = np.exp(1j * theta)
    total = 0.0
    abs_total = 0.0
    rows_per_chunk = max(1, _CHUNK // (radial_nodes * (edges.shape[1] - 1)))
    for start in range(0, theta.size, rows_per_chunk):
        sl = slice(start, start + rows_per_chunk)
        lo = edges[sl, :-1]
        hi = edges[sl, 1:]
        length = hi - lo
        # innermost panel: s = hi * t^2 removes the s log s endpoint behaviour
        s = np.empty(lo.shape + (radial_nodes,))
        ds = np.empty_like(s)
        s[:, 0, :] = hi[:, :1] * t**2
        ds[:, 0, :] = hi[:, :1] * 2 * t * wt
        s[:, 1:, :] = lo[:, 1:, None] + length[:, 1:, None] * t
        ds[:, 1:, :] = length[:, 1:, None] * wt
        pts = centre + s * unit[sl, None, None]
        vals = np.asarray(g(pts.ravel()), dtype=float).reshape(s.shape)
        weights = s * ds
        total += float(np.sum(vals * weights))
        abs_total += float(np.sum(np.abs(vals) * weights))
    scale = 2 * np.pi / angular_nodes
    return total * scale, abs_total * scale


def _disk_reach(centre: complex):
    p = complex(centre)

    def reach(theta):
        proj = (np.conj(p) * np.exp(1j * theta)).real
        return -proj + np.sqrt(proj**2 + 1 - abs(p) ** 2)

    return reach


def _doubling(run, rel_tol: float, what: str) -> Estimate:
    prev, _ = run(0)
    for level in range(1, MAX_DISK_LEVELS + 1):
        cur, abs_cur = run(level)
        err = abs(cur - prev)
        if err <= rel_tol * max(abs(cur), abs_cur, 1e-300):
            return Estimate(cur, err)
        prev = cur
    raise QuadratureError(f"{what} did not converge under node doubling (difference {err:.2e})")


def disk_integral(
    g: Callable[[np.ndarray], np.ndarray],
    grid: GridSpec = GridSpec(),
    singularity: Optional[complex] = None,
    breaks: Optional[BreakFn] = None,
) -> Estimate:
    """``int_D g dA`` for the normalized area measure (``int_D dA = 1``).

    Parameters
    ----------
    g : callable
        Vectorized real integrand on complex points.
    grid : GridSpec
        ``radial_nodes`` Gauss-Legendre nodes per panel, ``angular_nodes``
        trapezoid nodes; both doubled until successive levels agree to
        ``rel_tol``.
    singularity : complex, optional
        Location of a logarithmic singularity; polar coordinates are centred
        there so no node comes near it.
    breaks : callable, optional
        ``breaks(centre, theta, reach)`` gives, per ray, radii where ``g`` has
        a kink; panels are split there.
    """
    centre = 0j if singularity is None else complex(singularity)
    reach = _disk_reach(centre)

    def run(level):
        k = 2**level
        val, abs_val = _polar_integral(
            g, centre, reach, grid.radial_nodes * k, grid.angular_nodes * k, breaks
        )
        return val / np.pi, abs_val / np.pi

    return _doubling(run, grid.rel_tol, "disk integral")


def disk_mean(
    g: Callable[[np.ndarray], np.ndarray],
    centre: complex,
    radius: float,
    grid: GridSpec = GridSpec(),
    breaks: Optional[BreakFn] = None,
) -> Estimate:
    """Average of ``g`` over the disk ``|w - centre| < radius`` (inside D)."""
    centre = complex(centre)
    if not (radius > 0 and abs(centre) + radius <= 1):
        raise ValueError("averaging disk must lie inside the unit disk")

    def reach(theta):
        return np.full(theta.shape, float(radius))

    def run(level):
        k = 2**level
        val, abs_val = _polar_integral(
            g, centre, reach, grid.radial_nodes * k, grid.angular_nodes * k, breaks
        )
        area = np.pi * radius**2
        return val / area, abs_val / area

    return _doubling(run, grid.rel_tol, "disk mean")


# --------------------------------------------------------------------------
# radial limits


@dataclass(frozen=True)
class RadialLimit:
    """Classification of ``v(r_k)`` as ``r_k -> 1``.

    ``verdict`` is ``convergent``, ``divergent`` or ``inconclusive``; the
    limit and its error are set only for convergent tails.
    """

    verdict: str
    limit: Optional[float]
    error: Optional[float]
    ratios: Tuple[float, ...]
    extrapolated: Optional[float] = None


def _neville_at_zero(h, vals):
    table = list(vals)
    k = len(table)
    for level in range(1, k):
        table = [
            (h[i + level] * table[i] - h[i] * table[i + 1]) / (h[i + level] - h[i])
            for i in range(k - level)
        ]
    return table[0]


def extrapolate_to_boundary(radii: Sequence[float], values: Sequence, points: int = 5):
    """Polynomial extrapolation of ``values`` in ``h = 1 - r`` to ``h = 0``.

    Neville's scheme on the last ``points`` samples; with dyadic radii this
    is repeated Richardson extrapolation. Works elementwise on array values.
    Returns ``(estimate, error)``, the error being the change from dropping
    the oldest sample.
    """
    h = 1.0 - np.asarray(radii, dtype=float)[-points:]
    vals = [np.asarray(v) for v in list(values)[-points:]]
    est = _neville_at_zero(h, vals)
    if len(vals) < 2:
        return est, np.zeros_like(est, dtype=float)
    lower = _neville_at_zero(h[1:], vals[1:])
    return est, np.abs(est - lower)


def radial_limit(values: Sequence[Tuple[float, float]]) -> RadialLimit:
    """Classify the tail of ``[(r_k, v_k)]``.

    Divergent when the last three ratios ``v_k / v_{k-1}`` are all at least
    1.5; convergent when the last three increments contract by at least
    0.75 each step (or vanish), in which case the limit is extrapolated to
    ``r = 1``; inconclusive otherwise.
    """
    if len(values) < 4:
        raise ValueError("radial_limit needs at least 4 samples")
    r = np.array([p[0] for p in values], dtype=float)
    v = np.array([p[1] for p in values], dtype=float)
    if np.any(np.diff(r) <= 0):
        raise ValueError("radii must be increasing")
    tail = v[-4:]
    if not np.all(np.isfinite(v)):
        bad = ~np.isfinite(v)
        verdict = "divergent" if bad[-1] and np.all(bad[np.argmax(bad):]) else "inconclusive"
        return RadialLimit(verdict, None, None, ())
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tuple(float(x) for x in tail[1:] / tail[:-1])
    if np.all(tail > 0) and all(x >= DIVERGENCE_RATIO for x in ratios):
        return RadialLimit("divergent", None, None, ratios)
    d = np.abs(np.diff(tail))
    scale = max(float(np.max(np.abs(tail))), 1e-300)
    contracting = all(
        d[i + 1] <= CONVERGENCE_CONTRACTION * d[i] or d[i + 1] <= 1e-14 * scale for i in range(2)
    )
    est, err = extrapolate_to_boundary(r, v)
    est, err = float(est), float(err)
    if contracting:
        return RadialLimit("convergent", est, err, ratios, est)
    return RadialLimit("inconclusive", None, None, ratios, est)


# --------------------------------------------------------------------------
# the radial moment behind the boundedness estimate


def moment_integral(m: int, n: int) -> float:
    """Closed form ``Gamma(2n+2) / (2^(2n+1) (m-n)^(2n+2))`` with exact factorials."""
    if n < 1 or m < n + 1:
        raise ValueError("moment_integral needs n >= 1 and m >= n + 1")
    return float(Fraction(math.factorial(2 * n + 1), 2 ** (2 * n + 1) * (m - n) ** (2 * n + 2)))


def moment_integral_quadrature(m: int, n: int) -> Estimate:
    """``int_0^1 r^(2(m-n-1)) (log 1/r)^(2n+1) 2r dr`` by adaptive quadrature."""
    if n < 1 or m < n + 1:
        raise ValueError("moment_integral needs n >= 1 and m >= n + 1")
    p = 2 * (m - n - 1) + 1

    def f(r):
        return 2.0 * r**p * (-math.log(r)) ** (2 * n + 1) if r > 0 else 0.0

    val, err = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=400)
    return Estimate(val, err)
