"""Finite-truncation realizations of ``D_{phi,n} f = f^(n) o phi``.

The operator is probed on the monomial basis. Column norms
``||D z^m||^2 = (m!/(m-n)!)^2 ||phi^(m-n)||^2`` and the Gram entries
``<D z^m, D z^m'>`` come from circle means of powers of ``phi`` at the grid
radii, extrapolated to ``r = 1``. Each power is averaged at the coarsest
node level where two successive levels agree, independently of how many
columns are requested, so a smaller Gram matrix is always a principal
submatrix of a larger one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg

from . import backend
from ._parallel import ordered_map
from .errors import NumericalError, PreconditionFailure, ToleranceFailure
from .kernels import normalized_kernel, tail_order
from .maps import SelfMap, require_self_map, to_series
from .quadrature import Estimate, GridSpec, extrapolate_to_boundary, radial_limit
from .series import PowerSeries, compose, derivative, falling_factorial

POWER_TOL = 1e-12
MAX_LEVELS = 12
EXTRAPOLATION_POINTS = 5


@dataclass(frozen=True)
class OperatorHandle:
    """``D_{phi,n}``; the map is validated as a self-map on construction."""

    phi: SelfMap
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("derivative order n must be a positive integer")
        require_self_map(self.phi)

    @property
    def label(self) -> str:
        return f"{self.phi.label} n={self.n}"


def column_factor(m: int, n: int) -> float:
    """``m (m-1) ... (m-n+1)``."""
    return float(falling_factorial(m, n))


def apply(op: OperatorHandle, f: PowerSeries, M_out: int) -> PowerSeries:
    """Coefficients ``0..M_out`` of ``f^(n) o phi``."""
    if f.truncation_order < M_out + op.n:
        raise PreconditionFailure(
            f"input truncated at {f.truncation_order}, need at least {M_out + op.n}"
        )
    # coefficients 0..M_out of the composition only involve phi up to M_out
    phi = to_series(op.phi, M_out, tail_tol=None)
    return compose(derivative(f, op.n), phi, M_out)


# --------------------------------------------------------------------------
# circle moments of powers of phi


def _nodes_values(phi: SelfMap, r: float, nodes: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(nodes) / nodes
    return phi(r * np.exp(1j * theta))


def _power_levels(phi: SelfMap, r: float, J: int, base_nodes: int):
    """Per power ``j <= J``: the node count at which ``mean |phi|^(2j)``
    settled and the settled value."""
    level_of = np.full(J + 1, -1)
    value = np.zeros(J + 1)
    prev = backend.power_means(np.abs(_nodes_values(phi, r, base_nodes)) ** 2, J)
    nodes = base_nodes
    for _ in range(MAX_LEVELS):
        nodes *= 2
        cur = backend.power_means(np.abs(_nodes_values(phi, r, nodes)) ** 2, J)
        fresh = (level_of < 0) & (np.abs(cur - prev) <= POWER_TOL * np.abs(cur) + 1e-300)
        level_of[fresh] = nodes
        value[fresh] = cur[fresh]
        if np.all(level_of >= 0):
            return level_of, value
        prev = cur
    raise NumericalError(f"circle means of powers of phi did not settle at r={r}")


def _moment_radii(grid: GridSpec) -> Tuple[float, ...]:
    radii = grid.radii[-EXTRAPOLATION_POINTS:]
    if len(radii) < 4:
        raise ValueError("column norms need at least 4 grid radii")
    return radii


def _column_moments(op: OperatorHandle, M: int, grid: GridSpec):
    radii = _moment_radii(grid)
    J = M - op.n
    per_radius = ordered_map(
        lambda r: _power_levels(op.phi, r, J, grid.angular_nodes), radii
    )
    return radii, per_radius


def column_norms_sq(op: OperatorHandle, M: int, grid: GridSpec = GridSpec()) -> np.ndarray:
    """``||D_{phi,n} z^m||^2`` for ``m = n..M``."""
    if M < op.n:
        raise ValueError("M must be at least n")
    radii, per_radius = _column_moments(op, M, grid)
    table = np.array([vals for _, vals in per_radius])  # radius x power
    out = np.empty(M - op.n + 1)
    for j in range(M - op.n + 1):
        lim = radial_limit(list(zip(radii, table[:, j])))
        if lim.verdict == "divergent":
            raise NumericalError(f"||phi^{j}|| diverges along the radii")
        est = lim.limit if lim.limit is not None else lim.extrapolated
        m = j + op.n
        out[j] = column_factor(m, op.n) ** 2 * max(est, 0.0)
    return out


def column_norm_sq(op: OperatorHandle, m: int, grid: GridSpec = GridSpec()) -> float:
    """``(m!/(m-n)!)^2 lim_r mean_r |phi|^(2(m-n))``."""
    if m < op.n:
        raise ValueError("column index m must be at least n")
    return float(column_norms_sq(op, m, grid)[-1])


def hs_partial_sum(op: OperatorHandle, M: int, grid: GridSpec = GridSpec()) -> float:
    """``sum_{m=n}^{M} ||D_{phi,n} z^m||^2``; nondecreasing in ``M``."""
    total = 0.0
    for v in column_norms_sq(op, M, grid):
        total += v
    return total


class HSSum(NamedTuple):
    M: int
    value: float
    converged: bool
    partial_sums: np.ndarray
    columns: np.ndarray


def hs_sum_adaptive(
    op: OperatorHandle,
    grid: GridSpec = GridSpec(),
    tol: float = 1e-8,
    window: int = 16,
    cap: int = 4096,
) -> HSSum:
    """Smallest ``M`` whose last ``window`` increments are each below
    ``tol`` times the partial sum, searched up to ``cap``."""
    M = max(64, op.n + window)
    while True:
        M = min(M, cap)
        cols = column_norms_sq(op, M, grid)
        sums = np.cumsum(cols)
        rel = cols / np.maximum(sums, 1e-300)
        small = rel < tol
        run = 0
        for idx, ok in enumerate(small):
            run = run + 1 if ok else 0
            if run >= window:
                return HSSum(idx + op.n, float(sums[idx]), True, sums[: idx + 1], cols[: idx + 1])
        if M >= cap:
            return HSSum(M, float(sums[-1]), False, sums, cols)
        M *= 2


# --------------------------------------------------------------------------
# Gram matrices and norm lower bounds


@dataclass(frozen=True)
class GramMatrix:
    """``G[i, k] = <D z^(n+i), D z^(n+k)>`` for ``n <= n+i, n+k <= M``."""

    n: int
    M: int
    entries: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.sum(np.real(np.diag(self.entries))))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def _gram_at_radius(phi: SelfMap, r: float, levels: np.ndarray, diag: np.ndarray):
    J = levels.size - 1
    G = np.zeros((J + 1, J + 1), dtype=np.complex128)
    for nodes in np.unique(levels):
        rows = np.nonzero(levels == nodes)[0]
        top = int(rows.max())
        vals = _nodes_values(phi, r, int(nodes))
        P = np.empty((top + 1, vals.size), dtype=np.complex128)
        P[0] = 1.0
        for j in range(1, top + 1):
            P[j] = P[j - 1] * vals
        # one product per row, shaped by the row alone, so entries do not
        # depend on how many columns were requested
        Pc = P.conj()
        for j in rows:
            G[j, : j + 1] = (Pc[: j + 1] @ P[j]) / vals.size
    G = np.tril(G, -1)
    G = G + G.conj().T
    G[np.diag_indices(J + 1)] = diag
    return G


def gram_matrix(op: OperatorHandle, M: int, grid: GridSpec = GridSpec()) -> GramMatrix:
    """Gram matrix of the images of ``z^n .. z^M``.

    The diagonal is exactly :func:`column_norms_sq`, so the trace equals
    :func:`hs_partial_sum`.
    """
    if M < op.n:
        raise ValueError("M must be at least n")
    radii, per_radius = _column_moments(op, M, grid)
    mats = ordered_map(
        lambda item: _gram_at_radius(op.phi, item[0], item[1][0], item[1][1]),
        list(zip(radii, per_radius)),
    )
    G, _ = extrapolate_to_boundary(radii, mats)
    c = np.array([column_factor(m, op.n) for m in range(op.n, M + 1)])
    G = G * np.outer(c, c)
    G = 0.5 * (G + G.conj().T)
    G[np.diag_indices(c.size)] = column_norms_sq(op, M, grid)
    return GramMatrix(op.n, M, G)


def norm_lower_bound(op: OperatorHandle, M: int, grid: GridSpec = GridSpec()) -> float:
    """``sqrt(lambda_max)`` of the Gram matrix: ``||D_{phi,n}||`` restricted to
    polynomials of degree at most ``M``.

    Leading blocks of the Gram matrix are exactly the Gram matrices for
    smaller ``M``, so by interlacing their top eigenvalues never exceed the
    full one. Taking the maximum over every leading block keeps that ordering
    intact under eigensolver rounding, making the bound nondecreasing in
    ``M`` bit for bit. The cost is ``O(M^4)`` rather than ``O(M^3)``.
    """
    G = gram_matrix(op, M, grid).entries
    top = 0.0
    for k in range(1, G.shape[0] + 1):
        lam = linalg.eigvalsh(G[:k, :k], subset_by_index=[k - 1, k - 1])[0]
        top = max(top, float(lam))
    return math.sqrt(top)


# --------------------------------------------------------------------------
# kernel test functions


def kernel_image_norm_sq(
    op: OperatorHandle,
    lam: complex,
    M: Optional[int] = None,
    tol: float = 1e-14,
    cap: int = 16384,
) -> Estimate:
    """``||D_{phi,n}(K_lam / ||K_lam||)||^2`` from the composed series.

    With ``M`` given the series is cut there; otherwise ``M`` doubles until
    the last quarter of the coefficients carries less than ``tol`` of the
    norm. The returned error is that tail mass.
    """
    lam = complex(lam)
    if not abs(lam) < 1:
        raise PreconditionFailure("kernel point must lie in the open disk")

    def run(order):
        f = normalized_kernel(lam, order + op.n)
        c = apply(op, f, order).coefficients
        mass = np.abs(c) ** 2
        return float(np.sum(mass)), float(np.sum(mass[-(order // 4 + 1) :]))

    if M is not None:
        value, tail = run(M)
        return Estimate(value, tail)
    order = max(64, min(cap, tail_order(lam, tol)))
    while True:
        value, tail = run(order)
        if tail <= tol * max(value, 1e-300):
            return Estimate(value, tail)
        if order >= cap:
            raise ToleranceFailure(
                f"kernel image series still has tail {tail:.2e} at order {order}"
            )
        order = min(2 * order, cap)
