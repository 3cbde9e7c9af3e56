"""Numerical diagnostics for boundedness, compactness and the Hilbert-Schmidt
property of ``D_{phi,n}``, and checks of the supporting inequalities.

Asymptotic statements cannot be decided from finitely many radii, so every
verdict is a trend label (``...-consistent``) computed from a published rule
and shipped with its raw evidence.

Trend rules on the last four samples ``q_1..q_4`` of a statistic, with
``rho_i = q_{i+1} / q_i``:

* bounded: every ``rho_i < 1.1``, or the tail is identically zero;
* unbounded: every ``rho_i >= 1.5``;
* compact: every ``rho_i < 0.9`` and ``q_4 < 1e-3`` times the first positive
  sample, or the tail is identically zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import optimize

from ._parallel import ordered_map
from .errors import NotUnivalent, PreconditionFailure, UnsupportedMap
from .kernels import derivative_at
from .maps import SelfMap
from .nevanlinna import counting_function, counting_integral
from .operators import OperatorHandle, kernel_image_norm_sq
from .quadrature import GridSpec, RadialLimit, circle_mean, radial_limit
from .series import PowerSeries, h2_norm_sq

BOUNDED = "bounded-consistent"
COMPACT = "compact-consistent"
UNBOUNDED = "unbounded-consistent"
INCONCLUSIVE = "inconclusive"
HS = "HS-consistent"
NOT_HS = "not-HS-consistent"

BOUNDED_RATIO = 1.1
GROWTH_RATIO = 1.5
DECAY_RATIO = 0.9
DECAY_FACTOR = 1e-3
Q_NODES = 256
BETA_SCAN = 1024


@dataclass(frozen=True)
class Diagnostic:
    verdict: str
    evidence: Tuple[Tuple[float, float], ...]
    criterion: str
    parameters: Tuple[str, int]
    ratios: Tuple[float, ...] = ()


def _tail_ratios(values: Sequence[float]) -> Tuple[float, ...]:
    tail = np.asarray(values[-4:], dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return tuple(float(x) for x in tail[1:] / tail[:-1])


def trend(values: Sequence[float]) -> dict:
    """Evaluate the three trend rules; keys ``bounded``, ``unbounded``, ``compact``."""
    if len(values) < 4:
        raise ValueError("trend rules need at least 4 radii")
    tail = np.asarray(values[-4:], dtype=float)
    zero_tail = bool(np.all(tail == 0))
    ratios = _tail_ratios(values)
    finite = all(math.isfinite(x) for x in ratios)
    positive = [v for v in values if v > 0 and math.isfinite(v)]
    bounded = zero_tail or (finite and all(x < BOUNDED_RATIO for x in ratios))
    unbounded = bool(np.all(tail > 0)) and finite and all(x >= GROWTH_RATIO for x in ratios)
    compact = zero_tail or (
        finite
        and all(x < DECAY_RATIO for x in ratios)
        and bool(positive)
        and tail[-1] < DECAY_FACTOR * positive[0]
    )
    return {"bounded": bounded, "unbounded": unbounded, "compact": compact, "ratios": ratios}


def _boundedness_verdict(rules: dict) -> str:
    if rules["unbounded"]:
        return UNBOUNDED
    if rules["bounded"]:
        return BOUNDED
    return INCONCLUSIVE


def _compactness_verdict(rules: dict) -> str:
    if rules["compact"]:
        return COMPACT
    return _boundedness_verdict(rules)


def _circle_max(stat, r: float) -> float:
    """Max of ``stat`` over 256 equispaced angles, refined once to 512."""
    best = -math.inf
    for nodes in (Q_NODES, 2 * Q_NODES):
        theta = 2 * np.pi * np.arange(nodes) / nodes
        best = max(best, float(np.max(stat(r * np.exp(1j * theta)))))
    return best


def _require_counting(phi: SelfMap):
    if not phi.supports_preimages:
        raise UnsupportedMap(f"{phi.label} has no preimage solver")


def q_statistic(op: OperatorHandle, r: float) -> float:
    """``max_theta N_phi(r e^{i theta}) / (log 1/r)^(2n+1)``."""
    phi = op.phi
    scale = math.log(1.0 / r) ** (2 * op.n + 1)

    def stat(w):
        vals, _ = phi.counting_batch(w)
        return vals / scale

    return _circle_max(stat, r)


def _q_evidence(op: OperatorHandle, grid: GridSpec):
    _require_counting(op.phi)
    vals = ordered_map(lambda r: q_statistic(op, r), grid.radii)
    return tuple(zip(grid.radii, vals))


def boundedness_diagnostic(op: OperatorHandle, grid: GridSpec = GridSpec()) -> Diagnostic:
    """Trend of ``Q(r) = max N_phi / (log 1/r)^(2n+1)`` on circles ``|w| = r``."""
    ev = _q_evidence(op, grid)
    rules = trend([v for _, v in ev])
    return Diagnostic(
        _boundedness_verdict(rules), ev, "boundedness", (op.phi.label, op.n), rules["ratios"]
    )


def compactness_diagnostic(op: OperatorHandle, grid: GridSpec = GridSpec()) -> Diagnostic:
    """Same statistic as :func:`boundedness_diagnostic`, tested for decay to 0."""
    ev = _q_evidence(op, grid)
    rules = trend([v for _, v in ev])
    return Diagnostic(
        _compactness_verdict(rules), ev, "compactness", (op.phi.label, op.n), rules["ratios"]
    )


def univalent_ratio_diagnostic(op: OperatorHandle, grid: GridSpec = GridSpec()) -> Diagnostic:
    """Trend of ``max_theta (1 - r) / (1 - |phi(r e^{i theta})|)^(2n+1)``.

    For univalent maps a finite supremum means bounded and a zero limit
    means compact.
    """
    phi = op.phi
    if not phi.univalent:
        raise NotUnivalent(f"{phi.label} is not univalent")
    p = 2 * op.n + 1

    def at(r):
        return _circle_max(lambda z: (1.0 - r) / (1.0 - np.abs(phi(z))) ** p, r)

    vals = ordered_map(at, grid.radii)
    ev = tuple(zip(grid.radii, vals))
    rules = trend(vals)
    return Diagnostic(
        _compactness_verdict(rules), ev, "univalent-ratio", (phi.label, op.n), rules["ratios"]
    )


@dataclass(frozen=True)
class HSResult:
    verdict: str
    limit_value: float | None
    evidence: Tuple[Tuple[float, float], ...]
    radial: RadialLimit


def hs_integrand_mean(op: OperatorHandle, r: float, nodes: int = 512) -> float:
    """``I(r)``: circle mean of ``(1 - |phi|^2)^(-(2n+1))``."""
    p = 2 * op.n + 1
    return circle_mean(lambda z: (1.0 - np.abs(op.phi(z)) ** 2) ** -p, r, nodes).value


def hs_criterion(op: OperatorHandle, grid: GridSpec = GridSpec()) -> HSResult:
    """Classify ``lim_r I(r)``: finite means Hilbert-Schmidt."""
    vals = ordered_map(lambda r: hs_integrand_mean(op, r, grid.angular_nodes), grid.radii)
    ev = tuple(zip(grid.radii, vals))
    lim = radial_limit(ev)
    verdict = {"convergent": HS, "divergent": NOT_HS}.get(lim.verdict, INCONCLUSIVE)
    return HSResult(verdict, lim.limit, ev, lim)


# --------------------------------------------------------------------------
# the two lemmas behind the HS criterion


def leibniz_alphas(n: int) -> Tuple[float, ...]:
    """``alpha_k = (n!)^2 (n+k)! / ((k!)^2 (n-k)!)`` for ``k = 0..n``."""
    f = math.factorial
    return tuple(
        float(f(n) ** 2 * f(n + k) // (f(k) ** 2 * f(n - k))) for k in range(n + 1)
    )


def _beta_poly(alphas, n):
    a = np.asarray(alphas, dtype=float)
    k = np.arange(n + 1)

    def p(t):
        t = np.asarray(t, dtype=float)[..., None]
        # numpy gives 0.0**0 == 1.0, matching the 0^0 = 1 convention
        return np.sum(a * t**k * (1.0 - t) ** (n - k), axis=-1)

    return p


def lemma31_beta(alphas: Sequence[float], n: int) -> float:
    """``min_{[0,1]} sum_k alpha_k t^k (1-t)^(n-k)``: grid scan plus golden section."""
    p = _beta_poly(alphas, n)
    t = np.linspace(0.0, 1.0, BETA_SCAN + 1)
    vals = p(t)
    i = int(np.argmin(vals))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, BETA_SCAN)]
    res = optimize.minimize_scalar(
        lambda s: float(p(s)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
    )
    return float(min(vals[i], res.fun))


@dataclass(frozen=True)
class Lemma31Bounds:
    value: float
    lower: float
    upper: float
    beta: float


def lemma31_bounds(alphas: Sequence[float], n: int, x: float) -> Lemma31Bounds:
    """Bracket ``sum_k alpha_k x^k / (1-x)^(n+k+1)`` between
    ``beta / (1-x)^(2n+1)`` and ``sum(alpha) / (1-x)^(2n+1)``."""
    alphas = [float(a) for a in alphas]
    if len(alphas) != n + 1:
        raise ValueError("need exactly n + 1 coefficients alpha_0..alpha_n")
    if any(not a > 0 for a in alphas):
        raise ValueError("coefficients must be positive")
    if not 0 <= x < 1:
        raise PreconditionFailure("lemma bounds need 0 <= x < 1")
    value = math.fsum(a * x**k / (1 - x) ** (n + k + 1) for k, a in enumerate(alphas))
    # x itself is a point of [0, 1], so it may only sharpen the minimum
    beta = min(lemma31_beta(alphas, n), float(_beta_poly(alphas, n)(x)))
    scale = (1 - x) ** (2 * n + 1)
    lower, upper = beta / scale, math.fsum(alphas) / scale
    slack = 1e-12 * value
    assert lower <= value + slack and value <= upper + slack, (lower, value, upper)
    return Lemma31Bounds(value, lower, upper, beta)


@dataclass(frozen=True)
class Lemma32Result:
    lhs_partial: float
    rhs_closed: float
    residual: float
    terms: int


def lemma32_rhs(n: int, x: float) -> float:
    return math.fsum(a * x**k / (1 - x) ** (n + k + 1) for k, a in enumerate(leibniz_alphas(n)))


def lemma32_identity(n: int, x: float, tol: float = 1e-12, max_terms: int = 200000) -> Lemma32Result:
    """``sum_{m>=n} [m!/(m-n)!]^2 x^(m-n)`` summed until past its peak and the
    next term is below ``tol (1-x)`` of the sum, against the closed form."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= x < 1:
        raise PreconditionFailure("identity needs 0 <= x < 1")
    terms = []
    prev = 0.0
    for j in range(max_terms):
        m = n + j
        t = float(math.perm(m, n) ** 2) * x**j
        terms.append(t)
        if j > 0 and t <= prev and t <= tol * (1 - x) * math.fsum(terms):
            break
        prev = t
    else:
        raise PreconditionFailure(f"series did not settle within {max_terms} terms at x={x}")
    lhs = math.fsum(terms)
    rhs = lemma32_rhs(n, x)
    return Lemma32Result(lhs, rhs, abs(lhs - rhs) / rhs, len(terms))


@dataclass(frozen=True)
class HSBracket:
    lower: float
    upper: float
    integral_limit: float
    beta: float
    alpha_sum: float


def hs_bracket(op: OperatorHandle, grid: GridSpec = GridSpec()) -> HSBracket:
    """Bounds on the HS sum from the pointwise bracket applied at ``x = |phi|^2``.

    The HS sum equals the boundary mean of the closed form at ``|phi|^2``,
    so integrating the pointwise bounds gives ``beta I`` and ``sum(alpha) I``
    with ``I`` the limit from :func:`hs_criterion`.
    """
    res = hs_criterion(op, grid)
    if res.limit_value is None:
        raise PreconditionFailure(f"HS integral is {res.verdict}; no finite bracket")
    alphas = leibniz_alphas(op.n)
    beta = lemma31_beta(alphas, op.n)
    s = math.fsum(alphas)
    return HSBracket(beta * res.limit_value, s * res.limit_value, res.limit_value, beta, s)


def kappa(n: int) -> float:
    """``max_{x >= n+1} [x (x-1) ... (x-n+1)]^2 / (x-n)^(2n)``."""
    if n < 1:
        raise ValueError("n must be at least 1")

    def g(x):
        num = 1.0
        for i in range(n):
            num *= x - i
        return num**2 / (x - n) ** (2 * n)

    # g decreases to 1 at infinity; scan a log grid and refine the best cell
    xs = (n + 1) * np.logspace(0, 6, 2001)
    vals = np.array([g(x) for x in xs])
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    res = optimize.minimize_scalar(lambda x: -g(x), bounds=(lo, hi), method="bounded")
    return float(max(vals[i], -res.fun, 1.0))


# --------------------------------------------------------------------------
# the kernel chain and the pointwise derivative bound


def _pseudo_hyperbolic(a: complex, z: complex) -> float:
    return abs((a - z) / (1 - a.conjugate() * z))


@dataclass(frozen=True)
class ChainReport:
    A: float
    B: float
    C: float
    gap_exact: float
    holds: bool


def chain_check(
    op: OperatorHandle, lam: complex, grid: GridSpec = GridSpec(), tol: float = 1e-6
) -> ChainReport:
    """Lower bounds for ``||D_{phi,n} f_lam||^2``, ``f_lam`` the normalized kernel.

    ``A`` is the norm itself, ``B`` the area term of the Littlewood-Paley
    formula for ``f_lam^(n) o phi`` and ``C`` the counting-function bound at
    ``lam``. ``gap_exact`` is the closed form of ``A - B``.
    """
    phi, n = op.phi, op.n
    lam = complex(lam)
    _require_counting(phi)
    if not abs(lam) < 1:
        raise PreconditionFailure("lambda must lie in the open disk")
    if _pseudo_hyperbolic(phi.at_zero, lam) <= 0.5:
        raise PreconditionFailure(
            f"lambda={lam} is within pseudo-hyperbolic distance 1/2 of phi(0)"
        )
    s = 1.0 - abs(lam) ** 2
    fn1 = math.factorial(n + 1) ** 2 * abs(lam) ** (2 * n + 2)
    A = kernel_image_norm_sq(op, lam).value
    B = 2.0 * counting_integral(
        phi, grid, weight=lambda w: fn1 * s / np.abs(1 - lam.conjugate() * w) ** (2 * n + 4)
    ).value
    N = counting_function(phi, lam).value
    C = fn1 * N / (2 ** (2 * n + 1) * s ** (2 * n + 1))
    gap = abs(
        math.factorial(n) * lam.conjugate() ** n * math.sqrt(s)
        / (1 - lam.conjugate() * phi.at_zero) ** (n + 1)
    ) ** 2
    return ChainReport(A, B, C, gap, A >= B - tol and B >= C - tol)


@dataclass(frozen=True)
class GrowthReport:
    value: float
    bound: float
    holds: bool


def derivative_growth_check(f: PowerSeries, n: int, z: complex) -> GrowthReport:
    """``|f^(n)(z)| <= n! ||f|| / (1 - |z|)^(n+1)``."""
    z = complex(z)
    if not abs(z) < 1:
        raise PreconditionFailure("z must lie in the open disk")
    value = abs(derivative_at(f, n, z))
    bound = math.factorial(n) * math.sqrt(h2_norm_sq(f)) / (1 - abs(z)) ** (n + 1)
    return GrowthReport(value, bound, value <= bound * (1 + 1e-12))
