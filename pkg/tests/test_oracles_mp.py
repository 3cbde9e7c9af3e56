"""Closed forms and kernels checked against arbitrary-precision mpmath values."""
import numpy as np
import pytest

mpmath = pytest.importorskip("mpmath")

from hardyops.criteria import lemma32_rhs
from hardyops.kernels import KernelSpec, derivative_at, reproduce
from hardyops.quadrature import moment_integral
from hardyops.series import PowerSeries


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("gap", [1, 2, 5, 10])
def test_moment_integral_against_mp_quad(n, gap):
    m = n + gap
    with mpmath.workdps(40):
        ref = mpmath.quad(
            lambda r: 2 * r ** (2 * (m - n - 1) + 1) * mpmath.log(1 / r) ** (2 * n + 1), [0, 1]
        )
    assert moment_integral(m, n) == pytest.approx(float(ref), rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("x", [0.0, 0.1, 0.25, 0.5, 0.9])
def test_series_closed_form_against_mp_sum(n, x):
    with mpmath.workdps(40):
        ref = mpmath.nsum(lambda j: (mpmath.ff(n + j, n)) ** 2 * mpmath.mpf(x) ** j, [0, mpmath.inf])
    assert lemma32_rhs(n, x) == pytest.approx(float(ref), rel=1e-13)


def test_derivative_evaluation_against_mp_polyval():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(40):
        c = rng.normal(size=31) + 1j * rng.normal(size=31)
        f = PowerSeries(c)
        w = complex(0.95 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))
        n = int(rng.integers(0, 4))
        with mpmath.workdps(50):
            coeffs = [mpmath.mpc(v.real, v.imag) for v in c]
            d = [coeffs[m] * mpmath.ff(m, n) for m in range(n, 31)]
            ref = complex(mpmath.polyval(d[::-1], mpmath.mpc(w.real, w.imag)))
        worst = max(worst, abs(derivative_at(f, n, w) - ref), abs(reproduce(f, KernelSpec(w, n)) - ref))
    assert worst < 1e-12
