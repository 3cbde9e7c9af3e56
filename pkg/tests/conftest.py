import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hardyops.maps import Affine, Blaschke, Contact, Mobius, Monomial, Poly

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def catalog():
    """Maps with preimage support used across the suites."""
    return [
        Affine(0.5, 0.0),
        Affine(0.3, 0.4),
        Monomial(2),
        Monomial(3),
        Mobius(0.5),
        Mobius(0.3 + 0.4j),
        Blaschke((0.5, -0.5)),
        Blaschke((0.3, 0.2j)),
    ]


def random_poly(rng, max_degree):
    from hardyops.series import PowerSeries

    d = int(rng.integers(0, max_degree + 1))
    return PowerSeries(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


__all__ = ["catalog", "random_poly", "Affine", "Blaschke", "Contact", "Mobius", "Monomial", "Poly"]
