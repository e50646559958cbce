import numpy as np
import pytest
import scipy.special as sp

from hyperdual.errors import GammaPole
from hyperdual.special import gamma, log_gamma


def test_gamma_matches_scipy_grid():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(3000):
        z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(z.imag) < 5e-2 and z.real < 0.5 and abs(z.real - round(z.real)) < 5e-2:
            continue
        rel = abs(gamma(z) - sp.gamma(z)) / abs(sp.gamma(z))
        worst = max(worst, rel)
    assert worst < 1e-12


def test_gamma_real_values():
    assert abs(gamma(5.0) - 24.0) < 1e-12
    assert abs(gamma(0.5) - np.sqrt(np.pi)) < 1e-13


def test_gamma_pole():
    with pytest.raises(GammaPole):
        gamma(0.0)
    with pytest.raises(GammaPole):
        gamma(-3.0)


def test_log_gamma_exponentiates():
    for z in (1.7 + 0.3j, -0.4 + 2j, 4.2 - 1.1j):
        assert abs(np.exp(log_gamma(z)) - sp.gamma(z)) < 1e-12 * abs(sp.gamma(z))
