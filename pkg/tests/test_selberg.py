import cmath
import math

import numpy as np
import pytest
import scipy.special as sp

from hyperdual.errors import GammaPole
from hyperdual.quadrature import QuadratureConfig
from hyperdual.selberg import SelbergParams, selberg_closed, selberg_numeric


def closed_form_oracle(l, m, kappa):
    """Independent evaluation of the product formula via scipy."""
    total = kappa ** (l * (l - 1 - m) / kappa)
    for j in range(l):
        total *= (-2j * math.pi * sp.gamma(1 - 1 / kappa)) / (
            sp.gamma(1 + (m - j) / kappa) * sp.gamma(1 - (j + 1) / kappa)
        )
    return total


def test_closed_l0():
    assert selberg_closed(SelbergParams(0, 0.7, 2.5)) == 1.0


def test_closed_l1_cancellation():
    # the j = 0 factors Gamma(1 - 1/kappa) cancel, leaving
    # kappa^(-m/kappa) (-2 pi i) / Gamma(1 + m/kappa)
    for kappa, m in ((2.5, 0.7), (3.7, 1.4 + 0.3j)):
        got = selberg_closed(SelbergParams(1, m, kappa))
        expect = kappa ** (-m / kappa) * (-2j * math.pi) / sp.gamma(1 + m / kappa)
        assert abs(got - expect) < 1e-12 * abs(expect)


@pytest.mark.parametrize("l,kappa,m", [
    (1, 2.5, 0.7), (2, 2.5, 0.7), (3, 2.5, 0.7),
    (2, 3.7, 1.4 + 0.3j),
])
def test_closed_matches_oracle(l, kappa, m):
    got = selberg_closed(SelbergParams(l, m, kappa))
    expect = closed_form_oracle(l, m, kappa)
    assert abs(got - expect) < 1e-11 * abs(expect)


def test_numeric_l0():
    res = selberg_numeric(SelbergParams(0, 0.7, 2.5))
    assert res.value == 1.0


def test_numeric_matches_closed_l1():
    p = SelbergParams(1, 0.7, 2.5)
    cfg = QuadratureConfig(nodes=16, refinements=3, target_rel_err=1e-10,
                           strict=False)
    res = selberg_numeric(p, cfg)
    assert abs(res.value - selberg_closed(p)) / abs(selberg_closed(p)) < 1e-8


def test_numeric_matches_closed_l2():
    p = SelbergParams(2, 0.7, 2.5)
    cfg = QuadratureConfig(nodes=12, refinements=2, target_rel_err=1e-7,
                           strict=False)
    res = selberg_numeric(p, cfg)
    assert abs(res.value - selberg_closed(p)) / abs(selberg_closed(p)) < 1e-6


def test_gamma_pole_detection():
    # 1 - (j+1)/kappa hits 0 at j = 1 for kappa = 2 exactly
    with pytest.raises(GammaPole):
        SelbergParams(2, 0.7, 2.0)


def test_desk_scale_cap():
    with pytest.raises(ValueError):
        selberg_numeric(SelbergParams(5, 0.7, 2.7))


def test_derivative_in_m_matches_digamma():
    # d/dm log J_l = -(l/kappa) log kappa - (1/kappa) sum_j psi(1+(m-j)/kappa)
    l, kappa, m = 2, 2.5, 0.7
    h = 1e-6

    def logj(mm):
        return cmath.log(selberg_closed(SelbergParams(l, mm, kappa)))

    fd = (logj(m + h) - logj(m - h)) / (2 * h)
    expect = -(l / kappa) * math.log(kappa) - (1 / kappa) * sum(
        sp.digamma(1 + (m - j) / kappa) for j in range(l)
    )
    assert abs(fd - expect) / abs(expect) < 1e-6
