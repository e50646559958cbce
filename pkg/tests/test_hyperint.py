import cmath
import math

import numpy as np
import pytest
import scipy.special as sp

from hyperdual.errors import GeometryError
from hyperdual.hyperint import (
    constant_Cb,
    corollary_ratio,
    duality_gap,
    integral_I,
    integral_K,
    matrix_Ihat,
)
from hyperdual.model import validate_weight_data
from hyperdual.quadrature import QuadratureConfig

WD12 = validate_weight_data(2.3, 1, 1.3, 2, 2.5)
Z = 1 + 2j
CFG1 = QuadratureConfig(nodes=16, refinements=3, target_rel_err=1e-9,
                        strict=False)
CFG2 = QuadratureConfig(nodes=10, refinements=3, target_rel_err=1e-7,
                        strict=False)


def test_constant_l2_zero_is_one():
    wd = validate_weight_data(2.3, 1, 3.3, 0, 2.5)
    assert constant_Cb(0, wd) == 1.0


def test_constant_b0_l2_one_formula():
    # independent recomputation via scipy for the b=0, l2=1 case
    wd = validate_weight_data(2.3, 2, 2.3, 2, 2.5)
    kappa, m1, l1 = wd.kappa, wd.m1, wd.l1
    wd1 = validate_weight_data(m1, 1, m1, 1, kappa)
    got = constant_Cb(0, wd1)
    expect = (
        kappa ** ((m1 + 1) / kappa)
        / (2j * sp.gamma(-1 / kappa))
        / math.sin(math.pi / kappa)
        * sp.gamma(1 + m1 / kappa) / sp.gamma(1 + 1 / kappa)
    )
    assert abs(got - expect) < 1e-12 * abs(expect)


def test_constant_generic_case_oracle():
    # kappa=2.5, b=1, l2=2, m1=2.3, l1=1.3 against a direct scipy product
    wd = WD12
    kappa, m1, l1, l2, b = wd.kappa, wd.m1, wd.l1, wd.l2, 1
    expect = (
        kappa ** ((l1 + 1) * l2 / kappa)
        * cmath.exp(-1j * math.pi * b * l2 / kappa)
        * (2j * sp.gamma(-1 / kappa)) ** (-l2)
    )
    for j in range(b):
        expect /= math.sin(math.pi * (j + 1) / kappa)
    for j in range(l2 - b):
        expect /= math.sin(math.pi * (j + 1) / kappa)
    for j in range(l2):
        expect *= sp.gamma(1 + (m1 - j) / kappa) / sp.gamma(1 + (j + 1) / kappa)
    got = constant_Cb(b, wd)
    assert abs(got - expect) < 1e-12 * abs(expect)


def test_integral_l2_zero_is_one():
    wd = validate_weight_data(2.3, 1, 3.3, 0, 2.5)
    res = integral_I(0, 0, Z, wd)
    assert res.value == 1.0


def test_k_is_i_over_constant():
    k = integral_K(0, 1, Z, WD12, CFG2)
    i = integral_I(0, 1, Z, WD12, CFG2)
    c = constant_Cb(1, WD12)
    assert abs(i.value - c * k.value) < 1e-12 * abs(i.value)


def test_requires_upper_half_plane():
    with pytest.raises(GeometryError):
        integral_K(0, 0, 1 - 2j, WD12, CFG2)


def test_fixed_point_of_swap():
    # (m2, l2) = (1, 1) with m1 = l1: both sides are literally the same
    wd = validate_weight_data(2.3, 1, 2.3, 1, 2.5)
    rep = duality_gap(Z, wd, CFG1)
    assert rep.max_rel_err < 1e-12


def test_duality_small_case():
    rep = duality_gap(Z, WD12, CFG2)
    assert rep.passed and rep.max_rel_err < 1e-5


def test_matrix_shape_and_entries():
    mat = matrix_Ihat(Z, WD12, CFG2)
    assert mat.entries.shape == (2, 2)
    single = integral_I(1, 0, Z, WD12, CFG2)
    assert abs(mat.entries[1, 0] - single.value) < 1e-12 * abs(single.value)


def test_corollary_ratio_consistent_with_constants():
    # the closed-form ratio must equal the ratio of the normalizing
    # constants (the two routes from the duality identity)
    for (m1, m2, l1, l2) in [(2.3, 1, 1.3, 2), (2.3, 2, 1.3, 3),
                             (3.3, 1, 1.3, 3), (2.3 + 0.5j, 2, 1.3 + 0.5j, 3)]:
        wd = validate_weight_data(m1, m2, l1, l2, 2.5)
        for b in range(min(m2, l2) + 1):
            lhs = corollary_ratio(b, wd)
            rhs = constant_Cb(b, wd.swap()) / constant_Cb(b, wd)
            assert abs(lhs - rhs) < 1e-11 * abs(rhs)


def test_corollary_trivial_symmetric_case():
    wd = validate_weight_data(2.3, 1, 2.3, 1, 2.5)
    assert abs(corollary_ratio(0, wd) - 1.0) < 1e-13


def test_corollary_b1_has_sign_flip_phase():
    # b=1, (m2,l2)=(1,2): phase exp(pi i (l2-m2)/kappa) on the Selberg ratio
    wd = WD12
    got = corollary_ratio(1, wd)
    from hyperdual.selberg import SelbergParams, selberg_closed

    j = (selberg_closed(SelbergParams(1, wd.m1, wd.kappa))
         * selberg_closed(SelbergParams(1, 1.0, wd.kappa))
         / selberg_closed(SelbergParams(0, wd.l1, wd.kappa))
         / selberg_closed(SelbergParams(1, 2.0, wd.kappa)))
    expect = cmath.exp(1j * math.pi / wd.kappa) * j
    assert abs(got - expect) < 1e-12 * abs(expect)


def test_numeric_k_ratio_matches_corollary_b0():
    wd = WD12
    km = integral_K(0, 0, Z, wd, CFG2)
    kl = integral_K(0, 0, Z, wd.swap(), CFG1)
    got = km.value / kl.value
    assert abs(got - corollary_ratio(0, wd)) / abs(got) < 1e-5


def test_triangular_connection_at_large_z():
    # the connection matrix between the two sides tends to the identity
    zz = 60j
    lhs = matrix_Ihat(zz, WD12, CFG2).entries
    rhs = matrix_Ihat(zz, WD12.swap(), CFG2).entries
    x = np.linalg.solve(rhs, lhs)
    assert np.max(np.abs(x - np.eye(2))) < 0.05
