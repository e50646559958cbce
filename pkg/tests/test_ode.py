import cmath
import math

import numpy as np
import pytest

from hyperdual.errors import DegenerateParameters, SingularPath
from hyperdual.model import validate_weight_data
from hyperdual.ode import (
    asympt_leading,
    build_U_from_psi,
    coefficient_matrices,
    ihat_column,
    ode_residual,
    solve_psi,
    transport_linear,
)
from hyperdual.quadrature import QuadratureConfig

WD12 = validate_weight_data(2.3, 1, 1.3, 2, 2.5)


def test_matrices_small_case_frozen():
    cm = coefficient_matrices(WD12)
    assert np.allclose(cm.A, np.diag([0.0, 1.0]))
    # hand evaluation: B00 = m2 l2 = 2, B01 = -(m2)(l2) = -2,
    # B10 = 1*(l2 - m1 - 1) = -1.3, B11 = 2 - (2 l2 + m2 - m1) + m2 l2 = 1.3
    expect = np.array([[2.0, -2.0], [-1.3, 1.3]], dtype=complex)
    assert np.max(np.abs(cm.B - expect)) < 1e-12


def test_b_row_zero_structure():
    wd = validate_weight_data(2.3, 2, 1.3, 3, 2.5)
    cm = coefficient_matrices(wd)
    assert abs(cm.B[0, 0] - wd.m2 * wd.l2) < 1e-12
    assert abs(cm.B[0, 1] + wd.m2 * wd.l2) < 1e-12


def test_b_swap_symmetry():
    for (m1, m2, l1, l2) in [(2.3, 1, 1.3, 2), (1.3, 2, 2.3, 1),
                             (2.3 + 0.5j, 2, 1.3 + 0.5j, 3)]:
        wd = validate_weight_data(m1, m2, l1, l2, 2.5)
        cm = coefficient_matrices(wd)
        cms = coefficient_matrices(wd.swap())
        assert np.max(np.abs(cm.B - cms.B)) < 1e-12
        assert np.max(np.abs(cm.A - cms.A)) == 0.0


def test_l2_zero_degenerate_equation():
    wd = validate_weight_data(2.3, 1, 3.3, 0, 2.5)
    cm = coefficient_matrices(wd)
    assert cm.A.shape == (1, 1) and cm.B[0, 0] == 0.0 and cm.A[0, 0] == 0.0


def test_ode_residual_small():
    cfg = QuadratureConfig(nodes=10, refinements=2, target_rel_err=1e-6,
                           strict=False)
    rep = ode_residual(1 + 2j, WD12, 5e-3, cfg)
    assert rep.passed and rep.max_rel_err < 1e-5


def test_asympt_leading_examples():
    wd = WD12
    z = 50j
    # b = 0 reduces to (kappa/z)^(m2 l2/kappa)
    expect = cmath.exp((wd.m2 * wd.l2 / wd.kappa) * cmath.log(wd.kappa / z))
    assert abs(asympt_leading(0, 0, z, wd) - expect) < 1e-13 * abs(expect)
    # off-diagonal entries have no leading term
    assert asympt_leading(0, 1, z, wd) == 0.0
    assert asympt_leading(1, 0, z, wd) == 0.0


def test_transport_constant_path():
    psi0 = np.array([0.3 + 0.1j, -0.7 + 0.4j])
    out = solve_psi([1 + 2j], psi0, WD12)
    assert np.allclose(out, psi0)


def test_transport_diagonal_closed_form():
    # kappa Psi' + (B/x + A) Psi = 0 with diagonal B, A has the closed
    # solution Psi_i = Psi0_i (x/x0)^(-B_ii/kappa) exp(-A_ii (x-x0)/kappa)
    B = np.diag([0.8 + 0.2j, -1.1]).astype(complex)
    A = np.diag([0.5, 1.5]).astype(complex)
    kappa = 2.5
    x0, x1 = 1 + 2j, -0.5 + 1.5j
    psi0 = np.array([1.0 - 0.3j, 0.4 + 0.9j])
    got = transport_linear([x0, x1], psi0, B, A, kappa)
    expect = psi0 * np.exp(
        -np.diag(B) / kappa * (cmath.log(x1) - cmath.log(x0))
        - np.diag(A) / kappa * (x1 - x0)
    )
    assert np.max(np.abs(got - expect)) < 1e-10 * np.max(np.abs(expect))


def test_transport_through_origin_rejected():
    psi0 = np.array([1.0, 0.0])
    with pytest.raises(SingularPath):
        solve_psi([1 + 0j, -1 + 0j], psi0, WD12)


def test_integral_column_solves_equation():
    # quadrature column transported by the equation reproduces quadrature
    cfg = QuadratureConfig(nodes=10, refinements=2, target_rel_err=1e-6,
                           strict=False)
    x0, x1 = 1 + 2j, 2 + 1.5j
    col0 = ihat_column(x0, 1, WD12, cfg)
    col1 = ihat_column(x1, 1, WD12, cfg)
    moved = solve_psi([x0, x1], col0, WD12)
    assert np.max(np.abs(moved - col1)) / np.max(np.abs(col1)) < 1e-5


def test_build_u_prefactor_reduces_to_exponential():
    # with m1 m2 = 0 and l1 l2 = 0 the power prefactors drop out
    wd = validate_weight_data(0.0, 2, 2.0, 0, 2.5)
    psi = lambda x: np.array([1.0 + 0.0j])
    z1, z2, lam1, lam2 = 0.7 + 0.2j, -0.4 + 0.9j, 0.8, -0.6
    got = build_U_from_psi(z1, z2, lam1, lam2, psi, wd)
    expect = cmath.exp((z1 * lam1 * wd.m1 + z2 * lam1 * wd.m2) / wd.kappa)
    assert abs(got[0] - expect) < 1e-13 * abs(expect)


def test_build_u_degenerate_points():
    psi = lambda x: np.array([1.0 + 0.0j, 0.0j])
    with pytest.raises(DegenerateParameters):
        build_U_from_psi(1.0, 1.0, 0.5, -0.5, psi, WD12)
    with pytest.raises(DegenerateParameters):
        build_U_from_psi(1.0, -1.0, 0.5, 0.5, psi, WD12)
