"""The first-order matrix equation satisfied by the integral matrix.

The matrix of integrals obeys kappa dI/dz + (B/z + A) I = 0 with A the
diagonal index matrix and B an explicit tridiagonal matrix symmetric
under the parameter swap (m1, m2) <-> (l1, l2).  The same system, read in
the weight-subspace basis, is the scalar-argument equation whose
solutions generate solutions of the Knizhnik-Zamolodchikov and dynamical
equations; ``solve_psi`` transports solutions along paths in the complex
plane and ``build_U_from_psi`` applies the explicit prefactor producing
those solutions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .contour import resolve_geometry
from .errors import SingularPath
from .hyperint import matrix_Ihat
from .model import CheckReport, CheckValue, WeightData
from .quadrature import QuadratureConfig, quick_config
from .special import log_gamma

_TINY = 1e-300


@dataclass(frozen=True)
class CoefficientMatrices:
    """A is diag(0..d); B is tridiagonal in the admissible index."""

    A: np.ndarray
    B: np.ndarray


def coefficient_matrices(wd: WeightData) -> CoefficientMatrices:
    d = min(wd.m2, wd.l2)
    m1, m2, l2 = wd.m1, wd.m2, wd.l2
    A = np.diag(np.arange(d + 1, dtype=complex))
    B = np.zeros((d + 1, d + 1), dtype=complex)
    for a in range(d + 1):
        B[a, a] = 2 * a**2 - a * (2 * l2 + m2 - m1) + m2 * l2
        if a - 1 >= 0:
            B[a, a - 1] = a * (l2 - m1 - a)
        if a + 1 <= d:
            B[a, a + 1] = -(m2 - a) * (l2 - a)
    return CoefficientMatrices(A=A, B=B)


def ode_residual(z: complex, wd: WeightData, h: float,
                 cfg: Optional[QuadratureConfig] = None,
                 tolerance: float = 1e-5) -> CheckReport:
    """Finite-difference residual of kappa I' + (B/z + A) I = 0.

    The derivative uses the five-point central stencil along the real
    direction.  All stencil evaluations share the contour geometry and the
    refinement level fixed at the center, so the quadrature error varies
    analytically in z and is not amplified by 1/h.
    """
    z = complex(z)
    h = float(h)
    if z.imag <= 2 * h:
        raise ValueError("stencil z +/- 2h must stay in the upper half-plane")
    cfg = cfg or quick_config(wd.l2, target=1e-8)
    fixed = _fixed_cfg(cfg, cfg.refinements)
    poly_power = (abs(wd.m1.real) + abs(float(wd.m2)) + 2 * wd.l2) / wd.kappa
    geometry = resolve_geometry(z, wd.l2, kappa=wd.kappa, poly_power=poly_power)
    center = matrix_Ihat(z, wd, fixed, geometry)
    stencil = {
        s: matrix_Ihat(z + s * h, wd, fixed, geometry).entries
        for s in (-2, -1, 1, 2)
    }
    deriv = (stencil[-2] - 8 * stencil[-1] + 8 * stencil[1] - stencil[2]) / (12 * h)
    cm = coefficient_matrices(wd)
    residual = wd.kappa * deriv + (cm.B / z + cm.A) @ center.entries
    scale = float(np.max(np.abs(center.entries)))
    rel = float(np.max(np.abs(residual))) / max(scale, _TINY)
    values = [
        CheckValue(f"residual[{a},{b}]", residual[a, b], center.errors[a, b])
        for a in range(residual.shape[0])
        for b in range(residual.shape[1])
    ]
    params = {"z": z, "h": h, "m1": wd.m1, "m2": wd.m2, "l1": wd.l1,
              "l2": wd.l2, "kappa": wd.kappa}
    return CheckReport.from_values("ode-residual", params, values, rel, tolerance)


def _fixed_cfg(cfg: QuadratureConfig, level: int) -> QuadratureConfig:
    from dataclasses import replace

    return replace(cfg, fixed_level=level, strict=False)


def asympt_leading(a: int, b: int, z: complex, wd: WeightData) -> complex:
    """Leading large-z term of the integral matrix inside the upper sector.

    Diagonal in the admissible index; off-diagonal entries are lower
    order and the function returns 0 for them.
    """
    if a != b:
        return 0.0 + 0.0j
    kappa, m1, m2, l2 = wd.kappa, wd.m1, wd.m2, wd.l2
    w = 2 * b**2 - b * (2 * l2 + m2 - m1) + m2 * l2
    total = -b * z / kappa
    total += (w / kappa) * cmath.log(kappa / z)
    total += 1j * math.pi * b * (m1 - l2) / kappa
    for j in range(b):
        total += log_gamma(1 + (j + 1) / kappa)
        total += log_gamma(1 + (m1 - l2 + j + 1) / kappa)
        total -= log_gamma(1 + (m2 - j) / kappa)
        total -= log_gamma(1 + (l2 - j) / kappa)
    return cmath.exp(total)


def _segment_min_dist_to_origin(x0: complex, x1: complex) -> float:
    d = x1 - x0
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(x0)
    s = min(1.0, max(0.0, -(x0.real * d.real + x0.imag * d.imag) / L2))
    return abs(x0 + s * d)


def transport_linear(path: Sequence[complex], psi0: np.ndarray,
                     B: np.ndarray, A: np.ndarray, kappa: float,
                     rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """Integrate kappa Psi' + (B/x + A) Psi = 0 along a polygonal path."""
    path = [complex(x) for x in path]
    if len(path) < 1:
        raise ValueError("empty path")
    scale = max(abs(x) for x in path)
    psi = np.asarray(psi0, dtype=complex).copy()
    dim = len(psi)
    for x0, x1 in zip(path[:-1], path[1:]):
        if _segment_min_dist_to_origin(x0, x1) < 1e-9 * max(scale, 1.0):
            raise SingularPath(f"segment {x0} -> {x1} passes through x = 0")
        if x0 == x1:
            continue
        dx = x1 - x0

        def rhs(s, y):
            x = x0 + s * dx
            v = y[:dim] + 1j * y[dim:]
            dv = -dx * ((B @ v) / x + A @ v) / kappa
            return np.concatenate([dv.real, dv.imag])

        y0 = np.concatenate([psi.real, psi.imag])
        sol = solve_ivp(rhs, (0.0, 1.0), y0, method="DOP853",
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise SingularPath(f"integration failed on {x0} -> {x1}: {sol.message}")
        psi = sol.y[:dim, -1] + 1j * sol.y[dim:, -1]
    return psi


def solve_psi(x_path: Sequence[complex], psi0: Sequence[complex],
              wd: WeightData, rtol: float = 1e-12) -> np.ndarray:
    """Transport a weight-subspace vector along a path avoiding the origin."""
    cm = coefficient_matrices(wd)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (wd.dim,):
        raise ValueError(f"psi0 must have length {wd.dim}")
    return transport_linear(x_path, psi0, cm.B, cm.A, wd.kappa, rtol=rtol)


def ihat_column(x: complex, b: int, wd: WeightData,
                cfg: Optional[QuadratureConfig] = None,
                geometry=None) -> np.ndarray:
    """Column b of the integral matrix as a weight-subspace vector."""
    from .hyperint import _k_column, constant_Cb

    cfg = cfg or quick_config(wd.l2)
    col = _k_column(b, complex(x), wd, cfg, geometry)
    c = constant_Cb(b, wd)
    return np.array([c * r.value for r in col], dtype=complex)


def u_b_solution(b: int, wd: WeightData, x_center: complex,
                 cfg: Optional[QuadratureConfig] = None) -> Callable:
    """KZ/dynamical solution built on the integral-matrix column b.

    Returns ``u(z1, z2, lam1, lam2)``.  The contour geometry and the
    refinement level are frozen at ``x_center`` so finite-difference
    stencils see an analytically varying quadrature error.
    """
    cfg = cfg or quick_config(wd.l2, target=1e-7)
    from dataclasses import replace

    fixed = replace(cfg, fixed_level=cfg.refinements, strict=False)
    poly_power = (abs(wd.m1.real) + abs(float(wd.m2)) + 2 * wd.l2) / wd.kappa
    geometry = resolve_geometry(complex(x_center), wd.l2, kappa=wd.kappa,
                                poly_power=poly_power)

    def psi(x: complex) -> np.ndarray:
        return ihat_column(x, b, wd, fixed, geometry)

    def u(z1, z2, lam1, lam2):
        return build_U_from_psi(z1, z2, lam1, lam2, psi, wd)

    return u


def u_psi_solution(psi0: Sequence[complex], x0: complex, wd: WeightData,
                   rtol: float = 1e-12) -> Callable:
    """KZ/dynamical solution from transporting an initial vector at x0."""
    psi0 = np.asarray(psi0, dtype=complex)

    def psi(x: complex) -> np.ndarray:
        return solve_psi([complex(x0), complex(x)], psi0, wd, rtol=rtol)

    def u(z1, z2, lam1, lam2):
        return build_U_from_psi(z1, z2, lam1, lam2, psi, wd)

    return u


def build_U_from_psi(z1: complex, z2: complex, lam1: complex, lam2: complex,
                     psi: Callable[[complex], np.ndarray],
                     wd: WeightData) -> np.ndarray:
    """Solution of the KZ/dynamical system from a scalar-argument solution.

    U = exp((z1 lam1 (m1 - l2) + z1 lam2 l2 + z2 lam1 m2)/kappa)
        * (z1 - z2)^(m1 m2 / kappa) * (lam1 - lam2)^(l1 l2 / kappa)
        * Psi(-(lam1 - lam2)(z1 - z2)),
    with principal branches of the two power prefactors.
    """
    from .errors import DegenerateParameters

    scale = max(abs(z1), abs(z2), abs(lam1), abs(lam2), 1.0)
    if abs(z1 - z2) < 1e-14 * scale:
        raise DegenerateParameters("z1 = z2")
    if abs(lam1 - lam2) < 1e-14 * scale:
        raise DegenerateParameters("lam1 = lam2")
    kappa = wd.kappa
    log_pref = (z1 * lam1 * (wd.m1 - wd.l2) + z1 * lam2 * wd.l2
                + z2 * lam1 * wd.m2) / kappa
    log_pref += (wd.m1 * wd.m2 / kappa) * cmath.log(z1 - z2)
    log_pref += (wd.l1 * wd.l2 / kappa) * cmath.log(lam1 - lam2)
    x = -(lam1 - lam2) * (z1 - z2)
    return cmath.exp(log_pref) * np.asarray(psi(x), dtype=complex)
