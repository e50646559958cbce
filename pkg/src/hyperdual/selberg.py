"""Selberg-type loop integrals: closed form and quadrature.

These one-parameter integrals over nested loops around the origin have a
known product formula in Gamma functions.  They calibrate the whole
engine: orientation, branch anchoring and truncation are all pinned by
reproducing the closed form (a reversed orientation flips the sign of
the one-dimensional value).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .contour import build_multi_loop
from .errors import GammaPole
from .model import _as_int
from .quadrature import (
    LoopIntegrandSpec,
    QuadratureConfig,
    QuadratureResult,
    integrate_spec,
    quick_config,
)
from .special import log_gamma

_POLE_DIST = 1e-8
DESK_SCALE_MAX_DIM = 4


@dataclass(frozen=True)
class SelbergParams:
    """Dimension l, exponent parameter m, and kappa."""

    l: int
    m: complex
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "l", _as_int(self.l, "l"))
        object.__setattr__(self, "m", complex(self.m))
        object.__setattr__(self, "kappa", float(self.kappa))
        if self.l < 0:
            raise ValueError(f"dimension l={self.l} must be nonnegative")
        if self.kappa <= 0:
            raise ValueError(f"kappa={self.kappa} must be positive")
        for j in range(self.l):
            for arg in (1 + (self.m - j) / self.kappa, 1 - (j + 1) / self.kappa):
                n = round(arg.real)
                if n <= 0 and abs(arg - n) < _POLE_DIST:
                    raise GammaPole(
                        f"Gamma argument {arg} within {_POLE_DIST} of a pole"
                    )


def selberg_closed_log(p: SelbergParams) -> complex:
    """log of the closed-form value (some 2 pi i branch of it)."""
    kappa = p.kappa
    total = (p.l * (p.l - 1 - p.m) / kappa) * math.log(kappa)
    log_c = cmath.log(-2j * math.pi) + log_gamma(1 - 1 / kappa)
    for j in range(p.l):
        total += log_c
        total -= log_gamma(1 + (p.m - j) / kappa)
        total -= log_gamma(1 - (j + 1) / kappa)
    return total


def selberg_closed(p: SelbergParams) -> complex:
    """Closed-form value of the l-dimensional Selberg-type loop integral."""
    if p.l == 0:
        return 1.0 + 0.0j
    return cmath.exp(selberg_closed_log(p))


def selberg_numeric(p: SelbergParams, cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Quadrature evaluation over the nested loops around the origin.

    The integrand is exp(-sum s_u / kappa) prod (-s_u)^(-1 - m/kappa)
    prod (s_u - s_v)^(2/kappa), branch fixed by principal arguments at the
    all-negative anchor.  Desk scale only (l <= 4).
    """
    if p.l > DESK_SCALE_MAX_DIM:
        raise ValueError(f"numeric route capped at l <= {DESK_SCALE_MAX_DIM}")
    if p.l == 0:
        return QuadratureResult(1.0 + 0.0j, 0.0, 0, 0.0)
    cfg = cfg or quick_config(p.l)
    poly_power = (abs(p.m.real) + p.kappa + 2 * p.l) / p.kappa
    from .contour import ContourGeometry

    geometry = ContourGeometry(truncation=cfg.truncation) if cfg.truncation else None
    contour = build_multi_loop(None, p.l, 0, geometry,
                               kappa=p.kappa, poly_power=poly_power)
    spec = LoopIntegrandSpec(
        kappa=p.kappa,
        c_t=-1.0 / p.kappa,
        c_neg=-1.0 - p.m / p.kappa,
        c_zt=0.0,
        c_pair=2.0 / p.kappa,
        z=None,
    )
    return integrate_spec(contour, spec, None, cfg)[0]
