"""Saddle-point asymptotics and the growing-dimension study.

The model integral is int_C exp(-t) (-t)^(M+a) (z-t)^(-M) dt over one of
two loops from +infinity: a small one around 0 only, or a large one
enclosing both 0 and z.  For M -> +infinity the value is governed by the
critical points of -u + z/u after rescaling u = t M^(-1/2); the two loops
pick up the growing and the decaying critical value respectively.

Numerics by loop kind:

* large loop: evaluated directly on a stadium whose radius scales like
  sqrt(M |z|), so the contour passes near the contributing saddle; panel
  widths follow the local phase rate of the two power factors.

* small loop at large M: the stadium realization suffers catastrophic
  cancellation (the integrand peaks tens of decades above the answer), so
  the loop is collapsed exactly onto the half-line, giving the prefactor
  2 i sin(pi (M + a)) times a single-branch integral, whose path is then
  deformed into the singularity-free lower half-plane where the integrand
  magnitude stays on the order of the answer.  Small M uses the stadium
  directly.

The duality corollary reduces growing-dimension integrals to fixed
dimension; :func:`dimension_scan` tabulates both routes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from ._threads import parallel_map
from .contour import MultiLoopContour, SteepestLoop, build_steepest_loop
from .errors import GeometryError
from .hyperint import corollary_ratio, integral_K
from .model import WeightData, validate_weight_data
from .quadrature import (
    AxisGrid,
    LoopIntegrandSpec,
    QuadratureConfig,
    QuadratureResult,
    _gauss,
    build_axis_grid,
    eval_on_axes,
    quick_config,
)

_TAIL_DROP = 16.0 * math.log(10.0) + 4.0
_RAY_ANGLE = math.pi / 4
_LARGE_M = 20.0


@dataclass(frozen=True)
class SaddleParams:
    """Evaluation point, growth parameter and loop kind."""

    z: complex
    M: float
    a: complex
    kind: str  # "C'" | "C''"

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "M", float(self.M))
        object.__setattr__(self, "a", complex(self.a))
        if self.z.imag <= 0:
            raise GeometryError(f"z={self.z} must lie in the upper half-plane")
        if self.M < 1:
            raise ValueError(f"need M >= 1, got {self.M}")
        if self.kind not in ("C'", "C''"):
            raise ValueError(f"kind must be C' or C'', got {self.kind!r}")


def steepest_asympt(p: SaddleParams) -> complex:
    """Leading term as M -> +infinity.

    Root and quarter powers of -zM take the branch with arg(-z) in
    (-pi, 0), which is the principal one for Im z > 0.  The sign of the
    large-loop term corresponds to the counterclockwise traversal used
    throughout this package (the loop crosses the growing critical point
    of -u + z/u in the descending direction with argument
    pi/2 + arg(-z)/4 + pi); it is pinned by direct quadrature across
    several (z, a, M).
    """
    z, m, a = p.z, p.M, p.a
    root = cmath.sqrt(-z * m)          # arg(-z)/2 in (-pi/2, 0)
    quarter = cmath.exp(((2 * a + 1) / 4) * cmath.log(-z * m))
    if p.kind == "C'":
        return -1j * math.sqrt(math.pi) * quarter * cmath.exp(2 * root - z / 2)
    return (
        math.sqrt(math.pi)
        * (cmath.exp(2j * math.pi * (m + a)) - 1)
        * quarter
        * cmath.exp(-2 * root - z / 2 - 1j * math.pi * a)
    )


def _altitude_ray(s: np.ndarray, z: complex, m: float, re_a: float,
                  phi: float) -> np.ndarray:
    t = s * cmath.exp(-1j * phi)
    return -s * math.cos(phi) + (m + re_a) * np.log(s) - m * np.log(np.abs(z - t))


def _ray_truncation(z: complex, m: float, re_a: float, phi: float) -> float:
    s = np.geomspace(1e-3, 1e3, 2000)
    alt = _altitude_ray(s, z, m, re_a, phi)
    peak = float(np.max(alt))
    target = peak - _TAIL_DROP
    s_t = float(s[np.argmax(alt)]) * 2 + 10.0
    while _altitude_ray(np.array([s_t]), z, m, re_a, phi)[0] > target:
        s_t *= 1.4
    return s_t


def _ray_nodes(z: complex, m: float, a: complex, phi: float, n: int):
    """Oscillation-aware composite Gauss-Legendre nodes on the tilted ray."""
    s_t = _ray_truncation(z, m, a.real, phi)
    direction = cmath.exp(-1j * phi)
    breaks = [1e-8]
    s = breaks[0]
    while s < s_t:
        rate = m / abs(z - s * direction) + 1.0
        w = max(min(n / (3.0 * rate), 4.0, 0.5 * s + 0.05), 1e-3)
        s = min(s + w, s_t)
        breaks.append(s)
    xg, wg = _gauss(n)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        nodes.append(lo + (hi - lo) * xg)
        weights.append((hi - lo) * wg)
    s_nodes = np.concatenate(nodes)
    s_weights = np.concatenate(weights)
    return s_nodes * direction, s_weights * direction


def _small_loop_collapsed(p: SaddleParams, n: int) -> complex:
    """Small loop as 2 i sin(pi (M+a)) times a lower-half-plane ray integral."""
    t, dt = _ray_nodes(p.z, p.M, p.a, _RAY_ANGLE, n)
    log_f = -t + (p.M + p.a) * np.log(t) - p.M * np.log(p.z - t)
    shift = float(np.max(log_f.real))
    value = math.exp(shift) * np.sum(np.exp(log_f - shift) * dt)
    return 2j * cmath.sin(math.pi * (p.M + p.a)) * value


def _saddle_axis(loop, z: complex, m: float, a: complex, n: int) -> AxisGrid:
    """Stadium axis grid with panel widths tied to the local phase rate."""
    T, r, c = loop.truncation, loop.radius, loop.center
    abs_a = abs(a)

    def rate(x: float, height: float) -> float:
        t = c + x + 1j * height
        return (m + abs_a) / abs(t) + m / abs(z - t) + 1.0

    def edge_breaks(height: float):
        breaks = [0.0]
        x = 0.0
        while x < T:
            w = max(min(n / (3.0 * rate(x, height)), 4.0), 1e-3)
            if x > 3.0 * math.sqrt(m * abs(z)) + 10.0:
                w = max(w, 0.05 * x)  # geometric far tail
            x = min(x + w, T)
            breaks.append(x)
        return np.asarray(breaks)

    xg, wg = _gauss(n)

    def panels(breaks):
        xs = np.concatenate([lo + (hi - lo) * xg
                             for lo, hi in zip(breaks[:-1], breaks[1:])])
        ws = np.concatenate([(hi - lo) * wg
                             for lo, hi in zip(breaks[:-1], breaks[1:])])
        return xs, ws

    up_x, up_w = panels(edge_breaks(r))
    lo_x, lo_w = panels(edge_breaks(-r))

    cap_rate = (m + abs_a) + m * r / max(abs(abs(z) - r), 0.3 * r) + 1.0
    cap_panels = max(2, math.ceil(3.0 * math.pi * cap_rate / n))
    th_edges = np.linspace(math.pi / 2, 3 * math.pi / 2, cap_panels + 1)
    cap_th = np.concatenate([a0 + (b0 - a0) * xg
                             for a0, b0 in zip(th_edges[:-1], th_edges[1:])])
    cap_dth = np.concatenate([(b0 - a0) * wg
                              for a0, b0 in zip(th_edges[:-1], th_edges[1:])])

    t = np.concatenate([
        c + up_x[::-1] + 1j * r,
        c + r * np.exp(1j * cap_th),
        c + lo_x - 1j * r,
    ])
    dt = np.concatenate([
        -up_w[::-1],
        1j * r * np.exp(1j * cap_th) * cap_dth,
        lo_w,
    ])
    from .contour import loop_walk

    walk, node_idx = loop_walk(
        loop,
        (((T - up_x[::-1]) / T).tolist(),
         ((cap_th - math.pi / 2) / math.pi).tolist(),
         (lo_x / T).tolist()),
        with_nodes=True,
    )
    return AxisGrid(walk=walk, t=t, dt=dt, node_idx=node_idx)


def _loop_truncation(z: complex, m: float, re_a: float, radius: float) -> float:
    x = np.geomspace(max(radius, 1e-2), 1e4, 3000)
    alt = -x + (m + re_a) * np.log(x) - m * np.log(np.abs(z - x))
    peak = float(np.max(alt))
    idx = np.nonzero(alt < peak - _TAIL_DROP)[0]
    beyond = idx[idx > np.argmax(alt)]
    t = float(x[beyond[0]]) if len(beyond) else float(x[-1])
    return max(t, 2.0 * radius)


def steepest_numeric(p: SaddleParams,
                     cfg: Optional[QuadratureConfig] = None) -> QuadratureResult:
    """Quadrature value of the loop integral with two-level error estimate."""
    cfg = cfg or QuadratureConfig(nodes=24, refinements=1, growth=1.5,
                                  target_rel_err=1e-6, strict=False)
    if p.kind == "C''" and p.M >= _LARGE_M:
        vals = [_small_loop_collapsed(p, n)
                for n in (cfg.nodes, math.ceil(cfg.nodes * cfg.growth))]
        err = abs(vals[-1] - vals[0])
        return QuadratureResult(vals[-1], err, 0, 0.0)

    radius = None
    if p.kind == "C'":
        radius = max(2.2 * abs(p.z) + 1.0, 1.05 * math.sqrt(p.M * abs(p.z)))
    trunc = cfg.truncation or _loop_truncation(
        p.z, p.M, p.a.real, radius or 0.3 * p.z.imag
    )
    sloop = build_steepest_loop(p.kind, p.z, trunc, radius)
    spec = LoopIntegrandSpec(kappa=1.0, c_t=-1.0, c_neg=p.M + p.a,
                             c_zt=-p.M, c_pair=0.0, z=p.z)
    vals = []
    for n in (cfg.nodes, math.ceil(cfg.nodes * cfg.growth)):
        if p.M >= _LARGE_M:
            axes = [_saddle_axis(sloop.loop, p.z, p.M, p.a, n)]
        else:
            axes = [build_axis_grid(sloop.loop, n, 1.0,
                                    max(cfg.cap_panels,
                                        math.ceil(p.M + abs(p.a)) + 2))]
        vals.append(complex(eval_on_axes(axes, spec, None)[0]))
    err = abs(vals[-1] - vals[0])
    return QuadratureResult(vals[-1], err, len(axes[0].t), trunc)


@dataclass(frozen=True)
class ScanRow:
    """One growing-dimension data point."""

    l2: int
    l1: complex
    direct: Optional[complex]
    direct_err: float
    dual: complex
    dual_err: float
    ratio: Optional[complex]

    def to_csv_row(self) -> list:
        fmt = _format_complex
        return [
            self.l2,
            fmt(self.l1),
            fmt(self.direct) if self.direct is not None else "",
            fmt(self.dual),
            fmt(self.ratio) if self.ratio is not None else "",
            f"{max(self.direct_err, self.dual_err):.3e}",
        ]


CSV_HEADER = ["l2", "l1", "direct", "dual", "ratio", "err"]


def _format_complex(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return repr(v.real)
    sign = "+" if v.imag >= 0 else "-"
    return f"{v.real!r}{sign}{abs(v.imag)!r}i"


def dimension_scan(m1: complex, m2: int, kappa: float,
                   l2_values: Sequence[int], z: complex,
                   cfg: Optional[QuadratureConfig] = None,
                   a: int = 0, b: int = 0,
                   direct_max_dim: int = 3) -> list:
    """Tabulate the growing-dimension integral against its dual route.

    For each l2 (with l1 = m1 + m2 - l2) the dual value is the
    fixed-dimension integral with swapped parameters times the closed-form
    ratio; the direct l2-dimensional quadrature is added for l2 up to
    ``direct_max_dim`` as a cross-check.
    """
    z = complex(z)

    def one_row(l2: int) -> ScanRow:
        l1 = m1 + m2 - l2
        wd = validate_weight_data(m1, m2, l1, l2, kappa)
        dual_cfg = cfg or quick_config(m2)
        k_dual = integral_K(a, b, z, wd.swap(), dual_cfg)
        ratio = corollary_ratio(b, wd)
        dual_value = ratio * k_dual.value
        dual_err = abs(ratio) * k_dual.error
        direct = None
        direct_err = 0.0
        quotient = None
        if l2 <= direct_max_dim:
            k_direct = integral_K(a, b, z, wd, cfg or quick_config(l2))
            direct = k_direct.value
            direct_err = k_direct.error
            quotient = direct / dual_value
        return ScanRow(l2=l2, l1=l1, direct=direct, direct_err=direct_err,
                       dual=dual_value, dual_err=dual_err, ratio=quotient)

    return parallel_map(one_row, list(l2_values))
