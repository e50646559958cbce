"""Tensor-product Gauss-Legendre quadrature over multi-loop contours.

Each loop contributes one axis.  Its three path segments are subdivided
into panels: short line panels near the cap junction (where the nearest
singularity sits at distance ~ radius), geometrically growing panels up
to a few decay lengths, and one exponentially stretched tail panel out to
the truncation; the cap is split into equal arc panels.  Gauss-Legendre
nodes on every panel give spectral accuracy for the analytic integrands.

Refinement multiplies the per-panel node count and re-evaluates; the
error estimate is the difference between the last two refinement levels.
Summation uses numpy's pairwise reduction over fixed-shape grids in a
fixed order, so results are bitwise reproducible and independent of any
worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np

from .contour import LoopPath, MultiLoopContour, loop_walk
from .errors import NoConvergence
from .integrand import (
    AxisGrid,
    axis_arg_table,
    branch_state_from_tables,
    pair_arg_table,
)

_TINY = 1e-300


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs of the tensor-product rule.

    nodes           Gauss-Legendre points per panel at the first level.
    refinements     number of extra levels tried beyond the first.
    target_rel_err  stop refining once the two-level estimate is below this.
    truncation      optional override of the loop truncation length.
    growth          per-level multiplier of the node count.
    cap_panels      arc panels on each half-circle cap.
    strict          raise NoConvergence when the target is not met.
    fixed_level     evaluate exactly this level, no adaptivity (stencil use).
    """

    nodes: int = 8
    refinements: int = 3
    target_rel_err: float = 1e-7
    truncation: Optional[float] = None
    growth: float = 2.0
    cap_panels: int = 2
    strict: bool = True
    fixed_level: Optional[int] = None

    def __post_init__(self):
        if self.nodes < 4:
            raise ValueError(f"need at least 4 nodes per panel, got {self.nodes}")
        if self.target_rel_err < 1e-12:
            raise ValueError(
                f"target relative error {self.target_rel_err} below 1e-12"
            )

    def level_nodes(self, level: int) -> int:
        return max(4, math.ceil(self.nodes * self.growth**level))


@dataclass(frozen=True)
class QuadratureResult:
    """Value with the two-level error estimate and the grid actually used."""

    value: complex
    error: float          # |value(level k) - value(level k-1)|
    nodes: int            # total grid points at the final level
    truncation: float

    @property
    def rel_error(self) -> float:
        return self.error / max(abs(self.value), _TINY)


@lru_cache(maxsize=64)
def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w  # mapped to [0, 1]


def _edge_breaks(radius: float, truncation: float, scale: float) -> list:
    """Line-panel boundaries [0 .. x_sw] measured from the cap junction.

    The first panel matches the loop radius (the distance to the nearest
    singular set, which for nested loops is the neighbour loop), then the
    widths double up to a few decay lengths.
    """
    w = min(max(0.5 * radius, scale / 50.0), 4.0 * scale)
    x_sw = min(max(6.0 * scale, 2.0 * radius), truncation)
    breaks = [0.0]
    x = 0.0
    while x + w < x_sw:
        x += w
        breaks.append(x)
        w = min(2.0 * w, 4.0 * scale)
    breaks.append(x_sw)
    return breaks


def _exp_map(length: float, ell0: float, u: np.ndarray):
    """Stretched coordinate s(u) on [0, length], dense near u = 0."""
    q = 1.0 + length / ell0
    s = ell0 * (q**u - 1.0)
    ds = ell0 * math.log(q) * q**u
    return s, ds


def build_axis_grid(loop: LoopPath, n: int, scale: float,
                    cap_panels: int = 2) -> AxisGrid:
    """Nodes, weights and transport walk for one loop.

    ``scale`` is the decay length of the integrand along the edges (kappa
    for the kappa-th-root integrands, 1 for plain exponentials).
    """
    T, r, c = loop.truncation, loop.radius, loop.center
    breaks = _edge_breaks(r, T, scale)
    x_sw = breaks[-1]
    xg, wg = _gauss(n)

    # Geometric edge sample, junction outward: positions x, weights dx.
    xs, dxs = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        xs.append(a + (b - a) * xg)
        dxs.append((b - a) * wg)
    if x_sw < T:
        s, ds = _exp_map(T - x_sw, 2.0 * scale, xg)
        xs.append(x_sw + s)
        dxs.append(ds * wg)
    xs = np.concatenate(xs)
    dxs = np.concatenate(dxs)

    # Upper edge runs from x = T down to 0, at height +r.
    up_t = c + xs[::-1] + 1j * r
    up_dt = -dxs[::-1]
    # Lower edge runs from 0 out to T, at height -r.
    lo_t = c + xs - 1j * r
    lo_dt = dxs

    # Cap: theta from pi/2 to 3*pi/2 in equal arc panels.
    th_edges = np.linspace(math.pi / 2, 3 * math.pi / 2, cap_panels + 1)
    cap_th, cap_dth = [], []
    for a, b in zip(th_edges[:-1], th_edges[1:]):
        cap_th.append(a + (b - a) * xg)
        cap_dth.append((b - a) * wg)
    cap_th = np.concatenate(cap_th)
    cap_dth = np.concatenate(cap_dth)
    cap_t = c + r * np.exp(1j * cap_th)
    cap_dt = 1j * r * np.exp(1j * cap_th) * cap_dth

    t = np.concatenate([up_t, cap_t, lo_t])
    dt = np.concatenate([up_dt, cap_dt, lo_dt])

    # Walk parameters: segment-local s in (0, 1) for every node.
    up_params = ((T - xs[::-1]) / T).tolist()
    cap_params = ((cap_th - math.pi / 2) / math.pi).tolist()
    lo_params = (xs / T).tolist()
    walk, node_idx = loop_walk(
        loop, (up_params, cap_params, lo_params), with_nodes=True
    )
    if not np.allclose(walk.points[node_idx], t, rtol=0, atol=1e-12 * (abs(c) + T)):
        raise AssertionError("walk/node bookkeeping out of sync")
    return AxisGrid(walk=walk, t=t, dt=dt, node_idx=node_idx)


@dataclass(frozen=True)
class LoopIntegrandSpec:
    """Exponent data of one product-form integrand.

    The integrand is exp(c_t * sum t_u + c_neg * sum log(-t_u)
    + c_zt * sum log(z - t_u) + c_pair * sum_{u<v} log(t_u - t_v)), with
    all logs branch-tracked, optionally multiplied by a symmetrized weight
    with ``a`` z-type pole factors.
    """

    kappa: float
    c_t: complex
    c_neg: complex
    c_zt: complex
    c_pair: complex
    z: Optional[complex] = None


def _axis_tables(contour: MultiLoopContour, spec, n: int, cap_panels: int):
    axes = [
        build_axis_grid(lp, n, spec.kappa, cap_panels)
        for lp in contour.loops
    ]
    neg_args = [axis_arg_table(ax, 0.0, -1.0) for ax in axes]
    z_args = [
        axis_arg_table(ax, spec.z, -1.0) if spec.z is not None else None
        for ax in axes
    ]
    pair_args = {
        (u, v): pair_arg_table(axes[u], axes[v])
        for u in range(len(axes))
        for v in range(u + 1, len(axes))
    }
    return axes, neg_args, z_args, pair_args


def _bshape(l: int, u: int, n: int):
    shape = [1] * l
    shape[u] = n
    return tuple(shape)


def _grid_values(contour: MultiLoopContour, spec: LoopIntegrandSpec,
                 a_values: Optional[Sequence[int]], n: int,
                 cap_panels: int):
    """Integrals at one refinement level, one entry per requested weight."""
    l = contour.l
    if l == 0:
        count = 1 if a_values is None else len(a_values)
        return np.ones(count, dtype=complex), 0
    axes = [build_axis_grid(lp, n, spec.kappa, cap_panels)
            for lp in contour.loops]
    return eval_on_axes(axes, spec, a_values), int(
        np.prod([len(ax.t) for ax in axes])
    )


def eval_on_axes(axes, spec: LoopIntegrandSpec,
                 a_values: Optional[Sequence[int]]) -> np.ndarray:
    """Evaluate the structured integrand on prebuilt axis grids."""
    l = len(axes)
    neg_args = [axis_arg_table(ax, 0.0, -1.0) if spec.c_neg != 0 else None
                for ax in axes]
    z_args = [
        axis_arg_table(ax, spec.z, -1.0)
        if (spec.z is not None and spec.c_zt != 0) else None
        for ax in axes
    ]
    pair_args = {
        (u, v): pair_arg_table(axes[u], axes[v])
        for u in range(l)
        for v in range(u + 1, l)
    } if spec.c_pair != 0 else {}

    acc = np.zeros(tuple(len(ax.t) for ax in axes), dtype=complex)
    for u, ax in enumerate(axes):
        term = spec.c_t * ax.t
        if spec.c_neg != 0:
            term = term + spec.c_neg * (np.log(np.abs(ax.t)) + 1j * neg_args[u])
        if spec.c_zt != 0:
            term = term + spec.c_zt * (
                np.log(np.abs(spec.z - ax.t)) + 1j * z_args[u]
            )
        acc += term.reshape(_bshape(l, u, len(ax.t)))
    if spec.c_pair != 0:
        for (u, v), theta in pair_args.items():
            diff = axes[u].t[:, None] - axes[v].t[None, :]
            table = spec.c_pair * (np.log(np.abs(diff)) + 1j * theta)
            shape = [1] * l
            shape[u] = len(axes[u].t)
            shape[v] = len(axes[v].t)
            acc += table.reshape(tuple(shape))

    shift = float(np.max(acc.real))
    acc -= shift
    grid = np.exp(acc, out=acc)
    for u, ax in enumerate(axes):
        grid *= ax.dt.reshape(_bshape(l, u, len(ax.t)))

    if a_values is None:
        return np.array([np.exp(shift) * np.sum(grid)], dtype=complex)

    pole0 = [1.0 / (-ax.t) for ax in axes]
    polez = [1.0 / (spec.z - ax.t) for ax in axes] if spec.z is not None else None
    out = np.empty(len(a_values), dtype=complex)
    for i, a in enumerate(a_values):
        total = 0.0 + 0.0j
        # Sym over S_l regrouped as subsets: each subset of axes taking the
        # 0-type pole appears (l-a)! a! times.
        for subset in combinations(range(l), l - a):
            operands = [grid, list(range(l))]
            for u in range(l):
                vec = pole0[u] if u in subset else polez[u]
                operands.extend([vec, [u]])
            operands.append([])
            total += np.einsum(*operands)
        out[i] = math.factorial(l - a) * math.factorial(a) * np.exp(shift) * total
    return out


def integrate_spec(contour: MultiLoopContour, spec: LoopIntegrandSpec,
                   a_values: Optional[Sequence[int]],
                   cfg: QuadratureConfig):
    """Refine the tensor-product rule until the error target is met.

    Returns a list of QuadratureResult, one per entry of ``a_values`` (a
    single-element list when ``a_values`` is None).
    """
    if contour.l == 0:
        vals, _ = _grid_values(contour, spec, a_values, 0, cfg.cap_panels)
        return [QuadratureResult(complex(v), 0.0, 0, 0.0) for v in vals]
    trunc = contour.loops[0].truncation
    if cfg.fixed_level is not None:
        levels = [cfg.fixed_level - 1, cfg.fixed_level] if cfg.fixed_level > 0 else [0]
        prev = None
        for lv in levels:
            vals, n_tot = _grid_values(contour, spec, a_values,
                                       cfg.level_nodes(lv), cfg.cap_panels)
            errs = np.abs(vals - prev) if prev is not None else np.zeros(len(vals))
            prev = vals
        return [
            QuadratureResult(complex(v), float(e), n_tot, trunc)
            for v, e in zip(vals, errs)
        ]

    prev = None
    vals = None
    errs = None
    n_tot = 0
    for level in range(cfg.refinements + 1):
        n = cfg.level_nodes(level)
        vals, n_tot = _grid_values(contour, spec, a_values, n, cfg.cap_panels)
        if prev is not None:
            errs = np.abs(vals - prev)
            rel = errs / np.maximum(np.abs(vals), _TINY)
            if float(np.max(rel)) <= cfg.target_rel_err:
                return [
                    QuadratureResult(complex(v), float(e), n_tot, trunc)
                    for v, e in zip(vals, errs)
                ]
        prev = vals
    results = [
        QuadratureResult(complex(v), float(e), n_tot, trunc)
        for v, e in zip(vals, errs if errs is not None else np.zeros(len(vals)))
    ]
    if cfg.strict:
        worst = max(r.rel_error for r in results)
        raise NoConvergence(
            f"relative error {worst:.2e} above target {cfg.target_rel_err:.2e} "
            f"after {cfg.refinements + 1} levels",
            result=results,
        )
    return results


def integrate_multiloop(f: Callable, contour: MultiLoopContour,
                        cfg: QuadratureConfig):
    """Integrate an arbitrary branch-aware integrand handle.

    ``f(point, branch)`` receives the coordinate tuple and the BranchState
    transported to that grid point; the quadrature supplies the product
    measure dt_1 ... dt_l.  Grid points are visited in a fixed row-major
    order and summed with numpy's pairwise reduction, so the result does
    not depend on any parallel configuration.  Intended for desk-scale
    dimensions; the structured integrands use :func:`integrate_spec`.
    """
    if contour.l == 0:
        from .integrand import BranchState

        val = complex(f((), BranchState(t=(), z=contour.z)))
        return QuadratureResult(val, 0.0, 0, 0.0)

    spec = LoopIntegrandSpec(
        kappa=contour.kappa, c_t=0.0, c_neg=0.0, c_zt=0.0, c_pair=0.0,
        z=contour.z,
    )
    trunc = contour.loops[0].truncation
    prev = None
    value = None
    err = None
    for level in range(cfg.refinements + 1):
        n = cfg.level_nodes(level)
        axes, neg_args, z_args, pair_args = _axis_tables(
            contour, spec, n, cfg.cap_panels
        )
        shape = tuple(len(ax.t) for ax in axes)
        grid = np.empty(shape, dtype=complex)
        for index in np.ndindex(shape):
            branch = branch_state_from_tables(
                contour, axes, index, neg_args, z_args, pair_args
            )
            grid[index] = f(branch.t, branch)
        for u, ax in enumerate(axes):
            grid *= ax.dt.reshape(_bshape(contour.l, u, len(ax.t)))
        value = complex(np.sum(grid))
        n_tot = int(np.prod(shape))
        if prev is not None:
            err = abs(value - prev)
            if err / max(abs(value), _TINY) <= cfg.target_rel_err:
                return QuadratureResult(value, err, n_tot, trunc)
        prev = value
    result = QuadratureResult(
        value, err if err is not None else 0.0, n_tot, trunc
    )
    if cfg.strict and result.rel_error > cfg.target_rel_err:
        raise NoConvergence(
            f"relative error {result.rel_error:.2e} above target", result=result
        )
    return result


def quick_config(dim: int, target: Optional[float] = None) -> QuadratureConfig:
    """Sensible defaults by integral dimension."""
    if dim <= 1:
        return QuadratureConfig(nodes=16, refinements=3,
                                target_rel_err=target or 1e-9)
    if dim == 2:
        return QuadratureConfig(nodes=10, refinements=3,
                                target_rel_err=target or 1e-7)
    return QuadratureConfig(nodes=8, refinements=2, growth=1.5,
                            target_rel_err=target or 5e-5)
