"""Branch-consistent evaluation of the master and weight functions.

The multivalued integrands are products of exponentials and complex
powers of the linear factors -t_u, z - t_u and t_u - t_v (and their
four-variable relatives z1 - s_u, z2 - s_u, s_u - s_v).  A univalued
branch over a contour's parameter cube is fixed by assigning each factor
its principal argument at the cube's anchor (all coordinates at their
loop's leftmost point) and transporting continuously.  Because the cube
is simply connected, the transported argument of each factor is a
single-valued function of the one or two coordinates the factor involves;
per-axis and per-pair argument tables therefore determine the integrand
everywhere on the grid.

Everything is evaluated in log form (log-magnitude plus tracked phase) so
large exponents never overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional, Sequence

import numpy as np

from .contour import MultiLoopContour, Walk, tracked_arg, tracked_arg_multi
from .errors import DegenerateParameters, FactorVanishes, StepTooLarge
from .model import WeightData

VANISH_TOL = 1e-14
MAX_STEP = math.pi / 2


def _guard(w: complex, what: str) -> complex:
    if abs(w) < VANISH_TOL:
        raise FactorVanishes(f"{what} = {w} vanishes")
    return w


@dataclass(frozen=True)
class LogIntegrandValue:
    """A value stored as exp(log_mag + i * phase) with tracked phase."""

    log_mag: float
    phase: float

    @property
    def value(self) -> complex:
        return cmath.exp(complex(self.log_mag, self.phase))


@dataclass
class BranchState:
    """Continuously tracked arguments of every linear factor at a point.

    ``args`` maps factor keys to the tracked argument:

    - ``("neg_t", u)``        argument of -t_u
    - ``("z_minus_t", u)``    argument of z - t_u
    - ``("pair", u, v)``      argument of t_u - t_v for u < v

    (four-variable keys use ``"z1_s"``, ``"z2_s"``, ``"pair_s"``, plus the
    scalar keys ``("lam_diff",)`` and ``("z_diff",)``).

    Each tracked argument always agrees with the principal argument of its
    factor modulo 2 pi; steps keep that exact by re-snapping.
    """

    t: tuple
    z: Optional[complex] = None
    args: dict = field(default_factory=dict)

    @classmethod
    def principal(cls, t: Sequence[complex], z: Optional[complex] = None) -> "BranchState":
        """All-principal assignment; valid where that is the intended branch."""
        t = tuple(complex(x) for x in t)
        args = {}
        for u, tu in enumerate(t):
            args[("neg_t", u)] = cmath.phase(_guard(-tu, f"-t_{u}"))
            if z is not None:
                args[("z_minus_t", u)] = cmath.phase(_guard(z - tu, f"z - t_{u}"))
        for u in range(len(t)):
            for v in range(u + 1, len(t)):
                args[("pair", u, v)] = cmath.phase(
                    _guard(t[u] - t[v], f"t_{u} - t_{v}")
                )
        return cls(t=t, z=z, args=args)

    def clone(self) -> "BranchState":
        return BranchState(t=self.t, z=self.z, args=dict(self.args))


def _factor_value(key, t, z):
    if key[0] == "neg_t":
        return -t[key[1]]
    if key[0] == "z_minus_t":
        return z - t[key[1]]
    if key[0] == "pair":
        return t[key[1]] - t[key[2]]
    raise KeyError(key)


def branch_track_step(branch: BranchState, t_new: Sequence[complex],
                      max_step: float = MAX_STEP) -> BranchState:
    """Transport all tracked arguments to a new point of the cube.

    Each factor's argument is advanced by the principal argument of the
    ratio new/old, then snapped back onto principal + 2 pi k.  Raises
    StepTooLarge when any factor would turn by max_step or more; the
    caller must then refine its grid.
    """
    t_new = tuple(complex(x) for x in t_new)
    if len(t_new) != len(branch.t):
        raise ValueError("dimension mismatch in branch step")
    new_args = {}
    for key, old_arg in branch.args.items():
        w_old = _guard(_factor_value(key, branch.t, branch.z), str(key))
        w_new = _guard(_factor_value(key, t_new, branch.z), str(key))
        inc = cmath.phase(w_new / w_old)
        if abs(inc) >= max_step:
            raise StepTooLarge(
                f"factor {key} argument jump {inc:.3f} >= {max_step:.3f}"
            )
        raw = old_arg + inc
        principal = cmath.phase(w_new)
        new_args[key] = principal + 2 * math.pi * round(
            (raw - principal) / (2 * math.pi)
        )
    return BranchState(t=t_new, z=branch.z, args=new_args)


def _tracked_log(w: complex, arg: float) -> complex:
    return complex(math.log(abs(_guard(w, "factor"))), arg)


def master_phi_l(t: Sequence[complex], z: complex, wd: WeightData,
                 branch: BranchState) -> LogIntegrandValue:
    """kappa-th root of the master function at one point of the cube.

    Computes exp((1/kappa) * (-sum t_u - m1 sum log(-t_u)
    - m2 sum log(z - t_u) + 2 sum_{u<v} log(t_u - t_v))) with all logs
    taken from the tracked BranchState arguments.
    """
    t = tuple(complex(x) for x in t)
    total = 0.0 + 0.0j
    for u, tu in enumerate(t):
        total -= tu
        total -= wd.m1 * _tracked_log(-tu, branch.args[("neg_t", u)])
        total -= wd.m2 * _tracked_log(z - tu, branch.args[("z_minus_t", u)])
    for u in range(len(t)):
        for v in range(u + 1, len(t)):
            total += 2.0 * _tracked_log(t[u] - t[v], branch.args[("pair", u, v)])
    total /= wd.kappa
    return LogIntegrandValue(log_mag=total.real, phase=total.imag)


def weight_w(t: Sequence[complex], z: complex, a: int) -> complex:
    """Symmetrized weight function, the full sum over S_l (l! terms)."""
    t = tuple(complex(x) for x in t)
    l = len(t)
    if not 0 <= a <= l:
        raise ValueError(f"need 0 <= a <= {l}, got a={a}")
    total = 0.0 + 0.0j
    for sigma in permutations(range(l)):
        term = 1.0 + 0.0j
        for pos, u in enumerate(sigma):
            if pos < l - a:
                term /= _guard(-t[u], f"-t_{u}")
            else:
                term /= _guard(z - t[u], f"z - t_{u}")
        total += term
    return total


def master_phi4(s: Sequence[complex], z1: complex, z2: complex,
                lam1: complex, lam2: complex, wd: WeightData,
                branch: BranchState) -> LogIntegrandValue:
    """kappa-th root of the four-variable master function.

    Branch conventions are inherited from the two-variable master function
    through the substitution s_u = t_u/(lam1 - lam2) + z1; the tracked keys
    are ("z1_s", u), ("z2_s", u), ("pair_s", u, v) plus optional scalar
    keys ("lam_diff",) and ("z_diff",) (principal when absent).
    """
    s = tuple(complex(x) for x in s)
    if len(s) != wd.l2:
        raise ValueError(f"need {wd.l2} integration variables, got {len(s)}")
    mu = lam1 - lam2
    zeta = z1 - z2
    scale = max(abs(lam1), abs(lam2), abs(z1), abs(z2), 1.0)
    if abs(mu) < VANISH_TOL * scale:
        raise DegenerateParameters("lam1 = lam2")
    if abs(zeta) < VANISH_TOL * scale:
        raise DegenerateParameters("z1 = z2")
    arg_mu = branch.args.get(("lam_diff",), cmath.phase(mu))
    arg_zeta = branch.args.get(("z_diff",), cmath.phase(zeta))
    total = lam1 * (wd.m1 * z1 + wd.m2 * z2)
    total -= mu * sum(s)
    total -= wd.l2 * _tracked_log(mu, arg_mu)
    total += wd.m1 * wd.m2 * _tracked_log(zeta, arg_zeta)
    for u, su in enumerate(s):
        total -= wd.m1 * _tracked_log(z1 - su, branch.args[("z1_s", u)])
        total -= wd.m2 * _tracked_log(z2 - su, branch.args[("z2_s", u)])
    for u in range(len(s)):
        for v in range(u + 1, len(s)):
            total += 2.0 * _tracked_log(s[u] - s[v], branch.args[("pair_s", u, v)])
    total /= wd.kappa
    return LogIntegrandValue(log_mag=total.real, phase=total.imag)


def weight_w4(s: Sequence[complex], z1: complex, z2: complex, a: int) -> complex:
    """Four-variable weight function: poles at z1 and z2 instead of 0 and z."""
    s = tuple(complex(x) for x in s)
    l = len(s)
    if not 0 <= a <= l:
        raise ValueError(f"need 0 <= a <= {l}, got a={a}")
    total = 0.0 + 0.0j
    for sigma in permutations(range(l)):
        term = 1.0 + 0.0j
        for pos, u in enumerate(sigma):
            if pos < l - a:
                term /= _guard(z1 - s[u], f"z1 - s_{u}")
            else:
                term /= _guard(z2 - s[u], f"z2 - s_{u}")
        total += term
    return total


# ---------------------------------------------------------------------------
# Vectorized argument tables over a contour's node grid.


@dataclass
class AxisGrid:
    """Quadrature nodes of one loop plus the walk used for transport."""

    walk: Walk
    t: np.ndarray           # node positions, path order
    dt: np.ndarray          # complex quadrature weights (GL weight * velocity)
    node_idx: np.ndarray    # index of each node within walk.points

    @property
    def loop(self):
        return self.walk.loop


def axis_arg_table(ax: AxisGrid, alpha: complex, e: complex) -> np.ndarray:
    """Tracked argument of alpha + e*t at the axis' quadrature nodes."""
    return tracked_arg(ax.walk, alpha, e)[ax.node_idx]


def pair_arg_table(ax_u: AxisGrid, ax_v: AxisGrid) -> np.ndarray:
    """Tracked argument of t_u - t_v on the product grid of two axes.

    The assignment is anchored at the joint anchor (both loops at their
    leftmost points) and transported first along the u axis, then along
    the v axis.  Path independence on the simply connected square makes
    the order immaterial; tests exercise the transposed order.
    """
    col = tracked_arg(ax_u.walk, -ax_v.loop.anchor_point, 1.0)[ax_u.node_idx]
    rows = tracked_arg_multi(ax_v.walk, ax_u.t, -1.0, col)
    return rows[:, ax_v.node_idx]


def branch_state_from_tables(contour: MultiLoopContour, axes: Sequence[AxisGrid],
                             index: Sequence[int],
                             neg_args, z_args, pair_args) -> BranchState:
    """Assemble the BranchState at one grid point from precomputed tables."""
    t = tuple(complex(axes[u].t[index[u]]) for u in range(len(axes)))
    args = {}
    for u in range(len(axes)):
        args[("neg_t", u)] = float(neg_args[u][index[u]])
        if contour.z is not None:
            args[("z_minus_t", u)] = float(z_args[u][index[u]])
    for (u, v), table in pair_args.items():
        args[("pair", u, v)] = float(table[index[u], index[v]])
    return BranchState(t=t, z=contour.z, args=args)
