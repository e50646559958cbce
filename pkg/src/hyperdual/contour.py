"""Truncated multi-loop contours with exact branch transport.

Each loop is realized as a "stadium": two horizontal edges at heights
``+r`` and ``-r`` over the half-line from the loop center towards
+infinity, closed on the left by a half-circle cap of radius ``r``.  The
path enters on the upper edge moving left, turns counterclockwise through
the cap, and leaves along the lower edge, so it winds once (+1) around
its center.  The curve is truncated at real offset ``T`` from the center;
integrands must decay along the edges fast enough that the discarded
tails are below working precision (see :func:`truncation_length`).

Nested loops around a common center use strictly increasing radii, which
makes distinct loops geometrically disjoint with gap ``r_v - r_u``; loops
around 0 and around ``z`` stay disjoint as long as every radius is well
below Im z.

Branch bookkeeping: the leftmost point of each loop (the cap midpoint) is
the anchor where every linear factor of the integrands carries its
principal argument.  Arguments anywhere else are produced by continuous
transport along the curve.  Transport is exact: for a straight piece the
continuous argument change of an affine factor w(t) = alpha + e*t equals
the principal argument of the endpoint ratio w1/w0 (a chord cannot wind),
and cap arcs are subdivided until each sub-chord subtends less than a
half-turn around the factor's zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import FactorVanishes, GeometryError

DEFAULT_R0_FACTOR = 0.1
DEFAULT_RADIUS_RATIO = 1.8
IMZ_FRACTION = 0.45
_TAIL_DECADES = 16.0 * math.log(10.0)


@dataclass(frozen=True)
class LineSeg:
    start: complex
    end: complex

    kind = "line"

    def point(self, s: float) -> complex:
        return self.start + s * (self.end - self.start)

    def velocity(self, s: float) -> complex:
        return self.end - self.start


@dataclass(frozen=True)
class ArcSeg:
    center: complex
    radius: float
    theta0: float
    theta1: float

    kind = "arc"

    def angle(self, s: float) -> float:
        return self.theta0 + s * (self.theta1 - self.theta0)

    def point(self, s: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * self.angle(s))

    def velocity(self, s: float) -> complex:
        return (
            1j
            * (self.theta1 - self.theta0)
            * self.radius
            * cmath.exp(1j * self.angle(s))
        )


@dataclass(frozen=True)
class LoopPath:
    """One truncated loop: upper edge in, counterclockwise cap, lower edge out."""

    center: complex
    radius: float
    truncation: float
    segments: tuple

    @classmethod
    def stadium(cls, center: complex, radius: float, truncation: float) -> "LoopPath":
        if radius <= 0:
            raise GeometryError(f"loop radius must be positive, got {radius}")
        if truncation <= radius:
            raise GeometryError(
                f"truncation {truncation} must exceed loop radius {radius}"
            )
        c = complex(center)
        upper = LineSeg(c + truncation + 1j * radius, c + 1j * radius)
        cap = ArcSeg(c, radius, math.pi / 2, 3 * math.pi / 2)
        lower = LineSeg(c - 1j * radius, c + truncation - 1j * radius)
        return cls(center=c, radius=radius, truncation=truncation,
                   segments=(upper, cap, lower))

    @property
    def anchor_point(self) -> complex:
        """Leftmost point of the loop, where branch choices are pinned."""
        return self.center - self.radius

    def point(self, tau: float) -> complex:
        """Position at global parameter tau in [0, 1] (equal thirds)."""
        k = min(int(tau * 3), 2)
        return self.segments[k].point(tau * 3 - k)

    def velocity(self, tau: float) -> complex:
        k = min(int(tau * 3), 2)
        return 3.0 * self.segments[k].velocity(tau * 3 - k)


@dataclass(frozen=True)
class Walk:
    """Ordered sample of a loop used for continuous-argument transport.

    ``points[k]`` lie on the loop in path order.  ``arc_steps[k]`` is None
    when the piece between points k and k+1 is straight, else the pair of
    cap angles it spans.
    """

    loop: LoopPath
    points: np.ndarray
    arc_steps: tuple
    anchor_index: int


def loop_walk(loop: LoopPath,
              seg_params: Optional[Sequence[Sequence[float]]] = None,
              with_nodes: bool = False):
    """Build a Walk through the given per-segment local parameters.

    ``seg_params`` lists, per segment, sorted local parameters in (0, 1)
    (typically quadrature nodes).  Segment endpoints and the cap midpoint
    (the anchor) are always included.  With ``with_nodes`` the indices of
    the supplied parameters inside the walk are returned as well.
    """
    if seg_params is None:
        seg_params = ((), (), ())
    points = [loop.segments[0].point(0.0)]
    pieces = []          # pieces[k] joins points[k] to points[k+1]
    node_indices = []
    anchor_index = -1
    for k, seg in enumerate(loop.segments):
        entries = [(float(s), True) for s in seg_params[k]]
        if k == 1 and not any(abs(s - 0.5) < 1e-15 for s, _ in entries):
            entries.append((0.5, False))
        entries.sort(key=lambda e: e[0])
        prev = 0.0
        for s, is_node in entries + [(1.0, False)]:
            if k == 1:
                pieces.append((seg.angle(prev), seg.angle(s)))
            else:
                pieces.append(None)
            if k == 1 and abs(s - 0.5) < 1e-15:
                anchor_index = len(points)
            if is_node:
                node_indices.append(len(points))
            points.append(seg.point(s))
            prev = s
    if anchor_index < 0:
        raise GeometryError("walk does not contain the loop anchor")
    walk = Walk(
        loop=loop,
        points=np.asarray(points, dtype=complex),
        arc_steps=tuple(pieces),
        anchor_index=anchor_index,
    )
    if with_nodes:
        return walk, np.asarray(node_indices, dtype=int)
    return walk


def _check_nonvanishing(wvals, scale: float) -> None:
    if np.min(np.abs(wvals)) < 1e-14 * (1.0 + scale):
        raise FactorVanishes("a linear factor vanishes on the contour")


def _arc_points(loop: LoopPath, th0: float, th1: float, nsub: int) -> np.ndarray:
    thetas = np.linspace(th0, th1, nsub + 1)
    return loop.center + loop.radius * np.exp(1j * thetas)


def tracked_arg(walk: Walk, alpha: complex, e: complex,
                anchor_value: Optional[float] = None) -> np.ndarray:
    """Continuous argument of w(t) = alpha + e*t along the walk.

    Anchored so that the value at the walk's anchor equals the principal
    argument there (or ``anchor_value`` when given).  Results are snapped
    to principal + 2 pi k with integer k, so no float drift accumulates.
    """
    pts = walk.points
    w = alpha + e * pts
    scale = abs(alpha) + abs(e) * (abs(walk.loop.center) + walk.loop.truncation)
    _check_nonvanishing(w, scale)
    incs = np.empty(len(pts) - 1)
    wc = alpha + e * walk.loop.center
    rho = abs(e) * walk.loop.radius
    d_arc = abs(abs(wc) - rho)
    for k in range(len(pts) - 1):
        arc = walk.arc_steps[k]
        if arc is None:
            incs[k] = cmath.phase((alpha + e * pts[k + 1]) / (alpha + e * pts[k]))
        else:
            th0, th1 = arc
            if d_arc < 1e-14 * (1.0 + scale):
                raise FactorVanishes("factor zero lies on a cap arc")
            nsub = max(1, math.ceil(rho * abs(th1 - th0) / (0.7 * d_arc)))
            sub = alpha + e * _arc_points(walk.loop, th0, th1, nsub)
            incs[k] = float(np.sum(np.angle(sub[1:] / sub[:-1])))
    cum = np.concatenate(([0.0], np.cumsum(incs)))
    base = anchor_value if anchor_value is not None else cmath.phase(w[walk.anchor_index])
    cum += base - cum[walk.anchor_index]
    principal = np.angle(w)
    return principal + 2 * math.pi * np.round((cum - principal) / (2 * math.pi))


def tracked_arg_multi(walk: Walk, alphas: np.ndarray, e: complex,
                      anchor_values: np.ndarray) -> np.ndarray:
    """Vectorized :func:`tracked_arg` over many alphas at once.

    Returns a matrix of shape (len(alphas), len(walk.points)); row i is the
    continuous argument of alphas[i] + e*t along the walk, anchored to
    ``anchor_values[i]`` at the walk's anchor.
    """
    alphas = np.asarray(alphas, dtype=complex)
    pts = walk.points
    w = alphas[:, None] + e * pts[None, :]
    scale = float(np.max(np.abs(alphas))) + abs(e) * (
        abs(walk.loop.center) + walk.loop.truncation
    )
    _check_nonvanishing(w, scale)
    incs = np.zeros((len(alphas), len(pts) - 1))
    wc = alphas + e * walk.loop.center
    rho = abs(e) * walk.loop.radius
    d_arc = float(np.min(np.abs(np.abs(wc) - rho)))
    for k in range(len(pts) - 1):
        arc = walk.arc_steps[k]
        if arc is None:
            incs[:, k] = np.angle(w[:, k + 1] / w[:, k])
        else:
            th0, th1 = arc
            if d_arc < 1e-14 * (1.0 + scale):
                raise FactorVanishes("factor zero lies on a cap arc")
            nsub = max(1, math.ceil(rho * abs(th1 - th0) / (0.7 * d_arc)))
            sub = alphas[:, None] + e * _arc_points(walk.loop, th0, th1, nsub)[None, :]
            incs[:, k] = np.sum(np.angle(sub[:, 1:] / sub[:, :-1]), axis=1)
    cum = np.concatenate((np.zeros((len(alphas), 1)), np.cumsum(incs, axis=1)), axis=1)
    cum += (np.asarray(anchor_values) - cum[:, walk.anchor_index])[:, None]
    principal = np.angle(w)
    return principal + 2 * math.pi * np.round((cum - principal) / (2 * math.pi))


@dataclass(frozen=True)
class ContourGeometry:
    """User-adjustable geometry knobs; None fields use the defaults."""

    r0: Optional[float] = None
    ratio: float = DEFAULT_RADIUS_RATIO
    truncation: Optional[float] = None


@dataclass(frozen=True)
class MultiLoopContour:
    """Product of l disjoint loops: the first b around z, the rest around 0.

    ``base_args`` (filled by :func:`assign_base_args`) records, per linear
    factor of the standard integrands, the argument carried at the
    parametrization origin (every coordinate at its path start).
    """

    z: Optional[complex]
    l: int
    b: int
    loops: tuple
    kappa: float = 1.0
    base_args: Optional[dict] = None

    @property
    def radii(self) -> tuple:
        return tuple(lp.radius for lp in self.loops)


def truncation_length(kappa: float, poly_power: float, floor: float = 0.0) -> float:
    """Edge length after which exp(-s/kappa) * s**p is 1e-16 of its peak."""
    p = max(float(poly_power), 0.0)
    s_star = max(p * kappa, 1e-2)
    g_star = -s_star / kappa + (p * math.log(s_star) if p > 0 else 0.0)
    t = max(floor, 2.0 * s_star, 8.0 * kappa)
    while -t / kappa + (p * math.log(t) if p > 0 else 0.0) > g_star - _TAIL_DECADES:
        t *= 1.4
    return t


def build_multi_loop(z: Optional[complex], l: int, b: int,
                     geometry: Optional[ContourGeometry] = None, *,
                     kappa: float = 1.0,
                     poly_power: float = 0.0) -> MultiLoopContour:
    """Construct the nested multi-loop contour with b loops around z.

    With b = 0 and z None this is the contour used by the Selberg-type
    calibration integrals.  Default radii follow a geometric schedule
    r0 * ratio**rank per center group; the default truncation comes from
    :func:`truncation_length` with the supplied decay/growth rates.

    Raises GeometryError when an explicitly requested geometry would let a
    loop collide with (or wind around) the other center; with default
    geometry the radii are shrunk instead.
    """
    geometry = geometry or ContourGeometry()
    if l < 0 or not 0 <= b <= l:
        raise GeometryError(f"need 0 <= b <= l, got l={l}, b={b}")
    if z is not None:
        z = complex(z)
        if z.imag <= 0 and b > 0:
            raise GeometryError(f"z={z} must lie in the upper half-plane")
    if b > 0 and z is None:
        raise GeometryError("loops around z need a z value")
    if l == 0:
        return MultiLoopContour(z=z, l=0, b=0, loops=(), kappa=kappa)

    ratio = geometry.ratio
    if ratio <= 1.0:
        raise GeometryError(f"radius ratio must exceed 1, got {ratio}")
    if geometry.r0 is not None:
        r0 = float(geometry.r0)
    elif z is not None:
        r0 = DEFAULT_R0_FACTOR * min(1.0, abs(z))
    else:
        r0 = DEFAULT_R0_FACTOR
    if r0 <= 0:
        raise GeometryError(f"base radius must be positive, got {r0}")

    max_rank = max(b, l - b) - 1
    max_radius = r0 * ratio**max_rank
    if z is not None and z.imag > 0:
        limit = IMZ_FRACTION * z.imag
        if max_radius >= limit:
            if geometry.r0 is not None:
                raise GeometryError(
                    f"radius {max_radius:.3g} collides with the other center "
                    f"(limit {limit:.3g} for z={z})"
                )
            r0 *= limit / max_radius * 0.999
            max_radius = r0 * ratio**max_rank

    if geometry.truncation is not None:
        trunc = float(geometry.truncation)
        if trunc <= 3.0 * max_radius:
            raise GeometryError(
                f"truncation {trunc} too small for outermost radius {max_radius:.3g}"
            )
    else:
        trunc = truncation_length(kappa, poly_power, floor=6.0 * max_radius)

    loops = [LoopPath.stadium(z, r0 * ratio**k, trunc) for k in range(b)]
    loops += [LoopPath.stadium(0.0, r0 * ratio**k, trunc) for k in range(l - b)]
    return MultiLoopContour(z=z, l=l, b=b, loops=tuple(loops), kappa=kappa)


def resolve_geometry(z: Optional[complex], l: int, *, kappa: float,
                     poly_power: float,
                     geometry: Optional[ContourGeometry] = None) -> ContourGeometry:
    """Pin the default geometry to explicit numbers.

    Used by finite-difference stencils: all evaluations near a base point
    must share radii and truncation so the quadrature error varies
    analytically with the evaluation point.  The radius cap is taken over
    the worst split (all loops in one group).
    """
    geometry = geometry or ContourGeometry()
    if geometry.r0 is not None and geometry.truncation is not None:
        return geometry
    if geometry.r0 is not None:
        r0 = float(geometry.r0)
    elif z is not None:
        r0 = DEFAULT_R0_FACTOR * min(1.0, abs(z))
    else:
        r0 = DEFAULT_R0_FACTOR
    max_radius = r0 * geometry.ratio ** max(l - 1, 0)
    if z is not None and complex(z).imag > 0:
        limit = IMZ_FRACTION * complex(z).imag
        if max_radius >= limit:
            r0 *= limit / max_radius * 0.999
            max_radius = r0 * geometry.ratio ** max(l - 1, 0)
    trunc = geometry.truncation or truncation_length(
        kappa, poly_power, floor=6.0 * max_radius
    )
    return ContourGeometry(r0=r0, ratio=geometry.ratio, truncation=trunc)


def assign_base_args(contour: MultiLoopContour, wd=None) -> MultiLoopContour:
    """Populate per-factor arguments at the parametrization origin.

    The principal-argument assignment at the loop anchors (all factors
    positive real or in their stated half-planes there) is transported
    continuously backwards to each path start.  ``wd`` is accepted for
    interface symmetry; the transported values do not depend on it.
    """
    del wd
    walks = [loop_walk(lp) for lp in contour.loops]
    base: dict = {}
    for u, wk in enumerate(walks):
        base[("neg_t", u)] = float(tracked_arg(wk, 0.0, -1.0)[0])
        if contour.z is not None:
            base[("z_minus_t", u)] = float(tracked_arg(wk, contour.z, -1.0)[0])
    for u in range(contour.l):
        for v in range(u + 1, contour.l):
            col = tracked_arg(walks[u], -walks[v].loop.anchor_point, 1.0)
            start_u = complex(walks[u].points[0])
            row = tracked_arg_multi(
                walks[v], np.array([start_u]), -1.0, np.array([col[0]])
            )
            base[("pair", u, v)] = float(row[0, 0])
    return replace(contour, base_args=base)


@dataclass(frozen=True)
class SteepestLoop:
    """A steepest-descent loop: 'small' encircles only 0, 'large' also z."""

    kind: str  # "C'" (large) or "C''" (small)
    z: complex
    truncation: float
    radius: float

    @property
    def loop(self) -> LoopPath:
        return LoopPath.stadium(0.0, self.radius, self.truncation)


def build_steepest_loop(kind: str, z: complex, truncation: float,
                        radius: Optional[float] = None) -> SteepestLoop:
    """Build one of the two saddle-point loops.

    The small loop C'' stays below Im z, so it winds only around 0; the
    large loop C' has radius beyond |z| and encloses both branch points.
    """
    z = complex(z)
    if z.imag <= 0:
        raise GeometryError(f"z={z} must lie in the upper half-plane")
    if kind not in ("C'", "C''"):
        raise GeometryError(f"kind must be C' or C'', got {kind!r}")
    if radius is None:
        radius = 0.3 * z.imag if kind == "C''" else 2.0 * abs(z) + 1.0
    if kind == "C''" and radius >= z.imag:
        raise GeometryError(
            f"small loop radius {radius} would reach z (Im z = {z.imag})"
        )
    if kind == "C'" and radius <= 1.2 * abs(z):
        raise GeometryError(
            f"large loop radius {radius} cannot safely enclose z={z}"
        )
    if truncation <= radius:
        raise GeometryError(
            f"truncation {truncation} too small to close around radius {radius}"
        )
    return SteepestLoop(kind=kind, z=z, truncation=float(truncation),
                        radius=float(radius))


def discrete_winding(loop: LoopPath, samples: int = 720) -> float:
    """Winding number of the loop about its center from a dense sample."""
    taus = np.linspace(0.0, 1.0, samples)
    pts = np.array([loop.point(t) for t in taus]) - loop.center
    total = float(np.sum(np.angle(pts[1:] / pts[:-1])))
    return total / (2 * math.pi)


def min_pair_distance(contour: MultiLoopContour, samples: int = 240) -> float:
    """Smallest distance between points of distinct loops on a dense grid."""
    taus = np.linspace(0.0, 1.0, samples)
    grids = [np.array([lp.point(t) for t in taus]) for lp in contour.loops]
    best = math.inf
    for u in range(contour.l):
        for v in range(u + 1, contour.l):
            d = np.min(np.abs(grids[u][:, None] - grids[v][None, :]))
            best = min(best, float(d))
    return best
