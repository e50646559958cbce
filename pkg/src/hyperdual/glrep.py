"""gl(2) weight-subspace matrices, KZ and dynamical operators.

Modules are spanned by lowering-operator powers E_{2,1}^d v applied to a
highest-weight vector of weight (m, 0); the irreducible module truncates
at d = m.  The weight subspace of (Verma tensor irreducible) carrying
weight (l1, l2) has the normalized basis

    F^a = E_{2,1}^{l2-a} v_{m1} (x) E_{2,1}^a v_{m2} / ((l2-a)! a!),

a = 0..min(m2, l2).  All operators here are assembled by applying
generator words to these basis vectors and re-expanding, so every matrix
identity traces back to the commutation relations.

First-order operators are stored as a derivative slot plus a coefficient
matrix built from simple-pole and linear terms; commutators and the
parameter-swap intertwining identities are then checked with analytically
differentiated coefficients, to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateParameters, IndexOutOfRange
from .model import CheckReport, CheckValue, WeightData

_TINY = 1e-300

VARS = ("z1", "z2", "lam1", "lam2")


@dataclass(frozen=True)
class ModuleSpec:
    """Highest-weight gl(2) module: Verma for any m, irreducible for m in Z>=0."""

    kind: str  # "verma" | "irreducible"
    m: complex

    def __post_init__(self):
        if self.kind not in ("verma", "irreducible"):
            raise ValueError(f"unknown module kind {self.kind!r}")
        if self.kind == "irreducible":
            m = complex(self.m)
            if m.imag != 0 or m.real < 0 or m.real != int(m.real):
                raise ValueError(
                    f"irreducible module needs a nonnegative integer weight, got {self.m}"
                )

    @property
    def top(self) -> Optional[int]:
        """Largest basis power d, or None when unbounded."""
        return int(complex(self.m).real) if self.kind == "irreducible" else None


def act_E(i: int, j: int, spec: ModuleSpec, d: int):
    """Action of E_{i,j} on the basis vector E_{2,1}^d v_m.

    Returns a list of (coefficient, new power) pairs; the list is empty
    when the image vanishes.  The coefficients follow from the gl(2)
    commutation relations and the highest-weight conditions:
    E_{1,1}: (m - d), E_{2,2}: d, E_{2,1}: shift up, E_{1,2}: d (m - d + 1)
    with shift down.
    """
    if d < 0 or (spec.top is not None and d > spec.top):
        raise IndexOutOfRange(f"power {d} outside the module basis")
    m = spec.m
    if (i, j) == (1, 1):
        return [(m - d, d)]
    if (i, j) == (2, 2):
        return [(complex(d), d)]
    if (i, j) == (2, 1):
        if spec.top is not None and d + 1 > spec.top:
            return []
        return [(1.0 + 0.0j, d + 1)]
    if (i, j) == (1, 2):
        if d == 0:
            return []
        return [(d * (m - d + 1), d - 1)]
    raise ValueError(f"no generator E_{i},{j} in gl(2)")


Mono = Dict[Tuple[int, int], complex]  # (d1, d2) -> coefficient


@dataclass(frozen=True)
class WeightBasis:
    """The F^a basis of the (l1, l2) weight subspace of M_{m1} (x) L_{m2}."""

    wd: WeightData

    @property
    def dim(self) -> int:
        return self.wd.dim

    @property
    def modules(self) -> Tuple[ModuleSpec, ModuleSpec]:
        return (ModuleSpec("verma", self.wd.m1),
                ModuleSpec("irreducible", complex(self.wd.m2)))

    def label(self, a: int) -> Tuple[int, int]:
        return (self.wd.l2 - a, a)

    def norm(self, a: int) -> float:
        return 1.0 / (math.factorial(self.wd.l2 - a) * math.factorial(a))

    def basis_mono(self, a: int) -> Mono:
        if not 0 <= a < self.dim:
            raise IndexOutOfRange(f"basis index {a} outside 0..{self.dim - 1}")
        return {self.label(a): complex(self.norm(a))}

    def apply_slot(self, i: int, j: int, slot: int, mono: Mono) -> Mono:
        """Apply E_{i,j} on one tensor slot to a monomial combination."""
        spec = self.modules[slot]
        out: Mono = {}
        for (d1, d2), coeff in mono.items():
            d = (d1, d2)[slot]
            for c, dnew in act_E(i, j, spec, d):
                key = (dnew, d2) if slot == 0 else (d1, dnew)
                out[key] = out.get(key, 0.0) + coeff * c
        return {k: v for k, v in out.items() if v != 0}

    def apply_total(self, i: int, j: int, mono: Mono) -> Mono:
        out: Mono = {}
        for part in (self.apply_slot(i, j, 0, mono), self.apply_slot(i, j, 1, mono)):
            for k, v in part.items():
                out[k] = out.get(k, 0.0) + v
        return {k: v for k, v in out.items() if v != 0}

    def to_coords(self, mono: Mono) -> np.ndarray:
        """Express a weight-(l1, l2) combination in the F^a coordinates."""
        out = np.zeros(self.dim, dtype=complex)
        for (d1, d2), coeff in mono.items():
            if d1 + d2 != self.wd.l2:
                raise ValueError(
                    f"monomial {(d1, d2)} leaves the weight subspace"
                )
            a = d2
            if not 0 <= a < self.dim:
                raise ValueError(f"monomial {(d1, d2)} outside the basis range")
            out[a] += coeff / self.norm(a)
        return out

    def matrix_of(self, action: Callable[[Mono], Mono]) -> np.ndarray:
        cols = [self.to_coords(action(self.basis_mono(a))) for a in range(self.dim)]
        return np.stack(cols, axis=1)


def casimir_matrix(wd: WeightData) -> np.ndarray:
    """Matrix of the Casimir element of gl(2) (x) gl(2) in the F^a basis."""
    basis = WeightBasis(wd)

    def omega(mono: Mono) -> Mono:
        out: Mono = {}
        for (i1, j1), (i2, j2) in (((1, 1), (1, 1)), ((2, 2), (2, 2)),
                                   ((1, 2), (2, 1)), ((2, 1), (1, 2))):
            part = basis.apply_slot(i2, j2, 1, basis.apply_slot(i1, j1, 0, mono))
            for k, v in part.items():
                out[k] = out.get(k, 0.0) + v
        return out

    return basis.matrix_of(omega)


def slot_diag_matrix(i: int, slot: int, wd: WeightData) -> np.ndarray:
    """Matrix of E_{i,i} acting on one tensor slot (diagonal in F^a)."""
    basis = WeightBasis(wd)
    return basis.matrix_of(lambda mono: basis.apply_slot(i, i, slot, mono))


def _dyn_interaction_matrix(wd: WeightData) -> np.ndarray:
    """Matrix of E_{2,1} E_{1,2} - E_{2,2} under the coproduct action."""
    basis = WeightBasis(wd)

    def act(mono: Mono) -> Mono:
        out = basis.apply_total(2, 1, basis.apply_total(1, 2, mono))
        for k, v in basis.apply_total(2, 2, mono).items():
            out[k] = out.get(k, 0.0) - v
        return {k: v for k, v in out.items() if v != 0}

    return basis.matrix_of(act)


@dataclass(frozen=True)
class PoleTerm:
    """matrix / (x_num - x_den)."""

    matrix: np.ndarray
    num: str
    den: str


@dataclass(frozen=True)
class LinearTerm:
    """x_var * matrix."""

    matrix: np.ndarray
    var: str


@dataclass(frozen=True)
class OperatorMatrix:
    """First-order operator kappa d/d(slot) - coefficient(point)."""

    slot: str
    kappa: float
    terms: tuple
    dim: int

    def coeff(self, point: Dict[str, complex]) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for term in self.terms:
            if isinstance(term, PoleTerm):
                denom = point[term.num] - point[term.den]
                if abs(denom) < 1e-14 * (1 + abs(point[term.num])):
                    raise DegenerateParameters(
                        f"{term.num} = {term.den} at {point}"
                    )
                out += term.matrix / denom
            else:
                out += point[term.var] * term.matrix
        return out

    def coeff_deriv(self, point: Dict[str, complex], var: str) -> np.ndarray:
        """Analytic partial derivative of the coefficient matrix."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for term in self.terms:
            if isinstance(term, PoleTerm):
                if var not in (term.num, term.den):
                    continue
                denom = point[term.num] - point[term.den]
                sign = 1.0 if var == term.num else -1.0
                out += -sign * term.matrix / denom**2
            elif term.var == var:
                out += term.matrix
        return out


def kz_operator(a: int, wd: WeightData) -> OperatorMatrix:
    """KZ operator in the evaluation-point slot z_a (two tensor factors)."""
    if a not in (1, 2):
        raise ValueError(f"slot index must be 1 or 2, got {a}")
    omega = casimir_matrix(wd)
    other = 2 if a == 1 else 1
    terms = (
        PoleTerm(omega, f"z{a}", f"z{other}"),
        LinearTerm(slot_diag_matrix(1, a - 1, wd), "lam1"),
        LinearTerm(slot_diag_matrix(2, a - 1, wd), "lam2"),
    )
    return OperatorMatrix(slot=f"z{a}", kappa=wd.kappa, terms=terms, dim=wd.dim)


def dyn_operator(i: int, wd: WeightData) -> OperatorMatrix:
    """Dynamical operator in the weight-parameter slot lam_i."""
    if i not in (1, 2):
        raise ValueError(f"slot index must be 1 or 2, got {i}")
    g = _dyn_interaction_matrix(wd)
    other = 2 if i == 1 else 1
    terms = (
        PoleTerm(g, f"lam{i}", f"lam{other}"),
        LinearTerm(slot_diag_matrix(i, 0, wd), "z1"),
        LinearTerm(slot_diag_matrix(i, 1, wd), "z2"),
    )
    return OperatorMatrix(slot=f"lam{i}", kappa=wd.kappa, terms=terms, dim=wd.dim)


def _point_dict(point) -> Dict[str, complex]:
    if isinstance(point, dict):
        return {k: complex(v) for k, v in point.items()}
    z1, z2, lam1, lam2 = point
    return {"z1": complex(z1), "z2": complex(z2),
            "lam1": complex(lam1), "lam2": complex(lam2)}


def _commutator_norm(p: OperatorMatrix, q: OperatorMatrix,
                     pt: Dict[str, complex]) -> Tuple[float, float]:
    """Residual and scale of [kappa d_x - p, kappa d_y - q] at a point.

    The commutator collapses to multiplication by
    kappa (d_y p - d_x q) + [p, q]; all derivatives are analytic.
    """
    kappa = p.kappa
    pm = p.coeff(pt)
    qm = q.coeff(pt)
    dp = p.coeff_deriv(pt, q.slot)
    dq = q.coeff_deriv(pt, p.slot)
    comm = kappa * (dp - dq) + pm @ qm - qm @ pm
    scale = max(
        1.0,
        float(np.max(np.abs(pm)) * np.max(np.abs(qm))),
        kappa * float(np.max(np.abs(dp)) + np.max(np.abs(dq))),
    )
    return float(np.max(np.abs(comm))), scale


def compatibility_check(point, wd: WeightData,
                        tolerance: float = 1e-10) -> CheckReport:
    """All pairwise commutators of the KZ and dynamical operators vanish."""
    pt = _point_dict(point)
    ops = {
        "kz1": kz_operator(1, wd),
        "kz2": kz_operator(2, wd),
        "dyn1": dyn_operator(1, wd),
        "dyn2": dyn_operator(2, wd),
    }
    pairs = [("kz1", "kz2"), ("kz1", "dyn1"), ("kz1", "dyn2"),
             ("kz2", "dyn1"), ("kz2", "dyn2"), ("dyn1", "dyn2")]
    values = []
    worst = 0.0
    for na, nb in pairs:
        norm, scale = _commutator_norm(ops[na], ops[nb], pt)
        rel = norm / scale
        worst = max(worst, rel)
        values.append(CheckValue(f"[{na},{nb}]", complex(norm), 0.0))
    params = {**pt, "m1": wd.m1, "m2": wd.m2, "l1": wd.l1, "l2": wd.l2,
              "kappa": wd.kappa}
    return CheckReport.from_values("compatibility", params, values, worst,
                                   tolerance)


def _swap_point(pt: Dict[str, complex]) -> Dict[str, complex]:
    return {"z1": pt["lam1"], "z2": pt["lam2"],
            "lam1": pt["z1"], "lam2": pt["z2"]}


def duality_intertwine_check(point, wd: WeightData,
                             tolerance: float = 1e-10) -> CheckReport:
    """Parameter-swap intertwining of the KZ and dynamical operators.

    The index-preserving isomorphism F^a(m1,m2,l1,l2) -> F^a(l1,l2,m1,m2)
    exchanges the two systems with the roles of the z and lambda arguments
    swapped.  In matrix form: the coefficient of the swapped-parameter KZ
    operator at (z, lam) equals the coefficient of the original dynamical
    operator at (lam, z), and vice versa.
    """
    pt = _point_dict(point)
    spt = _swap_point(pt)
    wds = wd.swap()
    values = []
    worst = 0.0
    for a in (1, 2):
        checks = [
            (f"kz{a}~dyn{a}", kz_operator(a, wds).coeff(pt),
             dyn_operator(a, wd).coeff(spt)),
            (f"dyn{a}~kz{a}", dyn_operator(a, wds).coeff(pt),
             kz_operator(a, wd).coeff(spt)),
        ]
        for label, lhs, rhs in checks:
            scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
            diff = float(np.max(np.abs(lhs - rhs)))
            worst = max(worst, diff / scale)
            values.append(CheckValue(label, complex(diff), 0.0))
    params = {**pt, "m1": wd.m1, "m2": wd.m2, "l1": wd.l1, "l2": wd.l2,
              "kappa": wd.kappa}
    return CheckReport.from_values("duality-intertwine", params, values, worst,
                                   tolerance)


def solution_residual_check(u: Callable, point, h: float, wd: WeightData,
                            tolerance: float = 1e-5) -> CheckReport:
    """Finite-difference residuals of the KZ/dynamical system for a solution.

    ``u(z1, z2, lam1, lam2)`` returns a weight-subspace vector.  For each
    operator the kappa-scaled five-point derivative in its slot minus the
    coefficient action is compared against the natural scale of the two
    terms.
    """
    pt = _point_dict(point)
    ops = [kz_operator(1, wd), kz_operator(2, wd),
           dyn_operator(1, wd), dyn_operator(2, wd)]
    u0 = np.asarray(u(**pt), dtype=complex)
    values = []
    worst = 0.0
    for op in ops:
        shifts = {}
        for s in (-2, -1, 1, 2):
            q = dict(pt)
            q[op.slot] = q[op.slot] + s * h
            shifts[s] = np.asarray(u(**q), dtype=complex)
        du = (shifts[-2] - 8 * shifts[-1] + 8 * shifts[1] - shifts[2]) / (12 * h)
        action = op.coeff(pt) @ u0
        res = wd.kappa * du - action
        scale = max(float(np.max(np.abs(wd.kappa * du))),
                    float(np.max(np.abs(action))), _TINY)
        rel = float(np.max(np.abs(res))) / scale
        worst = max(worst, rel)
        values.append(CheckValue(f"residual[{op.slot}]",
                                 complex(np.max(np.abs(res))), 0.0))
    params = {**pt, "h": h, "m1": wd.m1, "m2": wd.m2, "l1": wd.l1,
              "l2": wd.l2, "kappa": wd.kappa}
    return CheckReport.from_values("solution-residual", params, values, worst,
                                   tolerance)
