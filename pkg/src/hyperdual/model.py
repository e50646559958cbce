"""Parameter validation and shared report types.

All integrals and operators in this package are parametrized by a 4-tuple
(m1, m2, l1, l2) with m1, l1 complex, m2, l2 nonnegative integers, subject
to the balance constraint m1 + m2 = l1 + l2, together with a positive
"generic" parameter kappa.  Genericity excludes the resonances where the
closed-form constants degenerate: sin(pi (j+1) / kappa) = 0 or a Gamma
factor 1 + (m1 - j)/kappa, 1 + (l1 - j)/kappa sitting on a pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from .errors import BalanceViolation, NegativeDimension, NonGenericKappa

BALANCE_TOL = 1e-12
RESONANCE_TOL = 1e-8


@dataclass(frozen=True)
class WeightData:
    """Validated parameter 4-tuple plus kappa.

    Construct through :func:`validate_weight_data`; direct construction skips
    the invariant checks.
    """

    m1: complex
    m2: int
    l1: complex
    l2: int
    kappa: float

    @property
    def dim(self) -> int:
        """Size of the admissible index square, min(m2, l2) + 1."""
        return min(self.m2, self.l2) + 1

    def swap(self) -> "WeightData":
        """The dual parameter tuple (l1, l2, m1, m2)."""
        return validate_weight_data(self.l1, self.l2, self.m1, self.m2, self.kappa)


@dataclass(frozen=True)
class AdmissibleIndex:
    """An integer index a with 0 <= a <= min(m2, l2)."""

    a: int

    def check(self, m2: int, l2: int) -> "AdmissibleIndex":
        if not 0 <= self.a <= min(m2, l2):
            raise IndexError(
                f"index {self.a} outside admissible range 0..{min(m2, l2)}"
            )
        return self


def _as_int(value: Any, name: str) -> int:
    if isinstance(value, bool):
        raise TypeError(f"{name} must be an integer, got bool")
    if isinstance(value, int):
        return value
    as_float = float(value)
    if not as_float.is_integer():
        raise TypeError(f"{name} must be an integer, got {value!r}")
    return int(as_float)


def _gamma_arg_near_pole(arg: complex, tol: float) -> bool:
    # Poles of Gamma sit at 0, -1, -2, ...
    nearest = round(arg.real)
    if nearest > 0:
        return False
    return abs(arg - nearest) < tol


def validate_weight_data(m1, m2, l1, l2, kappa) -> WeightData:
    """Validate the parameter tuple and return an immutable WeightData.

    Raises BalanceViolation, NegativeDimension, or NonGenericKappa.
    """
    m2 = _as_int(m2, "m2")
    l2 = _as_int(l2, "l2")
    if m2 < 0 or l2 < 0:
        raise NegativeDimension(f"m2={m2}, l2={l2} must be nonnegative")
    m1 = complex(m1)
    l1 = complex(l1)
    kappa = float(kappa)
    if abs((m1 + m2) - (l1 + l2)) > BALANCE_TOL:
        raise BalanceViolation(
            f"m1 + m2 = {m1 + m2} differs from l1 + l2 = {l1 + l2}"
        )
    if kappa <= 0:
        raise NonGenericKappa(f"kappa={kappa} must be positive")
    for j in range(max(m2, l2)):
        s = math.sin(math.pi * (j + 1) / kappa)
        if abs(s) <= RESONANCE_TOL:
            raise NonGenericKappa(
                f"sin(pi*{j + 1}/kappa) = {s:.3e} is resonant for kappa={kappa}"
            )
        for hw in (m1, l1):
            arg = 1 + (hw - j) / kappa
            if _gamma_arg_near_pole(arg, RESONANCE_TOL):
                raise NonGenericKappa(
                    f"Gamma argument {arg} too close to a pole for kappa={kappa}"
                )
    return WeightData(m1=m1, m2=m2, l1=l1, l2=l2, kappa=kappa)


def admissible_range(m2: int, l2: int) -> int:
    """Largest admissible index; the matrix dimension is this value + 1."""
    m2 = _as_int(m2, "m2")
    l2 = _as_int(l2, "l2")
    if m2 < 0 or l2 < 0:
        raise NegativeDimension(f"m2={m2}, l2={l2} must be nonnegative")
    return min(m2, l2)


@dataclass(frozen=True)
class CheckValue:
    """One labelled complex value with an attached error estimate."""

    label: str
    value: complex
    err: float = 0.0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "err": float(self.err),
        }


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification: values, worst relative error, verdict."""

    name: str
    params: dict = field(default_factory=dict)
    values: tuple = ()
    max_rel_err: float = 0.0
    tolerance: float = 0.0
    passed: bool = False

    @classmethod
    def from_values(cls, name, params, values, max_rel_err, tolerance):
        return cls(
            name=name,
            params=dict(params),
            values=tuple(values),
            max_rel_err=float(max_rel_err),
            tolerance=float(tolerance),
            passed=bool(max_rel_err <= tolerance),
        )

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "params": _jsonable(self.params),
            "values": [v.to_dict() for v in self.values],
            "max_rel_err": float(self.max_rel_err),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)
