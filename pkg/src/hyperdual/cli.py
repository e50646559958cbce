"""Command-line entry point: one subcommand per verification.

Each subcommand runs its check(s), writes a machine-readable report
(JSON, or CSV for the dimension scan) and exits 0 on pass, 1 on a failed
check, 2 on configuration errors.  Reports are deterministic: apart from
the volatile ``timestamp`` and ``runtime_ms`` fields, identical
configurations produce identical bytes regardless of the worker count
(capped by the HYPERDUAL_THREADS environment variable).

Complex numbers on the command line use the grammar ``a+bi`` with no
whitespace, e.g. ``1+2i``, ``3i``, ``2.3``, ``-0.5-0.25i``.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import asympt as asympt_mod
from . import glrep as glrep_mod
from . import hyperint as hyperint_mod
from . import ode as ode_mod
from . import selberg as selberg_mod
from .contour import ContourGeometry
from .errors import ConfigError, HyperdualError
from .model import (
    CheckReport,
    CheckValue,
    WeightData,
    _jsonable,
    validate_weight_data,
)
from .quadrature import QuadratureConfig, quick_config

SCHEMA_VERSION = 1

_COMPLEX_RE = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)?(?P<i>i)?$"
)


def parse_complex(text: str) -> complex:
    """Parse the ``a+bi`` command-line grammar (no whitespace)."""
    s = text.strip()
    if not s:
        raise ConfigError("empty complex literal")
    m = _COMPLEX_RE.match(s)
    if not m or (m.group("re") is None and m.group("im") is None and not m.group("i")):
        raise ConfigError(f"cannot parse complex number {text!r}")
    re_part, im_part, has_i = m.group("re"), m.group("im"), m.group("i")
    if has_i:
        if im_part is not None:
            imag = float(im_part) if im_part not in ("+", "-") else float(im_part + "1")
            real = float(re_part) if re_part is not None else 0.0
        else:
            imag = float(re_part) if re_part is not None else 1.0
            real = 0.0
        return complex(real, imag)
    if im_part is not None:
        raise ConfigError(f"cannot parse complex number {text!r}")
    return complex(float(re_part), 0.0)


def format_complex(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return repr(v.real)
    sign = "+" if v.imag >= 0 else "-"
    return f"{v.real!r}{sign}{abs(v.imag)!r}i"


@dataclass
class RunConfig:
    """Parsed command-line configuration for one subcommand."""

    command: str
    m1: complex = 2.3
    m2: int = 1
    l1: complex = 1.3
    l2: int = 2
    kappa: float = 2.5
    z: complex = 1 + 2j
    point: tuple = (0.4 - 0.3j, -0.6 + 0.2j, -0.8 + 0.1j, 0.7 + 0.4j)
    m_selberg: complex = 0.7
    l_selberg: int = 2
    saddle_m: tuple = (100.0, 400.0)
    saddle_a: complex = 0.0
    saddle_kind: str = "C'"
    scan_l2: tuple = (1, 2, 3)
    scan_a: int = 0
    scan_b: int = 0
    h: float = 5e-3
    tolerance: Optional[float] = None
    nodes: Optional[int] = None
    refinements: Optional[int] = None
    target_err: Optional[float] = None
    truncation: Optional[float] = None
    seed: int = 2023
    n_points: int = 20
    out: Optional[str] = None
    fmt: str = "json"
    quick: bool = False
    geometry: ContourGeometry = field(default_factory=ContourGeometry)

    def weight_data(self) -> WeightData:
        return validate_weight_data(self.m1, self.m2, self.l1, self.l2, self.kappa)

    def quadrature(self, dim: int) -> QuadratureConfig:
        cfg = quick_config(dim, target=self.target_err)
        updates = {}
        if self.nodes is not None:
            updates["nodes"] = self.nodes
        if self.refinements is not None:
            updates["refinements"] = self.refinements
        if self.truncation is not None:
            updates["truncation"] = self.truncation
        if updates:
            from dataclasses import replace

            cfg = replace(cfg, **updates)
        return cfg


def _check_selberg(cfg: RunConfig) -> list:
    p = selberg_mod.SelbergParams(cfg.l_selberg, cfg.m_selberg, cfg.kappa)
    closed = selberg_mod.selberg_closed(p)
    num = selberg_mod.selberg_numeric(p, cfg.quadrature(p.l))
    rel = abs(num.value - closed) / abs(closed)
    tol = cfg.tolerance or (1e-6 if p.l <= 2 else 1e-4)
    values = [
        CheckValue("closed", closed, 0.0),
        CheckValue("numeric", num.value, num.error),
    ]
    params = {"l": p.l, "m": p.m, "kappa": p.kappa}
    return [CheckReport.from_values("selberg", params, values, rel, tol)]


def _check_duality(cfg: RunConfig) -> list:
    if cfg.z.imag <= 0:
        raise ConfigError(f"z={format_complex(cfg.z)} must have Im z > 0")
    wd = cfg.weight_data()
    qcfg = cfg.quadrature(max(wd.m2, wd.l2))
    return [hyperint_mod.duality_gap(cfg.z, wd, qcfg, tolerance=cfg.tolerance)]


def _check_ode(cfg: RunConfig) -> list:
    wd = cfg.weight_data()
    return [ode_mod.ode_residual(cfg.z, wd, cfg.h, cfg.quadrature(wd.l2),
                                 tolerance=cfg.tolerance or 1e-5)]


def _check_asympt(cfg: RunConfig) -> list:
    wd = cfg.weight_data()
    qcfg = cfg.quadrature(wd.l2)
    z_pair = (40j, 80j) if not cfg.quick else (20j, 40j)
    d = min(wd.m2, wd.l2)
    values = []
    worst = 0.0
    for b in range(d + 1):
        devs = {}
        for zv in z_pair:
            lead = ode_mod.asympt_leading(b, b, zv, wd)
            got = hyperint_mod.integral_I(b, b, zv, wd, qcfg)
            devs[zv] = abs(got.value / lead - 1)
            values.append(CheckValue(f"ratio[b={b},z={format_complex(zv)}]",
                                     got.value / lead, got.rel_error))
        quotient = devs[z_pair[0]] / max(devs[z_pair[1]], 1e-300)
        values.append(CheckValue(f"deviation-quotient[b={b}]", quotient, 0.0))
        # Quotient must sit in [1.5, 3]; expressed as a relative miss.
        miss = 0.0 if 1.5 <= quotient <= 3.0 else min(
            abs(quotient - 1.5), abs(quotient - 3.0)
        )
        worst = max(worst, miss)
    params = {"m1": wd.m1, "m2": wd.m2, "l1": wd.l1, "l2": wd.l2,
              "kappa": wd.kappa}
    return [CheckReport.from_values("asympt", params, values, worst,
                                    cfg.tolerance or 1e-12)]


def _check_glrep(cfg: RunConfig) -> list:
    wd = cfg.weight_data()
    rng = np.random.default_rng(cfg.seed)
    worst_c, worst_i = 0.0, 0.0
    for _ in range(cfg.n_points):
        pt = tuple(complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                   for _ in range(4))
        worst_c = max(worst_c, glrep_mod.compatibility_check(pt, wd).max_rel_err)
        worst_i = max(worst_i,
                      glrep_mod.duality_intertwine_check(pt, wd).max_rel_err)
    tol = cfg.tolerance or 1e-10
    params = {"m1": wd.m1, "m2": wd.m2, "l1": wd.l1, "l2": wd.l2,
              "kappa": wd.kappa, "points": cfg.n_points, "seed": cfg.seed}
    values = [CheckValue("compatibility", complex(worst_c), 0.0),
              CheckValue("intertwine", complex(worst_i), 0.0)]
    return [CheckReport.from_values("glrep", params, values,
                                    max(worst_c, worst_i), tol)]


def _check_solution(cfg: RunConfig) -> list:
    wd = cfg.weight_data()
    z1, z2, lam1, lam2 = cfg.point
    x = -(lam1 - lam2) * (z1 - z2)
    if complex(x).imag <= 0:
        raise ConfigError("point must give Im(-(lam1-lam2)(z1-z2)) > 0")
    qcfg = cfg.quadrature(wd.l2)
    reports = []
    d = min(wd.m2, wd.l2)
    for b in range(d + 1):
        u = ode_mod.u_b_solution(b, wd, x, qcfg)
        rep = glrep_mod.solution_residual_check(
            u, cfg.point, cfg.h, wd, tolerance=cfg.tolerance or 1e-5
        )
        reports.append(CheckReport.from_values(
            f"solution-ub{b}", rep.params, rep.values, rep.max_rel_err,
            rep.tolerance,
        ))
    rng = np.random.default_rng(cfg.seed)
    psi0 = rng.standard_normal(wd.dim) + 1j * rng.standard_normal(wd.dim)
    u = ode_mod.u_psi_solution(psi0, x, wd)
    rep = glrep_mod.solution_residual_check(
        u, cfg.point, cfg.h, wd, tolerance=cfg.tolerance or 1e-5
    )
    reports.append(CheckReport.from_values(
        "solution-psi", rep.params, rep.values, rep.max_rel_err, rep.tolerance
    ))
    return reports


def _check_saddle(cfg: RunConfig) -> list:
    # Large loop with the given a; small loop shifted to keep M+a non-integer.
    reports = []
    kinds = (("C'", "saddle-large", cfg.saddle_a),
             ("C''", "saddle-small", cfg.saddle_a + 0.35))
    for kind, name, a in kinds:
        devs = []
        values = []
        for m in cfg.saddle_m:
            p = asympt_mod.SaddleParams(cfg.z, m, a, kind)
            num = asympt_mod.steepest_numeric(p)
            lead = asympt_mod.steepest_asympt(p)
            devs.append(abs(num.value / lead - 1))
            values.append(CheckValue(f"ratio[M={m:g}]", num.value / lead,
                                     num.rel_error))
        quotient = devs[0] / max(devs[-1], 1e-300)
        values.append(CheckValue("deviation-quotient", complex(quotient), 0.0))
        miss = 0.0 if 1.6 <= quotient <= 2.6 else min(
            abs(quotient - 1.6), abs(quotient - 2.6)
        )
        params = {"z": cfg.z, "a": a, "kind": kind, "M": list(cfg.saddle_m)}
        reports.append(CheckReport.from_values(
            name, params, values, miss, cfg.tolerance or 1e-12,
        ))
    return reports


def _check_corollary(cfg: RunConfig) -> list:
    wd = cfg.weight_data()
    qcfg_l = cfg.quadrature(wd.l2)
    qcfg_m = cfg.quadrature(wd.m2)
    d = min(wd.m2, wd.l2)
    worst = 0.0
    values = []
    for b in range(d + 1):
        ratio = hyperint_mod.corollary_ratio(b, wd)
        for a in range(d + 1):
            km = hyperint_mod.integral_K(a, b, cfg.z, wd, qcfg_l)
            kl = hyperint_mod.integral_K(a, b, cfg.z, wd.swap(), qcfg_m)
            got = km.value / kl.value
            rel = abs(got - ratio) / abs(ratio)
            worst = max(worst, rel)
            values.append(CheckValue(f"ratio[{a},{b}]", got, 0.0))
    params = {"z": cfg.z, "m1": wd.m1, "m2": wd.m2, "l1": wd.l1,
              "l2": wd.l2, "kappa": wd.kappa}
    return [CheckReport.from_values("corollary", params, values, worst,
                                    cfg.tolerance or 1e-5)]


def _run_dim_scan(cfg: RunConfig) -> list:
    rows = asympt_mod.dimension_scan(
        cfg.m1, cfg.m2, cfg.kappa, list(cfg.scan_l2), cfg.z,
        a=cfg.scan_a, b=cfg.scan_b,
    )
    return rows


_CHECKS = {
    "selberg-check": _check_selberg,
    "duality-check": _check_duality,
    "ode-check": _check_ode,
    "asympt-check": _check_asympt,
    "glrep-check": _check_glrep,
    "solution-check": _check_solution,
    "saddle-check": _check_saddle,
    "corollary-check": _check_corollary,
}


def _all_reports(cfg: RunConfig) -> list:
    reports = []
    for name in ("selberg-check", "duality-check", "ode-check",
                 "asympt-check", "glrep-check", "solution-check",
                 "saddle-check", "corollary-check"):
        sub = RunConfig(**{**cfg.__dict__, "command": name})
        if cfg.quick and name == "saddle-check":
            sub.saddle_m = (30.0, 120.0)
        reports.extend(_CHECKS[name](sub))
    return reports


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdual",
        description="Verify loop-contour hypergeometric integral identities "
                    "at desk scale.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m1", type=str, default=None)
    common.add_argument("--m2", type=int, default=None)
    common.add_argument("--l1", type=str, default=None)
    common.add_argument("--l2", type=int, default=None)
    common.add_argument("--kappa", type=float, default=None)
    common.add_argument("--z", type=str, default=None)
    common.add_argument("--point", type=str, default=None,
                        help="z1,z2,lam1,lam2 as comma-separated complex")
    common.add_argument("--h", type=float, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--nodes", type=int, default=None)
    common.add_argument("--refinements", type=int, default=None)
    common.add_argument("--target-err", type=float, default=None)
    common.add_argument("--truncation", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--n-points", type=int, default=None)
    common.add_argument("--out", type=str, default=None)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"),
                        default=None)
    common.add_argument("--config", type=str, default=None,
                        help="JSON file with geometry/quadrature overrides")
    common.add_argument("--quick", action="store_true",
                        help="smaller evaluation points for smoke runs")

    for name in list(_CHECKS) + ["dim-scan", "all"]:
        p = sub.add_parser(name, parents=[common])
        if name == "selberg-check":
            p.add_argument("--l", type=int, default=2)
            p.add_argument("--m", type=str, default="0.7")
        if name == "saddle-check":
            p.add_argument("--M", type=str, default="100,400")
            p.add_argument("--a", type=str, default="0")
        if name == "dim-scan":
            p.add_argument("--l2-values", type=str, default="1,2,3")
            p.add_argument("--a", type=int, default=0)
            p.add_argument("--b", type=int, default=0)
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        geo = raw.get("geometry", {})
        cfg.geometry = ContourGeometry(
            r0=geo.get("r0"), ratio=geo.get("ratio", 1.8),
            truncation=geo.get("truncation"),
        )
        for key in ("nodes", "refinements", "target_err", "truncation",
                    "tolerance", "kappa", "seed"):
            if key in raw:
                setattr(cfg, key, raw[key])
    for key in ("m2", "l2", "kappa", "h", "tolerance", "nodes", "refinements",
                "target_err", "truncation", "seed", "n_points", "out", "fmt"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    for key in ("m1", "l1", "z"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, parse_complex(val))
    if getattr(args, "point", None):
        parts = args.point.split(",")
        if len(parts) != 4:
            raise ConfigError("--point needs 4 comma-separated complex values")
        cfg.point = tuple(parse_complex(p) for p in parts)
    if getattr(args, "quick", False):
        cfg.quick = True
    if args.command == "selberg-check":
        cfg.l_selberg = args.l
        cfg.m_selberg = parse_complex(args.m)
    if args.command == "saddle-check":
        cfg.saddle_m = tuple(float(x) for x in args.M.split(","))
        cfg.saddle_a = parse_complex(args.a)
    if args.command == "dim-scan":
        cfg.scan_l2 = tuple(int(x) for x in args.l2_values.split(","))
        cfg.scan_a = args.a
        cfg.scan_b = args.b
    return cfg


def _emit_reports(reports, cfg: RunConfig, runtime_ms: float) -> int:
    payload = {
        "schema": SCHEMA_VERSION,
        "checks": [r.to_dict() for r in reports],
        "pass": all(r.passed for r in reports),
        "runtime_ms": runtime_ms,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if payload["pass"] else 1


def _emit_scan(rows, cfg: RunConfig) -> int:
    out = cfg.out
    if cfg.fmt == "json" and not out:
        payload = {
            "schema": SCHEMA_VERSION,
            "rows": [
                {
                    "l2": r.l2,
                    "l1": _jsonable(r.l1),
                    "direct": _jsonable(r.direct),
                    "dual": _jsonable(r.dual),
                    "ratio": _jsonable(r.ratio),
                    "err": max(r.direct_err, r.dual_err),
                }
                for r in rows
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    target = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    writer = csv.writer(target)
    writer.writerow(asympt_mod.CSV_HEADER)
    for r in rows:
        writer.writerow(r.to_csv_row())
    if out:
        target.close()
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        start = time.monotonic()
        if args.command == "dim-scan":
            rows = _run_dim_scan(cfg)
            return _emit_scan(rows, cfg)
        if args.command == "all":
            reports = _all_reports(cfg)
        else:
            reports = _CHECKS[args.command](cfg)
        runtime_ms = (time.monotonic() - start) * 1000.0
        return _emit_reports(reports, cfg, runtime_ms)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except HyperdualError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
