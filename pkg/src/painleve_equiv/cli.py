"""Command-line front end.

Examples::

    painleve-equiv -e "c*p^2/y + (y^4 + x)/y" --param "c={-1,3}" --target p1
    painleve-equiv -e "c*p^2/y + y*(y^4 + x)" --param c=symbolic --explain
    painleve-equiv -e "-p^2/y + y*(y^4 + x)" --target p2a0 --class point \\
        --derivations tables/point_derivations.json --format json

Exit status: 0 when the run completed (whatever the verdicts), 1 on a usage
error, 2 when an internal assertion failed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .classifier import classify, get_target
from .errors import (
    DerivationTableError,
    ParseError,
    ResidualFrameVariable,
    UnsupportedConstraintSystem,
)
from .expr import RationalFunction, parse, to_rational
from .invariants import WordEvaluator, builtin_derivations_fiber, fiber_bases, load_derivations
from .jet import FRAME, JET, ODE
from .normalization import parameter_constraints

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*$")


class UsageError(Exception):
    pass


@dataclass
class ParamDecl:
    name: str
    values: Optional[list] = None  # None means symbolic

    @property
    def symbolic(self):
        return self.values is None


@dataclass
class RunConfig:
    equation: str
    params: list = field(default_factory=list)
    target: str = "p1"
    problem: str = "fiber"
    derivations: Optional[str] = None
    format: str = "text"
    prescreen: bool = False
    timing: bool = False
    explain: bool = False


def _number(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_param(text) -> ParamDecl:
    """``name=value``, ``name={v1,v2,...}`` or ``name=symbolic``."""
    if "=" not in text:
        raise UsageError(f"--param expects name=value, got {text!r}")
    name, rhs = (s.strip() for s in text.split("=", 1))
    if not _IDENT.match(name) or name in JET or name in FRAME:
        raise UsageError(f"invalid parameter name {name!r}")
    if rhs == "symbolic":
        return ParamDecl(name)
    if rhs.startswith("{") and rhs.endswith("}"):
        items = [s for s in rhs[1:-1].split(",") if s.strip()]
        if not items:
            raise UsageError(f"empty sweep list for {name}")
        return ParamDecl(name, [_number(s) for s in items])
    return ParamDecl(name, [_number(rhs)])


def sweep_points(params):
    fixed = [p for p in params if not p.symbolic]
    for combo in itertools.product(*(p.values for p in fixed)):
        yield dict(zip((p.name for p in fixed), combo))


def _fmt_value(v):
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _param_text(shown):
    parts = [f"{k} symbolic" if v == "symbolic" else f"{k} = {v}" for k, v in shown.items()]
    return ", ".join(parts) or "(no parameters)"


def build_equation(cfg: RunConfig):
    names = set(JET) | {p.name for p in cfg.params}
    try:
        node = parse(cfg.equation, names)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    return to_rational(node, names)


def explain(cfg: RunConfig, rhs: RationalFunction):
    """Necessary-condition parameter set from ``I_{1;1} = 0``; returns (text, payload)."""
    symbolic = [p.name for p in cfg.params if p.symbolic]
    if get_target(cfg.target).key != "P1" or cfg.problem != "fiber":
        return "no constraints computed (the I_{1;1} condition applies to P1 under fiber maps)", None
    if len(symbolic) != 1:
        return "no constraints computed", None
    f = ODE(rhs)
    inv = WordEvaluator(f, builtin_derivations_fiber(), fiber_bases(f))("1;1")
    try:
        pc = parameter_constraints(inv, symbolic)
    except UnsupportedConstraintSystem as exc:
        system = [str(RationalFunction.from_polynomial(s)) for s in exc.system or ()]
        return f"warning: {exc}", {"warning": str(exc), "system": system}
    payload = {
        "parameter": pc.name,
        "admissible": None if pc.values is None else [_fmt_value(v) for v in sorted(pc.values)],
    }
    return pc.describe(), payload


def _restrict(params, payload):
    """Replace the symbolic parameter by its admissible values, when finite."""
    if not payload or payload.get("admissible") is None:
        return params
    name = payload["parameter"]
    vals = [Fraction(v) for v in payload["admissible"]]
    return [ParamDecl(p.name, vals) if p.name == name else p for p in params]


def _no_admissible(cfg):
    from .classifier import Verdict

    v = Verdict(False, None, "NoAdmissibleParameter", None, "I_{1;1} cannot vanish identically")
    rec = {"params": {}, "equivalent": False, "reason": v.failure_reason, "transform": None, "degree": None, "seconds": 0.0}
    return rec, v, {}


def run(cfg: RunConfig):
    """Classify every sweep point; returns a JSON-ready report."""
    rhs = build_equation(cfg)
    tgt = get_target(cfg.target)
    derivs = None
    if cfg.derivations:
        try:
            derivs = load_derivations(cfg.derivations)
        except (OSError, DerivationTableError) as exc:
            raise UsageError(f"cannot load derivation table: {exc}") from None
    report = {
        "equation": cfg.equation,
        "target": tgt.key,
        "class": cfg.problem,
        "results": [],
    }
    params = cfg.params
    if cfg.explain:
        text, payload = explain(cfg, rhs)
        report["constraints"] = {"text": text, **(payload or {})}
        params = _restrict(params, payload)
    if not any(True for _ in sweep_points(params)):
        report["results"].append(_no_admissible(cfg))
    for point in sweep_points(params):
        t0 = time.perf_counter()
        f = ODE(rhs.subs(point) if point else rhs)
        v = classify(f, tgt, cfg.problem, derivs, cfg.prescreen)
        elapsed = time.perf_counter() - t0
        rec = {
            "params": {k: _fmt_value(val) for k, val in point.items()},
            "equivalent": v.equivalent,
            "reason": v.failure_reason,
            "transform": v.transformation.as_dict() if v.transformation else None,
            "degree": v.degree,
            "seconds": round(elapsed, 4),
        }
        for p in params:
            if p.symbolic:
                rec["params"][p.name] = "symbolic"
        report["results"].append((rec, v, point))
    return report


def render_text(cfg, report):
    lines = [f"equation: y'' = {cfg.equation}", f"target:   {get_target(cfg.target)}  ({cfg.problem} transformations)"]
    if "constraints" in report:
        lines.append(report["constraints"]["text"])
    for rec, v, point in report["results"]:
        head = _param_text(rec["params"]) + ": "
        if v.equivalent:
            head += f"equivalent (degree {v.degree})"
        else:
            head += f"not equivalent ({v.failure_reason}"
            head += f": {v.detail})" if v.detail else ")"
        if cfg.timing:
            head += f"  [{rec['seconds']:.3f} s]"
        lines.append(head)
        cand = v.transformation or v.candidate
        if cand is not None:
            label = "" if v.equivalent else "rejected candidate: "
            for i, ln in enumerate(cand.describe()):
                lines.append("    " + (label if i == 0 else " " * len(label)) + ln)
            if v.branch:
                lines.append("    with " + ", ".join(f"{k} = {val}" for k, val in v.branch.items()))
    return "\n".join(lines)


def render_json(report):
    out = dict(report)
    out["results"] = [rec for rec, _, _ in report["results"]]
    return json.dumps(out, indent=2)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="painleve-equiv",
        description="Decide whether y'' = f(x, y, p) maps to a Painleve equation and compute the map.",
    )
    ap.add_argument("-e", "--equation", required=True, help="right-hand side f(x, y, p), e.g. '6*y^2 + x'")
    ap.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="SPEC",
        help="name=value, name={v1,v2,...} (sweep) or name=symbolic; repeatable",
    )
    ap.add_argument("--target", choices=("p1", "p2", "p2a0"), default="p1")
    ap.add_argument("--class", dest="problem", choices=("fiber", "point"), default="fiber")
    ap.add_argument("--derivations", metavar="PATH", help="derivation table (JSON) for the point problem")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--prescreen", action="store_true", help="numeric pre-screen before the exact check")
    ap.add_argument("--timing", action="store_true", help="report wall-clock seconds per sweep point")
    ap.add_argument(
        "--explain", action="store_true", help="print the admissible parameter values from I_{1;1} = 0 first"
    )
    return ap


def _glue_equation(argv):
    # an equation may start with '-' (e.g. "-p^2/y + ..."), which argparse
    # would otherwise take for an option
    out, it = [], iter(argv)
    for a in it:
        if a in ("-e", "--equation"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"--equation={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None):
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = ap.parse_args(_glue_equation(argv))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        params = [parse_param(s) for s in ns.param]
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise UsageError("parameter declared twice")
        cfg = RunConfig(
            ns.equation, params, ns.target, ns.problem, ns.derivations, ns.format, ns.prescreen, ns.timing, ns.explain
        )
        report = run(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AssertionError, ResidualFrameVariable) as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 2
    if cfg.format == "json":
        print(render_json(report))
    else:
        print(render_text(cfg, report))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
