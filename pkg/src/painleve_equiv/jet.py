"""Operators on the first jet space J^1 with coordinates (x, y, p)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import DegenerateMap, DivisionByZero, NonInvertible
from .expr import ExtensionElement, RationalFunction, parse, substitute, to_rational
from .expr.tower import EMPTY_TOWER, RadicalTower

JET = ("x", "y", "p")
FRAME = ("a1", "a2", "a3", "a4", "a5")

_X = RationalFunction.variable("x")
_Y = RationalFunction.variable("y")
_P = RationalFunction.variable("p")


@dataclass(frozen=True)
class ODE:
    """The equation y'' = f(x, y, p); every other name in ``f`` is a parameter."""

    f: RationalFunction
    _partials: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        f = RationalFunction.coerce(self.f)
        object.__setattr__(self, "f", f)
        bad = set(FRAME) & f.variables()
        if bad:
            raise ValueError(f"right-hand side mentions frame variables {sorted(bad)}")

    @classmethod
    def parse(cls, text, params=()):
        names = set(JET) | set(params)
        return cls(to_rational(parse(text, names), names))

    @property
    def params(self):
        return frozenset(self.f.variables() - set(JET))

    def partial(self, letters=""):
        """``f`` differentiated once per letter, e.g. ``partial("yp")`` is f_yp."""
        key = "".join(sorted(letters, key="xyp".index))
        if key not in self._partials:
            if not key:
                val = self.f
            else:
                val = self.partial(key[:-1]).diff(key[-1])
            self._partials[key] = val
        return self._partials[key]

    def __str__(self):
        return f"y'' = {self.f}"


def _as_f(f):
    return f.f if isinstance(f, ODE) else RationalFunction.coerce(f)


def cartan_Dx(f, g):
    """Total derivative ``g_x + p g_y + f g_p`` along y'' = f.

    Frame variables and parameters in ``g`` are treated as constants. Works for
    rational functions and for tower elements alike.
    """
    f = _as_f(f)
    return g.diff("x") + g.diff("y") * _P + g.diff("p") * f


@dataclass(frozen=True)
class PointMap:
    """(x, y) -> (xbar, ybar) with components in a radical tower."""

    xbar: ExtensionElement
    ybar: ExtensionElement
    tower: RadicalTower = EMPTY_TOWER

    def __post_init__(self):
        t = self.tower
        xb = ExtensionElement.coerce(self.xbar, t)
        yb = ExtensionElement.coerce(self.ybar, t)
        object.__setattr__(self, "xbar", xb.lift(t) if xb.tower is not t else xb)
        object.__setattr__(self, "ybar", yb.lift(t) if yb.tower is not t else yb)
        for comp, name in ((self.xbar, "xbar"), (self.ybar, "ybar")):
            if "p" in comp.variables():
                raise DegenerateMap(f"{name} depends on p; not a point transformation")
        jac = self.xbar.diff("x") * self.ybar.diff("y") - self.xbar.diff("y") * self.ybar.diff("x")
        if jac.is_zero():
            raise DegenerateMap("Jacobian vanishes identically")

    @classmethod
    def identity(cls):
        return cls(ExtensionElement.from_base(_X), ExtensionElement.from_base(_Y))


@dataclass(frozen=True)
class ProlongedMap:
    map: PointMap
    pbar: ExtensionElement

    @property
    def xbar(self):
        return self.map.xbar

    @property
    def ybar(self):
        return self.map.ybar

    @property
    def tower(self):
        return self.map.tower


def contact_denominator(xbar):
    return xbar.diff("x") + xbar.diff("y") * _P


def contact_numerator(ybar):
    return ybar.diff("x") + ybar.diff("y") * _P


def prolong(m: PointMap) -> ProlongedMap:
    """First prolongation: pbar = (ybar_x + ybar_y p) / (xbar_x + xbar_y p)."""
    den = contact_denominator(m.xbar)
    if den.is_zero():
        raise DegenerateMap("xbar_x + xbar_y p vanishes identically")
    return ProlongedMap(m, contact_numerator(m.ybar) * den.inverse())


def _target_bindings(m, extra):
    b = {"x": m.xbar, "y": m.ybar, "p": m.pbar}
    if extra:
        b.update(extra)
    return b


def pullback_ode(target, m, extra: Mapping[str, object] | None = None) -> ExtensionElement:
    """Right-hand side g with y'' = g mapped onto ybar'' = target(xbar, ybar, pbar).

    Differentiating pbar along a solution gives
    ``ybar'' * D(xbar) = pbar_x + p pbar_y + y'' pbar_p``; this is linear in
    y'' and is solved exactly in the tower. ``extra`` binds target parameters
    (for instance ``alpha`` to a tower generator).
    """
    pm = prolong(m) if isinstance(m, PointMap) else m
    t_f = substitute(_as_f(target), _target_bindings(pm, extra), pm.tower)
    dxbar = contact_denominator(pm.xbar)
    coef = pm.pbar.diff("p")
    if coef.is_zero():
        raise NonInvertible("pbar does not depend on p; y'' cannot be eliminated")
    num = t_f * dxbar - pm.pbar.diff("x") - pm.pbar.diff("y") * _P
    return num * coef.inverse()


def pullback_residual(target, pm: ProlongedMap, f, extra=None) -> ExtensionElement:
    """``target * D(xbar) - pbar_x - p pbar_y - f pbar_p``; zero iff the map carries f to target.

    Division-free, so it is the cheap form used by verification.
    """
    t_f = substitute(_as_f(target), _target_bindings(pm, extra), pm.tower)
    dxbar = contact_denominator(pm.xbar)
    return t_f * dxbar - pm.pbar.diff("x") - pm.pbar.diff("y") * _P - pm.pbar.diff("p") * _as_f(f)


def is_fiber_preserving(m) -> bool:
    """True iff xbar does not depend on y."""
    return m.xbar.diff("y").is_zero()


def compose(m1: PointMap, m2: PointMap) -> PointMap:
    """The map ``m1 o m2`` (apply ``m2`` first) for maps with trivial towers."""
    if len(m1.tower) or len(m2.tower):
        raise ValueError("compose supports rational maps only")
    b = {"x": m2.xbar, "y": m2.ybar}
    try:
        xb = substitute(m1.xbar.base_part(), b)
        yb = substitute(m1.ybar.base_part(), b)
    except DivisionByZero as exc:
        raise DegenerateMap(str(exc)) from None
    return PointMap(xb, yb)
