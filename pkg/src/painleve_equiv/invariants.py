"""Fundamental invariants, invariant derivations and derived-invariant words.

A derivation is data: a name, a coordinate list and one coefficient per
coordinate. Coefficients may mention ``f`` and its partials through the
identifiers ``f``, ``f_y``, ``f_yp``, ``f_xpp`` and so on (letters in x, y, p
order); they are bound to a concrete equation by :meth:`DerivationSpec.bind`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DerivationTableError, ParseError, UnknownDerivation
from .expr import RationalFunction, parse, rf_sum, to_rational
from .jet import JET, ODE, cartan_Dx

FIBER_COORDINATES = ("x", "y", "p", "a1", "a2", "a4")
POINT_COORDINATES = ("x", "y", "p", "a1", "a2", "a4", "a5")

_PARTIAL = re.compile(r"f(?:_([xyp]+))?$")


def _v(name):
    return RationalFunction.variable(name)


def is_f_identifier(name):
    return _PARTIAL.match(name) is not None


def f_partial_name(letters):
    letters = "".join(sorted(letters, key="xyp".index))
    return f"f_{letters}" if letters else "f"


# -- fundamental invariants -------------------------------------------------


def fundamental_fiber(f: ODE):
    """``{"I1", "I2", "I3"}`` for the fiber-preserving problem."""
    fp, fy = f.partial("p"), f.partial("y")
    fpp, fyp, fyy = f.partial("pp"), f.partial("yp"), f.partial("yy")
    D = lambda g: cartan_Dx(f, g)
    a1, a2, a4 = _v("a1"), _v("a2"), _v("a4")
    dfpp = D(fpp)
    i3 = -f.partial("ppp") * a4 / (2 * a1**2)
    i2 = (fyp - dfpp) / (2 * a1 * a4)
    i1 = ((2 * fyy - D(fyp) - fpp * fy + fyp * fp) * a1 + (dfpp - fyp) * a4 * a2) / (2 * a1**2 * a4**2)
    return {"I1": i1, "I2": i2, "I3": i3}


def point_numerators(f: ODE):
    """The f-dependent parts ``N1``, ``N2`` of the point invariants.

    ``K1 = N1/(a1 a5^2)`` and ``K2 = (a5 N2 + a4 N1)/(a1^2 a5^2)``.
    """
    D = lambda g: cartan_Dx(f, g)
    fp, fy = f.partial("p"), f.partial("y")
    fpp, fppp = f.partial("pp"), f.partial("ppp")
    fyp, fyy = f.partial("yp"), f.partial("yy")
    dfpp = D(fpp)
    n1 = 6 * fyy - 4 * D(fyp) + D(dfpp) - 3 * fy * fpp + 4 * fyp * fp - dfpp * fp
    n2 = (
        2 * fy * fppp
        - fpp * fyp
        + fpp * dfpp
        - D(fppp) * fp
        - fppp * D(fp)
        - 2 * f.partial("yyp")
        + 2 * D(f.partial("ypp"))
        - D(D(fppp))
    )
    return n1, n2


def fundamental_point(f: ODE):
    """``{"K1", "K2"}`` for the point problem."""
    n1, n2 = point_numerators(f)
    a1, a4, a5 = _v("a1"), _v("a4"), _v("a5")
    return {"K1": n1 / (a1 * a5**2), "K2": (a5 * n2 + a4 * n1) / (a5**2 * a1**2)}


# -- derivations -------------------------------------------------------------


@dataclass(frozen=True)
class DerivationSpec:
    name: str
    coordinates: tuple
    coefficients: Mapping[str, RationalFunction]

    def __post_init__(self):
        coords = tuple(self.coordinates)
        object.__setattr__(self, "coordinates", coords)
        coeffs = {}
        for c, val in self.coefficients.items():
            if c not in coords:
                raise DerivationTableError(f"{self.name}: coefficient for unknown coordinate {c!r}")
            val = RationalFunction.coerce(val)
            if not val.is_zero():
                coeffs[c] = val
        object.__setattr__(self, "coefficients", coeffs)

    def free_parameters(self):
        """Names in the coefficients that are neither coordinates nor f-partials."""
        names = set()
        for val in self.coefficients.values():
            names |= val.variables()
        return {n for n in names if n not in self.coordinates and not is_f_identifier(n)}

    def bind(self, f: ODE) -> "BoundDerivation":
        return BoundDerivation(self.name, _bind_coefficients(self.coefficients, f))

    def __eq__(self, other):
        if not isinstance(other, DerivationSpec):
            return NotImplemented
        return (self.name, self.coordinates, self.coefficients) == (other.name, other.coordinates, other.coefficients)

    def __hash__(self):
        return hash((self.name, self.coordinates))


def _bind_coefficients(coeffs, f):
    out = {}
    for c, val in coeffs.items():
        b = {}
        for n in val.variables():
            m = _PARTIAL.match(n)
            if m:
                b[n] = f.partial(m.group(1) or "")
        out[c] = val.subs(b) if b else val
    return out


@dataclass(frozen=True)
class BoundDerivation:
    """A derivation specialised to one equation; call it on a frame function."""

    name: str
    coefficients: Mapping[str, RationalFunction]

    def __call__(self, g):
        terms = []
        for c, coef in self.coefficients.items():
            if g.depends_on(c):
                terms.append(coef * g.diff(c))
        return rf_sum(terms) if terms else RationalFunction.constant(0)


def _spec(name, coords, table):
    return DerivationSpec(name, coords, {c: to_rational(parse(t)) for c, t in table.items()})


def builtin_derivations_fiber():
    """The two invariant derivations of the fiber-preserving problem."""
    c = FIBER_COORDINATES
    x1 = _spec(
        "X1",
        c,
        {"y": "1/a1", "p": "-a2*a4/a1^2", "a1": "-f_pp/2", "a2": "-f_yp/(2*a4)"},
    )
    x3 = _spec(
        "X3",
        c,
        {
            "x": "1/a4",
            "y": "p/a4",
            "p": "f/a4",
            "a1": "a2",
            "a2": "-f_y*a1/a4^2",
            "a4": "(2*a2*a4 + f_p*a1)/a1",
        },
    )
    return DerivationSet("fiber", c, (x1, x3))


@dataclass(frozen=True)
class DerivationSet:
    """Derivations registered for one problem (``fiber`` or ``point``)."""

    problem: str
    coordinates: tuple
    derivations: tuple = ()

    def __post_init__(self):
        names = [d.name for d in self.derivations]
        if len(set(names)) != len(names):
            raise DerivationTableError("duplicate derivation names")

    def __len__(self):
        return len(self.derivations)

    def __iter__(self):
        return iter(self.derivations)

    def get(self, index):
        name = index if str(index).startswith("X") else f"X{index}"
        for d in self.derivations:
            if d.name == name:
                return d
        raise UnknownDerivation(f"no derivation named {name!r} for the {self.problem} problem")

    def frame_variables(self):
        return tuple(c for c in self.coordinates if c not in JET)


# -- table files -------------------------------------------------------------


def dump_derivations(derivs: DerivationSet, path=None):
    """Serialise to the JSON table format; returns the text and writes it when ``path`` is given."""
    doc = {
        "problem": derivs.problem,
        "coordinates": list(derivs.coordinates),
        "derivations": [
            {"name": d.name, "coefficients": {c: str(v) for c, v in d.coefficients.items()}}
            for d in derivs.derivations
        ],
    }
    text = json.dumps(doc, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_derivations(source, problem=None) -> DerivationSet:
    """Read a derivation table from a path or a JSON string.

    An empty document yields an empty set. ``problem`` (when given) must
    match the table's own field.
    """
    text = _read(source)
    if not text.strip():
        probs = problem or "point"
        coords = POINT_COORDINATES if probs == "point" else FIBER_COORDINATES
        return DerivationSet(probs, coords, ())
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DerivationTableError(f"malformed derivation table: {exc}") from None
    return derivations_from_dict(doc, problem)


def _read(source):
    if isinstance(source, Path):
        return source.read_text()
    s = str(source)
    if s.lstrip().startswith("{") or not s.strip():
        return s
    return Path(s).read_text()


def derivations_from_dict(doc, problem=None) -> DerivationSet:
    if not isinstance(doc, dict):
        raise DerivationTableError("derivation table must be a JSON object")
    for key in ("problem", "coordinates", "derivations"):
        if key not in doc:
            raise DerivationTableError(f"derivation table lacks the field {key!r}")
    prob = doc["problem"]
    if prob not in ("fiber", "point"):
        raise DerivationTableError(f"unknown problem {prob!r}")
    if problem is not None and prob != problem:
        raise DerivationTableError(f"table is for the {prob} problem, expected {problem}")
    coords = doc["coordinates"]
    if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords):
        raise DerivationTableError("coordinates must be a list of names")
    if len(set(coords)) != len(coords):
        raise DerivationTableError("duplicate coordinate names")
    required = FIBER_COORDINATES if prob == "fiber" else POINT_COORDINATES
    missing = [c for c in required if c not in coords]
    if missing:
        raise DerivationTableError(f"coordinate list lacks {missing}")
    allowed = set(coords)
    specs = []
    for entry in doc["derivations"]:
        try:
            name = entry["name"]
            table = entry["coefficients"]
        except (KeyError, TypeError):
            raise DerivationTableError("each derivation needs 'name' and 'coefficients'") from None
        coeffs = {}
        for c, text in table.items():
            if c not in allowed:
                raise DerivationTableError(f"{name}: unknown coordinate {c!r}")
            try:
                node = parse(str(text))
            except ParseError as exc:
                raise DerivationTableError(f"{name}.{c}: {exc}") from None
            coeffs[c] = to_rational(node)
        spec = DerivationSpec(name, tuple(coords), coeffs)
        stray = {n for n in spec.free_parameters() if n in ("a3",)}
        if stray:
            raise DerivationTableError(f"{name}: coefficient mentions {sorted(stray)}")
        specs.append(spec)
    return DerivationSet(prob, tuple(coords), tuple(specs))


# -- words -------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantWord:
    """``I_{b;j...k}``: derivations applied to base ``b`` left to right as listed."""

    base: int
    indices: tuple = ()

    @classmethod
    def parse(cls, text):
        text = str(text).strip()
        if ";" in text:
            b, rest = text.split(";", 1)
        else:
            b, rest = text, ""
        if not b.isdigit() or (rest and not rest.isdigit()):
            raise ValueError(f"bad invariant word {text!r}")
        return cls(int(b), tuple(int(ch) for ch in rest))

    def __str__(self):
        return f"{self.base};{''.join(map(str, self.indices))}" if self.indices else str(self.base)

    def extend(self, k):
        return InvariantWord(self.base, self.indices + (k,))


def word(text) -> InvariantWord:
    return text if isinstance(text, InvariantWord) else InvariantWord.parse(text)


def apply_word(w, base: RationalFunction, derivs, f: ODE | None = None):
    """``X_k(...X_j(base))`` for ``w = (j, ..., k)``.

    ``derivs`` is either a :class:`DerivationSet` (then ``f`` binds the
    f-partials) or a mapping from index to already bound derivations.
    """
    w = word(w)
    bound = _bound_map(derivs, f, w.indices)
    g = base
    for k in w.indices:
        g = bound[k](g)
    return g


def _bound_map(derivs, f, indices):
    if isinstance(derivs, DerivationSet):
        if f is None:
            raise ValueError("binding a derivation set needs the equation")
        return {k: derivs.get(k).bind(f) for k in set(indices)}
    out = {}
    for k in set(indices):
        if k not in derivs:
            raise UnknownDerivation(f"no derivation with index {k}")
        out[k] = derivs[k]
    return out


@dataclass
class WordEvaluator:
    """Caches every prefix of the words it has evaluated for one equation."""

    f: ODE
    derivs: "DerivationSet"
    bases: Mapping[int, RationalFunction]
    _bound: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def derivation(self, k):
        if k not in self._bound:
            self._bound[k] = self.derivs.get(k).bind(self.f)
        return self._bound[k]

    def __call__(self, w):
        w = word(w)
        if w in self._cache:
            return self._cache[w]
        if not w.indices:
            if w.base not in self.bases:
                raise UnknownDerivation(f"no base invariant with index {w.base}")
            val = self.bases[w.base]
        else:
            prev = self(InvariantWord(w.base, w.indices[:-1]))
            val = self.derivation(w.indices[-1])(prev)
        self._cache[w] = val
        return val


def fiber_bases(f: ODE):
    inv = fundamental_fiber(f)
    return {1: inv["I1"], 2: inv["I2"], 3: inv["I3"]}


def point_bases(f: ODE):
    inv = fundamental_point(f)
    return {1: inv["K1"], 2: inv["K2"]}


def frame_variables_in(g, coordinates: Iterable[str]):
    return sorted(set(g.variables()) & (set(coordinates) - set(JET)))
