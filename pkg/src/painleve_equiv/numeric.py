"""Floating-point pre-screen for candidate transformations.

Everything is evaluated at random rational jet points with first-order dual
numbers, so no symbolic derivative or tower reduction is needed. Radical
generators are replaced by every complex root in turn. The screen only
rejects a candidate when no root assignment makes the residuals small; the
exact check stays authoritative.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass
from fractions import Fraction

from .expr.poly import _fraction

TOLERANCE = 1e-9
_DIRS = ("x", "y", "p")


@dataclass(frozen=True)
class Dual:
    """``val + sum(grad[i] * eps_i)`` with ``eps_i eps_j = 0``."""

    val: complex
    grad: tuple = (0j, 0j, 0j)

    def __add__(self, o):
        o = _d(o)
        return Dual(self.val + o.val, tuple(a + b for a, b in zip(self.grad, o.grad)))

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, tuple(-a for a in self.grad))

    def __sub__(self, o):
        return self + (-_d(o))

    def __rsub__(self, o):
        return _d(o) - self

    def __mul__(self, o):
        o = _d(o)
        return Dual(self.val * o.val, tuple(a * o.val + self.val * b for a, b in zip(self.grad, o.grad)))

    __rmul__ = __mul__

    def inverse(self):
        if self.val == 0:
            raise ZeroDivisionError
        inv = 1 / self.val
        return Dual(inv, tuple(-a * inv * inv for a in self.grad))

    def __truediv__(self, o):
        return self * _d(o).inverse()

    def __pow__(self, k):
        if k == 0:
            return Dual(1 + 0j)
        v = self.val**k
        d = k * self.val ** (k - 1)
        return Dual(v, tuple(a * d for a in self.grad))

    def root(self, d, branch):
        """The ``branch``-th complex ``d``-th root."""
        if self.val == 0:
            raise ZeroDivisionError
        r = cmath.exp(cmath.log(self.val) / d) * cmath.exp(2j * cmath.pi * branch / d)
        factor = r / (d * self.val)
        return Dual(r, tuple(a * factor for a in self.grad))


def _d(v):
    return v if isinstance(v, Dual) else Dual(complex(v))


def _eval_poly(poly, names, env):
    acc = Dual(0j)
    for mono, coeff in poly.items():
        c = float(_fraction(coeff))
        term = Dual(complex(c))
        for n, e in zip(names, mono):
            if e:
                term = term * (env[n] ** e)
        acc = acc + term
    return acc


def eval_rf(rf, env):
    names = rf.space.names
    num = _eval_poly(rf.num, names, env) if rf.num else Dual(0j)
    den = _eval_poly(rf.den, names, env)
    return num / den


def eval_element(el, env, gens):
    """``gens`` maps generator names to Duals (already rooted)."""
    acc = Dual(0j)
    for exps, c in el.terms.items():
        term = eval_rf(c, env)
        for g, e in zip(el.tower.gens, exps):
            if e:
                term = term * (gens[g] ** e)
        acc = acc + term
    return acc


def _root_assignments(tower, env):
    """Every consistent choice of complex roots for the generators."""
    choices = [[]]
    for g, d, rel in zip(tower.gens, tower.degrees, tower.relations):
        nxt = []
        for ch in choices:
            gens = dict(ch)
            r = eval_element(rel, env, gens)
            for b in range(d):
                nxt.append(ch + [(g, r.root(d, b))])
        choices = nxt
    return [dict(ch) for ch in choices]


def _sample_env(names, rng):
    env = {}
    for i, n in enumerate(names):
        val = Fraction(rng.randint(-40, 40) or 7, rng.randint(1, 13))
        grad = tuple(1 + 0j if n == d else 0j for d in _DIRS)
        env[n] = Dual(complex(float(val)), grad)
    return env


def prescreen(f, target_f, cand, extra_name=None, samples=3, seed=0):
    """``True`` if some root assignment nearly satisfies every check at every sample."""
    rng = random.Random(seed)
    names = set(f.variables())
    for el in (cand.xbar, cand.ybar, cand.pbar):
        names |= el.variables()
    for rel in cand.tower.relations:
        names |= rel.variables()
    names |= set(_DIRS)
    names = sorted(names)
    envs = []
    attempts = 0
    while len(envs) < samples and attempts < 50 * samples:
        attempts += 1
        env = _sample_env(names, rng)
        try:
            roots = _root_assignments(cand.tower, env)
            eval_rf(f, env)
        except (ZeroDivisionError, ValueError):
            continue
        envs.append((env, roots))
    if not envs:
        return True
    n_assign = len(envs[0][1])
    for k in range(n_assign):
        if all(_residual_ok(f, target_f, cand, env, roots[k], extra_name) for env, roots in envs):
            return True
    return False


def _residual_ok(f, target_f, cand, env, gens, extra_name):
    try:
        xb = eval_element(cand.xbar, env, gens)
        yb = eval_element(cand.ybar, env, gens)
        pb = eval_element(cand.pbar, env, gens)
        fv = eval_rf(f, env).val
        p = env["p"].val
        Dx = xb.grad[0] + p * xb.grad[1]
        Dy = yb.grad[0] + p * yb.grad[1]
        contact = pb.val * Dx - Dy
        tenv = dict(env)
        tenv.update({"x": Dual(xb.val), "y": Dual(yb.val), "p": Dual(pb.val)})
        if extra_name and cand.alphabar is not None:
            tenv[extra_name] = Dual(eval_element(cand.alphabar, env, gens).val)
        tv = eval_rf(target_f, tenv).val
    except (ZeroDivisionError, OverflowError, ValueError):
        return True
    pull = tv * Dx - pb.grad[0] - p * pb.grad[1] - fv * pb.grad[2]
    scale = 1 + abs(pb.val * Dx) + abs(Dy)
    if abs(contact) > TOLERANCE * scale:
        return False
    scale = 1 + abs(tv * Dx) + abs(pb.grad[0]) + abs(p * pb.grad[1]) + abs(fv * pb.grad[2])
    return abs(pull) <= TOLERANCE * scale
