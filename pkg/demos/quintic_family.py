"""Sweep the family y'' = c*p^2/y + (y^4 + x)/y against P1.

The necessary condition on I_{1;1} leaves two values of c. For c = -1 the
normalized invariants produce a degree-5 map that pulls P1 back exactly; for
c = 3 the same construction yields a candidate which fails the pullback check.
"""

import time

from painleve_equiv import ODE, builtin_derivations_fiber, classify, parameter_constraints
from painleve_equiv.invariants import WordEvaluator, fiber_bases

FAMILY = "c*p^2/y + (y^4+x)/y"

family = ODE.parse(FAMILY, ["c"])
i11 = WordEvaluator(family, builtin_derivations_fiber(), fiber_bases(family))("1;1")
print("I_{1;1} before normalization:", i11)
allowed = parameter_constraints(i11, ["c"])
print(allowed.describe())
print()

for c in sorted(allowed.values):
    f = ODE.parse(FAMILY.replace("c", f"({c})"))
    start = time.perf_counter()
    v = classify(f, "P1", "fiber")
    took = time.perf_counter() - start
    print(f"c = {c}: {'equivalent' if v.equivalent else 'not equivalent'} [{took:.2f} s]")
    cand = v.transformation or v.candidate
    if cand is not None:
        for line in cand.describe():
            print("   ", line)
    if not v.equivalent:
        print("    reason:", v.failure_reason, "-", v.detail)
