"""Point equivalence of y'' = -p^2/y + y*(y^4 + x) with P2 at alpha = 0.

First the closed-form map ybar^6 = y^12/4 is checked directly. Then the point
normalization, driven by the derivation table in tests/fixtures, rebuilds a map
for symbolic c, and the same map is recovered at c = -1.
"""

from pathlib import Path

from painleve_equiv import (
    ODE,
    CandidateTransformation,
    candidate_point,
    classify,
    load_derivations,
    rational,
    verify,
)
from painleve_equiv.expr.tower import EMPTY_TOWER

TABLE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "point_derivations.json"
FAMILY = "c*p^2/y + y*(y^4+x)"

t = EMPTY_TOWER.adjoin("ybar", 6, rational("y^12/4"))
yb = t.gen("ybar")
closed = CandidateTransformation(
    "P2a0", "point", yb**2 * rational("2*x/y^4"), yb, yb**5 * rational("4*p/y^9"), t
)
f = ODE.parse(FAMILY.replace("c", "(-1)"))
res = verify(f, "P2a0", closed)
print("closed-form map verifies:", res.ok)
print()

table = load_derivations(TABLE)
general = candidate_point(ODE.parse(FAMILY, ["c"]), "P2", table)
print("candidate for symbolic c:")
for line in general.describe():
    print("   ", line)
print()

v = classify(f, "P2a0", "point", table)
print("classify at c = -1:", "equivalent" if v.equivalent else v.failure_reason, f"(degree {v.degree})")
for line in v.transformation.describe():
    print("   ", line)
print()
print("without a table:", classify(f, "P2a0", "point").failure_reason)
