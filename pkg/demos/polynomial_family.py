"""Sweep y'' = c*p^2/y + y*(y^4 + x) against P1, then against P2 with alpha = 0.

Against P1 the admissible values are c = -3 and c = 5. At c = -3 the candidate
fails verification. At c = 5 the first normalization equation loses its a1
term, so no candidate exists at all. The value c = -1 is outside that set; it
belongs to the second target instead.
"""

from painleve_equiv import ODE, classify

FAMILY = "c*p^2/y + y*(y^4+x)"


def at(c):
    return ODE.parse(FAMILY.replace("c", f"({c})"))


for c in (-3, 5):
    v = classify(at(c), "P1", "fiber")
    print(f"P1, c = {c}: {v.failure_reason} ({v.detail})")

print()
v = classify(at(-1), "P2a0", "fiber")
print("P2 with alpha = 0, c = -1:", "equivalent" if v.equivalent else v.failure_reason, f"(degree {v.degree})")
for line in v.transformation.describe():
    print("   ", line)
