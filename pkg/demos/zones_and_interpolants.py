"""
Zones, abstraction and interpolants
===================================

Walks through the DBM layer on a two-clock example: build a zone, let time
pass, abstract it with a small set of bounds, and separate two disjoint
zones with as few constraints as possible.

Run with ``python3 demos/zones_and_interpolants.py``.
"""

from tacegar.dbm import LE, LT, Dbm
from tacegar.domain import AbstractDomain
from tacegar.interpolation import minimal_interpolant, refine_by_interpolant

names = ["x", "y"]

# 1 <= x <= 2, y = 0.  Entry (i, j) bounds clock i minus clock j, index 0 is the constant 0.
z = Dbm.from_constraints(3, [(1, 0, LE(2)), (0, 1, LE(-1)), (2, 0, LE(0))])
print("zone:\n" + z.to_text())

# letting time pass removes upper bounds but keeps the difference x - y
print("after delay:\n" + z.up().to_text())
print("reset x:\n" + z.up().reset([1]).to_text())

# abstraction keeps only the bounds the domain knows about
d = AbstractDomain.of(3, [(1, 0, LE(3)), (1, 2, LE(2))])
print("domain:", d.dump(names))
print("alpha(zone up):\n" + d.alpha(z.up()).to_text())

######################## separating two zones ########################

# A: x = y = z = 0.  B: y >= 2, z <= 2, y - x <= 1, x - z <= 1.
# Any zone containing A and missing B needs two constraints here.
a = Dbm.from_constraints(4, [(3, 0, LE(0)), (1, 2, LE(0)), (2, 1, LE(0))])
b = Dbm.from_constraints(4, [(0, 2, LE(-2)), (3, 0, LE(2)), (2, 1, LE(1)), (1, 3, LE(1))])
itp = minimal_interpolant(a, b)
print("interpolant density", itp.k, "constraints", itp.constraints)
print("separates:", itp.separates(a, b))

# adding both halves of the negative cycle keeps the abstractions apart
d2 = refine_by_interpolant(AbstractDomain.empty(4), itp)
print("alpha(A) meets alpha(B):", d2.alpha(a).intersects(d2.alpha(b)))

# strict bounds matter: x < 1 and x >= 1 are disjoint, x <= 1 and x >= 1 are not
print(Dbm.from_constraints(2, [(1, 0, LT(1))]).intersects(Dbm.from_constraints(2, [(0, 1, LE(-1))])))
print(Dbm.from_constraints(2, [(1, 0, LE(1))]).intersects(Dbm.from_constraints(2, [(0, 1, LE(-1))])))
