"""
Lazy abstraction with zone interpolants
=======================================

Checks a small model with the enumerative engine in each domain mode and
prints what the refinements added.  Starting from an empty domain forces
the engine to discover every bound it needs.
"""

from tacegar.automaton import parse_model
from tacegar.cli import render_edge
from tacegar.domain import DomainMode
from tacegar.enumerative import EnumerativeChecker

MODEL = """
clocks x y
location idle initial invariant x<=5
location busy invariant y<=3
location error
edge idle -> busy guard x>=2 reset y
edge busy -> idle guard y>=1 reset x
edge busy -> error guard x-y>6
target error
"""

ta = parse_model(MODEL)

for mode in DomainMode:
    c = EnumerativeChecker(ta, mode, seed_domain=False)
    r = c.run()
    s = r.stats
    print(f"{mode.value:>13}: {r.verdict.value}  nodes={s['nodes']} refinements={s['refinements']}")
    print("   ", c.domain_dump() or "(empty domain)")

# with guard and invariant constants seeded, refinement is rarely needed
r = EnumerativeChecker(ta).run()
print("seeded:", r.verdict.value, "refinements", r.stats["refinements"])

# a reachable variant: the error guard is now satisfiable
ta2 = parse_model(MODEL.replace("x-y>6", "x-y>=1"))
r = EnumerativeChecker(ta2, search="bfs").run()
print("variant:", r.verdict.value, "trace", [render_edge(ta2, i) for i in r.trace])
