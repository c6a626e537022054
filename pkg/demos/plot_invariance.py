"""
Which translations leave the problem invariant?
===============================================

Time translation of an autonomous problem shifts the grid by whole steps,
so both sides of the invariance condition coincide. Translating ``q`` in a
problem that never reads ``q`` still changes ``p . D^alpha q`` when
``alpha < 1``, because the fractional derivative of a constant is not zero.
"""

from fracnoether import Grid, check_invariance, get_problem, state_translation, time_translation

grid = Grid(0.0, 1.0, 1000)
for pid in ("example1", "example2", "example3"):
    pr = get_problem(pid, 0.75)
    res = check_invariance(pr, time_translation(pr.n, pr.m), grid)
    print(f"{pid}: time translation defects {res.defects} -> invariant={res.invariant}")

for alpha in (0.7, 1.0):
    res = check_invariance(get_problem("qfree", alpha), state_translation([1.0], 1), grid)
    print(f"qfree alpha={alpha}: q-translation defects {res.defects} -> invariant={res.invariant}")
