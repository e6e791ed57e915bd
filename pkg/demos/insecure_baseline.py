"""
Why the obvious plan leaks its timing
=====================================

The plan "go to 2, take c2 to 3, then c1 to 6" is deterministic. It always
works, and that is the problem: an intruder who sees the robot in Region 1
knows it will finish exactly three steps later.
"""

from unpred import load_example, prepare
from unpred.verify import MealyController, build_closed_loop, check_unpredictable

ts = load_example("robot6")
_, _, prod = prepare(ts, "F(p1 & F p2)")

baseline = MealyController.positional({"1": "c1", "2": "c2", "3": "c1", "6": "c1"})
cl = build_closed_loop(prod, baseline)
print("closed loop:", [c[0] for c in cl.configs])

# A horizon K is leaked when some observation history makes completion in
# exactly K steps certain. The witness is the shortest such history.
for k in range(5):
    verdict = check_unpredictable(cl, k)
    print(f"K={k}: {'unpredictable' if verdict else 'leaks after seeing ' + ' '.join(verdict.witness)}")
