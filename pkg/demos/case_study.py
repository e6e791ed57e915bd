"""
A robot with two checkpoints and an intruder who must not know when
=====================================================================

A robot must visit Region 2 and later Region 6. The floor plan is
nondeterministic: from Region 2 the action ``c1`` may end in 4 or 5. We ask
for a controller that always finishes the task while an observer who sees
every region cannot say, three steps ahead, when the task will be done.
"""

from unpred import load_example, prepare, synthesize, verify_controller
from unpred.verify import build_closed_loop, rooted_paths

ts = load_example("robot6")
formula, dfa, prod = prepare(ts, "F(p1 & F p2)")

# The task automaton after modification: s3 marks the first instant the task
# holds, s_F everything afterwards, s_B would catch undefined moves.
for s in dfa.states:
    print(dfa.short_name(s), dfa.name(s))

# The product pairs each region with the automaton state. x6 is the unique
# first-completion state.
for x in prod.states:
    print(prod.describe(x), "secret" if x in prod.xf else "")

# %%
# Synthesis first explores every possible choice of input and prediction.
# It then prunes nodes that cannot continue and solves a reachability game
# on the remainder.
res = synthesize(prod, k=3)
print(f"AES: {len(res.aes.y_states)} Y-states, {len(res.aes.z_states)} Z-states")
for y in sorted(res.aes.y_states, key=lambda q: res.dist[q]):
    print(f"  {res.aes.describe(y):<14} distance {res.dist[y]}")

# %%
# The decoded controller reads the observation history.
ctrl = res.controller
for obs in ["1", "1 2", "1 2 4", "1 2 5", "1 2 4 5"]:
    print(f"C({obs}) = {ctrl(obs.split())}")

# %%
# Under this controller three runs are possible, finishing after 3 or 4
# moves. Whatever has been seen so far, at least one consistent run is not
# finishing exactly three steps later.
cl = build_closed_loop(prod, ctrl.to_mealy())
runs = set()
for p in rooted_paths(cl, 8):
    xs = [c[0] for c in p]
    if xs[-1] in prod.xf and not any(x in prod.xf for x in xs[:-1]):
        runs.add(" ".join(prod.pairs[x][0] for x in xs))
print(sorted(runs))
print(verify_controller(prod, ctrl.to_mealy(), 3))
