"""
When the intruder cannot tell rooms apart
=========================================

Regions 4 and 5 share a sensor reading here. The controller sees the same
readings as the intruder, so its beliefs may hold several states at once,
each carrying its own prediction bits.
"""

import dataclasses

from unpred import load_example, prepare, synthesize, verify_controller
from unpred.verify import build_closed_loop, state_estimate

ts = load_example("robot6")
obs = dict(ts.observations)
obs["5"] = "4"
ts = dataclasses.replace(ts, observations=obs)
_, _, prod = prepare(ts, "F(p1 & F p2)")

for k in range(4):
    res = synthesize(prod, k)
    print(f"K={k}: {'controller found' if res.ok else 'no controller'}, "
          f"AES {len(res.aes.y_states)}/{len(res.aes.z_states)}")

res = synthesize(prod, 3)
if res.ok:
    aes = res.aes
    for y in sorted(res.det.y_states, key=lambda q: res.dist[q], reverse=True):
        print(f"  {aes.describe(y):<28} plays {res.det.input_at(y)}")
    cl = build_closed_loop(prod, res.controller.to_mealy())
    print("estimate after 1 2 4:", sorted(state_estimate(cl, ["1", "2", "4"])))
    print(verify_controller(prod, res.controller.to_mealy(), 3))
