"""
How far ahead can the completion instant be hidden?
===================================================

Sweep the horizon K on the six-region robot and record the size of the
enforcement structure and whether a controller exists.
"""

import time

import numpy as np

from unpred import load_example, prepare, synthesize
from unpred.verify import search_estimate_controllers

ts = load_example("robot6")
_, _, prod = prepare(ts, "F(p1 & F p2)")

rows = []
for k in range(6):
    t0 = time.perf_counter()
    res = synthesize(prod, k)
    rows.append((k, len(res.aes.y_states), len(res.aes.z_states), res.ok,
                 time.perf_counter() - t0))

table = np.array(rows, dtype=float)
print(" K   Y    Z  solved  seconds")
for k, ny, nz, ok, dt in table:
    print(f"{int(k):2d} {int(ny):3d} {int(nz):4d}  {bool(ok)!s:>6}  {dt:.4f}")

# %%
# K=1 fails: under full observation the last move into Region 6 is always
# foreseeable one step ahead. An exhaustive search over controllers that
# remember their state estimate agrees.
print("K=1 enumeration:", search_estimate_controllers(prod, 1)[0])
