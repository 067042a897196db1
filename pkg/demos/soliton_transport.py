"""
Transporting a solitary wave
============================

Without damping, ``3c sech^2(sqrt(c) (x - x0) / 2)`` travels at speed ``c``
with its shape intact.  This is the cleanest end-to-end check of the solver:
after one time unit the numerical profile should sit on the shifted exact one.
"""

import time

import numpy as np

from dampedkdv import SolverConfig, make_grid, simulate, soliton
from dampedkdv.profiles import zero_damping

grid = make_grid(80.0, 512)
u0 = soliton(grid, c=1.0)
a = zero_damping(grid)

start = time.perf_counter()
series = simulate(u0, a, SolverConfig(dt=1e-3, t_end=1.0, record_stride=100, snapshot_times=[1.0]))
elapsed = time.perf_counter() - start

# compare against the exact travelling wave
u1 = series.snapshots[-1]
err = np.max(np.abs(u1.samples - soliton(grid, 1.0, x0=1.0).samples))
print(f"max error at t=1: {err:.2e}   ({elapsed:.2f} s)")

# mass^2 and the Hamiltonian stay put
l2 = series.column("l2_sq")
print(f"int u^2 drift: {np.ptp(l2):.2e}   (exact value 24)")
print(f"Hamiltonian balance residual: {np.max(np.abs(series.column('res_hamiltonian'))):.2e}")

# the three energy-type functionals of the soliton
r = series.records[0]
print(f"e_sec3 = {r.e_sec3:.6f}, k_sec3 = {r.k_sec3:.2e}, e1 = {r.e1:.6f}")
