"""Monte-Carlo estimate of the smoothing functional against its closed-form bound.

A small ensemble (200 paths) is enough to see that the mean sits far below
``4 sqrt(2 pi) T^(1/2) ||f||^4``.  Run with ``python3 demos/smoothing_bound.py``.
"""
import numpy as np

from wnls import make_grid
from wnls import grid as G
from wnls.noise import brownian_from_rng, path_rng
from wnls.observables import smoothing_values, SMOOTHING_CONSTANT

grid = make_grid(20.0, 512)
f = np.exp(-(grid.x / 0.5) ** 2)
fh = G.fft(f)
norm_f = float(G.lp(f, 2, grid.dx))

for T in (0.25, 0.5, 1.0):
    steps = 100
    dt = T / steps
    db = np.stack([np.diff(brownian_from_rng(path_rng(1, i), steps, dt)) for i in range(200)])
    vals = smoothing_values(fh, db, grid, dt)
    bound = SMOOTHING_CONSTANT * np.sqrt(T) * (T * norm_f) ** 4
    print(f"T = {T:4.2f}  mean = {vals.mean():.4e}  bound = {bound:.4e}  ratio = {vals.mean() / bound:.4f}")
