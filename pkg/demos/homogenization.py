"""Integrated OU dispersion approaching Brownian motion as eps shrinks.

Prints the sample variance of ``n_eps(T)`` next to its exact value and the
Brownian limit ``D_eff T``, then the KS distance between ``n_eps(T)`` and a
Brownian sample.  Run with ``python3 demos/homogenization.py``.
"""
import numpy as np

from wnls import StationaryDriverParams, ks_distance
from wnls.noise import integrated_from_rng, integrated_variance, path_rng

T, J, n = 1.0, 20, 2000
rng = np.random.default_rng(3)
# D_eff = 2 var / relax = 1 so the limit is standard Brownian motion
brown = rng.standard_normal(n) * np.sqrt(T)

for eps in (1.0, 0.5, 0.25, 0.1):
    p = StationaryDriverParams("ou", relax=1.0, var=0.5, eps=eps)
    ends = np.array([integrated_from_rng(path_rng(11, i), p, J, T / J)[-1] for i in range(n)])
    print(f"eps = {eps:4.2f}  var = {ends.var():.3f}  exact = {integrated_variance(p, T):.3f}  "
          f"limit = {p.d_eff * T:.3f}  KS = {ks_distance(ends, brown):.3f}")
