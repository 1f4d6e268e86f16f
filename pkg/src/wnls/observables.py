"""Functionals of trajectories: smoothing quantity, Strichartz samples, stopping statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from . import grid as G
from .grid import SpatialGrid, StateField
from .integrator import EvolveConfig, Trajectory, evolve_batch, spacetime_norm
from .noise import DispersionPath
from .propagator import (DEFAULT_CONVENTION, FieldSeries, PropagatorConvention,
                         _check_shared_grid, linear_multiplier)

#: constant in the bound  E int_0^T ||D^1/2 |Duhamel|^2||^2 <= C T^1/2 E ||f||^4_{L1 L2}
SMOOTHING_CONSTANT = 4.0 * math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class SmoothingFunctional:
    value: float
    T: float


def half_derivative_sq_norm(vh: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """``||D^{1/2}(|v|^2)||_{L2}^2`` from the spectral coefficients of ``v``."""
    rho = np.abs(G.ifft(vh)) ** 2
    rh = G.fft(rho)
    return np.sum(np.abs(grid.xi) * np.abs(rh) ** 2, axis=-1) * grid.dx


def smoothing_values(fh: np.ndarray, db: np.ndarray, grid: SpatialGrid, dt: float,
                     conv: PropagatorConvention = DEFAULT_CONVENTION,
                     time_dependent: bool = False) -> np.ndarray:
    """Smoothing functional for a stack of paths (``db`` of shape ``(P, J)``).

    ``fh`` is the spectral source, shape ``(N,)`` when constant in time or
    ``(J + 1, N)`` otherwise.  The Duhamel integral is advanced with
    ``v_{j+1} = S(t_{j+1}, t_j)(v_j + f_j dt)`` and the integrand is summed at
    the left endpoints ``t_0 .. t_{J-1}``.
    """
    db = np.atleast_2d(db)
    P, J = db.shape
    vh = np.zeros((P, grid.N), dtype=complex)
    total = np.zeros(P)
    for j in range(J):
        total += half_derivative_sq_norm(vh, grid) * dt
        src = fh[j] if time_dependent else fh
        vh = (vh + src * dt) * linear_multiplier(grid, db[:, j], conv)
    return total


def smoothing_functional(f: FieldSeries, path: DispersionPath,
                         conv: PropagatorConvention = DEFAULT_CONVENTION) -> SmoothingFunctional:
    """``int_0^T ||D^{1/2}(|int_0^t S(t,s) f(s) ds|^2)||_{L2}^2 dt`` for one path."""
    _check_shared_grid(f, path)
    if path.values.ndim != 1:
        raise ValueError("smoothing_functional takes a single path")
    fh = G.fft(f.values)
    val = smoothing_values(fh, path.increments()[None, :], f.grid, f.dt, conv,
                           time_dependent=True)
    return SmoothingFunctional(float(val[0]), path.T)


def rhs_l1l2_norm(f: FieldSeries) -> float:
    """Left-endpoint ``L^1(0, T; L^2)`` norm of the source."""
    norms = G.lp(f.values[:-1], 2, f.grid.dx)
    return float(np.sum(norms) * f.dt)


def smoothing_bound(f: FieldSeries) -> float:
    """Right-hand side ``4 sqrt(2 pi) T^{1/2} ||f||_{L1 L2}^4`` for a deterministic source."""
    return SMOOTHING_CONSTANT * math.sqrt(f.T) * rhs_l1l2_norm(f) ** 4


@dataclass(frozen=True)
class StoppingStats:
    R: float
    T: float
    n: int
    hits: int
    fraction: float
    ci_lo: float
    ci_hi: float


def wilson_interval(hits: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(hits), int(n)).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def stopping_statistics(trajectories: Iterable[Trajectory], R: float, T: float
                        ) -> StoppingStats:
    """Empirical ``P(tau_R <= T)`` with a Wilson 95% interval."""
    trajs = list(trajectories)
    if not trajs:
        raise ValueError("no trajectories")
    for tr in trajs:
        if tr.cfg.cutoff_R is None or not math.isclose(tr.cfg.cutoff_R, R):
            raise ValueError("all trajectories must run in cutoff-R mode with the same R")
    hits = sum(1 for tr in trajs if tr.tau is not None and tr.tau <= T + 1e-12)
    lo, hi = wilson_interval(hits, len(trajs))
    return StoppingStats(R, T, len(trajs), hits, hits / len(trajs), lo, hi)


def stopping_from_running(running_at_T: np.ndarray, R: float, T: float) -> StoppingStats:
    """Same statistic from untruncated running norms.

    Before ``tau_R`` the truncated and untruncated solutions coincide, so
    ``tau_R <= T`` iff the untruncated running norm at ``T`` reaches ``R``.
    """
    r = np.asarray(running_at_T)
    hits = int(np.sum(r >= R))
    lo, hi = wilson_interval(hits, r.size)
    return StoppingStats(R, T, r.size, hits, hits / r.size, lo, hi)


def homogeneous_strichartz_sample(u0: StateField, path: DispersionPath, T: float | None = None,
                                  conv: PropagatorConvention = DEFAULT_CONVENTION):
    """``||S(., 0) u0||_{L^5(0, T; L^10)}`` (left-endpoint rule); vectorised over stacked paths."""
    T = path.T if T is None else T
    J = int(round(T / path.dt))
    if J < 1 or J > path.n_steps:
        raise ValueError("T outside the path span")
    g = u0.grid
    b = np.atleast_2d(path.values)[:, :J]
    uh0 = u0.spectral().values
    l10 = np.empty(b.shape)
    for j in range(J):
        u = G.ifft(uh0 * linear_multiplier(g, b[:, j] - b[:, 0], conv))
        l10[:, j] = G.lp(u, 10, g.dx)
    out = G.spacetime_lp(l10, 5, path.dt)
    return float(out[0]) if path.values.ndim == 1 else out


def homogeneous_strichartz_via_evolve(u0: StateField, path: DispersionPath, cfg: EvolveConfig
                                      ) -> float:
    """Reference route through :func:`evolve` with the nonlinearity off."""
    cfg = cfg.replace(nonlinearity="off", T=path.T, dt=path.dt, L=u0.grid.L, N=u0.grid.N)
    tr = evolve_batch(cfg, u0, path).trajectory(0)
    return spacetime_norm(tr, 5, 10, (0.0, path.T))
