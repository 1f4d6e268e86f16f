"""Split-step evolution of the quintic NLS with a prescribed dispersion path.

One step over ``[t_j, t_j + dt]`` with dispersion increment ``db`` composes
the exact linear multiplier and the exact pointwise phase flow of
``i u_t + scale |u|^4 u = 0``.  Both substeps are isometries of the discrete
L2 norm, so mass is conserved to round-off whatever the path.

Two truncations are available:

* ``cutoff_R``: the whole nonlinearity is scaled by
  ``theta(||u||_{L^5(0,t;L^10)} / R)`` (a scalar per step and path);
* ``cutoff_M``: the pointwise nonlinearity ``theta(|u|^2 / M) |u|^4 u``.

The engine runs a batch of independent paths at once (leading axis ``P``);
:func:`evolve` is the single-path front end.
"""
from __future__ import annotations

import csv
import math
import struct
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Literal, Optional

import numpy as np

from . import grid as G
from .grid import SpatialGrid, StateField
from .noise import (DispersionPath, StationaryDriverParams, brownian_from_rng,
                    deterministic_path, integrated_from_rng, path_rng)
from .propagator import DEFAULT_CONVENTION, PropagatorConvention, linear_multiplier

#: step flags written to the trajectory CSV
FLAG_TAU = 1          # running L5L10 norm has reached R
FLAG_BLOWUP = 2       # numerical blow-up signature
FLAG_RESOLUTION = 4   # top third of the spectrum holds more than RESOLUTION_TOL of the mass
FLAG_BOUNDARY = 8     # more than BOUNDARY_TOL of the mass within L/4 of the boundary

RESOLUTION_TOL = 1e-10
BOUNDARY_TOL = 1e-8


def _phi(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = np.exp(-1.0 / y[pos])
    return out


def cutoff_theta(x):
    """Smooth nonincreasing cutoff: 1 on ``[0, 1]``, 0 on ``[2, inf)``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise ValueError("cutoff_theta is defined for x >= 0")
    a, b = _phi(2.0 - xa), _phi(xa - 1.0)
    out = a / (a + b)
    return float(out) if out.ndim == 0 else out


def _theta_unchecked(x: np.ndarray) -> np.ndarray:
    a, b = _phi(2.0 - x), _phi(x - 1.0)
    return a / (a + b)


# ---------------------------------------------------------------------------
# single-field substeps
# ---------------------------------------------------------------------------

def _phase(u: np.ndarray, dt: float, scale, cutoff_M: Optional[float]) -> np.ndarray:
    a2 = (u * u.conj()).real
    w = a2 * a2
    if cutoff_M is not None:
        w = w * _theta_unchecked(a2 / cutoff_M)
    return u * np.exp(1j * (np.asarray(scale)[..., None] if np.ndim(scale) else scale) * w * dt)


def nonlinear_phase_step(field: StateField, dt: float, scale: float = 1.0,
                         cutoff_M: Optional[float] = None) -> StateField:
    """Exact flow of ``i u_t + scale |u|^4 u = 0`` over ``dt`` (modulus is invariant)."""
    if field.representation != "physical":
        raise ValueError("nonlinear_phase_step needs a physical-space field")
    return field.with_values(_phase(field.values, dt, scale, cutoff_M))


def strang_step(field: StateField, db: float, dt: float, scale: float = 1.0, *,
                splitting: Literal["strang", "lie"] = "strang",
                conv: PropagatorConvention = DEFAULT_CONVENTION,
                cutoff_M: Optional[float] = None) -> StateField:
    """One splitting step; the dispersion increment is halved across the linear substeps."""
    g = field.grid
    u = field.physical().values
    if splitting == "strang":
        half = linear_multiplier(g, 0.5 * db, conv)
        u = G.ifft(G.fft(u) * half)
        u = _phase(u, dt, scale, cutoff_M)
        u = G.ifft(G.fft(u) * half)
    elif splitting == "lie":
        u = G.ifft(G.fft(u) * linear_multiplier(g, db, conv))
        u = _phase(u, dt, scale, cutoff_M)
    else:
        raise ValueError(f"unknown splitting {splitting!r}")
    return StateField(g, u)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvolveConfig:
    L: float = 10.0
    N: int = 1024
    T: float = 1.0
    dt: float = 1e-3
    dispersion: Literal["brownian", "integrated_stationary", "deterministic"] = "brownian"
    driver: Optional[StationaryDriverParams] = None
    rate: float = 1.0                       # deterministic dispersion b(t) = rate * t
    nonlinearity: Literal["quintic", "off"] = "quintic"
    cutoff_R: Optional[float] = None
    cutoff_M: Optional[float] = None
    splitting: Literal["strang", "lie"] = "strang"
    seed: int = 0
    convention: PropagatorConvention = DEFAULT_CONVENTION
    dealias: Literal["monitor", "truncate"] = "monitor"
    blowup_factor: float = 25.0
    blowup_band: float = 1e-4
    save_stride: Optional[int] = None
    stop_at_tau: bool = False

    def __post_init__(self):
        G.make_grid(self.L, self.N)
        if not (self.T > 0 and self.dt > 0):
            raise ValueError("T and dt must be positive")
        J = self.T / self.dt
        if abs(J - round(J)) > 1e-9 * max(1.0, J):
            raise ValueError(f"dt = {self.dt} does not divide T = {self.T}")
        if self.cutoff_R is not None and self.cutoff_M is not None:
            raise ValueError("at most one cutoff (R or M) may be active")
        if self.cutoff_R is not None and not self.cutoff_R > 0:
            raise ValueError("cutoff_R must be positive")
        if self.cutoff_M is not None and not self.cutoff_M > 0:
            raise ValueError("cutoff_M must be positive")
        if self.dispersion == "integrated_stationary" and self.driver is None:
            raise ValueError("integrated_stationary dispersion needs driver parameters")
        if self.dispersion not in ("brownian", "integrated_stationary", "deterministic"):
            raise ValueError(f"unknown dispersion source {self.dispersion!r}")
        if self.nonlinearity not in ("quintic", "off"):
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")
        if self.splitting not in ("strang", "lie"):
            raise ValueError(f"unknown splitting {self.splitting!r}")
        if self.dealias not in ("monitor", "truncate"):
            raise ValueError(f"unknown dealias mode {self.dealias!r}")

    @property
    def grid(self) -> SpatialGrid:
        return G.make_grid(self.L, self.N)

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    def replace(self, **kw) -> "EvolveConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["convention"] = self.convention.to_dict()
        return d

    def path_values(self, rng: np.random.Generator) -> np.ndarray:
        J = self.n_steps
        if self.dispersion == "brownian":
            return brownian_from_rng(rng, J, self.dt)
        if self.dispersion == "integrated_stationary":
            return integrated_from_rng(rng, self.driver, J, self.dt)
        return deterministic_path(J, self.dt, self.rate).values

    def sample_path(self, seed: Optional[int] = None) -> DispersionPath:
        rng = np.random.default_rng(self.seed if seed is None else seed)
        return DispersionPath(self.dt, self.path_values(rng), self.dispersion)

    def sample_paths(self, root_seed: int, indices) -> DispersionPath:
        """Stacked paths for ensemble members ``indices`` (seed ``root_seed ^ i``)."""
        rows = [self.path_values(path_rng(root_seed, i)) for i in indices]
        return DispersionPath(self.dt, np.stack(rows), self.dispersion)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

_OBS = ("l2", "h1", "linf", "l10", "running_l5l10", "theta_scale", "high_band", "boundary")


@dataclass
class Trajectory:
    """Observables of one path at ``t_j = j dt``, ``j = 0..J``.

    ``running_l5l10[j]`` is the left-endpoint ``L^5(0, t_j; L^10)`` norm and
    ``theta_scale[j]`` the scale applied to the nonlinearity on step ``j``.
    Entries after a blow-up flag (or after ``tau_R`` with ``stop_at_tau``) are NaN.
    """

    cfg: EvolveConfig
    path: DispersionPath
    l2: np.ndarray
    h1: np.ndarray
    linf: np.ndarray
    l10: np.ndarray
    running_l5l10: np.ndarray
    theta_scale: np.ndarray
    high_band: np.ndarray
    boundary: np.ndarray
    final: StateField
    tau_index: Optional[int] = None
    blowup_index: Optional[int] = None
    blowup_reason: str = ""
    snapshots: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return self.cfg.dt

    @property
    def times(self) -> np.ndarray:
        return self.cfg.dt * np.arange(self.l2.shape[-1])

    @property
    def tau(self) -> Optional[float]:
        return None if self.tau_index is None else self.tau_index * self.cfg.dt

    @property
    def blowup_time(self) -> Optional[float]:
        return None if self.blowup_index is None else self.blowup_index * self.cfg.dt

    def flags(self) -> np.ndarray:
        f = np.zeros(self.l2.shape, dtype=int)
        if self.tau_index is not None:
            f[self.tau_index:] |= FLAG_TAU
        if self.blowup_index is not None:
            f[self.blowup_index:] |= FLAG_BLOWUP
        f[self.high_band > RESOLUTION_TOL] |= FLAG_RESOLUTION
        f[self.boundary > BOUNDARY_TOL] |= FLAG_BOUNDARY
        return f

    def spatial_norms(self, p: float) -> np.ndarray:
        if p == 2:
            return self.l2
        if p == 10:
            return self.l10
        if np.isinf(p):
            return self.linf
        if self.cfg.save_stride == 1 and self.snapshots:
            idx = sorted(self.snapshots)
            return np.array([G.lp(self.snapshots[i], p, self.cfg.grid.dx) for i in idx])
        raise ValueError(f"L^{p} norms need snapshots at every step (save_stride=1)")

    def to_csv(self, path: str | Path) -> None:
        cols = ["step", "t", "l2", "h1", "linf", "l10", "running_l5l10", "theta_scale", "flags"]
        flags = self.flags()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for j, t in enumerate(self.times):
                w.writerow([j, repr(float(t))] + [repr(float(getattr(self, c)[j])) for c in cols[2:8]]
                           + [int(flags[j])])

    def write_snapshots(self, path: str | Path) -> None:
        """Little-endian records: ``int64 N, float64 L, float64 t`` then ``N`` (re, im) float64 pairs."""
        g = self.cfg.grid
        with open(path, "wb") as fh:
            for j in sorted(self.snapshots):
                fh.write(struct.pack("<qdd", g.N, g.L, j * self.cfg.dt))
                fh.write(np.ascontiguousarray(self.snapshots[j], dtype="<c16").tobytes())


def read_snapshots(path: str | Path) -> list[tuple[float, StateField]]:
    out = []
    data = Path(path).read_bytes()
    pos = 0
    while pos < len(data):
        N, L, t = struct.unpack_from("<qdd", data, pos)
        pos += 24
        vals = np.frombuffer(data, dtype="<c16", count=N, offset=pos)
        pos += 16 * N
        out.append((t, StateField(G.make_grid(L, N), vals.copy())))
    return out


@dataclass
class TrajectoryBatch:
    """Observables of ``P`` paths, arrays of shape ``(P, J + 1)``."""

    cfg: EvolveConfig
    path: DispersionPath
    obs: dict
    final: np.ndarray
    tau_index: np.ndarray        # -1 when not reached
    blowup_index: np.ndarray     # -1 when not flagged
    blowup_reason: list
    snapshots: dict

    def __len__(self) -> int:
        return self.final.shape[0]

    def trajectory(self, i: int) -> Trajectory:
        ti, bi = int(self.tau_index[i]), int(self.blowup_index[i])
        return Trajectory(
            self.cfg, self.path.row(i), *(self.obs[k][i] for k in _OBS),
            final=StateField(self.cfg.grid, self.final[i]),
            tau_index=None if ti < 0 else ti,
            blowup_index=None if bi < 0 else bi,
            blowup_reason=self.blowup_reason[i],
            snapshots={j: s[i] for j, s in self.snapshots.items()},
        )

    def __iter__(self):
        return (self.trajectory(i) for i in range(len(self)))


def _l10(u: np.ndarray, dx: float) -> np.ndarray:
    return G.lp(u, 10, dx)


def evolve_batch(cfg: EvolveConfig, u0, path: DispersionPath) -> TrajectoryBatch:
    """Evolve ``P`` paths at once; ``path.values`` has shape ``(P, J + 1)``."""
    g = cfg.grid
    dx, dt = g.dx, cfg.dt
    J = cfg.n_steps
    bvals = np.atleast_2d(path.values)
    if bvals.shape[-1] != J + 1 or abs(path.dt - dt) > 1e-12 * dt:
        raise ValueError("dispersion path does not match the configured time grid")
    P = bvals.shape[0]
    u0v = u0.physical().values if isinstance(u0, StateField) else np.asarray(u0, complex)
    if isinstance(u0, StateField) and u0.grid != g:
        raise ValueError("initial field is not on the configured grid")
    if u0v.shape[-1] != g.N:
        raise ValueError("initial field has the wrong number of nodes")
    u = np.array(np.broadcast_to(u0v, (P, g.N)), dtype=complex)
    db = np.diff(bvals, axis=-1)

    obs = {k: np.full((P, J + 1), np.nan) for k in _OBS}
    nonlinear = cfg.nonlinearity == "quintic"
    R, M = cfg.cutoff_R, cfg.cutoff_M
    c = cfg.convention.factor

    def record(j, u, uh, rows=slice(None)):
        obs["l2"][rows, j] = G.l2_spectral(uh, g)
        obs["h1"][rows, j] = G.sobolev_spectral(uh, g, 1.0)
        obs["linf"][rows, j] = np.abs(u).max(axis=-1)
        obs["l10"][rows, j] = _l10(u, dx)
        obs["high_band"][rows, j] = G.high_band_fraction(uh, g)
        obs["boundary"][rows, j] = G.boundary_mass_fraction(u, g)

    uh = uh0 = G.fft(u)
    record(0, u, uh)
    obs["running_l5l10"][:, 0] = 0.0
    linf0 = obs["linf"][:, 0].copy()
    acc = np.zeros(P)                       # sum_{i<j} ||u_i||_10^5 dt
    tau = np.full(P, -1)
    blow = np.full(P, -1)
    reason = [""] * P
    active = np.ones(P, dtype=bool)
    snaps = {}
    stride = cfg.save_stride
    if stride:
        snaps[0] = u.copy()

    for j in range(J):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        ua = u[idx]
        l10 = obs["l10"][idx, j]
        acc_incl = acc[idx] + l10**5 * dt
        run_incl = acc_incl ** 0.2
        if R is not None:
            scale = _theta_unchecked(run_incl / R)
        else:
            scale = np.ones(idx.size)
        obs["theta_scale"][idx, j] = scale if nonlinear else 0.0
        d = db[idx, j]
        if not nonlinear:
            # free flow straight from u0: no accumulation of per-step rounding
            uh = uh0[idx] * np.exp(-1j * c * g.xi2 * (bvals[idx, j + 1] - bvals[idx, 0])[:, None])
        elif cfg.splitting == "strang":
            half = np.exp(-1j * c * g.xi2 * (0.5 * d)[:, None])
            ua = G.ifft(G.fft(ua) * half)
            if nonlinear:
                ua = _phase(ua, dt, scale, M)
            uh = G.fft(ua)
            if cfg.dealias == "truncate":
                uh[:, ~g.low_band] = 0.0
            uh = uh * half
        else:
            ua = G.ifft(G.fft(ua) * np.exp(-1j * c * g.xi2 * d[:, None]))
            if nonlinear:
                ua = _phase(ua, dt, scale, M)
            uh = G.fft(ua)
            if cfg.dealias == "truncate":
                uh[:, ~g.low_band] = 0.0
        ua = G.ifft(uh)
        record(j + 1, ua, uh, idx)
        acc[idx] = acc_incl
        obs["running_l5l10"][idx, j + 1] = run_incl

        if R is not None:
            hit = (run_incl >= R) & (tau[idx] < 0)
            tau[idx[hit]] = j + 1

        linf = obs["linf"][idx, j + 1]
        bad = ~np.isfinite(linf) | ~np.isfinite(obs["l2"][idx, j + 1])
        big = linf > cfg.blowup_factor * linf0[idx]
        band = obs["high_band"][idx, j + 1] > cfg.blowup_band
        flagged = bad | big | band
        for loc in np.nonzero(flagged)[0]:
            p = idx[loc]
            blow[p] = j + 1
            reason[p] = "numerical" if bad[loc] else ("amplitude" if big[loc] else "resolution")
        keep = ~bad
        u[idx[keep]] = ua[keep]
        active[idx[flagged]] = False
        if cfg.stop_at_tau and R is not None:
            active[tau >= 0] = False
        if stride and ((j + 1) % stride == 0 or j + 1 == J):
            snaps[j + 1] = u.copy()

    # remaining scale entry: what the next step would use
    if nonlinear and R is not None:
        last = np.isfinite(obs["l10"][:, J])
        obs["theta_scale"][last, J] = _theta_unchecked(
            (acc[last] + obs["l10"][last, J] ** 5 * dt) ** 0.2 / R)
    elif nonlinear:
        obs["theta_scale"][np.isfinite(obs["l10"][:, J]), J] = 1.0
    else:
        obs["theta_scale"][:, J] = 0.0

    return TrajectoryBatch(cfg, DispersionPath(dt, bvals, path.kind), obs, u, tau, blow,
                           reason, snaps)


def evolve(cfg: EvolveConfig, u0: StateField, path: DispersionPath) -> Trajectory:
    """Evolve a single path; see the module docstring for the step and cutoffs."""
    if path.values.ndim != 1:
        raise ValueError("evolve takes a single path; use evolve_batch for stacks")
    return evolve_batch(cfg, u0, path).trajectory(0)


def spacetime_norm(traj: Trajectory, r: float, p: float, window=None) -> float:
    """``L^r(t_a, t_b; L^p)`` with the left-endpoint rule over steps ``t_a <= t_j < t_b``."""
    t = traj.times
    ta, tb = (0.0, t[-1]) if window is None else window
    if not tb > ta:
        raise ValueError("empty time window")
    if ta < -1e-12 or tb > t[-1] + 1e-9 * traj.dt:
        raise ValueError("window outside the trajectory span")
    eps = 1e-9 * traj.dt
    sel = (t >= ta - eps) & (t < tb - eps)
    if not sel.any():
        raise ValueError("empty time window")
    norms = traj.spatial_norms(p)
    if len(norms) != len(t):
        norms = np.asarray(norms)
    return float(G.spacetime_lp(norms[sel], r, traj.dt))
