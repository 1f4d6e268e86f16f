"""Sampled dispersion paths: Brownian motion and integrated stationary drivers.

Every sampler is a pure function of its parameters and an integer seed.
Ensembles derive the seed of path ``i`` as ``root_seed ^ i`` (see
:func:`path_rng`), so results do not depend on how paths are batched or
scheduled.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from scipy.signal import lfilter

PathKind = Literal["brownian", "integrated_stationary", "deterministic"]


def path_rng(root_seed: int, index: int) -> np.random.Generator:
    """Generator for path ``index`` of an ensemble seeded by ``root_seed``."""
    return np.random.default_rng(int(root_seed) ^ int(index))


@dataclass(frozen=True)
class DispersionPath:
    """Cumulative dispersion ``b(t_j)`` on the uniform grid ``t_j = j dt``.

    ``values`` may have leading batch axes (one row per path).
    """

    dt: float
    values: np.ndarray
    kind: PathKind = "brownian"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape[-1] < 2:
            raise ValueError("a path needs at least one step")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if np.any(v[..., 0] != 0.0):
            raise ValueError("dispersion paths start at b(0) = 0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_steps(self) -> int:
        return self.values.shape[-1] - 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    @property
    def T(self) -> float:
        return self.dt * self.n_steps

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=-1)

    def row(self, i: int) -> "DispersionPath":
        return DispersionPath(self.dt, self.values[i], self.kind)

    def to_csv(self, path: str | Path) -> None:
        if self.values.ndim != 1:
            raise ValueError("CSV export is one file per path; select a row first")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for t, b in zip(self.times, self.values):
                w.writerow([repr(float(t)), repr(float(b))])

    @classmethod
    def from_csv(cls, path: str | Path, kind: PathKind = "brownian") -> "DispersionPath":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t, b = data[:, 0], data[:, 1]
        return cls(float(t[1] - t[0]), b, kind)


def _cumulative(increments: np.ndarray) -> np.ndarray:
    out = np.zeros(increments.shape[:-1] + (increments.shape[-1] + 1,))
    np.cumsum(increments, axis=-1, out=out[..., 1:])
    return out


def brownian_from_rng(rng: np.random.Generator, J: int, dt: float) -> np.ndarray:
    return _cumulative(rng.standard_normal(J) * math.sqrt(dt))


def sample_brownian(J: int, dt: float, seed: int) -> DispersionPath:
    """Standard Brownian motion sampled at ``j dt``, ``j = 0..J``."""
    if J < 1 or not dt > 0:
        raise ValueError("need J >= 1 and dt > 0")
    return DispersionPath(dt, brownian_from_rng(np.random.default_rng(seed), J, dt), "brownian")


def deterministic_path(J: int, dt: float, rate: float = 1.0) -> DispersionPath:
    """``b(t) = rate * t`` (the classical, noise-free dispersion)."""
    return DispersionPath(dt, rate * dt * np.arange(J + 1), "deterministic")


@dataclass(frozen=True)
class StationaryDriverParams:
    """Centered stationary driver ``m`` with covariance ``var * exp(-relax |tau|)``.

    ``kind='ou'`` is the Ornstein-Uhlenbeck process; ``kind='telegraph'`` is
    the symmetric random telegraph signal with values ``+-sqrt(var)`` and
    switching rate ``relax / 2``.  Both have the same covariance, hence the
    same effective diffusivity ``D_eff = 2 var / relax``.
    """

    kind: Literal["ou", "telegraph"] = "ou"
    relax: float = 1.0
    var: float = 0.5
    eps: float = 0.1

    def __post_init__(self):
        if self.kind not in ("ou", "telegraph"):
            raise ValueError(f"unknown driver kind {self.kind!r}")
        if not (self.relax > 0 and self.var >= 0 and self.eps > 0):
            raise ValueError("need relax > 0, var >= 0, eps > 0")

    @property
    def d_eff(self) -> float:
        return 2.0 * self.var / self.relax

    def with_eps(self, eps: float) -> "StationaryDriverParams":
        return StationaryDriverParams(self.kind, self.relax, self.var, eps)


def _check_resolution(params: StationaryDriverParams, dt_fine: float) -> None:
    if not dt_fine > 0:
        raise ValueError("dt_fine must be positive")
    if dt_fine * params.relax > 0.1 + 1e-12:
        raise ValueError(
            f"dt_fine * relax = {dt_fine * params.relax:.3g} > 0.1: correlation time under-resolved"
        )


def ou_from_rng(rng: np.random.Generator, params: StationaryDriverParams, J: int,
                dt_fine: float) -> np.ndarray:
    a = math.exp(-params.relax * dt_fine)
    s = math.sqrt(params.var * (1.0 - a * a))
    g = rng.standard_normal(J + 1)
    g[0] *= math.sqrt(params.var)
    g[1:] *= s
    # m_{j+1} = a m_j + s g_j as a first-order recursive filter
    return lfilter([1.0], [1.0, -a], g)


def telegraph_from_rng(rng: np.random.Generator, params: StationaryDriverParams, J: int,
                       dt_fine: float) -> np.ndarray:
    # flip probability over dt: P(odd number of switches at rate relax/2)
    p_flip = 0.5 * (1.0 - math.exp(-params.relax * dt_fine))
    sign0 = np.where(rng.random() < 0.5, -1.0, 1.0)
    flips = rng.random(J) < p_flip
    parity = np.concatenate([[0], np.cumsum(flips)]) % 2
    return math.sqrt(params.var) * sign0 * (1.0 - 2.0 * parity)


def sample_stationary(params: StationaryDriverParams, J: int, dt_fine: float,
                      seed: int | np.random.Generator) -> np.ndarray:
    """``J + 1`` samples of the stationary driver on the fine grid ``j dt_fine``."""
    _check_resolution(params, dt_fine)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if params.kind == "ou":
        return ou_from_rng(rng, params, J, dt_fine)
    return telegraph_from_rng(rng, params, J, dt_fine)


def sample_ou(params: StationaryDriverParams, J: int, dt_fine: float, seed) -> np.ndarray:
    """Exact OU update started from the stationary law ``N(0, var)``."""
    if params.kind != "ou":
        params = StationaryDriverParams("ou", params.relax, params.var, params.eps)
    return sample_stationary(params, J, dt_fine, seed)


def integrated_dispersion(m_values: np.ndarray, eps: float, dt_coarse: float, J: int,
                          dt_fine: float) -> DispersionPath:
    """``n(t_j) = eps * int_0^{t_j / eps^2} m(s) ds`` at ``t_j = j dt_coarse``.

    The integral is the cumulative trapezoid rule on the fine grid, linearly
    interpolated where a coarse time falls between fine nodes.
    """
    m = np.asarray(m_values, dtype=float)
    t_end = J * dt_coarse / eps**2
    if (m.shape[-1] - 1) * dt_fine < t_end * (1 - 1e-12):
        raise ValueError(
            f"fine grid covers [0, {(m.shape[-1] - 1) * dt_fine:.4g}], need [0, {t_end:.4g}]"
        )
    cum = np.zeros_like(m)
    cum[..., 1:] = np.cumsum(0.5 * (m[..., 1:] + m[..., :-1]) * dt_fine, axis=-1)
    s = dt_coarse * np.arange(J + 1) / eps**2
    pos = s / dt_fine
    i0 = np.minimum(np.floor(pos + 1e-9).astype(int), m.shape[-1] - 1)
    frac = np.clip(pos - i0, 0.0, None)
    i1 = np.minimum(i0 + 1, m.shape[-1] - 1)
    vals = cum[..., i0] + frac * (cum[..., i1] - cum[..., i0])
    vals = eps * vals
    vals[..., 0] = 0.0
    return DispersionPath(dt_coarse, vals, "integrated_stationary")


def fine_step(params: StationaryDriverParams, dt_coarse: float) -> tuple[float, int]:
    """Fine step dividing ``dt_coarse / eps^2`` with ``dt_fine * relax <= 0.1``."""
    span = dt_coarse / params.eps**2
    sub = max(1, math.ceil(span * params.relax / 0.1 - 1e-9))
    return span / sub, sub


def integrated_from_rng(rng: np.random.Generator, params: StationaryDriverParams, J: int,
                        dt: float) -> np.ndarray:
    dt_fine, sub = fine_step(params, dt)
    if params.kind == "ou":
        m = ou_from_rng(rng, params, J * sub, dt_fine)
    else:
        m = telegraph_from_rng(rng, params, J * sub, dt_fine)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (m[1:] + m[:-1]) * dt_fine)])
    return params.eps * cum[::sub]


def sample_integrated(params: StationaryDriverParams, J: int, dt: float,
                      seed: int) -> DispersionPath:
    """Driver sampled on an automatically chosen fine grid, integrated to ``n_eps``."""
    vals = integrated_from_rng(np.random.default_rng(seed), params, J, dt)
    return DispersionPath(dt, vals, "integrated_stationary")


def integrated_variance(params: StationaryDriverParams, t: float) -> float:
    """Exact ``Var n_eps(t)`` for the exponential covariance of both drivers."""
    a = params.relax * t / params.eps**2
    return params.d_eff * t * (1.0 - (1.0 - math.exp(-a)) / a)
