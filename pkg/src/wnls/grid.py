"""Periodic grid, unitary FFTs, Fourier multipliers and the norms used throughout.

The real line is replaced by the periodic box ``[-L, L)`` sampled at ``N``
equispaced nodes.  Frequencies are angular, ``xi_k = pi k / L``, stored in
the standard FFT ordering ``k = 0, 1, ..., N/2-1, -N/2, ..., -1`` so that
``np.fft`` output lines up with :attr:`SpatialGrid.xi` without shifting.

Transforms use ``norm="ortho"``.  With that normalisation the discrete
Plancherel identity reads ``sum |u_j|^2 dx == sum |uhat_k|^2 dx``, so every
L2-type norm can be evaluated in either representation with the same weight.

All functions accept arrays with arbitrary leading (batch) axes; the last
axis is always space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

Representation = Literal["physical", "spectral"]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic truncation ``[-L, L)`` of the real line with ``N`` nodes."""

    L: float
    N: int

    def __post_init__(self):
        if not (self.L > 0 and np.isfinite(self.L)):
            raise ValueError(f"half width L must be positive, got {self.L}")
        if int(self.N) != self.N or not _is_power_of_two(int(self.N)) or self.N < 8:
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    @cached_property
    def k(self) -> np.ndarray:
        """Integer wavenumbers in FFT ordering (Nyquist mode is ``-N/2``)."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(int)

    @cached_property
    def xi(self) -> np.ndarray:
        return np.pi * self.k / self.L

    @cached_property
    def xi2(self) -> np.ndarray:
        return self.xi**2

    @cached_property
    def high_band(self) -> np.ndarray:
        """Mask of the top third of the spectrum, ``|k| > N/3``."""
        return np.abs(self.k) > self.N / 3

    @cached_property
    def low_band(self) -> np.ndarray:
        """Modes kept by the strict 1/3 dealiasing filter."""
        return np.abs(self.k) <= self.N / 6

    @cached_property
    def boundary_band(self) -> np.ndarray:
        """Nodes within ``L/4`` of the periodic boundary."""
        return np.abs(self.x) >= 0.75 * self.L

    def mode(self, k: int) -> np.ndarray:
        """Samples of ``exp(i xi_k x)``."""
        return np.exp(1j * np.pi * k / self.L * self.x)


def make_grid(L: float, N: int) -> SpatialGrid:
    return SpatialGrid(float(L), int(N))


# ---------------------------------------------------------------------------
# array-level kernels (hot paths, used by the integrator and ensembles)
# ---------------------------------------------------------------------------

def fft(u: np.ndarray) -> np.ndarray:
    return np.fft.fft(u, axis=-1, norm="ortho")


def ifft(uh: np.ndarray) -> np.ndarray:
    return np.fft.ifft(uh, axis=-1, norm="ortho")


def l2_spectral(uh: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(uh) ** 2, axis=-1) * grid.dx)


def lp(u: np.ndarray, p: float, dx: float) -> np.ndarray:
    """Rectangle-rule L^p norm along the last axis (``p = inf`` is the max)."""
    if p < 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    a = np.abs(u)
    if np.isinf(p):
        return a.max(axis=-1)
    if p == 2:
        return np.sqrt(np.sum(a * a, axis=-1) * dx)
    if p == 1:
        return np.sum(a, axis=-1) * dx
    # rescale by the max so large powers (p = 10) cannot overflow
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((a / safe) ** p, axis=-1) * dx
    return np.squeeze(safe, -1) * s ** (1.0 / p)


def sobolev_spectral(uh: np.ndarray, grid: SpatialGrid, s: float) -> np.ndarray:
    w = (1.0 + grid.xi2) ** s
    return np.sqrt(np.sum(w * np.abs(uh) ** 2, axis=-1) * grid.dx)


def abs_xi_power(grid: SpatialGrid, s: float) -> np.ndarray:
    if s < 0:
        raise ValueError(f"order s must be nonnegative, got {s}")
    if s == 0:
        return np.ones(grid.N)
    return np.abs(grid.xi) ** s


# ---------------------------------------------------------------------------
# StateField API
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateField:
    """Complex samples of a field on ``grid``, in physical or spectral form.

    ``values`` may carry leading batch axes; the last axis has length ``N``.
    """

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)
    representation: Representation = "physical"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape[-1] != self.grid.N:
            raise ValueError(f"last axis has length {v.shape[-1]}, grid has N={self.grid.N}")
        if self.representation not in ("physical", "spectral"):
            raise ValueError(f"unknown representation {self.representation!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: SpatialGrid, func) -> "StateField":
        return cls(grid, func(grid.x))

    def physical(self) -> "StateField":
        return self if self.representation == "physical" else transform(self, "inverse")

    def spectral(self) -> "StateField":
        return self if self.representation == "spectral" else transform(self, "forward")

    def with_values(self, values: np.ndarray) -> "StateField":
        return StateField(self.grid, values, self.representation)


def transform(field: StateField, direction: Literal["forward", "inverse"]) -> StateField:
    """Unitary DFT. ``forward`` maps physical to spectral, ``inverse`` back."""
    if direction == "forward":
        if field.representation != "physical":
            raise ValueError("forward transform needs a physical-space field")
        return StateField(field.grid, fft(field.values), "spectral")
    if direction == "inverse":
        if field.representation != "spectral":
            raise ValueError("inverse transform needs a spectral-space field")
        return StateField(field.grid, ifft(field.values), "physical")
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def fractional_derivative(field: StateField, s: float) -> StateField:
    """``D^s`` as the multiplier ``|xi|^s``; returned in the input's representation."""
    mult = abs_xi_power(field.grid, s)
    out = StateField(field.grid, field.spectral().values * mult, "spectral")
    return out if field.representation == "spectral" else out.physical()


def lp_norm(field: StateField, p: float):
    if field.representation != "physical":
        raise ValueError("lp_norm needs a physical-space field")
    return lp(field.values, p, field.grid.dx)


def l2_norm_spectral(field: StateField):
    return l2_spectral(field.spectral().values, field.grid)


def sobolev_norm(field: StateField, s: float):
    """``H^s`` norm with weight ``(1 + xi^2)^s``."""
    return sobolev_spectral(field.spectral().values, field.grid, s)


def boundary_mass_fraction(u: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Fraction of the L2 mass sitting within ``L/4`` of the boundary."""
    a2 = np.abs(u) ** 2
    total = a2.sum(axis=-1)
    edge = a2[..., grid.boundary_band].sum(axis=-1)
    return np.divide(edge, total, out=np.zeros_like(total), where=total > 0)


def high_band_fraction(uh: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Fraction of spectral mass in the top third ``|k| > N/3``."""
    a2 = np.abs(uh) ** 2
    total = a2.sum(axis=-1)
    top = a2[..., grid.high_band].sum(axis=-1)
    return np.divide(top, total, out=np.zeros_like(total), where=total > 0)


def random_band_limited(grid: SpatialGrid, n: int, rng: np.random.Generator,
                        kmax: int | None = None) -> np.ndarray:
    """``n`` random smooth fields of unit L2 norm, shape ``(n, N)``.

    Complex Gaussian Fourier coefficients with envelope ``exp(-(4k/kmax)^2 / 2)``,
    zero for ``|k| > kmax`` (default ``N/8``).
    """
    kmax = grid.N // 8 if kmax is None else int(kmax)
    env = np.exp(-0.5 * (4.0 * grid.k / kmax) ** 2) * (np.abs(grid.k) <= kmax)
    coef = (rng.standard_normal((n, grid.N)) + 1j * rng.standard_normal((n, grid.N))) * env
    u = ifft(coef)
    return u / lp(u, 2, grid.dx)[:, None]


def spacetime_lp(norms_in_space: np.ndarray, r: float, dt: float) -> np.ndarray:
    """Left-endpoint ``L^r`` in time of a sequence of spatial norms (last axis = time)."""
    a = np.asarray(norms_in_space, dtype=float)
    if a.shape[-1] == 0:
        raise ValueError("empty time window")
    if np.isinf(r):
        return a.max(axis=-1)
    return (np.sum(a**r, axis=-1) * dt) ** (1.0 / r)
