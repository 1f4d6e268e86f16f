"""Linear flows driven by a cumulative dispersion ``b``.

The white-noise propagator acts on Fourier coefficients as
``uhat -> exp(-i xi^2 (b(t) - b(s))) uhat``; the flow depends on the
dispersion path only through its increment.  ``kernel_apply`` evaluates
the same operator through its oscillatory convolution kernel and exists
only as an independent cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import SpatialGrid, StateField, fft, ifft, l2_spectral
from .noise import DispersionPath

#: smallest |increment| accepted by the kernel quadrature
DELTA_MIN = 1e-3


@dataclass(frozen=True)
class PropagatorConvention:
    """``halved=False``: phase ``exp(-i xi^2 db)``; ``True``: ``exp(-i xi^2 db / 2)``."""

    halved: bool = False

    @property
    def factor(self) -> float:
        return 0.5 if self.halved else 1.0

    def to_dict(self) -> dict:
        return {"multiplier_halved": self.halved}


DEFAULT_CONVENTION = PropagatorConvention()


def linear_multiplier(grid: SpatialGrid, db, conv: PropagatorConvention = DEFAULT_CONVENTION):
    """Phase array ``exp(-i c xi^2 db)``; ``db`` may be an array of per-path increments."""
    db = np.asarray(db, dtype=float)
    return np.exp(-1j * conv.factor * grid.xi2 * db[..., None])


def apply_linear(field: StateField, db, conv: PropagatorConvention = DEFAULT_CONVENTION
                 ) -> StateField:
    """Exact linear flow over a dispersion increment ``db`` (any sign)."""
    mult = linear_multiplier(field.grid, db, conv)
    out = StateField(field.grid, field.spectral().values * mult, "spectral")
    return out if field.representation == "spectral" else out.physical()


def apply_smooth_dispersion(field: StateField, n_increment,
                            conv: PropagatorConvention = DEFAULT_CONVENTION) -> StateField:
    """Linear flow for a smooth dispersion path; same operator as :func:`apply_linear`."""
    return apply_linear(field, n_increment, conv)


def _interpolate(u: np.ndarray, grid: SpatialGrid, factor: int) -> np.ndarray:
    """Trigonometric interpolation onto a grid ``factor`` times finer."""
    if factor == 1:
        return u
    N = grid.N
    uh = np.fft.fft(u)
    big = np.zeros(N * factor, dtype=complex)
    big[: N // 2] = uh[: N // 2]
    big[-N // 2:] = uh[-N // 2:]
    # split the Nyquist coefficient symmetrically
    big[-N // 2] *= 0.5
    big[N // 2] = big[-N // 2]
    return np.fft.ifft(big) * factor


def kernel_apply(field: StateField, db: float, *, support_tol: float = 1e-17,
                 chunk: int = 256) -> StateField:
    """Direct quadrature of the convolution kernel of the linear flow.

    ``u(x) = (4 i pi db)^(-1/2) int exp(i (x - y)^2 / (4 db)) u_s(y) dy``, with
    the principal branch of the square root.  The integrand is sampled on a
    refinement of the grid, restricted to the support of ``u_s``, fine enough
    that the kernel phase advances less than ``pi/8`` per node at the far edge.
    """
    db = float(db)
    if abs(db) < DELTA_MIN:
        raise ValueError(f"|db| = {abs(db):.3g} below kernel quadrature limit {DELTA_MIN}")
    grid = field.grid
    u = field.physical().values
    if u.ndim != 1:
        raise ValueError("kernel_apply works on a single field")
    amp = np.abs(u)
    if amp.max() == 0:
        return StateField(grid, np.zeros(grid.N, complex))
    inside = np.nonzero(amp > support_tol * amp.max())[0]
    if inside[0] == 0 or inside[-1] == grid.N - 1:
        raise ValueError("input is not compactly supported away from the boundary")
    ya, yb = grid.x[inside[0]] - grid.dx, grid.x[inside[-1]] + grid.dx
    reach = max(abs(grid.x[0] - yb), abs(grid.x[-1] - ya))
    # phase derivative |x - y| / (2 db) times the step stays below pi / 8
    h_max = (np.pi / 8) * 2 * abs(db) / reach
    factor = max(1, int(np.ceil(grid.dx / h_max)))
    fine = _interpolate(u, grid, factor)
    xf = -grid.L + grid.dx / factor * np.arange(grid.N * factor)
    keep = (xf >= ya) & (xf <= yb)
    y, uy = xf[keep], fine[keep]
    h = grid.dx / factor
    pref = 1.0 / np.sqrt(4j * np.pi * db)
    out = np.empty(grid.N, dtype=complex)
    for i0 in range(0, grid.N, chunk):
        xs = grid.x[i0:i0 + chunk, None]
        out[i0:i0 + chunk] = np.exp(1j * (xs - y) ** 2 / (4 * db)) @ uy
    return StateField(grid, pref * h * out)


@dataclass(frozen=True)
class FieldSeries:
    """Source term ``f(t_j)`` on the uniform grid ``t_j = j dt``, ``j = 0..J``.

    ``values`` has shape ``(J + 1, N)``.
    """

    grid: SpatialGrid
    dt: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[1] != self.grid.N:
            raise ValueError("FieldSeries values must have shape (J + 1, N)")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, g: StateField, J: int, dt: float) -> "FieldSeries":
        v = np.broadcast_to(g.physical().values, (J + 1, g.grid.N))
        return cls(g.grid, dt, np.array(v))

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1

    @property
    def T(self) -> float:
        return self.n_steps * self.dt


def _check_shared_grid(f: FieldSeries, path: DispersionPath) -> None:
    if f.n_steps != path.n_steps or abs(f.dt - path.dt) > 1e-12 * path.dt:
        raise ValueError("source series and dispersion path must share the time grid")


def duhamel_integral(f: FieldSeries, path: DispersionPath, t_index: int,
                     conv: PropagatorConvention = DEFAULT_CONVENTION) -> StateField:
    """Left-endpoint sum ``sum_{j < t_index} S(t, t_j) f(t_j) dt`` at ``t = t_index dt``."""
    _check_shared_grid(f, path)
    if path.values.ndim != 1:
        raise ValueError("duhamel_integral takes a single path")
    if not 0 <= t_index <= path.n_steps:
        raise ValueError(f"t_index {t_index} outside 0..{path.n_steps}")
    b = path.values
    if t_index == 0:
        return StateField(f.grid, np.zeros(f.grid.N, complex))
    fh = fft(f.values[:t_index])
    mult = linear_multiplier(f.grid, b[t_index] - b[:t_index], conv)
    return StateField(f.grid, ifft((fh * mult).sum(axis=0) * f.dt))




def mass_error(a: StateField, b: StateField) -> float:
    na = l2_spectral(a.spectral().values, a.grid)
    nb = l2_spectral(b.spectral().values, b.grid)
    return float(abs(na - nb) / nb) if nb > 0 else float(na)
