"""Smoothing functional, Strichartz samples and stopping statistics."""
import math

import numpy as np
import pytest

from wnls import grid as G
from wnls.config import initial_condition
from wnls.grid import StateField, make_grid
from wnls.integrator import EvolveConfig, evolve, evolve_batch
from wnls.noise import DispersionPath, sample_brownian
from wnls.observables import (SMOOTHING_CONSTANT, half_derivative_sq_norm,
                              homogeneous_strichartz_sample, homogeneous_strichartz_via_evolve,
                              rhs_l1l2_norm, smoothing_bound, smoothing_functional,
                              smoothing_values, stopping_from_running, stopping_statistics,
                              wilson_interval)
from wnls.propagator import FieldSeries, apply_linear, duhamel_integral

g = make_grid(10, 256)


def gauss(amp=1.0, width=1.0, center=0.0):
    return initial_condition(g, dict(amplitude=amp, width=width, center=center))


def direct_smoothing(f, path):
    """Independent route: Duhamel sum at every step, then the half-derivative norm."""
    total = 0.0
    for j in range(path.n_steps):
        v = duhamel_integral(f, path, j)
        rho = StateField(g, np.abs(v.values) ** 2)
        total += G.l2_norm_spectral(G.fractional_derivative(rho, 0.5)) ** 2 * f.dt
    return total


class TestSmoothingFunctional:
    def test_zero_source(self):
        f = FieldSeries(g, 0.01, np.zeros((21, g.N)))
        assert smoothing_functional(f, sample_brownian(20, 0.01, 1)).value == 0.0

    def test_zero_path_closed_form(self):
        J, dt = 50, 0.02
        zero = DispersionPath(dt, np.zeros(J + 1))
        for src in (StateField(g, g.mode(1)), gauss()):
            f = FieldSeries.constant(src, J, dt)
            rho = StateField(g, np.abs(src.values) ** 2)
            d2 = G.l2_norm_spectral(G.fractional_derivative(rho, 0.5)) ** 2
            t = dt * np.arange(J)
            expected = np.sum(t**4) * dt * d2
            val = smoothing_functional(f, zero).value
            assert val == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_matches_direct_summation(self):
        J, dt = 30, 0.01
        path = sample_brownian(J, dt, 8)
        f = FieldSeries.constant(gauss(width=0.5), J, dt)
        assert smoothing_functional(f, path).value == pytest.approx(direct_smoothing(f, path),
                                                                    rel=1e-10)

    def test_time_dependent_source(self):
        J, dt = 20, 0.01
        path = sample_brownian(J, dt, 2)
        vals = np.stack([gauss(1 + 0.1 * j).values for j in range(J + 1)])
        f = FieldSeries(g, dt, vals)
        assert smoothing_functional(f, path).value == pytest.approx(direct_smoothing(f, path),
                                                                    rel=1e-10)

    def test_phase_invariance(self):
        J, dt = 20, 0.01
        path = sample_brownian(J, dt, 3)
        a = smoothing_functional(FieldSeries.constant(gauss(), J, dt), path).value
        rot = StateField(g, np.exp(1.1j) * gauss().values)
        b = smoothing_functional(FieldSeries.constant(rot, J, dt), path).value
        assert b == pytest.approx(a, rel=1e-12)

    def test_batched_equals_single(self):
        J, dt = 20, 0.01
        paths = np.stack([sample_brownian(J, dt, s).values for s in range(3)])
        fh = G.fft(gauss().values)
        batch = smoothing_values(fh, np.diff(paths, axis=1), g, dt)
        for s in range(3):
            one = smoothing_functional(FieldSeries.constant(gauss(), J, dt),
                                       DispersionPath(dt, paths[s])).value
            assert batch[s] == pytest.approx(one, rel=1e-12)

    def test_single_path_only(self):
        f = FieldSeries.constant(gauss(), 5, 0.1)
        with pytest.raises(ValueError):
            smoothing_functional(f, DispersionPath(0.1, np.zeros((2, 6))))

    def test_half_derivative_nonnegative(self):
        assert half_derivative_sq_norm(G.fft(gauss().values), g) > 0
        assert half_derivative_sq_norm(np.zeros(g.N), g) == 0


class TestRhsNorm:
    def test_zero(self):
        assert rhs_l1l2_norm(FieldSeries(g, 0.1, np.zeros((6, g.N)))) == 0.0

    def test_constant(self):
        f = FieldSeries.constant(gauss(), 10, 0.05)
        assert rhs_l1l2_norm(f) == pytest.approx(0.5 * G.lp(gauss().values, 2, g.dx), rel=1e-14)

    def test_two_bumps_additive(self):
        a = FieldSeries.constant(gauss(center=-3), 10, 0.05)
        b = FieldSeries.constant(gauss(center=3), 10, 0.05)
        vals = a.values.copy()
        vals[5:] = b.values[5:]
        both = rhs_l1l2_norm(FieldSeries(g, 0.05, vals))
        na, nb = G.lp(gauss(center=-3).values, 2, g.dx), G.lp(gauss(center=3).values, 2, g.dx)
        assert both == pytest.approx(5 * 0.05 * na + 5 * 0.05 * nb, rel=1e-14)

    def test_bound_constant(self):
        f = FieldSeries.constant(gauss(), 10, 0.05)
        assert SMOOTHING_CONSTANT == pytest.approx(4 * math.sqrt(2 * math.pi))
        assert smoothing_bound(f) == pytest.approx(
            SMOOTHING_CONSTANT * math.sqrt(0.5) * rhs_l1l2_norm(f) ** 4)


class TestHomogeneousStrichartz:
    def test_zero_datum(self):
        assert homogeneous_strichartz_sample(StateField(g, np.zeros(g.N)),
                                             sample_brownian(10, 0.01, 0)) == 0.0

    def test_zero_path(self):
        u0 = gauss()
        T = 0.25
        val = homogeneous_strichartz_sample(u0, DispersionPath(T / 25, np.zeros(26)))
        assert val == pytest.approx(T**0.2 * G.lp(u0.values, 10, g.dx), rel=1e-12)

    def test_homogeneity(self):
        p = sample_brownian(40, 0.01, 5)
        a = homogeneous_strichartz_sample(gauss(), p)
        b = homogeneous_strichartz_sample(StateField(g, 3.0 * gauss().values), p)
        assert b == pytest.approx(3.0 * a, rel=1e-13)

    def test_matches_evolve_route(self):
        p = sample_brownian(40, 0.01, 6)
        a = homogeneous_strichartz_sample(gauss(), p)
        b = homogeneous_strichartz_via_evolve(gauss(), p, EvolveConfig(L=10, N=256))
        assert a == pytest.approx(b, rel=1e-12)

    def test_vectorised(self):
        rows = np.stack([sample_brownian(20, 0.01, s).values for s in range(4)])
        out = homogeneous_strichartz_sample(gauss(), DispersionPath(0.01, rows))
        for s in range(4):
            assert out[s] == pytest.approx(
                homogeneous_strichartz_sample(gauss(), DispersionPath(0.01, rows[s])), rel=1e-14)


class TestStopping:
    base = EvolveConfig(L=10, N=256, T=0.25, dt=1e-3)

    def batch(self, R, n=40):
        return list(evolve_batch(self.base.replace(cutoff_R=R), gauss(),
                                 self.base.sample_paths(77, range(n))))

    def test_huge_radius(self):
        st = stopping_statistics(self.batch(1e6), 1e6, 0.25)
        assert st.hits == 0 and st.fraction == 0.0 and st.ci_lo == 0.0

    def test_half_median_radius(self):
        pilot = evolve_batch(self.base, gauss(), self.base.sample_paths(5, range(40)))
        R = 0.5 * np.median(pilot.obs["running_l5l10"][:, -1])
        st = stopping_statistics(self.batch(R), R, 0.25)
        assert st.fraction >= 0.5
        assert st.ci_lo <= st.fraction <= st.ci_hi

    def test_doubling_radius(self):
        pilot = evolve_batch(self.base, gauss(), self.base.sample_paths(77, range(40)))
        run = pilot.obs["running_l5l10"][:, -1]
        R = float(np.median(run))
        fr = [stopping_statistics(self.batch(r), r, 0.25).fraction for r in (R, 2 * R, 4 * R)]
        assert fr[0] >= fr[1] >= fr[2]
        # untruncated route agrees with the truncated one
        assert stopping_from_running(run, R, 0.25).fraction == fr[0]

    def test_mixed_configurations(self):
        trs = self.batch(1.0, 2) + self.batch(2.0, 2)
        with pytest.raises(ValueError):
            stopping_statistics(trs, 1.0, 0.25)

    def test_wilson(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0 and 0.03 < hi < 0.04
        lo, hi = wilson_interval(50, 100)
        assert lo == pytest.approx(0.4038, abs=1e-3) and hi == pytest.approx(0.5962, abs=1e-3)
