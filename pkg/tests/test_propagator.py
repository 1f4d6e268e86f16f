"""Linear multiplier flow, kernel oracle and the Duhamel sum."""
import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from wnls import grid as G
from wnls.experiments import gaussian_closed_form
from wnls.grid import StateField, make_grid
from wnls.noise import DispersionPath, deterministic_path, sample_brownian
from wnls.propagator import (DELTA_MIN, FieldSeries, PropagatorConvention, apply_linear,
                             apply_smooth_dispersion, duhamel_integral, kernel_apply, mass_error)

HALVED = PropagatorConvention(halved=True)


def gaussian(grid):
    return StateField(grid, np.exp(-grid.x**2))


def fourier_quadrature(x, b):
    """``(2 pi)^-1 int exp(i x xi - i xi^2 b) sqrt(pi) exp(-xi^2 / 4) dxi`` by quad."""
    w = lambda s, part: part(cmath.exp(1j * (x * s - s * s * b)) * math.sqrt(math.pi)
                             * math.exp(-s * s / 4))
    re, _ = quad(w, -40, 40, args=(lambda z: z.real,), limit=400)
    im, _ = quad(w, -40, 40, args=(lambda z: z.imag,), limit=400)
    return (re + 1j * im) / (2 * math.pi)


class TestApplyLinear:
    def test_zero_increment(self, grid, rng):
        u = StateField(grid, G.random_band_limited(grid, 1, rng)[0])
        assert np.max(np.abs(apply_linear(u, 0.0).values - u.values)) <= 1e-14

    def test_single_mode(self, grid):
        b = 0.37
        out = apply_linear(StateField(grid, grid.mode(1)), b).values
        xi1 = math.pi / grid.L
        assert np.max(np.abs(out - np.exp(-1j * xi1**2 * b) * grid.mode(1))) < 1e-12

    def test_halved_convention(self, grid):
        b = 0.37
        out = apply_linear(StateField(grid, grid.mode(3)), b, HALVED).values
        xi = 3 * math.pi / grid.L
        assert np.max(np.abs(out - np.exp(-0.5j * xi**2 * b) * grid.mode(3))) < 1e-12
        assert HALVED.to_dict() == {"multiplier_halved": True}

    @pytest.mark.parametrize("x,b", [(0.0, 0.5), (0.7, -0.3), (1.5, 1.0)])
    def test_closed_form_against_quadrature(self, x, b):
        g = make_grid(10, 8)
        exact = (1 + 4j * b) ** -0.5 * cmath.exp(-x * x / (1 + 4j * b))
        assert fourier_quadrature(x, b) == pytest.approx(exact, abs=1e-12)
        assert gaussian_closed_form(g, 1, 1, 0, b)[0] == pytest.approx(
            (1 + 4j * b) ** -0.5 * cmath.exp(-g.x[0] ** 2 / (1 + 4j * b)), abs=1e-15)

    @pytest.mark.parametrize("b", [-0.5, -0.1, 0.1, 0.25, 0.5])
    def test_gaussian_closed_form(self, grid, b):
        out = apply_linear(gaussian(grid), b).values
        exact = gaussian_closed_form(grid, 1, 1, 0, b)
        assert np.linalg.norm(out - exact) <= 1e-8 * np.linalg.norm(exact)

    @pytest.mark.parametrize("b", [-1.0, 1.0])
    def test_gaussian_closed_form_unit_increment(self, b):
        # at L = 10 the spreading Gaussian wraps around; L = 20 keeps it inside the box
        g = make_grid(20, 1024)
        out = apply_linear(gaussian(g), b).values
        exact = gaussian_closed_form(g, 1, 1, 0, b)
        assert np.linalg.norm(out - exact) <= 1e-8 * np.linalg.norm(exact)

    def test_batched_increments(self, grid, rng):
        u = gaussian(grid)
        db = rng.normal(size=4)
        batch = apply_linear(u, db).values
        for i in range(4):
            assert np.array_equal(batch[i], apply_linear(u, db[i]).values)

    def test_smooth_dispersion_same_code_path(self, grid):
        u = gaussian(grid)
        assert np.array_equal(apply_smooth_dispersion(u, 0.3).values, apply_linear(u, 0.3).values)
        assert np.max(np.abs(apply_smooth_dispersion(u, 0.0).values - u.values)) <= 1e-14

    def test_smooth_dispersion_h1_isometry(self, grid):
        u = gaussian(grid)
        h = G.sobolev_norm(apply_smooth_dispersion(u, 0.8, HALVED), 1)
        assert h == pytest.approx(G.sobolev_norm(u, 1), rel=1e-12)


class TestGroupProperties:
    @pytest.fixture
    def family(self):
        g = make_grid(15, 2048)
        rng = np.random.default_rng(3)
        return StateField(g, G.random_band_limited(g, 100, rng)), rng

    def test_unitarity(self, family):
        F, rng = family
        out = apply_linear(F, rng.uniform(-5, 5, 100))
        n0 = G.lp(F.values, 2, F.grid.dx)
        assert np.max(np.abs(G.lp(out.values, 2, F.grid.dx) / n0 - 1)) <= 1e-13

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_sobolev_isometry(self, family, s):
        F, rng = family
        out = apply_linear(F, rng.uniform(-1, 1, 100))
        assert np.allclose(G.sobolev_norm(out, s) / G.sobolev_norm(F, s), 1, atol=1e-12, rtol=0)

    def test_flow_property(self, family):
        F, rng = family
        b1, b2 = rng.uniform(-1, 1, 100), rng.uniform(-1, 1, 100)
        lhs = apply_linear(apply_linear(F, b1), b2).values
        rhs = apply_linear(F, b1 + b2).values
        assert np.max(G.lp(lhs - rhs, 2, F.grid.dx)) <= 1e-13

    def test_inverse(self, family):
        F, rng = family
        b = rng.uniform(-1, 1, 100)
        back = apply_linear(apply_linear(F, b), -b).values
        assert np.max(G.lp(back - F.values, 2, F.grid.dx)) <= 1e-13

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_flow_property_single_mode(self, b1, b2):
        g = make_grid(4.0, 64)
        u = StateField(g, g.mode(5))
        lhs = apply_linear(apply_linear(u, b1), b2).values
        assert np.max(np.abs(lhs - apply_linear(u, b1 + b2).values)) <= 1e-13


class TestKernelOracle:
    g = make_grid(15, 2048)

    @pytest.mark.parametrize("db", [0.1, 0.5, 1.0, -0.5])
    def test_matches_multiplier(self, db):
        u = gaussian(self.g)
        ref = apply_linear(u, db).values
        k = kernel_apply(u, db).values
        assert np.linalg.norm(k - ref) <= 1e-6 * np.linalg.norm(ref)

    def test_mass(self):
        u = gaussian(self.g)
        assert mass_error(kernel_apply(u, 0.5), u) <= 1e-6

    def test_exact_on_real_line(self):
        # the quadrature is against the free-space kernel, so it matches the closed form directly
        u = gaussian(self.g)
        k = kernel_apply(u, 1.0).values
        exact = gaussian_closed_form(self.g, 1, 1, 0, 1.0)
        assert np.linalg.norm(k - exact) <= 1e-10 * np.linalg.norm(exact)

    def test_tiny_increment_rejected(self):
        with pytest.raises(ValueError):
            kernel_apply(gaussian(self.g), 1e-9)
        assert DELTA_MIN == 1e-3

    def test_support_touching_boundary_rejected(self):
        g = make_grid(10, 8)
        with pytest.raises(ValueError):
            kernel_apply(StateField(g, np.exp(-(g.x / 5) ** 2)), 0.5)


class TestDuhamel:
    def test_zero_source(self, grid):
        f = FieldSeries(grid, 0.01, np.zeros((11, grid.N)))
        out = duhamel_integral(f, sample_brownian(10, 0.01, 0), 10)
        assert np.all(out.values == 0)

    def test_frozen_path(self, grid):
        g0 = gaussian(grid)
        f = FieldSeries.constant(g0, 20, 0.05)
        out = duhamel_integral(f, DispersionPath(0.05, np.zeros(21)), 20)
        assert np.max(np.abs(out.values - 1.0 * g0.values)) <= 1e-14

    def test_against_direct_summation(self, grid):
        g0 = gaussian(grid)
        J, dt = 40, 0.025
        path = sample_brownian(J, dt, 4)
        out = duhamel_integral(FieldSeries.constant(g0, J, dt), path, J).values
        b = path.values
        ref = np.zeros(grid.N, complex)
        for j in range(J):
            ref += apply_linear(g0, b[J] - b[j]).values * dt
        assert np.linalg.norm(out - ref) <= 1e-12 * np.linalg.norm(ref)

    def test_at_time_zero(self, grid):
        f = FieldSeries.constant(gaussian(grid), 5, 0.1)
        assert np.all(duhamel_integral(f, deterministic_path(5, 0.1), 0).values == 0)

    def test_grid_mismatch(self, grid):
        f = FieldSeries.constant(gaussian(grid), 5, 0.1)
        with pytest.raises(ValueError):
            duhamel_integral(f, deterministic_path(6, 0.1), 3)
        with pytest.raises(ValueError):
            duhamel_integral(f, deterministic_path(5, 0.2), 3)

    def test_bad_index(self, grid):
        f = FieldSeries.constant(gaussian(grid), 5, 0.1)
        with pytest.raises(ValueError):
            duhamel_integral(f, deterministic_path(5, 0.1), 6)
