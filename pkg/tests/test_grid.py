"""Grid, transforms, multipliers and norms."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from wnls import grid as G
from wnls.grid import StateField, make_grid, transform


def gaussian(grid, a=1.0):
    return StateField(grid, np.exp(-a * grid.x**2))


class TestMakeGrid:
    def test_small_grid(self):
        g = make_grid(math.pi, 8)
        assert g.dx == pytest.approx(math.pi / 4, rel=1e-15)
        assert sorted(g.xi.round(12).tolist()) == list(range(-4, 4))

    def test_standard_grid(self):
        g = make_grid(10, 1024)
        assert g.dx == 20 / 1024
        assert g.dx * g.N == 2 * g.L

    @pytest.mark.parametrize("L,N", [(10, 1000), (10, 4), (0, 64), (-1, 64)])
    def test_rejects_bad_input(self, L, N):
        with pytest.raises(ValueError):
            make_grid(L, N)

    def test_frequency_lattice_symmetric_except_nyquist(self):
        g = make_grid(3.0, 64)
        k = set(g.k.tolist())
        assert -32 in k and 32 not in k
        assert all(-j in k for j in k if j != -32)


class TestTransform:
    def test_constant_goes_to_zero_mode(self, grid):
        uh = transform(StateField(grid, np.ones(grid.N)), "forward").values
        assert np.abs(uh[0]) == pytest.approx(math.sqrt(grid.N))
        assert np.max(np.abs(uh[1:])) < 1e-12

    def test_single_mode(self, grid):
        uh = transform(StateField(grid, grid.mode(1)), "forward").values
        mass = np.abs(uh) ** 2 * grid.dx
        assert mass[1] == pytest.approx(2 * grid.L, rel=1e-12)
        assert mass.sum() - mass[1] < 1e-20

    def test_round_trip(self, grid, rng):
        u = StateField(grid, rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N))
        back = transform(transform(u, "forward"), "inverse")
        assert np.linalg.norm(back.values - u.values) <= 1e-12 * np.linalg.norm(u.values)

    def test_representation_mismatch(self, grid):
        u = StateField(grid, np.ones(grid.N))
        with pytest.raises(ValueError):
            transform(u, "inverse")
        with pytest.raises(ValueError):
            transform(u.spectral(), "forward")

    def test_values_are_read_only(self, grid):
        u = StateField(grid, np.ones(grid.N))
        with pytest.raises(ValueError):
            u.values[0] = 2.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([8, 64, 256]))
    def test_plancherel(self, seed, N):
        g = make_grid(5.0, N)
        r = np.random.default_rng(seed)
        u = StateField(g, r.standard_normal(N) + 1j * r.standard_normal(N))
        a, b = G.lp_norm(u, 2), G.l2_norm_spectral(u)
        assert abs(a - b) <= 1e-12 * a


class TestFractionalDerivative:
    def test_order_zero_is_identity(self, grid, rng):
        u = StateField(grid, rng.standard_normal(grid.N).astype(complex))
        assert np.allclose(G.fractional_derivative(u, 0).values, u.values, atol=1e-14)

    def test_mode_is_eigenfunction(self, grid):
        out = G.fractional_derivative(StateField(grid, grid.mode(2)), 0.5).values
        lam = math.sqrt(2 * math.pi / grid.L)
        assert np.max(np.abs(out - lam * grid.mode(2))) < 1e-12

    def test_zero_mode_killed(self, grid):
        out = G.fractional_derivative(StateField(grid, np.ones(grid.N)), 0.5)
        assert np.max(np.abs(out.values)) < 1e-13

    def test_gaussian_half_derivative_quadrature(self):
        # ||D^1/2 g||^2 = (2 pi)^-1 int |xi| |ghat|^2 with ghat = sqrt(pi) exp(-xi^2/4);
        # the continuum value is 1
        oracle, _ = quad(lambda s: abs(s) * math.pi * math.exp(-s * s / 2), -np.inf, np.inf)
        assert oracle / (2 * math.pi) == pytest.approx(1.0, rel=1e-12)
        for L in (10.0, 20.0, 40.0):
            g = make_grid(L, int(102.4 * L))
            val = G.l2_norm_spectral(G.fractional_derivative(gaussian(g), 0.5)) ** 2
            # same integrand summed on the box's frequency lattice
            dxi = math.pi / L
            lattice = np.sum(np.abs(g.xi) * math.pi * np.exp(-g.xi2 / 2)) * dxi / (2 * math.pi)
            assert val == pytest.approx(lattice, rel=1e-10)
            # the kink of |xi| at 0 costs dxi^2 / 12 against the integral
            assert abs(val - 1.0) <= 1.05 * dxi**2 / 12

    def test_negative_order(self, grid):
        with pytest.raises(ValueError):
            G.fractional_derivative(gaussian(grid), -0.5)

    @pytest.mark.parametrize("s1,s2", [(0.5, 0.5), (0.25, 1.0), (1.0, 2.0)])
    def test_composition(self, s1, s2, rng):
        g = make_grid(4.0, 256)
        u = StateField(g, G.random_band_limited(g, 5, rng))
        lhs = G.fractional_derivative(G.fractional_derivative(u, s1), s2).values
        rhs = G.fractional_derivative(u, s1 + s2).values
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)

    def test_representation_preserved(self, grid):
        u = gaussian(grid).spectral()
        assert G.fractional_derivative(u, 0.5).representation == "spectral"


class TestNorms:
    def test_zero(self, grid):
        assert G.lp_norm(StateField(grid, np.zeros(grid.N)), 3) == 0.0
        assert G.lp_norm(StateField(grid, np.zeros(grid.N)), 10) == 0.0

    def test_constant(self, grid):
        c = 1.5 - 2j
        assert G.lp_norm(StateField(grid, np.full(grid.N, c)), 2) == pytest.approx(
            abs(c) * math.sqrt(2 * grid.L), rel=1e-14)

    def test_gaussian_l2(self, grid):
        assert G.lp_norm(gaussian(grid), 2) == pytest.approx((math.pi / 2) ** 0.25, abs=1e-10)

    def test_linf_is_node_max(self, grid):
        u = gaussian(grid, 3.0)
        assert G.lp_norm(u, np.inf) == 1.0

    def test_large_p_no_overflow(self, grid):
        u = StateField(grid, 1e40 * np.exp(-grid.x**2))
        ref = 1e40 * G.lp_norm(gaussian(grid), 10)
        assert G.lp_norm(u, 10) == pytest.approx(ref, rel=1e-12)

    def test_p_below_one(self, grid):
        with pytest.raises(ValueError):
            G.lp_norm(gaussian(grid), 0.5)

    def test_physical_only(self, grid):
        with pytest.raises(ValueError):
            G.lp_norm(gaussian(grid).spectral(), 2)

    def test_sobolev_zero_is_l2(self, grid, rng):
        u = StateField(grid, G.random_band_limited(grid, 1, rng)[0] * 3)
        assert G.sobolev_norm(u, 0) == pytest.approx(G.lp_norm(u, 2), rel=1e-12)

    def test_sobolev_single_mode(self, grid):
        xi1 = math.pi / grid.L
        val = G.sobolev_norm(StateField(grid, grid.mode(1)), 1)
        assert val == pytest.approx(math.sqrt(2 * grid.L) * math.sqrt(1 + xi1**2), rel=1e-12)

    def test_sobolev_gaussian_quadrature(self, grid):
        oracle, _ = quad(lambda s: (1 + s * s) * math.pi * math.exp(-s * s / 2), -np.inf, np.inf)
        oracle = math.sqrt(oracle / (2 * math.pi))
        assert G.sobolev_norm(gaussian(grid), 1) == pytest.approx(oracle, rel=1e-10)

    def test_batch_axes(self, grid, rng):
        u = G.random_band_limited(grid, 4, rng)
        assert G.lp(u, 2, grid.dx).shape == (4,)
        assert np.allclose(G.lp(u, 2, grid.dx), 1.0, atol=1e-13)


class TestMonitors:
    def test_boundary_mass_small_for_centered_gaussian(self, grid):
        assert G.boundary_mass_fraction(gaussian(grid).values, grid) < 1e-20

    def test_boundary_mass_of_constant(self, grid):
        assert G.boundary_mass_fraction(np.ones(grid.N), grid) == pytest.approx(0.25, abs=1e-2)

    def test_high_band_fraction(self, grid):
        assert G.high_band_fraction(G.fft(grid.mode(grid.N // 2 - 1)), grid) == pytest.approx(1)
        assert G.high_band_fraction(G.fft(gaussian(grid).values), grid) < 1e-20


class TestSpacetime:
    def test_constant_in_time(self):
        norms = np.full(100, 2.0)
        assert G.spacetime_lp(norms, 5, 0.01) == pytest.approx(1.0**0.2 * 2.0, rel=1e-14)

    def test_half_on(self):
        norms = np.r_[np.ones(50), np.zeros(50)]
        assert G.spacetime_lp(norms, 5, 0.01) == pytest.approx(0.5**0.2, rel=1e-14)

    def test_zero(self):
        assert G.spacetime_lp(np.zeros(10), 5, 0.1) == 0.0


def interp_ratio(g, grid):
    """``||g||_5 / (||g||_1^(1/5) ||D^1/2 g||_2^(4/5))``."""
    f = StateField(grid, g)
    d = G.l2_norm_spectral(G.fractional_derivative(f, 0.5))
    return G.lp(g, 5, grid.dx) / (G.lp(g, 1, grid.dx) ** 0.2 * d**0.8)


def gn_ratio(g, grid):
    """``||g||_5 / (||D^1/2 g||_2^(3/5) ||g||_2^(2/5))``."""
    f = StateField(grid, g)
    d = G.l2_norm_spectral(G.fractional_derivative(f, 0.5))
    return G.lp(g, 5, grid.dx) / (d**0.6 * G.lp(g, 2, grid.dx) ** 0.4)


class TestInequalitySuites:
    """Empirical constants on 100 random band-limited fields."""

    @pytest.fixture
    def family(self):
        g = make_grid(8.0, 512)
        return g, G.random_band_limited(g, 100, np.random.default_rng(7))

    def test_l1_interpolation_ratio(self, family):
        g, fields = family
        r = interp_ratio(fields, g)
        assert np.all(np.isfinite(r)) and r.max() <= 10

    def test_gagliardo_nirenberg_ratio(self, family):
        g, fields = family
        r = gn_ratio(fields, g)
        assert np.all(np.isfinite(r)) and r.max() <= 10

    @pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
    def test_dilation_covariance(self, lam):
        g = make_grid(8.0, 512)
        gl = make_grid(8.0 / lam, 512)
        u = np.exp(-g.x**2) * (1 + 0.3 * np.cos(3 * g.x))
        ul = np.exp(-(lam * gl.x) ** 2) * (1 + 0.3 * np.cos(3 * lam * gl.x))
        assert interp_ratio(ul, gl) == pytest.approx(interp_ratio(u, g), rel=1e-3)
        assert gn_ratio(ul, gl) == pytest.approx(gn_ratio(u, g), rel=1e-3)
