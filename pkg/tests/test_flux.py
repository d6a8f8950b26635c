import numpy as np
import pytest
from scipy.integrate import quad

from tecno2d.entropy import burgers_flux, linear_flux, square_entropy_pair
from tecno2d.flux import (
    DiffusionBounds,
    assemble_tecno_flux,
    diffusion_coefficient,
    entropy_conservative_flux,
)
from tecno2d.grid import Boundary, Grid2D, GridFunction, interface_jump
from tecno2d.reconstruct import reconstruction_jumps


class TestDiffusionBounds:
    def test_valid(self):
        b = DiffusionBounds(0.5, 2.0)
        assert b.d_low == 0.5

    @pytest.mark.parametrize("low,high", [(0.0, 1.0), (-1.0, 1.0), (2.0, 1.0)])
    def test_invalid(self, low, high):
        with pytest.raises(ValueError):
            DiffusionBounds(low, high)


class TestEntropyConservativeFlux:
    def test_burgers_hand_value(self):
        # oracle: mean of f over [0, 1] = int_0^1 s^2/2 ds = 1/6
        spec = burgers_flux()
        assert entropy_conservative_flux(0.0, 1.0, spec, "x") == pytest.approx(1.0 / 6.0)

    def test_burgers_symmetric_three_term_form(self):
        spec = burgers_flux()
        rng = np.random.default_rng(2)
        uL = rng.uniform(-2, 2, size=50)
        uR = rng.uniform(-2, 2, size=50)
        got = entropy_conservative_flux(uL, uR, spec, "x")
        np.testing.assert_allclose(got, (uL**2 + uL * uR + uR**2) / 6.0, atol=1e-13)

    def test_quadrature_oracle(self):
        # the flux is the average of f between the two states
        for spec in (burgers_flux(), linear_flux(2.0, -1.0)):
            for axis in ("x", "y"):
                f = spec.f(axis)
                for uL, uR in [(-1.3, 0.4), (0.7, 2.0), (-2.0, -0.5)]:
                    oracle = quad(f, uL, uR, epsabs=1e-14)[0] / (uR - uL)
                    got = entropy_conservative_flux(uL, uR, spec, axis)
                    assert got == pytest.approx(oracle, abs=1e-12)

    def test_linear_hand_value(self):
        spec = linear_flux(2.0, 0.0)
        got = entropy_conservative_flux(1.0, 3.0, spec, "x")
        assert got == pytest.approx(4.0)  # (9 - 1)/2 = 2 * avg

    def test_consistency_on_diagonal(self):
        spec = burgers_flux()
        assert entropy_conservative_flux(0.7, 0.7, spec, "x") == pytest.approx(0.245)
        # approaching the diagonal stays within 1e-12 of f(u)
        u = 0.7
        got = entropy_conservative_flux(u, u + 1e-14, spec, "x")
        assert got == pytest.approx(spec.f_x(u), abs=1e-12)

    def test_tadmor_condition(self):
        rng = np.random.default_rng(4)
        for spec in (burgers_flux(), linear_flux(1.3, -0.7)):
            pair = square_entropy_pair(spec)
            for axis in ("x", "y"):
                uL = rng.uniform(-2, 2, size=500)
                uR = rng.uniform(-2, 2, size=500)
                ec = entropy_conservative_flux(uL, uR, spec, axis)
                psi = pair.psi(axis)
                residual = np.abs((uR - uL) * ec - (np.asarray(psi(uR)) - np.asarray(psi(uL))))
                assert np.all(residual <= 1e-10 * (1.0 + np.abs(uR - uL)))

    def test_symmetry(self):
        spec = burgers_flux()
        rng = np.random.default_rng(6)
        uL = rng.uniform(-2, 2, size=100)
        uR = rng.uniform(-2, 2, size=100)
        np.testing.assert_array_equal(
            entropy_conservative_flux(uL, uR, spec, "x"),
            entropy_conservative_flux(uR, uL, spec, "x"),
        )

    def test_local_lipschitz(self):
        # difference quotients bounded by max |f'| on the sampled square
        spec = burgers_flux()
        rng = np.random.default_rng(8)
        m = 2.0
        u = rng.uniform(-m, m, size=200)
        v = rng.uniform(-m, m, size=200)
        h = 1e-6
        for args in ((u + h, v), (u, v + h)):
            dq = np.abs(
                np.asarray(entropy_conservative_flux(*args, spec, "x"))
                - np.asarray(entropy_conservative_flux(u, v, spec, "x"))
            ) / h
            assert np.max(dq) <= m + h + 1e-6


class TestDiffusionCoefficient:
    def test_local_max_derivative(self):
        spec = burgers_flux()
        bounds = DiffusionBounds(0.01, 10.0)
        assert diffusion_coefficient(-1.0, 2.0, spec, "x", bounds) == pytest.approx(1.0)

    def test_clamps_to_lower_bound(self):
        spec = burgers_flux()
        bounds = DiffusionBounds(0.01, 10.0)
        assert diffusion_coefficient(0.0, 0.0, spec, "x", bounds) == pytest.approx(0.01)

    def test_constant_for_linear_flux(self):
        spec = linear_flux(3.0, 3.0)
        bounds = DiffusionBounds(0.01, 10.0)
        rng = np.random.default_rng(10)
        uL = rng.uniform(-5, 5, size=20)
        uR = rng.uniform(-5, 5, size=20)
        np.testing.assert_allclose(diffusion_coefficient(uL, uR, spec, "x", bounds), 1.5)

    def test_clamps_to_upper_bound(self):
        spec = linear_flux(100.0, 0.0)
        bounds = DiffusionBounds(0.01, 10.0)
        assert diffusion_coefficient(0.0, 1.0, spec, "x", bounds) == pytest.approx(10.0)


class TestAssembleTecnoFlux:
    def test_constant_field(self):
        grid = Grid2D(nx=4, ny=4, dx=0.5, dy=0.5)
        u = GridFunction(grid, np.full((4, 4), 0.8))
        spec = burgers_flux()
        jumps = reconstruction_jumps(u)
        fluxes = assemble_tecno_flux(u, jumps, spec, DiffusionBounds(1e-3, 10.0))
        np.testing.assert_allclose(fluxes.x, spec.f_x(0.8), atol=1e-15)
        np.testing.assert_allclose(fluxes.y, spec.f_y(0.8), atol=1e-15)

    def test_step_composition(self):
        # 1D step [0, 1] in x: at the step interface the reconstruction jump
        # equals the cell jump (isolated step), D = max(0, 1)/2 = 1/2, so
        # F = 1/6 - 1/2 = -1/3
        grid = Grid2D(nx=6, ny=3, dx=1.0, dy=1.0, boundary=Boundary.OUTFLOW)
        values = np.tile(
            np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])[:, None], (1, 3)
        )
        u = GridFunction(grid, values)
        jumps = reconstruction_jumps(u)
        fluxes = assemble_tecno_flux(u, jumps, burgers_flux(), DiffusionBounds(1e-3, 10.0))
        np.testing.assert_allclose(jumps.x[3], 1.0)
        np.testing.assert_allclose(fluxes.d_x[3], 0.5)
        np.testing.assert_allclose(fluxes.x[3], -1.0 / 3.0, atol=1e-14)

    def test_x_constant_field_has_no_x_diffusion(self):
        grid = Grid2D(nx=4, ny=6, dx=1.0, dy=1.0)
        values = np.tile(np.sin(np.arange(6.0))[None, :], (4, 1))
        u = GridFunction(grid, values)
        jumps = reconstruction_jumps(u)
        fluxes = assemble_tecno_flux(u, jumps, burgers_flux(), DiffusionBounds(1e-3, 10.0))
        np.testing.assert_array_equal(jumps.x, 0.0)
        np.testing.assert_array_equal(fluxes.x, fluxes.ec_x)

    @pytest.mark.parametrize("boundary", list(Boundary))
    def test_decomposition_and_bounds(self, boundary):
        rng = np.random.default_rng(12)
        grid = Grid2D(nx=7, ny=5, dx=0.25, dy=0.5, boundary=boundary)
        u = GridFunction(grid, rng.uniform(-1.5, 1.5, size=(7, 5)))
        bounds = DiffusionBounds(1e-2, 0.6)
        jumps = reconstruction_jumps(u)
        fluxes = assemble_tecno_flux(u, jumps, burgers_flux(), bounds)
        np.testing.assert_array_equal(fluxes.x, fluxes.ec_x - fluxes.d_x * jumps.x)
        np.testing.assert_array_equal(fluxes.y, fluxes.ec_y - fluxes.d_y * jumps.y)
        for d in (fluxes.d_x, fluxes.d_y):
            assert np.all(d >= bounds.d_low)
            assert np.all(d <= bounds.d_high)

    @pytest.mark.parametrize("boundary", list(Boundary))
    def test_interface_dissipation_sign(self, boundary):
        # -D <<u>> [u] <= 0 at every interface, exactly in floats
        rng = np.random.default_rng(14)
        grid = Grid2D(nx=9, ny=8, dx=1.0, dy=1.0, boundary=boundary)
        for _ in range(25):
            u = GridFunction(grid, rng.uniform(-1, 1, size=(9, 8)))
            jumps = reconstruction_jumps(u)
            fluxes = assemble_tecno_flux(u, jumps, burgers_flux(), DiffusionBounds(1e-3, 10.0))
            jx = interface_jump(u, "x")
            jy = interface_jump(u, "y")
            assert np.all(-fluxes.d_x * jumps.x * jx <= 0.0)
            assert np.all(-fluxes.d_y * jumps.y * jy <= 0.0)
