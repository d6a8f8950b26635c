import itertools

import numpy as np
import pytest

from tecno2d.grid import Boundary, Grid2D, GridFunction
from tecno2d.reconstruct import (
    check_cube_inequality,
    check_sign_property,
    eno2_edge_values,
    eno2_edges,
    eno2_slopes,
    recon_jump,
    reconstruction_jumps,
)


def naive_edges(row):
    """Straight-line scalar re-implementation of the reconstruction.

    Independent oracle: embed the row in zeros, pick per-cell the smaller of
    the two one-sided differences (backward on ties), evaluate the linear
    reconstruction at each interface from both sides.  Returns (minus, plus,
    jump) over the len(row)+1 interfaces of the embedded range.
    """
    padded = [0.0, 0.0] + [float(v) for v in row] + [0.0, 0.0]
    slopes = []
    for i in range(1, len(padded) - 1):
        back = padded[i] - padded[i - 1]
        fwd = padded[i + 1] - padded[i]
        slopes.append(back if abs(back) <= abs(fwd) else fwd)
    minus, plus, jump = [], [], []
    for m in range(len(row) + 1):
        left, right = m + 1, m + 2
        minus.append(padded[left] + 0.5 * slopes[left - 1])
        plus.append(padded[right] - 0.5 * slopes[right - 1])
        jump.append(padded[right] - padded[left])
    return np.asarray(minus), np.asarray(plus), np.asarray(jump)


def field_from_rows(rows, boundary=Boundary.PERIODIC, ny=3):
    rows = np.asarray(rows, dtype=float)
    grid = Grid2D(nx=rows.size, ny=ny, dx=1.0, dy=1.0, boundary=boundary)
    return GridFunction(grid, np.tile(rows[:, None], (1, ny)))


class TestSlopes:
    def test_hand_stencil(self):
        # cell "1": min(|1|, |2|) -> 1; cell "3": min(|2|, |1|) -> 1
        np.testing.assert_allclose(eno2_slopes(np.array([0.0, 1.0, 3.0, 4.0])), [1.0, 1.0])

    def test_tie_breaks_backward(self):
        np.testing.assert_allclose(eno2_slopes(np.array([0.0, 1.0, 2.0])), [1.0])
        # here the tie is between +1 and -1: the backward difference wins
        np.testing.assert_allclose(eno2_slopes(np.array([0.0, 1.0, 0.0])), [1.0])

    def test_constant_row(self):
        np.testing.assert_array_equal(eno2_slopes(np.full(6, 3.3)), 0.0)

    def test_batched_rows(self):
        rows = np.array([[0.0, 1.0, 3.0, 4.0], [4.0, 3.0, 1.0, 0.0]]).T
        np.testing.assert_allclose(eno2_slopes(rows), [[1.0, -1.0], [1.0, -1.0]])


class TestEdgeValues:
    def test_hand_example(self):
        # interface between cells valued 1 and 3 of [0,1,3,4]
        padded = np.array([3.0, 4.0, 0.0, 1.0, 3.0, 4.0, 0.0, 1.0])
        minus, plus = eno2_edges(padded)
        assert minus[2] == pytest.approx(1.5)
        assert plus[2] == pytest.approx(2.5)

    def test_constant_field(self):
        w = field_from_rows([2.0, 2.0, 2.0, 2.0])
        for direction in ("x", "y"):
            edges = eno2_edge_values(w, direction)
            np.testing.assert_array_equal(edges.minus, 2.0)
            np.testing.assert_array_equal(edges.plus, 2.0)
            np.testing.assert_array_equal(recon_jump(edges), 0.0)

    def test_linear_row_exact(self):
        # arithmetic data reconstructs exactly: both traces are i + 1/2
        padded = np.arange(10.0)  # cells -2..7, interior 0..5
        minus, plus = eno2_edges(padded)
        expected = np.arange(7.0) + 1.5  # interfaces between padded cells 1..8
        np.testing.assert_allclose(minus, expected)
        np.testing.assert_allclose(plus, expected)

    def test_affine_periodic_interior_jumps_vanish(self):
        w = field_from_rows([0.0, 1.0, 2.0, 3.0, 4.0])
        jumps = recon_jump(eno2_edge_values(w, "x"))
        # interior interfaces only; the wrap interface carries the real jump
        np.testing.assert_allclose(jumps[1:-1], 0.0, atol=1e-14)

    def test_outflow_boundary_traces_collapse(self):
        # copied ghosts zero out boundary-adjacent slopes: traces = cell value
        w = field_from_rows([1.0, 2.0, 4.0, 8.0], boundary=Boundary.OUTFLOW)
        edges = eno2_edge_values(w, "x")
        np.testing.assert_allclose(edges.minus[0], 1.0)
        np.testing.assert_allclose(edges.plus[0], 1.0)
        np.testing.assert_allclose(edges.minus[-1], 8.0)
        np.testing.assert_allclose(edges.plus[-1], 8.0)

    def test_trace_stays_in_local_range(self):
        rng = np.random.default_rng(23)
        for boundary in Boundary:
            grid = Grid2D(nx=8, ny=6, dx=1.0, dy=1.0, boundary=boundary)
            w = GridFunction(grid, rng.uniform(-1, 1, size=(8, 6)))
            edges = eno2_edge_values(w, "x")
            values = w.values
            # |w-_{i+1/2} - w_i| <= max(|w_i - w_{i-1}|, |w_{i+1} - w_i|)/2
            for i in range(1, 7):
                for j in range(6):
                    local = max(
                        abs(values[i, j] - values[i - 1, j]),
                        abs(values[i + 1, j] - values[i, j]),
                    )
                    assert abs(edges.minus[i + 1, j] - values[i, j]) <= 0.5 * local + 1e-14

    def test_dimension_by_dimension_consistency(self):
        rng = np.random.default_rng(31)
        row = rng.uniform(-1, 1, size=9)
        w = field_from_rows(row, ny=4)
        edges_2d = eno2_edge_values(w, "x")
        padded = np.concatenate([row[-2:], row, row[:2]])
        minus_1d, plus_1d = eno2_edges(padded)
        for j in range(4):
            np.testing.assert_array_equal(edges_2d.minus[:, j], minus_1d)
            np.testing.assert_array_equal(edges_2d.plus[:, j], plus_1d)
        # a field varying along y reconstructs identically through the y path
        wt = GridFunction(
            Grid2D(nx=4, ny=9, dx=1.0, dy=1.0), np.tile(row[None, :], (4, 1))
        )
        edges_y = eno2_edge_values(wt, "y")
        for i in range(4):
            np.testing.assert_array_equal(edges_y.minus[i, :], minus_1d)
            np.testing.assert_array_equal(edges_y.plus[i, :], plus_1d)

    def test_reconstruction_jumps_bundle(self):
        rng = np.random.default_rng(41)
        grid = Grid2D(nx=5, ny=7, dx=1.0, dy=1.0)
        w = GridFunction(grid, rng.uniform(-1, 1, size=(5, 7)))
        jumps = reconstruction_jumps(w)
        assert jumps.x.shape == (6, 7)
        assert jumps.y.shape == (5, 8)
        np.testing.assert_array_equal(jumps.x, recon_jump(eno2_edge_values(w, "x")))
        np.testing.assert_array_equal(jumps.y, recon_jump(eno2_edge_values(w, "y")))


class TestSignProperty:
    def test_monotone_row(self):
        report = check_sign_property(np.array([0.0, 0.5, 1.0, 2.0, 2.5]))
        assert report.violations == 0

    def test_hand_ratio(self):
        # interface between 1 and 3 of [0,1,3,4]: recon jump 1.0 over jump 2.0
        padded = np.array([3.0, 4.0, 0.0, 1.0, 3.0, 4.0, 0.0, 1.0])
        minus, plus = eno2_edges(padded)
        assert (plus[2] - minus[2]) / 2.0 == pytest.approx(0.5)

    def test_embedded_row_report(self):
        # embedding [0,1,3,4] in zeros: the support edge 4 -> 0 dominates,
        # jump -4 against slopes (1, 0) gives recon jump -4.5, ratio 1.125
        report = check_sign_property(np.array([0.0, 1.0, 3.0, 4.0]))
        assert report.violations == 0
        assert report.max_ratio == pytest.approx(1.125)

    def test_exhaustive_small_rows_against_naive_oracle(self):
        max_ratio = 0.0
        for row in itertools.product((-1.0, 0.0, 1.0), repeat=5):
            minus, plus, jump = naive_edges(row)
            rjump = plus - minus
            assert np.all(rjump * jump >= 0.0), row
            report = check_sign_property(np.array(row))
            assert report.violations == 0
            # dual route: the vectorized module path agrees with the oracle
            module_minus, module_plus = eno2_edges(
                np.concatenate([[0.0, 0.0], row, [0.0, 0.0]])
            )
            np.testing.assert_array_equal(module_minus, minus)
            np.testing.assert_array_equal(module_plus, plus)
            nonzero = jump != 0
            if nonzero.any():
                max_ratio = max(max_ratio, np.max(rjump[nonzero] / jump[nonzero]))
        assert max_ratio <= 2.0

    def test_randomized_rows(self):
        rng = np.random.default_rng(20240817)
        for _ in range(2000):
            row = rng.uniform(-1.0, 1.0, size=rng.integers(3, 12))
            report = check_sign_property(row)
            assert report.violations == 0
            assert report.max_ratio <= 2.0


class TestCubeInequality:
    def test_zero_row(self):
        report = check_cube_inequality(np.zeros(5))
        assert report.lhs == 0.0
        assert report.rhs == 0.0

    def test_single_spike(self):
        # hand evaluation: jumps +-1 give lhs = 2; slopes (0, 1, 0) give
        # recon jumps 1/2 and -3/2, pair sum 2, rhs = 2 * 1 * 2 = 4
        report = check_cube_inequality(np.array([0.0, 1.0, 0.0]))
        assert report.lhs == pytest.approx(2.0)
        assert report.rhs == pytest.approx(4.0)
        assert report.lhs <= report.rhs

    def test_randomized_rows(self):
        rng = np.random.default_rng(99)
        for _ in range(2000):
            row = rng.uniform(-1.0, 1.0, size=rng.integers(1, 16))
            report = check_cube_inequality(row)
            assert report.lhs <= report.rhs, row

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            row = rng.uniform(-1.0, 1.0, size=6)
            minus, plus, jump = naive_edges(row)
            report = check_cube_inequality(row)
            assert report.lhs == pytest.approx(float(np.sum(np.abs(jump) ** 3)))
            expected_rhs = 2.0 * np.max(np.abs(row)) * float(np.sum((plus - minus) * jump))
            assert report.rhs == pytest.approx(expected_rhs)
