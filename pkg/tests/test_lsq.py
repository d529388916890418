import numpy as np
import pytest

from quadsysid.errors import NonFiniteObjective, RankDeficient, ShapeMismatch
from quadsysid.lsq import LinearSystem, grid_minimize, solve_ols, stack


def _random_system(rng, rows=40, cols=4, noise=0.0):
    a = rng.normal(size=(rows, cols))
    x = rng.normal(size=cols)
    b = a @ x + noise * rng.normal(size=rows)
    return LinearSystem(a=a, b=b, row_blocks=rows), x


class TestLinearSystem:
    def test_row_count_mismatch_rejected(self):
        with pytest.raises(ShapeMismatch):
            LinearSystem(a=np.zeros((3, 2)), b=np.zeros(4), row_blocks=3)

    def test_wrong_dimensionality_rejected(self):
        with pytest.raises(ShapeMismatch):
            LinearSystem(a=np.zeros(3), b=np.zeros(3), row_blocks=3)

    def test_shape_properties(self):
        system = LinearSystem(a=np.zeros((5, 2)), b=np.zeros(5), row_blocks=5)
        assert system.rows == 5
        assert system.cols == 2


class TestStack:
    def test_concatenates_blocks_in_order(self, rng):
        a1, b1 = rng.normal(size=(2, 3)), rng.normal(size=2)
        a2, b2 = rng.normal(size=(4, 3)), rng.normal(size=4)
        merged = stack([(a1, b1), (a2, b2)])
        assert merged.rows == 6
        assert merged.row_blocks == 2
        assert np.array_equal(merged.a[:2], a1)
        assert np.array_equal(merged.b[2:], b2)

    def test_promotes_single_row_blocks(self, rng):
        row = rng.normal(size=3)
        merged = stack([(row, 1.0), (row, 2.0)])
        assert merged.a.shape == (2, 3)
        assert np.array_equal(merged.b, [1.0, 2.0])

    def test_column_mismatch_rejected(self, rng):
        with pytest.raises(ShapeMismatch):
            stack([(rng.normal(size=(2, 3)), np.zeros(2)),
                   (rng.normal(size=(2, 4)), np.zeros(2))])

    def test_block_row_mismatch_rejected(self, rng):
        with pytest.raises(ShapeMismatch):
            stack([(rng.normal(size=(2, 3)), np.zeros(3))])

    def test_empty_rejected(self):
        with pytest.raises(ShapeMismatch):
            stack([])


class TestSolveOls:
    def test_planted_solution_recovered(self, rng):
        for _ in range(20):
            system, x_true = _random_system(rng)
            sol = solve_ols(system)
            assert np.abs(sol.x - x_true).max() <= 1e-10 * max(1.0, np.abs(x_true).max())

    def test_rmse_is_normalized_residual_norm(self, rng):
        system, _ = _random_system(rng, noise=0.3)
        sol = solve_ols(system)
        assert sol.rmse == pytest.approx(sol.residual_norm / np.sqrt(system.rows))

    def test_residual_orthogonal_to_columns(self, rng):
        for _ in range(50):
            system, _ = _random_system(rng, rows=30, cols=5, noise=0.5)
            sol = solve_ols(system)
            resid = system.b - system.a @ sol.x
            gram = np.abs(system.a.T @ resid).max()
            scale = np.linalg.norm(system.a) * max(np.linalg.norm(resid), 1e-30)
            assert gram <= 1e-8 * scale

    def test_duplicate_column_rank_deficient(self, rng):
        a = rng.normal(size=(20, 3))
        a[:, 2] = a[:, 0]
        with pytest.raises(RankDeficient):
            solve_ols(LinearSystem(a=a, b=rng.normal(size=20), row_blocks=20))

    def test_underdetermined_rejected(self, rng):
        a = rng.normal(size=(3, 5))
        with pytest.raises(RankDeficient):
            solve_ols(LinearSystem(a=a, b=np.zeros(3), row_blocks=3))

    def test_exact_fit_zero_residual(self, rng):
        system, _ = _random_system(rng, noise=0.0)
        sol = solve_ols(system)
        assert sol.residual_norm <= 1e-10


class TestGridMinimize:
    def test_finds_minimum_and_returns_curve(self):
        grid = np.linspace(0.1, 2.0, 50)
        best, curve = grid_minimize(lambda t: (t - 0.73) ** 2, grid)
        assert best == grid[np.argmin((grid - 0.73) ** 2)]
        assert len(curve) == 50
        assert [c for c, _ in curve] == list(grid)
        assert all(v == (c - 0.73) ** 2 for c, v in curve)

    def test_tie_prefers_smaller_candidate(self):
        grid = [1.0, 2.0, 3.0]
        best, _ = grid_minimize(lambda t: 0.0 if t in (1.0, 3.0) else 1.0, grid)
        assert best == 1.0

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            grid_minimize(lambda t: t, [])

    def test_non_increasing_grid_rejected(self):
        with pytest.raises(ValueError):
            grid_minimize(lambda t: t, [1.0, 1.0, 2.0])

    def test_nonpositive_grid_rejected(self):
        with pytest.raises(ValueError):
            grid_minimize(lambda t: t, [0.0, 1.0])

    def test_nonfinite_objective_names_candidate(self):
        with pytest.raises(NonFiniteObjective, match="0.5"):
            grid_minimize(lambda t: float("nan") if t == 0.5 else t, [0.25, 0.5, 1.0])
