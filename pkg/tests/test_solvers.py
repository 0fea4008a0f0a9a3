import numpy as np
import pytest

from editgame.errors import ConvergenceError, DegenerateOpponentsError, InfeasibleGameError
from editgame.model import (
    Allocation,
    GameInstance,
    closed_form_equilibrium,
    stationarity_residuals,
)
from editgame.solvers import (
    SolverConfig,
    best_response_equilibrium,
    best_response_step,
    eigenbasis,
    spectral_equilibrium,
)

from conftest import random_feasible_game, random_unconstrained_game


class TestEigenbasis:
    def test_order_two_columns(self):
        P = eigenbasis(2).matrix
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(P[:, 0], [s, s])
        np.testing.assert_allclose(P[:, 1], [-s, s])

    def test_order_three_columns(self):
        P = eigenbasis(3).matrix
        np.testing.assert_allclose(P[:, 1], [-1 / np.sqrt(2), 1 / np.sqrt(2), 0])
        np.testing.assert_allclose(
            P[:, 2], [-1 / np.sqrt(6), -1 / np.sqrt(6), 2 / np.sqrt(6)]
        )

    @pytest.mark.parametrize("n", [2, 3, 5, 17, 100, 500])
    def test_orthonormal_and_diagonalizing(self, n):
        P = eigenbasis(n).matrix
        gram = P.T @ P
        assert np.abs(gram - np.eye(n)).max() < 1e-12
        ones = np.ones((n, n))
        d = P.T @ ones @ P
        expected = np.zeros((n, n))
        expected[0, 0] = n
        assert np.abs(d - expected).max() < 1e-10

    def test_small_order_rejected(self):
        with pytest.raises(ValueError):
            eigenbasis(1)

    def test_matrix_is_read_only(self):
        P = eigenbasis(4).matrix
        with pytest.raises(ValueError):
            P[0, 0] = 2.0


class TestSpectral:
    def test_two_player_asymmetric(self):
        sol = spectral_equilibrium(GameInstance.from_betas([1, 2]))
        np.testing.assert_allclose(
            sol.contributions.contributions, [2 / 9, 1 / 9], atol=1e-12
        )

    def test_symmetric_has_no_asymmetric_component(self):
        # All z_k (k >= 2) vanish, so every coordinate equals the mean part.
        sol = spectral_equilibrium(GameInstance.from_betas([4, 4, 4, 4, 4]))
        x = sol.contribution_array
        assert np.ptp(x) < 1e-15

    def test_matches_closed_form_on_random_instances(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            game = random_feasible_game(rng, n_range=(2, 20))
            xs = spectral_equilibrium(game).contribution_array
            xc = closed_form_equilibrium(game).contribution_array
            assert np.abs(xs - xc).max() < 1e-9

    def test_infeasible_game_rejected(self):
        with pytest.raises(InfeasibleGameError):
            spectral_equilibrium(GameInstance.from_betas([1, 1, 10]))


class TestBestResponseStep:
    def test_equilibrium_is_fixed_point(self):
        game = GameInstance.from_betas([1, 2])
        alloc = Allocation((2 / 9, 1 / 9))
        # sigma = 1/9, L*beta_1 + t = 1: sqrt(1/9) - 1/9 = 2/9.
        assert best_response_step(game, alloc, 0) == pytest.approx(2 / 9, abs=1e-15)
        assert best_response_step(game, alloc, 1) == pytest.approx(1 / 9, abs=1e-15)

    def test_indifference_boundary(self):
        game = GameInstance.from_betas([2, 2])
        alloc = Allocation((0.0, 0.5))  # sigma = 1/2 = 1/(L*beta_1)
        assert best_response_step(game, alloc, 0) == pytest.approx(0.0, abs=1e-15)

    def test_clamped_beyond_boundary(self):
        game = GameInstance.from_betas([2, 2])
        alloc = Allocation((0.0, 0.9))  # sigma > 1/(L*beta_1)
        assert best_response_step(game, alloc, 0) == 0.0

    def test_degenerate_opponents(self):
        game = GameInstance.from_betas([1, 2])
        with pytest.raises(DegenerateOpponentsError):
            best_response_step(game, Allocation((0.0, 0.5)), 1)


class TestBestResponseEquilibrium:
    def test_two_player_asymmetric(self):
        sol = best_response_equilibrium(GameInstance.from_betas([1, 2]))
        np.testing.assert_allclose(
            sol.contributions.contributions, [2 / 9, 1 / 9], atol=1e-9
        )

    def test_dominated_contributor_driven_to_zero(self):
        sol = best_response_equilibrium(GameInstance.from_betas([1, 1, 10]))
        assert sol.contributions.contributions[2] == 0.0
        assert sol.active_set == (0, 1)

    def test_symmetric_five_player(self):
        sol = best_response_equilibrium(GameInstance.from_betas([3] * 5))
        x = sol.contribution_array
        assert np.ptp(x) <= 1e-11

    def test_non_convergence_raises_with_residual(self):
        cfg = SolverConfig(max_iterations=3)
        with pytest.raises(ConvergenceError) as err:
            best_response_equilibrium(GameInstance.from_betas([1, 7, 2]), cfg)
        assert err.value.residual > 0
        assert err.value.iterations == 3

    def test_fixed_point_verification(self):
        rng = np.random.default_rng(22)
        cfg = SolverConfig()
        for _ in range(50):
            game = random_feasible_game(rng, n_range=(2, 30))
            sol = best_response_equilibrium(game, cfg)
            for i in range(game.n):
                step = best_response_step(game, sol.contributions, i)
                assert abs(step - sol.contributions.contributions[i]) < 1e-8

    def test_constrained_fixed_point_on_infeasible_games(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            game = random_unconstrained_game(rng, n_range=(3, 25))
            sol = best_response_equilibrium(game)
            cf = closed_form_equilibrium(game)
            assert sol.active_set == cf.active_set
            np.testing.assert_allclose(
                sol.contribution_array, cf.contribution_array, atol=1e-8
            )

    def test_stationarity_of_active_coordinates(self):
        rng = np.random.default_rng(24)
        for _ in range(30):
            game = random_feasible_game(rng)
            sol = best_response_equilibrium(game)
            resid = stationarity_residuals(game, sol.contribution_array)
            assert np.abs(resid).max() < 1e-9

    def test_concavity_witness(self):
        # d2u/dx2 = -2*sigma/S^3 < 0 at every evaluated interior point.
        rng = np.random.default_rng(25)
        for _ in range(20):
            game = random_feasible_game(rng, n_range=(2, 15))
            x = best_response_equilibrium(game).contribution_array
            total = x.sum()
            second = -2 * (total - x) / total**3
            assert np.all(second < 0)


class TestSolverConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(tolerance=0.0)
        with pytest.raises(ValueError):
            SolverConfig(max_iterations=0)
        with pytest.raises(ValueError):
            SolverConfig(damping=1.5)
