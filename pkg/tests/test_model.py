import numpy as np
import pytest

from editgame.errors import UndefinedOwnershipError
from editgame.model import (
    Allocation,
    ContributorProfile,
    GameInstance,
    asymptotic_ownership,
    closed_form_equilibrium,
    equilibrium_ownership,
    exclusion_active_set,
    feasibility,
    fractional_ownership,
    net_utility,
    stationarity_residuals,
)
from editgame.solvers import best_response_equilibrium

from conftest import random_feasible_game, random_unconstrained_game


class TestNetUtility:
    def test_symmetric_two_player_zero(self):
        game = GameInstance.from_betas([1, 1])
        assert net_utility(game, Allocation((0.5, 0.5)), 0) == pytest.approx(0.0)

    def test_equilibrium_point_value(self):
        # u1 at the N=2, beta=(1,2) equilibrium: 2/3 - 2/9 = 4/9.
        game = GameInstance.from_betas([1, 2])
        u1 = net_utility(game, Allocation((2 / 9, 1 / 9)), 0)
        assert u1 == pytest.approx(4 / 9, abs=1e-12)

    def test_zero_contribution_pays_fixed_cost(self):
        game = GameInstance.from_betas([1, 2], fixed_costs=(0.3, 0.0))
        assert net_utility(game, Allocation((0.0, 5.0)), 0) == pytest.approx(-0.3)

    def test_all_zero_allocation_rejected(self):
        game = GameInstance.from_betas([1, 2])
        with pytest.raises(UndefinedOwnershipError):
            net_utility(game, Allocation((0.0, 0.0)), 0)

    def test_index_out_of_range(self):
        game = GameInstance.from_betas([1, 2])
        with pytest.raises(IndexError):
            net_utility(game, Allocation((0.5, 0.5)), 2)


class TestFractionalOwnership:
    def test_uniform(self):
        np.testing.assert_allclose(
            fractional_ownership(Allocation((1, 1, 1, 1))), [0.25] * 4
        )

    def test_direct_ratio(self):
        np.testing.assert_allclose(
            fractional_ownership(Allocation((2 / 9, 1 / 9))), [2 / 3, 1 / 3]
        )

    def test_degenerate_single_owner(self):
        np.testing.assert_allclose(fractional_ownership(Allocation((0, 5))), [0, 1])

    def test_all_zero_rejected(self):
        with pytest.raises(UndefinedOwnershipError):
            fractional_ownership(Allocation((0.0, 0.0)))


class TestClosedForm:
    def test_two_player_asymmetric(self):
        sol = closed_form_equilibrium(GameInstance.from_betas([1, 2]))
        np.testing.assert_allclose(sol.contributions.contributions, [2 / 9, 1 / 9], atol=1e-15)
        np.testing.assert_allclose(sol.ownership, [2 / 3, 1 / 3], atol=1e-15)
        assert sol.active_set == (0, 1)

    @pytest.mark.parametrize("b", [0.5, 1.0, 7.0])
    def test_symmetric_three_player(self, b):
        sol = closed_form_equilibrium(GameInstance.from_betas([b, b, b]))
        np.testing.assert_allclose(sol.ownership, [1 / 3] * 3, atol=1e-12)

    def test_infeasible_contributor_excluded(self):
        game = GameInstance.from_betas([1, 1, 10])
        sol = closed_form_equilibrium(game)
        assert sol.ownership[2] == 0.0
        assert sol.active_set == (0, 1)
        assert sol.feasible == (True, True, False)
        # Cross-check with the best-response oracle.
        br = best_response_equilibrium(game)
        np.testing.assert_allclose(
            sol.contributions.contributions, br.contributions.contributions, atol=1e-9
        )

    def test_modes_agree_when_all_feasible(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            game = random_feasible_game(rng, n_range=(2, 20))
            a = closed_form_equilibrium(game, mode="iterative-exclusion")
            b = closed_form_equilibrium(game, mode="clamp")
            np.testing.assert_allclose(
                a.contribution_array, b.contribution_array, atol=1e-12
            )

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            closed_form_equilibrium(GameInstance.from_betas([1, 2]), mode="bogus")


class TestEquilibriumOwnership:
    def test_two_player(self):
        c = equilibrium_ownership(GameInstance.from_betas([1, 2]))
        np.testing.assert_allclose(c, [2 / 3, 1 / 3], atol=1e-15)

    @pytest.mark.parametrize("t", [0.0, 1.0, 50.0])
    def test_equal_betas_any_governance(self, t):
        c = equilibrium_ownership(GameInstance.from_betas([3, 3, 3, 3], governance=t))
        np.testing.assert_allclose(c, [0.25] * 4, atol=1e-12)

    def test_positive_part_zeroes_dominated(self):
        # (N-1)(L*beta_3 + t) >= sum over j: raw clamp value is exactly 0.
        game = GameInstance.from_betas([1, 1, 10])
        raw = equilibrium_ownership(game, mode="clamp", renormalize=False)
        assert raw[2] == 0.0
        assert raw.sum() > 1.0  # clamping inflates the unnormalized total
        normalized = equilibrium_ownership(game, mode="clamp")
        assert normalized.sum() == pytest.approx(1.0, abs=1e-12)


class TestFeasibility:
    def test_two_player_always_feasible(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            betas = rng.exponential(8.4, 2) + 0.1
            t = float(rng.uniform(0, 10))
            game = GameInstance.from_betas(betas, governance=t)
            assert feasibility(game).all()

    def test_dominated_contributor(self):
        game = GameInstance.from_betas([1, 1, 10])
        np.testing.assert_array_equal(feasibility(game), [True, True, False])

    def test_governance_reenables_participation(self):
        game = GameInstance.from_betas([1, 1, 10], governance=9.0)
        assert feasibility(game).all()  # 20 < 12 + 9


class TestAsymptoticOwnership:
    def test_vanishes_at_mean(self):
        assert asymptotic_ownership(8.4, 8.4) == 0.0

    def test_clamped_above_mean(self):
        assert asymptotic_ownership(12.0, 8.4, L=2.0, t=1.0) == 0.0

    def test_reported_population_average(self):
        assert asymptotic_ownership(4.0, 8.4) == pytest.approx((8.4 - 4) / 8.4)
        assert asymptotic_ownership(4.0, 8.4) == pytest.approx(0.5238, abs=1e-4)

    def test_validation(self):
        with pytest.raises(ValueError):
            asymptotic_ownership(-1.0, 8.4)
        with pytest.raises(ValueError):
            asymptotic_ownership(1.0, 8.4, t=-0.5)


class TestValidation:
    def test_single_contributor_rejected(self):
        with pytest.raises(ValueError):
            GameInstance.from_betas([5])

    def test_nonpositive_beta_rejected(self):
        with pytest.raises(ValueError):
            ContributorProfile("c1", 0.0)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError):
            GameInstance((ContributorProfile("x", 1.0), ContributorProfile("x", 2.0)))

    def test_fixed_cost_length_checked(self):
        with pytest.raises(ValueError):
            GameInstance.from_betas([1, 2], fixed_costs=(0.1,))

    def test_negative_governance_rejected(self):
        with pytest.raises(ValueError):
            GameInstance.from_betas([1, 2], governance=-1.0)


class TestInvariants:
    def test_stationarity_at_closed_form(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            game = random_feasible_game(rng)
            sol = closed_form_equilibrium(game)
            resid = stationarity_residuals(game, sol.contribution_array)
            assert np.abs(resid).max() < 1e-9

    def test_conservation_with_exclusions(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            game = random_unconstrained_game(rng)
            for mode in ("iterative-exclusion", "clamp"):
                c = equilibrium_ownership(game, mode=mode)
                assert abs(c.sum() - 1.0) < 1e-9

    def test_ownership_decreasing_in_beta(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            game = random_unconstrained_game(rng)
            order = np.argsort(game.betas)
            for mode in ("iterative-exclusion", "clamp"):
                c = equilibrium_ownership(game, mode=mode)[order]
                assert np.all(np.diff(c) <= 1e-12)

    def test_total_contribution_identity(self):
        # Summing the per-contributor numerators gives sum(x*) = (N-1)/sum(L*beta+t)
        # for an all-feasible game.
        rng = np.random.default_rng(14)
        for _ in range(100):
            game = random_feasible_game(rng)
            sol = closed_form_equilibrium(game)
            total = sol.contribution_array.sum()
            expected = (game.n - 1) / game.marginal_costs.sum()
            assert total == pytest.approx(expected, rel=1e-12)

    def test_contributions_eventually_decreasing_in_governance(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            game = random_feasible_game(rng, n_range=(2, 12))
            base = game.marginal_costs.sum()
            ts = np.linspace(base, 10 * base, 12)
            xs = []
            for t in ts:
                shifted = GameInstance(game.profiles, game.effort_constant, float(t))
                xs.append(closed_form_equilibrium(shifted).contribution_array)
            xs = np.array(xs)
            assert np.all(np.diff(xs, axis=0) < 0)

    def test_asymptotic_consistency_trend(self):
        rng = np.random.default_rng(16)
        pool = rng.exponential(8.4, 1000) + 1.0
        errs = []
        for n in (10, 50, 250, 1000):
            betas = pool[:n]
            game = GameInstance.from_betas(betas)
            raw = equilibrium_ownership(game, mode="clamp", renormalize=False)
            asym = np.array([asymptotic_ownership(b, betas.mean()) for b in betas])
            errs.append(np.abs(raw - asym).max())
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_ownership_scale_invariance(self):
        # Scaling all betas and t by a common factor leaves c* unchanged.
        rng = np.random.default_rng(17)
        for _ in range(50):
            game = random_unconstrained_game(rng, n_range=(2, 20), t_range=(0.0, 5.0))
            factor = float(rng.uniform(0.1, 25.0))
            scaled = GameInstance.from_betas(
                game.betas * factor, game.effort_constant, game.governance * factor
            )
            np.testing.assert_allclose(
                equilibrium_ownership(game), equilibrium_ownership(scaled), atol=1e-12
            )

    def test_exclusion_never_empties_below_two(self):
        rng = np.random.default_rng(18)
        for _ in range(100):
            game = random_unconstrained_game(rng)
            assert len(exclusion_active_set(game)) >= 2
