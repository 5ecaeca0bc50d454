"""Outer dual loop: assignment rule, multiplier updates, primal recovery,
duality-gap sanity and small-instance optimality."""

import numpy as np
import pytest

from ofdma_swipt import (Allocation, ChannelRealization, DomainError,
                         InfeasibleProblemError, SolveReport, SystemConfig,
                         assign_subcarriers, duality_gap, secrecy_rate,
                         solve_optimal, subgradient_step)
from ofdma_swipt.dual import DualState, SolverOptions, check_harvest_feasibility
from ofdma_swipt.model import all_harvested_powers

from conftest import paper_channels, paper_system, synthetic_channels


class TestAssignSubcarriers:
    def test_argmax_wins(self):
        x = assign_subcarriers(np.array([[0.3], [0.7], [0.1]]))
        assert x[:, 0].tolist() == [0, 1, 0]

    def test_nonpositive_column_unassigned(self):
        x = assign_subcarriers(np.array([[0.0], [-0.2]]))
        assert x.sum() == 0

    def test_tie_breaks_to_lowest_index(self):
        x = assign_subcarriers(np.array([[0.5], [0.5]]))
        assert x[:, 0].tolist() == [1, 0]

    def test_exclusive_per_sc(self, rng):
        x = assign_subcarriers(rng.normal(size=(4, 16)))
        assert np.all(x.sum(axis=0) <= 1)


def _unit_setup(zeta=0.5, qbar=3.0, p=2.0, er_gain=1.0, p_max=10.0):
    """One IR, one ER, one SC with hand-controllable harvested power."""
    cfg = SystemConfig(num_irs=1, num_ers=1, num_scs=1, total_power=p_max,
                       peak_power=p_max, noise_power=1.0, weights=np.ones(1),
                       harvest_eff=np.array([zeta]),
                       harvest_target=np.array([qbar]))
    ch = ChannelRealization(gains=np.array([[1.0], [er_gain]]), num_irs=1)
    alloc = Allocation(assign=np.array([[1]]), power=np.array([[p]]),
                       split=np.array([[0.0]]))
    return cfg, ch, alloc


class TestSubgradientStep:
    def test_hand_update(self):
        # harvested q = 0.5*2*1 = 1, target 3 -> subgradient -2
        cfg, ch, alloc = _unit_setup()
        state = DualState(lam=np.array([0.10]), gamma=0.0,
                          xi=np.array([0.01]), nu=0.01)
        new = subgradient_step(state, alloc, ch, cfg)
        assert new.lam[0] == pytest.approx(0.12)
        assert new.iteration == 1

    def test_projection_to_nonnegative(self):
        cfg, ch, alloc = _unit_setup(qbar=0.0, p=2.0, er_gain=5.0)
        # q - target = 5 with lam = 0.01, xi = 0.01 -> projected to 0
        state = DualState(lam=np.array([0.01]), gamma=0.0,
                          xi=np.array([0.01]), nu=0.01)
        assert subgradient_step(state, alloc, ch, cfg).lam[0] == 0.0

    def test_zero_subgradient_is_fixed_point(self):
        cfg, ch, alloc = _unit_setup(zeta=0.5, qbar=1.0, p=2.0, p_max=2.0)
        state = DualState(lam=np.array([0.3]), gamma=0.7,
                          xi=np.array([0.1]), nu=0.1)
        new = subgradient_step(state, alloc, ch, cfg)
        assert new.lam[0] == pytest.approx(0.3)
        assert new.gamma == pytest.approx(0.7)

    def test_gamma_update(self):
        cfg, ch, alloc = _unit_setup(p=2.0, p_max=5.0)
        state = DualState(lam=np.array([0.0]), gamma=1.0,
                          xi=np.array([0.0]), nu=0.1)
        # P_max - total = 3 -> gamma decreases by 0.3
        assert subgradient_step(state, alloc, ch, cfg).gamma == pytest.approx(0.7)

    def test_multipliers_stay_nonnegative(self, rng):
        cfg, ch, alloc = _unit_setup()
        state = DualState(lam=np.array([0.05]), gamma=0.2,
                          xi=np.array([1.0]), nu=1.0)
        for _ in range(50):
            state = DualState(lam=state.lam, gamma=state.gamma,
                              xi=rng.uniform(0, 2, size=1),
                              nu=float(rng.uniform(0, 2)))
            state = subgradient_step(state, alloc, ch, cfg)
            assert state.lam[0] >= 0.0 and state.gamma >= 0.0


def _brute_force_no_er(cfg, ch, num_p=201, num_a=201):
    """Exhaustive assignment x (p, alpha) grid for tiny instances without
    harvest constraints: per-SC value tables plus a shared power budget
    resolved by trying every split of the budget over a coarse simplex."""
    n = cfg.num_scs
    ps = np.linspace(0.0, min(cfg.peak_power, cfg.total_power), num_p)
    als = np.linspace(0.0, 1.0, num_a)
    # value[k, n, i] = best weighted secrecy over alpha at power ps[i]
    val = np.empty((cfg.num_irs, n, num_p))
    for k in range(cfg.num_irs):
        for j in range(n):
            rs = secrecy_rate(ps[None, :], als[:, None], ch.ir_gains[k, j],
                              ch.eve_gains[k, j], cfg.noise_power)
            val[k, j] = cfg.weights[k] * rs.max(axis=0)
    best = 0.0
    # greedy-free exhaustive: iterate over per-SC power index tuples
    from itertools import product
    for idx in product(range(0, num_p, 4), repeat=n):
        if ps[list(idx)].sum() > cfg.total_power + 1e-12:
            continue
        tot = sum(val[:, j, i].max() for j, i in enumerate(idx))
        best = max(best, tot)
    return best / n


class TestSolveOptimal:
    def test_no_er_matches_brute_force(self, rng):
        cfg = SystemConfig(num_irs=2, num_ers=0, num_scs=3, total_power=2.0,
                           peak_power=1.0, noise_power=1.0,
                           weights=np.array([1.0, 1.5]),
                           harvest_eff=np.zeros(0), harvest_target=np.zeros(0))
        ch = synthetic_channels(rng, 2, 1, 3, spread=1.0)
        ch = ChannelRealization(gains=ch.gains[:3], num_irs=2)
        rep = solve_optimal(cfg, ch)
        brute = _brute_force_no_er(cfg, ch)
        assert rep.objective >= brute - 1e-3
        assert rep.objective <= brute + 0.05 * (1.0 + brute)

    def test_single_sc_toy_gap_is_tight(self):
        # one SC, one IR, harvesting slack: no integer coupling binds
        cfg = SystemConfig(num_irs=1, num_ers=1, num_scs=1, total_power=2.0,
                           peak_power=2.0, noise_power=1.0, weights=np.ones(1),
                           harvest_eff=np.array([0.5]),
                           harvest_target=np.array([0.0]))
        ch = ChannelRealization(gains=np.array([[5.0], [1.0]]), num_irs=1)
        rep = solve_optimal(cfg, ch)
        assert duality_gap(rep) <= 1e-9

    def test_zero_targets_price_lambda_to_zero(self):
        cfg = paper_system(n_sc=8, qbar_uw=0.0)
        rep = solve_optimal(cfg, paper_channels(cfg, seed=1))
        assert np.all(np.asarray(rep.metadata["lambda"]) == 0.0)
        assert rep.feasible

    def test_feasibility_and_validation_of_returned_primal(self):
        cfg = paper_system(n_sc=16)
        ch = paper_channels(cfg, seed=2)
        rep = solve_optimal(cfg, ch)
        rep.allocation.validate(cfg)
        q = all_harvested_powers(rep.allocation, ch, cfg)
        assert np.all(q >= cfg.harvest_target - 1e-9)
        assert rep.allocation.sc_power.sum() <= cfg.total_power + 1e-9
        assert duality_gap(rep) >= -1e-9

    def test_dual_trace_upper_bounds_primal(self):
        cfg = paper_system(n_sc=8)
        rep = solve_optimal(cfg, paper_channels(cfg, seed=3))
        dual_values = [row[0] for row in rep.trace]
        assert min(dual_values) >= rep.objective - 1e-9

    def test_infeasible_targets_raise(self):
        cfg = paper_system(n_sc=8, qbar_uw=1e9)
        with pytest.raises(InfeasibleProblemError):
            solve_optimal(cfg, paper_channels(cfg, seed=0))

    def test_matched_seed_gap_shrinks_with_bandwidth(self):
        # the reported gap never exceeds a loose ceiling at either size and
        # stays nonnegative up to numerical tolerance
        for n in (16, 64):
            cfg = paper_system(n_sc=n)
            rep = solve_optimal(cfg, paper_channels(cfg, seed=4))
            assert -1e-9 <= duality_gap(rep) < 1e-4


class TestHarvestFeasibilityCheck:
    def test_zero_targets_always_feasible(self):
        cfg = paper_system(n_sc=8, qbar_uw=0.0)
        assert check_harvest_feasibility(cfg, paper_channels(cfg, seed=0))

    def test_unreachable_targets_detected(self):
        cfg = paper_system(n_sc=8, qbar_uw=1e9)
        assert not check_harvest_feasibility(cfg, paper_channels(cfg, seed=0))


class TestDualityGapAccessor:
    def test_raises_without_feasible_primal(self):
        report = SolveReport(objective=0.0, harvested=np.zeros(1),
                             duality_gap=None, iterations=0, feasible=False,
                             allocation=None, trace=[])
        with pytest.raises(ValueError):
            duality_gap(report)


class TestSolverOptions:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SolverOptions(max_iterations=0)
        with pytest.raises(ValueError):
            SolverOptions(convergence_tol=-1.0)
