"""Secrecy-rate and wireless-power resource allocation for AN-aided OFDMA
downlinks: closed-form rate model, dual-decomposition solver, benchmark
heuristics and a seeded Monte-Carlo experiment harness."""

from .model import (Allocation, ChannelRealization, DomainError, SystemConfig,
                    eavesdropper_gains, harvested_power, rate_eve, rate_ir,
                    secrecy_rate, threshold_x, weighted_sum_secrecy)
from .persc import (CandidateSet, PerScContext, UnboundedSubproblemError,
                    cubic_candidates, feasible_set, optimal_alpha_given_p,
                    price_omega, quadratic_candidates, solve_per_sc)
from .dual import (DualState, InfeasibleProblemError, SolveReport,
                   SolverOptions, assign_subcarriers, duality_gap,
                   solve_optimal, subgradient_step)
from .heuristics import (HeuristicReport, noncancel_secrecy_rate,
                         solve_fixed_alpha, solve_fsa, solve_noan,
                         solve_suboptimal)
from .channel import (ScenarioSpec, dbm_to_watts, generate_scenario,
                      path_loss, watts_to_dbm)

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
