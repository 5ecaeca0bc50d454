"""Experiment configuration files: YAML in, validated dataclasses out.

Schema (all sections optional except ``system``):

system:
  K1: 4            # information receivers
  K2: 4            # energy receivers
  N: 64            # subcarriers
  P_max_dBm: 37
  P_peak_dBm: inf  # "inf" for no per-SC cap
  sigma2_dBm: -83
  weights: 1.0     # scalar or list of K1
  zeta: 0.6        # scalar or list of K2
  Qbar_uW: 100     # scalar or list of K2, microwatts
scenario:
  cell_radius: 200
  er_radius: 2
  carrier: 900e6
  bandwidth: 1e6
  pathloss_exp: 3
  num_taps: 8
solver:
  max_iter: 5000
  convergence_tol: 1e-6
  feasibility_tol: 1e-9
  xi0: 1.0
  nu0: 1.0
  polish_rounds: 2
scheme: optimal    # optimal | suboptimal | fsa | alpha05 | noan

Powers are dBm in files and watts internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .channel import ScenarioSpec, dbm_to_watts
from .dual import SolverOptions
from .model import SystemConfig

SCHEMES = ("optimal", "suboptimal", "fsa", "alpha05", "noan")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    system: SystemConfig
    scenario: ScenarioSpec
    solver: SolverOptions
    scheme: str


def _as_vector(value, count, name):
    if np.isscalar(value):
        return np.full(count, float(value))
    vec = np.asarray(value, dtype=float)
    if vec.shape != (count,):
        raise ConfigError(f"{name}: expected scalar or list of length {count}")
    return vec


def _power_dbm(value, name):
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ConfigError(f"{name}: bad value {value!r}")
    return dbm_to_watts(float(value))


def parse_config(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict) or "system" not in data:
        raise ConfigError("config must be a mapping with a 'system' section")
    try:
        sys_d = dict(data["system"])
        k1 = int(sys_d.pop("K1"))
        k2 = int(sys_d.pop("K2"))
        n = int(sys_d.pop("N"))
        p_max = _power_dbm(sys_d.pop("P_max_dBm"), "P_max_dBm")
        p_peak_raw = sys_d.pop("P_peak_dBm", "inf")
        p_peak = math.inf if p_peak_raw is None else _power_dbm(p_peak_raw, "P_peak_dBm")
        sigma2 = _power_dbm(sys_d.pop("sigma2_dBm"), "sigma2_dBm")
        weights = _as_vector(sys_d.pop("weights", 1.0), k1, "weights")
        zeta = _as_vector(sys_d.pop("zeta", 0.6), k2, "zeta")
        qbar = _as_vector(sys_d.pop("Qbar_uW", 0.0), k2, "Qbar_uW") * 1e-6
        if sys_d:
            raise ConfigError(f"unknown system keys: {sorted(sys_d)}")
        system = SystemConfig(num_irs=k1, num_ers=k2, num_scs=n,
                              total_power=p_max, peak_power=p_peak,
                              noise_power=sigma2, weights=weights,
                              harvest_eff=zeta, harvest_target=qbar)
        sc_d = dict(data.get("scenario", {}))
        scenario = ScenarioSpec(
            cell_radius=float(sc_d.pop("cell_radius", 200.0)),
            er_radius=float(sc_d.pop("er_radius", 2.0)),
            carrier=float(sc_d.pop("carrier", 900e6)),
            bandwidth=float(sc_d.pop("bandwidth", 1e6)),
            pathloss_exp=float(sc_d.pop("pathloss_exp", 3.0)),
            num_taps=int(sc_d.pop("num_taps", 8)),
            seed=int(sc_d.pop("seed", 0)),
        )
        if sc_d:
            raise ConfigError(f"unknown scenario keys: {sorted(sc_d)}")
        so_d = dict(data.get("solver", {}))
        solver = SolverOptions(
            max_iterations=int(so_d.pop("max_iter", 5000)),
            convergence_tol=float(so_d.pop("convergence_tol", 1e-6)),
            feasibility_tol=float(so_d.pop("feasibility_tol", 1e-9)),
            step_xi0=float(so_d.pop("xi0", 1.0)),
            step_nu0=float(so_d.pop("nu0", 1.0)),
            polish_rounds=int(so_d.pop("polish_rounds", 2)),
        )
        if so_d:
            raise ConfigError(f"unknown solver keys: {sorted(so_d)}")
        scheme = str(data.get("scheme", "optimal"))
        if scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    return ExperimentConfig(system=system, scenario=scenario,
                            solver=solver, scheme=scheme)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data)
