"""Monte-Carlo channel generation: geometry, path loss, multipath fading.

Receivers are dropped uniformly by distance (information receivers across the
cell, energy receivers in a small disc near the base station). Small-scale
fading is an N-point frequency response of i.i.d. complex-Gaussian taps with
unit total average power, so E[|H(n)|^2] = 1 per subcarrier and
sum_n |H(n)|^2 / N equals the tap energy (numpy FFT convention).

Every receiver draws from its own child of the seed sequence, so adding
receivers never perturbs the channels of existing ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelRealization, DomainError, SystemConfig

SPEED_OF_LIGHT = 299_792_458.0

#: reference distance anchoring the path-loss model, meters
D_REF = 1.0


@dataclass
class ScenarioSpec:
    cell_radius: float = 200.0
    er_radius: float = 2.0
    carrier: float = 900e6
    bandwidth: float = 1e6
    pathloss_exp: float = 3.0
    num_taps: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.cell_radius <= 0 or self.er_radius <= 0:
            raise DomainError("radii must be positive")
        if self.num_taps < 1:
            raise DomainError("need at least one fading tap")
        if self.pathloss_exp <= 0:
            raise DomainError("path loss exponent must be positive")


def dbm_to_watts(x: float) -> float:
    return 10.0 ** ((x - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    if w <= 0:
        raise DomainError("power must be positive to express in dBm")
    return 10.0 * np.log10(w) + 30.0


def path_loss(d: float, spec: ScenarioSpec) -> float:
    """Linear power gain at distance d: free-space anchor at 1 m, then
    exponent decay."""
    if np.any(np.asarray(d) < D_REF):
        raise DomainError(f"distance below reference {D_REF} m")
    g0 = (SPEED_OF_LIGHT / (4.0 * np.pi * spec.carrier * D_REF)) ** 2
    return g0 * (D_REF / d) ** spec.pathloss_exp


def generate_scenario(config: SystemConfig, spec: ScenarioSpec) -> ChannelRealization:
    """Draw one deterministic channel realization for the given seed."""
    n = config.num_scs
    children = np.random.SeedSequence(spec.seed).spawn(config.num_receivers)
    gains = np.empty((config.num_receivers, n))
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        if k < config.num_irs:
            d = rng.uniform(D_REF, spec.cell_radius)
        else:
            d = rng.uniform(D_REF, spec.er_radius)
        taps = (rng.standard_normal(spec.num_taps)
                + 1j * rng.standard_normal(spec.num_taps))
        taps *= np.sqrt(1.0 / (2.0 * spec.num_taps))  # unit total mean power
        freq = np.fft.fft(taps, n)
        gains[k] = path_loss(d, spec) * np.abs(freq) ** 2
    return ChannelRealization(gains=gains, num_irs=config.num_irs)
