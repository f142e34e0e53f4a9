"""Minimum BS transmit power for a direct link, a DF relay and an RIS.

Layout: BS at the origin, relay or RIS at ``(d_bs_ris, 0)``, UE at
``(d1, lateral_offset)``. The direct BS-UE link is NLOS; both hops through the
relay or RIS are LOS. Channel gains come from the UMi model. Powers are in
watts and the rate target in bit/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .propagation import DomainError, LinkModelParams, umi_path_gain
from .tables import Table

DEFAULT_N = (25, 250)


@dataclass(frozen=True)
class ComparisonSetup:
    params: LinkModelParams = field(default_factory=LinkModelParams)
    d_bs_ris_m: float = 80.0
    lateral_offset_m: float = 10.0
    d1_range_m: tuple = tuple(float(x) for x in range(20, 121))

    def __post_init__(self):
        if not (self.d_bs_ris_m > 0 and self.lateral_offset_m > 0):
            raise DomainError("distances must be positive")
        if not self.params.rate_bps_per_hz > 0:
            raise DomainError("rate must be positive")

    def at_frequency(self, frequency_hz: float) -> "ComparisonSetup":
        return replace(self, params=replace(self.params, frequency_hz=frequency_hz))


def node_geometry(setup: ComparisonSetup, d1: float) -> tuple[float, float]:
    """Distances (BS-UE, RIS-UE) for a UE at along-track position ``d1``."""
    if not d1 > 0:
        raise DomainError(f"d1 must be positive, got {d1}")
    h = setup.lateral_offset_m
    return math.hypot(d1, h), math.hypot(d1 - setup.d_bs_ris_m, h)


def _gains(setup: ComparisonSetup, d1: float):
    f = setup.params.frequency_hz
    d_bs_ue, d_ris_ue = node_geometry(setup, d1)
    beta_d = umi_path_gain(f, d_bs_ue, los=False)
    beta_t = umi_path_gain(f, setup.d_bs_ris_m, los=True)
    beta_r = umi_path_gain(f, d_ris_ue, los=True)
    return beta_d, beta_t, beta_r


def _snr_target(rate: float) -> float:
    return 2.0**rate - 1.0


def min_power_siso(setup: ComparisonSetup, d1: float) -> float:
    beta_d, _, _ = _gains(setup, d1)
    p = setup.params
    return _snr_target(p.rate_bps_per_hz) * p.noise_power_w / beta_d


def ris_channel_gain(setup: ComparisonSetup, d1: float, n: int) -> float:
    """Effective power gain with every element phase-aligned to the direct path."""
    beta_d, beta_t, beta_r = _gains(setup, d1)
    amp = math.sqrt(beta_d) + n * setup.params.ris_amplitude * math.sqrt(beta_t * beta_r)
    return amp * amp


def min_power_ris(setup: ComparisonSetup, d1: float, n: int | None = None) -> float:
    p = setup.params
    n = p.ris_elements if n is None else n
    if n < 0:
        raise DomainError(f"element count must be >= 0, got {n}")
    return _snr_target(p.rate_bps_per_hz) * p.noise_power_w / ris_channel_gain(setup, d1, n)


def relay_phase_powers(setup: ComparisonSetup, d1: float) -> tuple[float, float]:
    """Half-duplex DF powers ``(p1, p2)`` for the BS phase and the relay phase.

    Each phase carries the message at twice the rate. Phase one must let the
    relay decode; in phase two the UE combines the stored direct-path copy
    with the relay transmission, so the relay only tops up the missing SNR.
    """
    beta_d, beta_t, beta_r = _gains(setup, d1)
    p = setup.params
    gamma = _snr_target(2.0 * p.rate_bps_per_hz)
    need = gamma * p.noise_power_w
    p1 = need / beta_t
    p2 = max(0.0, need - p1 * beta_d) / beta_r
    return p1, p2


def min_power_relay(setup: ComparisonSetup, d1: float) -> float:
    p1, p2 = relay_phase_powers(setup, d1)
    return 0.5 * (p1 + p2)


def energy_efficiency(rate_bps_per_hz, bandwidth_hz, p_watts, p_overhead_watts=0.0):
    """Delivered bits per joule of consumed power."""
    total = np.asarray(p_watts, dtype=float) + p_overhead_watts
    if np.any(total <= 0):
        raise DomainError("total consumed power must be positive")
    return rate_bps_per_hz * bandwidth_hz / total


def power_sweep(setup: ComparisonSetup, n_values=DEFAULT_N, ee: bool = False, p_overhead_w: float = 0.0) -> Table:
    """Minimum powers over the UE positions in ``setup.d1_range_m``."""
    cols = ["d1_m", "p_siso_w", "p_relay_w"] + [f"p_ris_n{int(n)}_w" for n in n_values]
    rows = []
    for d1 in setup.d1_range_m:
        rows.append(
            [d1, min_power_siso(setup, d1), min_power_relay(setup, d1)]
            + [min_power_ris(setup, d1, int(n)) for n in n_values]
        )
    data = np.array(rows, dtype=float).reshape(-1, len(cols))
    if ee:
        p = setup.params
        ee_cols = ["ee_" + c[2:].replace("_w", "_bpj") for c in cols[1:]]
        ee_data = (
            energy_efficiency(p.rate_bps_per_hz, p.bandwidth_hz, data[:, 1:], p_overhead_w)
            if len(data)
            else np.empty((0, len(ee_cols)))
        )
        cols = cols + ee_cols
        data = np.hstack([data, ee_data])
    return Table(cols, data)
