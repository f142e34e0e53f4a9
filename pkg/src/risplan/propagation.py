"""Deterministic path-gain models used throughout the planner.

All gains are linear power ratios unless the function name says ``_db``.
Functions accept scalars or numpy arrays and broadcast where that is natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

C = 3.0e8  # m/s, exact by convention so lambda/2 sizing reproduces published lengths

FREQ_MIN_HZ = 0.5e9
FREQ_MAX_HZ = 100e9
UMI_MIN_DISTANCE_M = 10.0
KNIFE_EDGE_CLAMP_V = -0.78


class DomainError(ValueError):
    """An argument lies outside the validity range of a model."""


def to_db(gain):
    return 10.0 * np.log10(gain)


def from_db(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def wavelength(frequency_hz: float) -> float:
    return C / frequency_hz


def _check_positive(name, value):
    if np.any(np.asarray(value) <= 0) or np.any(~np.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def _check_frequency(frequency_hz):
    f = np.asarray(frequency_hz, dtype=float)
    if np.any(f < FREQ_MIN_HZ) or np.any(f > FREQ_MAX_HZ) or np.any(~np.isfinite(f)):
        raise DomainError(
            f"frequency {frequency_hz!r} Hz outside [{FREQ_MIN_HZ:g}, {FREQ_MAX_HZ:g}]"
        )


@dataclass(frozen=True)
class LinkModelParams:
    """Link-budget parameters shared by the dimensioning and comparison studies.

    ``element_size_m`` defaults to half a wavelength. Noise power follows the
    thermal floor of -174 dBm/Hz plus bandwidth and noise figure.
    """

    frequency_hz: float = 6e9
    bandwidth_hz: float = 10e6
    noise_figure_db: float = 10.0
    rate_bps_per_hz: float = 4.0
    ris_elements: int = 484
    element_size_m: float | None = None
    ris_amplitude: float = 1.0
    blockage_db: float = 20.0
    _element_size: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_frequency(self.frequency_hz)
        _check_positive("bandwidth_hz", self.bandwidth_hz)
        if self.rate_bps_per_hz < 0 or not math.isfinite(self.rate_bps_per_hz):
            raise DomainError(f"rate must be non-negative, got {self.rate_bps_per_hz}")
        if self.ris_elements < 1 or int(self.ris_elements) != self.ris_elements:
            raise DomainError(f"ris_elements must be an integer >= 1, got {self.ris_elements}")
        if not 0.0 < self.ris_amplitude <= 1.0:
            raise DomainError(f"ris_amplitude must lie in (0, 1], got {self.ris_amplitude}")
        if self.blockage_db < 0:
            raise DomainError(f"blockage_db must be >= 0, got {self.blockage_db}")
        size = self.wavelength_m / 2 if self.element_size_m is None else self.element_size_m
        _check_positive("element_size_m", size)
        object.__setattr__(self, "_element_size", float(size))

    @property
    def wavelength_m(self) -> float:
        return wavelength(self.frequency_hz)

    @property
    def element_size(self) -> float:
        return self._element_size

    @property
    def ris_area_m2(self) -> float:
        return self.ris_elements * self._element_size**2

    @property
    def noise_power_dbm(self) -> float:
        return -174.0 + 10.0 * math.log10(self.bandwidth_hz) + self.noise_figure_db

    @property
    def noise_power_w(self) -> float:
        return 10.0 ** ((self.noise_power_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class PathGeometry:
    """Direct, Tx-to-RIS and RIS-to-Rx distances in meters."""

    rho_d: float
    rho_t: float
    rho_r: float

    def __post_init__(self):
        for name in ("rho_d", "rho_t", "rho_r"):
            _check_positive(name, getattr(self, name))


def fspl_gain(wavelength_m, d_m):
    """Free-space power gain ``(lambda / (4 pi d))**2``."""
    _check_positive("distance", d_m)
    _check_positive("wavelength", wavelength_m)
    d = np.asarray(d_m, dtype=float)
    g = (wavelength_m / (4.0 * np.pi * d)) ** 2
    return float(g) if g.ndim == 0 else g


def umi_pathloss_db(frequency_hz, d_m, los: bool):
    """3GPP urban-micro street-canyon path loss in dB with UE height fixed at 1.5 m.

    NLOS is clamped from below by the LOS value.
    """
    _check_frequency(frequency_hz)
    d = np.asarray(d_m, dtype=float)
    if np.any(d < UMI_MIN_DISTANCE_M) or np.any(~np.isfinite(d)):
        raise DomainError(f"UMi model needs d >= {UMI_MIN_DISTANCE_M} m, got {d_m!r}")
    f_ghz = np.asarray(frequency_hz, dtype=float) / 1e9
    pl_los = 32.4 + 21.0 * np.log10(d) + 20.0 * np.log10(f_ghz)
    if los:
        pl = pl_los
    else:
        pl = np.maximum(pl_los, 22.4 + 35.3 * np.log10(d) + 21.3 * np.log10(f_ghz))
    return float(pl) if np.ndim(pl) == 0 else pl


def umi_path_gain(frequency_hz, d_m, los: bool):
    g = from_db(-np.asarray(umi_pathloss_db(frequency_hz, d_m, los)))
    return float(g) if g.ndim == 0 else g


def two_ray_gain(wavelength_m, d_m, h_tx_m, h_rx_m, gamma=-1.0):
    """Coherent direct plus ground-reflected ray, normalized like FSPL.

    ``gamma`` is the (possibly complex) ground reflection coefficient.
    """
    _check_positive("distance", d_m)
    _check_positive("tx height", h_tx_m)
    _check_positive("rx height", h_rx_m)
    _check_positive("wavelength", wavelength_m)
    d = np.asarray(d_m, dtype=float)
    k = 2.0 * np.pi / wavelength_m
    d_los = np.hypot(d, h_tx_m - h_rx_m)
    d_ref = np.hypot(d, h_tx_m + h_rx_m)
    field_sum = np.exp(-1j * k * d_los) / d_los + gamma * np.exp(-1j * k * d_ref) / d_ref
    g = np.abs(field_sum) ** 2 * (wavelength_m / (4.0 * np.pi)) ** 2
    return float(g) if g.ndim == 0 else g


def fresnel_parameter(wavelength_m, d1_m, d2_m, h_m):
    """Fresnel-Kirchhoff parameter of an edge ``h`` above the line of sight."""
    _check_positive("d1", d1_m)
    _check_positive("d2", d2_m)
    _check_positive("wavelength", wavelength_m)
    return h_m * np.sqrt(2.0 * (d1_m + d2_m) / (wavelength_m * d1_m * d2_m))


def knife_edge_loss_from_v(v):
    v = np.asarray(v, dtype=float)
    j = 6.9 + 20.0 * np.log10(np.sqrt((v - 0.1) ** 2 + 1.0) + v - 0.1)
    j = np.where(v > KNIFE_EDGE_CLAMP_V, j, 0.0)
    return float(j) if j.ndim == 0 else j


def knife_edge_loss_db(wavelength_m, d1_m, d2_m, h_m):
    """Single knife-edge diffraction loss in dB (0 in the clear region)."""
    return knife_edge_loss_from_v(fresnel_parameter(wavelength_m, d1_m, d2_m, h_m))


def ris_path_gain(params: LinkModelParams, geom: PathGeometry, theta_i_deg=0.0, theta_r_deg=0.0):
    """Far-field RIS gain with product-distance decay.

    The physical aperture is projected onto the incidence and reflection
    directions. With area ``lambda * rho_t * rho_r / rho_d`` at broadside and
    unit amplitude the result equals ``fspl_gain(lambda, rho_d)``.
    """
    for name, th in (("theta_i", theta_i_deg), ("theta_r", theta_r_deg)):
        if not abs(th) < 90.0:
            raise DomainError(f"|{name}| must be < 90 deg, got {th}")
    a_eff = (
        params.ris_area_m2
        * math.cos(math.radians(theta_i_deg))
        * math.cos(math.radians(theta_r_deg))
    )
    return params.ris_amplitude**2 * (a_eff / (4.0 * math.pi * geom.rho_t * geom.rho_r)) ** 2


def link_budget_chain(
    tx_power_dbm: float,
    tx_gain_db: float,
    geom: PathGeometry,
    params: LinkModelParams,
    theta_i_deg: float = 0.0,
    theta_r_deg: float = 0.0,
) -> float:
    """Received power in dBm over the RIS path: power plus gains minus losses."""
    loss_db = -to_db(ris_path_gain(params, geom, theta_i_deg, theta_r_deg))
    return float(tx_power_dbm + tx_gain_db - loss_db)
