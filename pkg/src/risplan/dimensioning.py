"""RIS sizing so the RIS-assisted link matches the unblocked direct link.

Path-loss sweeps against distance and the required element count / side length
along the same sweep. Broadside incidence and unit reflection amplitude
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .propagation import DomainError, LinkModelParams, PathGeometry, fspl_gain, ris_path_gain, to_db
from .tables import Table

FIXED_RHO_T = "fixed-rho-t"
SYMMETRIC = "symmetric"
RIGHT_ANGLE = "right-angle"
COLLINEAR = "collinear"


def _positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{k} must be positive, got {v}")


def required_area(wavelength_m, rho_t, rho_r, rho_d) -> float:
    """Smallest aperture (m^2) whose broadside RIS link equals free space over ``rho_d``."""
    _positive(wavelength_m=wavelength_m, rho_t=rho_t, rho_r=rho_r, rho_d=rho_d)
    return wavelength_m * rho_t * rho_r / rho_d


def required_side(wavelength_m, rho_t, rho_r, rho_d) -> float:
    return math.sqrt(required_area(wavelength_m, rho_t, rho_r, rho_d))


def required_elements(wavelength_m, rho_t, rho_r, rho_d) -> int:
    """Half-wavelength element count covering the required area, rounded up."""
    _positive(wavelength_m=wavelength_m, rho_t=rho_t, rho_r=rho_r, rho_d=rho_d)
    exact = 4.0 * rho_t * rho_r / (wavelength_m * rho_d)
    # absorb float noise so integral results are not bumped to the next count
    return max(1, math.ceil(exact * (1.0 - 1e-12)))


def ris_size_from_elements(n: int, wavelength_m: float) -> float:
    """Side length of a square array of ``n`` half-wavelength elements."""
    root = math.isqrt(int(n)) if n >= 0 else -1
    if n < 1 or root * root != n:
        raise DomainError(f"N={n} is not a positive perfect square")
    return root * wavelength_m / 2.0


@dataclass(frozen=True)
class DimensioningQuery:
    """Sweep setup. ``mode`` FIXED_RHO_T holds ``rho_t_m`` and sweeps ``rho_r``;
    SYMMETRIC sweeps ``rho_t = rho_r``. ``rho_d_rule`` derives the direct distance."""

    params: LinkModelParams
    mode: str = SYMMETRIC
    rho_t_m: float = 20.0
    rho_d_rule: str = RIGHT_ANGLE

    def __post_init__(self):
        if self.mode not in (FIXED_RHO_T, SYMMETRIC):
            raise DomainError(f"unknown geometry mode {self.mode!r}")
        if self.rho_d_rule not in (RIGHT_ANGLE, COLLINEAR):
            raise DomainError(f"unknown rho_d rule {self.rho_d_rule!r}")
        _positive(rho_t_m=self.rho_t_m)

    def distances(self, rho_r):
        """(rho_t, rho_r, rho_d) for a swept receiver distance."""
        rho_r = np.asarray(rho_r, dtype=float)
        rho_t = rho_r if self.mode == SYMMETRIC else np.full_like(rho_r, self.rho_t_m)
        if self.rho_d_rule == RIGHT_ANGLE:
            rho_d = np.hypot(rho_t, rho_r)
        else:
            rho_d = rho_t + rho_r
        return rho_t, rho_r, rho_d


def _ris_pl_db(params, n, rho_t, rho_r, rho_d):
    p = replace(params, ris_elements=int(n), ris_amplitude=1.0)
    return -to_db(ris_path_gain(p, PathGeometry(rho_d, rho_t, rho_r)))


def pathloss_curve(query: DimensioningQuery, n_values, distances) -> Table:
    """Path loss of the free, blocked and RIS-assisted links along the sweep."""
    distances = np.asarray(distances, dtype=float)
    if distances.size and np.any(distances <= 0):
        raise DomainError("sweep distances must be positive")
    lam = query.params.wavelength_m
    rho_t, rho_r, rho_d = query.distances(distances)
    cols = ["distance_m", "pl_los_db", "pl_blocked_db"]
    data = [distances]
    if distances.size:
        pl_los = -to_db(fspl_gain(lam, rho_d))
    else:
        pl_los = np.empty(0)
    data += [pl_los, pl_los + query.params.blockage_db]
    for n in n_values:
        cols.append(f"pl_ris_N{int(n)}_db")
        data.append(_ris_pl_db(query.params, n, rho_t, rho_r, rho_d) if distances.size else pl_los)
    return Table(cols, np.column_stack(data) if distances.size else np.empty((0, len(cols))))


def dimensioning_curve(query: DimensioningQuery, distances) -> Table:
    """Required element count and side length along the sweep."""
    distances = np.asarray(distances, dtype=float)
    lam = query.params.wavelength_m
    rows = []
    for t, r, d, x in zip(*query.distances(distances), distances):
        rows.append((x, required_elements(lam, t, r, d), required_side(lam, t, r, d)))
    return Table(["distance_m", "n_req", "l_req_m"], np.array(rows).reshape(-1, 3))


def crossover_distance(query: DimensioningQuery, n: int, lo: float = 1.0, hi: float = 1e4):
    """Distance where the RIS link loss meets the blocked direct-link loss.

    Solved numerically on ``[lo, hi]``; ``None`` when there is no sign change.
    """
    lam = query.params.wavelength_m

    def gap(x):
        t, r, d = (float(v) for v in query.distances(x))
        return _ris_pl_db(query.params, n, t, r, d) - (
            -to_db(fspl_gain(lam, d)) + query.params.blockage_db
        )

    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        return lo
    if np.sign(g_lo) == np.sign(g_hi):
        return None
    return brentq(gap, lo, hi, xtol=1e-12, rtol=1e-14)


def symmetric_crossover_closed_form(params: LinkModelParams, n: int) -> float:
    """Closed form of the crossover for ``rho_t = rho_r`` with the right-angle rule."""
    area = n * params.element_size**2
    return 10 ** (params.blockage_db / 20.0) * math.sqrt(2.0) * area / params.wavelength_m


def first_exceeding(table: Table, n: int) -> float | None:
    """First sampled distance where the RIS loss exceeds the blocked-link loss."""
    over = table.column(f"pl_ris_N{int(n)}_db") > table.column("pl_blocked_db")
    hits = np.flatnonzero(over)
    return float(table.column("distance_m")[hits[0]]) if hits.size else None
