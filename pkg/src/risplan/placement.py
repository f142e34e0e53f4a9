"""RIS orientation and greedy multi-RIS placement for LOS coverage extension.

Orientation is the azimuth of the RIS broadside, in degrees counter-clockwise
from +x (east). A broadside ``phi`` serves a point when the azimuth toward it
deviates from ``phi`` by at most the FoV half-angle; the BS must be served the
same way. Elevation is ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .propagation import LinkModelParams, PathGeometry, ris_path_gain, to_db
from .scene import Point3, Scene, los_many

ANGLE_TOL = 1e-9  # degrees, inclusive FoV boundary

UNCOVERED = 0
BS_LOS = -1
# RIS labels are the 1-based position in the plan


def wrap180(a):
    """Map angles to (-180, 180]."""
    r = np.mod(np.asarray(a, dtype=float) + 180.0, 360.0) - 180.0
    r = np.where(r == -180.0, 180.0, r)
    return float(r) if r.ndim == 0 else r


def angdist(a, b):
    """Absolute circular distance between azimuths, in [0, 180]."""
    return np.abs(wrap180(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def azimuth_deg(src, dst):
    """Azimuth from ``src`` to ``dst`` (rows allowed) in [0, 360)."""
    d = np.atleast_2d(np.asarray(dst, dtype=float))
    az = np.degrees(np.arctan2(d[:, 1] - src[1], d[:, 0] - src[0])) % 360.0
    return az if np.ndim(dst) == 2 else float(az[0])


@dataclass(frozen=True)
class AngularInterval:
    """Closed circular arc of azimuths ``center +- half_width``.

    A zero half-width only arises as the intersection of touching arcs.
    """

    center_deg: float
    half_width_deg: float

    def __post_init__(self):
        if not 0.0 <= self.half_width_deg < 90.0:
            raise ValueError(f"half width must lie in [0, 90), got {self.half_width_deg}")
        object.__setattr__(self, "center_deg", float(self.center_deg) % 360.0)

    def contains(self, phi, tol: float = ANGLE_TOL):
        return angdist(phi, self.center_deg) <= self.half_width_deg + tol

    @property
    def bounds(self) -> tuple[float, float]:
        return (
            (self.center_deg - self.half_width_deg) % 360.0,
            (self.center_deg + self.half_width_deg) % 360.0,
        )


def target_arc(ris_pos, target, theta_max_deg: float) -> AngularInterval:
    """Broadside azimuths under which ``target`` is within the FoV."""
    dx = target[0] - ris_pos[0]
    dy = target[1] - ris_pos[1]
    if math.hypot(dx, dy) <= 1e-9:
        raise ValueError("target coincides with the RIS in the horizontal plane")
    return AngularInterval(math.degrees(math.atan2(dy, dx)), theta_max_deg)


def intersect_arcs(a: AngularInterval, b: AngularInterval) -> AngularInterval | None:
    # Arcs shorter than 180 deg meet in at most one arc, so working in
    # coordinates centered on ``a`` only one copy of ``b`` can overlap.
    delta = wrap180(b.center_deg - a.center_deg)
    lo = max(-a.half_width_deg, delta - b.half_width_deg)
    hi = min(a.half_width_deg, delta + b.half_width_deg)
    if lo > hi + ANGLE_TOL:
        return None
    hi = max(hi, lo)
    return AngularInterval(a.center_deg + 0.5 * (lo + hi), 0.5 * (hi - lo))


def _smallest_phi(center: float, regions: list[tuple[float, float]]) -> float:
    """Smallest azimuth in [0, 360) within any region given as offsets from ``center``."""
    best = math.inf
    for lo, hi in regions:
        a, b = center + lo, center + hi
        if math.floor(b / 360.0) > math.floor(a / 360.0):
            return 0.0
        best = min(best, a % 360.0)
    return best


def sweep_orientation(
    center: float, theta_max: float, target_az: np.ndarray
) -> tuple[float, int]:
    """Maximum-overlap broadside inside the arc ``center +- theta_max``.

    Each target contributes the sub-arc of broadsides that serve it, clipped to
    the BS-feasible arc and expressed as offsets from ``center``. A sorted
    sweep over interval endpoints (opens before closes at equal positions)
    finds every maximum-depth region; ties go to the smallest azimuth.
    Returns ``(phi, count)``; with no servable targets, ``(center, 0)``.
    """
    w = theta_max + ANGLE_TOL
    delta = wrap180(np.asarray(target_az, dtype=float) - center)
    delta = np.atleast_1d(delta)
    lo = np.maximum(-w, delta - w)
    hi = np.minimum(w, delta + w)
    keep = lo <= hi
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return center % 360.0, 0

    pos = np.concatenate([lo, hi])
    kind = np.concatenate([np.zeros(lo.size), np.ones(hi.size)])  # 0 = open, 1 = close
    order = np.lexsort((kind, pos))
    pos, kind = pos[order], kind[order]
    step = np.where(kind == 0, 1, -1)
    depth = np.cumsum(step)
    best = int(depth.max())

    regions = []
    for i in np.flatnonzero(depth == best):
        # after an opening event at pos[i] the depth holds until the next event;
        # step back inside the tolerance band so direct membership agrees
        start, end = pos[i], pos[i + 1]
        pick = min(start + ANGLE_TOL, 0.5 * (start + end))
        regions.append((pick, max(pick, end - ANGLE_TOL)))
    return _smallest_phi(center, regions), best


def _sig6(x: float) -> float:
    return float(f"{x:.6g}")


@dataclass(frozen=True)
class OrientationResult:
    orientation_deg: float
    covered: frozenset
    bs_arc: AngularInterval


@dataclass(frozen=True)
class RisPlacement:
    candidate_index: int
    position: Point3
    orientation_deg: float
    covered: frozenset  # every grid index served at this orientation
    newly_covered: frozenset  # the subset not served by the BS or earlier picks

    @property
    def newly_covered_count(self) -> int:
        return len(self.newly_covered)


@dataclass
class PlacementPlan:
    placements: list[RisPlacement] = field(default_factory=list)
    requested_k: int = 0
    truncated: bool = False

    def __len__(self):
        return len(self.placements)

    def __iter__(self):
        return iter(self.placements)

    def __getitem__(self, i):
        return self.placements[i]

    def to_dict(self) -> dict:
        return {
            "requested_k": self.requested_k,
            "truncated": self.truncated,
            "placements": [
                {
                    "candidate_index": p.candidate_index,
                    "position": {k: _sig6(v) for k, v in zip("xyz", p.position)},
                    "orientation_deg": _sig6(p.orientation_deg),
                    "newly_covered_count": p.newly_covered_count,
                }
                for p in self.placements
            ],
        }


class _Geometry:
    """Per-scene cache of grid points, BS visibility and candidate visibility."""

    def __init__(self, scene: Scene, link_filter=None):
        self.scene = scene
        self.link_filter = link_filter
        self.points = scene.grid.points()
        self.bs_los = los_many(scene, scene.bs, self.points)
        self._vis: dict[int, np.ndarray] = {}
        self._az: dict[int, np.ndarray] = {}

    def bs_arc(self, i: int) -> AngularInterval:
        return target_arc(self.scene.candidates[i], self.scene.bs, self.scene.fov_half_angle)

    def visible(self, i: int) -> np.ndarray:
        """Grid points with LOS from candidate ``i`` and a defined azimuth."""
        if i not in self._vis:
            c = self.scene.candidates[i]
            apart = np.hypot(self.points[:, 0] - c[0], self.points[:, 1] - c[1]) > 1e-9
            vis = np.zeros(len(self.points), dtype=bool)
            vis[apart] = los_many(self.scene, c, self.points[apart])
            if self.link_filter is not None:
                vis &= self.link_filter(self.scene, i, self.points)
            self._vis[i] = vis
            self._az[i] = azimuth_deg(c, self.points)
        return self._vis[i]

    def azimuths(self, i: int) -> np.ndarray:
        self.visible(i)
        return self._az[i]

    def served(self, i: int, phi: float) -> np.ndarray:
        """Mask of grid points served by candidate ``i`` with broadside ``phi``."""
        ok = angdist(phi, self.azimuths(i)) <= self.scene.fov_half_angle + ANGLE_TOL
        return self.visible(i) & ok

    def best(self, i: int, eligible: np.ndarray) -> OrientationResult:
        arc = self.bs_arc(i)
        mask = self.visible(i) & eligible
        phi, _ = sweep_orientation(arc.center_deg, arc.half_width_deg, self.azimuths(i)[mask])
        covered = np.flatnonzero(self.served(i, phi) & eligible)
        return OrientationResult(phi, frozenset(int(j) for j in covered), arc)


def pathloss_filter(params: LinkModelParams, max_pathloss_db: float):
    """Link filter keeping points whose broadside RIS path loss is within budget.

    The returned callable maps ``(scene, candidate_index, points)`` to a mask.
    Hop distances are 3D; the direct distance is BS to point. Angle loss is
    not applied, so the filter is optimistic off broadside.
    """

    def keep(scene: Scene, i: int, points: np.ndarray) -> np.ndarray:
        c = np.asarray(scene.candidates[i], dtype=float)
        bs = np.asarray(scene.bs, dtype=float)
        rho_t = float(np.linalg.norm(c - bs))
        rho_r = np.linalg.norm(points - c, axis=1)
        rho_d = np.linalg.norm(points - bs, axis=1)
        ok = np.zeros(len(points), dtype=bool)
        valid = (rho_r > 0) & (rho_d > 0)
        if valid.any():
            geom = PathGeometry(rho_d[valid], rho_t, rho_r[valid])
            ok[valid] = -to_db(ris_path_gain(params, geom)) <= max_pathloss_db
        return ok

    return keep


def best_orientation(scene: Scene, candidate_index: int, eligible=None, link_filter=None) -> OrientationResult:
    """Broadside of candidate ``candidate_index`` that serves the most eligible points.

    ``eligible`` is a boolean mask over grid points; by default every point
    without direct BS line of sight. The returned ``covered`` set is limited to
    eligible points. ``link_filter`` optionally narrows what a candidate can
    serve (see ``pathloss_filter``).
    """
    geo = _Geometry(scene, link_filter)
    if eligible is None:
        eligible = ~geo.bs_los
    return geo.best(candidate_index, np.asarray(eligible, dtype=bool))


def greedy_place(scene: Scene, k: int, link_filter=None) -> tuple[PlacementPlan, "CoverageGrid"]:
    """Pick up to ``k`` RIS (candidate, orientation) pairs greedily.

    Each round evaluates every unused candidate against the points still
    uncovered and keeps the one adding the most; ties go to the lowest index.
    Requests beyond the number of candidates are truncated and flagged.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not scene.candidates:
        raise ValueError("scene has no RIS candidates")
    geo = _Geometry(scene, link_filter)
    residual = ~geo.bs_los
    unused = list(range(len(scene.candidates)))
    plan = PlacementPlan(requested_k=k, truncated=k > len(unused))
    for _ in range(min(k, len(unused))):
        best_i, best_res, best_n = None, None, -1
        for i in unused:
            res = geo.best(i, residual)
            if len(res.covered) > best_n:
                best_i, best_res, best_n = i, res, len(res.covered)
        served = np.flatnonzero(geo.served(best_i, best_res.orientation_deg))
        plan.placements.append(
            RisPlacement(
                candidate_index=best_i,
                position=scene.candidates[best_i],
                orientation_deg=best_res.orientation_deg,
                covered=frozenset(int(j) for j in served),
                newly_covered=best_res.covered,
            )
        )
        residual = residual.copy()
        residual[list(best_res.covered)] = False
        unused.remove(best_i)
    return plan, _label(scene, geo.bs_los, plan)


@dataclass
class CoverageGrid:
    """Per-grid-point labels: ``BS_LOS`` (-1), ``UNCOVERED`` (0) or RIS rank k >= 1."""

    grid: object
    labels: np.ndarray

    def label_name(self, code: int) -> str:
        if code == BS_LOS:
            return "bs_los"
        if code == UNCOVERED:
            return "uncovered"
        return f"ris{code}"

    def counts(self) -> dict[str, int]:
        out = {"bs_los": int(np.sum(self.labels == BS_LOS))}
        for k in sorted(set(int(c) for c in self.labels if c > 0)):
            out[f"ris{k}"] = int(np.sum(self.labels == k))
        out["uncovered"] = int(np.sum(self.labels == UNCOVERED))
        return out


def _label(scene: Scene, bs_los: np.ndarray, plan) -> CoverageGrid:
    labels = np.where(bs_los, BS_LOS, UNCOVERED).astype(int)
    for rank, p in enumerate(plan, start=1):
        idx = np.fromiter(sorted(p.covered), dtype=int, count=len(p.covered))
        free = idx[labels[idx] == UNCOVERED]
        labels[free] = rank
    return CoverageGrid(scene.grid, labels)


@dataclass
class CoverageReport:
    coverage: CoverageGrid
    total: int
    bs_covered: int
    ris_new: list[int]
    uncovered: int

    @property
    def fractions(self) -> dict[str, float]:
        t = float(self.total)
        out = {"bs_los": self.bs_covered / t}
        for k, n in enumerate(self.ris_new, start=1):
            out[f"ris{k}"] = n / t
        out["uncovered"] = self.uncovered / t
        return out

    def summary_lines(self) -> list[str]:
        lines = [f"grid_points {self.total}", f"bs_covered {self.bs_covered}"]
        lines += [f"ris{k}_newly_covered {n}" for k, n in enumerate(self.ris_new, start=1)]
        lines.append(f"uncovered {self.uncovered}")
        lines += [f"fraction_{k} {v:.6g}" for k, v in self.fractions.items()]
        return lines


def coverage_report(scene: Scene, plan=()) -> CoverageReport:
    bs_los = los_many(scene, scene.bs, scene.grid.points())
    cov = _label(scene, bs_los, list(plan))
    n_ris = len(list(plan))
    return CoverageReport(
        coverage=cov,
        total=int(cov.labels.size),
        bs_covered=int(np.sum(cov.labels == BS_LOS)),
        ris_new=[int(np.sum(cov.labels == k)) for k in range(1, n_ris + 1)],
        uncovered=int(np.sum(cov.labels == UNCOVERED)),
    )


def candidate_coverage_table(scene: Scene, link_filter=None) -> list[dict]:
    """Per-candidate raw LOS coverage (orientation ignored) next to the FoV-limited best."""
    geo = _Geometry(scene, link_filter)
    eligible = ~geo.bs_los
    rows = []
    for i in range(len(scene.candidates)):
        res = geo.best(i, eligible)
        rows.append(
            {
                "candidate_index": i,
                "raw_los_count": int(np.sum(geo.visible(i) & eligible)),
                "fov_best_count": len(res.covered),
                "orientation_deg": res.orientation_deg,
            }
        )
    return rows
