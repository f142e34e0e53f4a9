"""2.5D urban scene: extruded building footprints over flat ground, and LOS tests.

A segment is blocked only when it penetrates the interior of a building prism
over a stretch of positive length. Grazing a wall or roof, or starting on a
facade and leaving outward, keeps line of sight.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

EPS = 1e-9  # m, geometric tolerance in local coordinates


class SceneError(ValueError):
    """A scene file is malformed or violates a scene invariant."""


class Point3(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class GridSpec:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    step: float
    ue_height: float = 1.5

    @property
    def nx(self) -> int:
        return int(math.floor((self.xmax - self.xmin) / self.step + 1e-9)) + 1

    @property
    def ny(self) -> int:
        return int(math.floor((self.ymax - self.ymin) / self.step + 1e-9)) + 1

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def xs(self) -> np.ndarray:
        return self.xmin + self.step * np.arange(self.nx)

    def ys(self) -> np.ndarray:
        return self.ymin + self.step * np.arange(self.ny)

    def points(self) -> np.ndarray:
        """(size, 3) array of UE sample positions, x varying fastest."""
        gx, gy = np.meshgrid(self.xs(), self.ys())
        gz = np.full(gx.size, float(self.ue_height))
        return np.column_stack([gx.ravel(), gy.ravel(), gz])


@dataclass(frozen=True)
class Building:
    footprint: tuple[tuple[float, float], ...]
    height: float

    def __post_init__(self):
        fp = tuple((float(x), float(y)) for x, y in self.footprint)
        object.__setattr__(self, "footprint", fp)
        if len(fp) < 3:
            raise SceneError(f"building footprint needs >= 3 vertices, got {len(fp)}")
        if not all(math.isfinite(c) for v in fp for c in v):
            raise SceneError("building footprint has non-finite coordinates")
        if len(set(fp)) != len(fp):
            raise SceneError("building footprint has repeated vertices")
        if not (self.height > 0 and math.isfinite(self.height)):
            raise SceneError(f"building height must be > 0, got {self.height}")
        if _self_intersects(np.asarray(fp)):
            raise SceneError("building footprint is not a simple polygon")
        if abs(_signed_area(np.asarray(fp))) <= EPS:
            raise SceneError("building footprint has zero area")

    @property
    def vertices(self) -> np.ndarray:
        return np.asarray(self.footprint, dtype=float)

    @classmethod
    def box(cls, xmin, ymin, xmax, ymax, height) -> "Building":
        return cls(((xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)), height)


@dataclass(frozen=True)
class Scene:
    buildings: tuple[Building, ...]
    bs: Point3
    candidates: tuple[Point3, ...]
    grid: GridSpec
    fov_half_angle: float = 60.0

    def __post_init__(self):
        object.__setattr__(self, "buildings", tuple(self.buildings))
        object.__setattr__(self, "bs", _point(self.bs, "bs"))
        object.__setattr__(
            self, "candidates", tuple(_point(c, "candidate") for c in self.candidates)
        )
        g = self.grid
        if not (g.step > 0 and math.isfinite(g.step)):
            raise SceneError(f"grid step must be > 0, got {g.step}")
        if not (g.xmax >= g.xmin and g.ymax >= g.ymin):
            raise SceneError("grid bounds are inverted")
        if not 0.0 < self.fov_half_angle < 90.0:
            raise SceneError(f"fov_half_angle must lie in (0, 90), got {self.fov_half_angle}")

    def validate_candidates(self) -> None:
        """Raise if any candidate lacks line of sight to the base station."""
        for i, c in enumerate(self.candidates):
            if math.hypot(c.x - self.bs.x, c.y - self.bs.y) <= EPS:
                raise SceneError(f"candidate {i} sits directly above or below the BS")
            if not segment_los(self, c, self.bs):
                raise SceneError(f"candidate {i} at {tuple(c)} has no line of sight to the BS")


def _point(p, what) -> Point3:
    p = Point3(*(float(v) for v in p))
    if not all(math.isfinite(v) for v in p):
        raise SceneError(f"{what} has non-finite coordinates: {p}")
    return p


def _same_point(p, q) -> bool:
    return all(abs(a - b) <= EPS for a, b in zip(p, q))


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = _cross(q2[0] - q1[0], q2[1] - q1[1], p1[0] - q1[0], p1[1] - q1[1])
    d2 = _cross(q2[0] - q1[0], q2[1] - q1[1], p2[0] - q1[0], p2[1] - q1[1])
    d3 = _cross(p2[0] - p1[0], p2[1] - p1[1], q1[0] - p1[0], q1[1] - p1[1])
    d4 = _cross(p2[0] - p1[0], p2[1] - p1[1], q2[0] - p1[0], q2[1] - p1[1])
    if ((d1 > EPS and d2 < -EPS) or (d1 < -EPS and d2 > EPS)) and (
        (d3 > EPS and d4 < -EPS) or (d3 < -EPS and d4 > EPS)
    ):
        return True

    def on_seg(a, b, c, d):
        return abs(d) <= EPS and min(a[0], b[0]) - EPS <= c[0] <= max(a[0], b[0]) + EPS and (
            min(a[1], b[1]) - EPS <= c[1] <= max(a[1], b[1]) + EPS
        )

    return (
        on_seg(q1, q2, p1, d1)
        or on_seg(q1, q2, p2, d2)
        or on_seg(p1, p2, q1, d3)
        or on_seg(p1, p2, q2, d4)
    )


def _self_intersects(v: np.ndarray) -> bool:
    n = len(v)
    for i in range(n):
        a1, a2 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex
            if _segments_intersect(a1, a2, v[j], v[(j + 1) % n]):
                return True
    return False


def _strictly_inside(v: np.ndarray, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Even-odd containment, excluding points within EPS of the boundary."""
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    inside = np.zeros(px.shape, dtype=bool)
    near_edge = np.zeros(px.shape, dtype=bool)
    n = len(v)
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < x_at)
        ex, ey = x2 - x1, y2 - y1
        seg_len2 = ex * ex + ey * ey
        t = np.clip(((px - x1) * ex + (py - y1) * ey) / seg_len2, 0.0, 1.0)
        dist2 = (px - x1 - t * ex) ** 2 + (py - y1 - t * ey) ** 2
        near_edge |= dist2 <= EPS * EPS
    return inside & ~near_edge


def _blocked_by(b: Building, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Which segments p -> q[k] penetrate building ``b``.

    The projected segment is cut at every footprint-edge crossing; each piece is
    either wholly inside or wholly outside the footprint, and the segment height
    is linear along it, so comparing the lower end height of interior pieces
    against the roof decides penetration.
    """
    v = b.vertices
    dx = q[:, 0] - p[0]
    dy = q[:, 1] - p[1]
    dz = q[:, 2] - p[2]
    m = len(q)
    blocked = np.zeros(m, dtype=bool)

    vertical = dx * dx + dy * dy <= EPS * EPS
    if np.any(vertical):
        inside = _strictly_inside(v, np.full(1, p[0]), np.full(1, p[1]))[0]
        if inside:
            low = np.minimum(p[2], q[vertical, 2])
            blocked[vertical] = low < b.height - EPS

    idx = np.flatnonzero(~vertical)
    if idx.size == 0:
        return blocked
    dx, dy, dz = dx[idx], dy[idx], dz[idx]

    a = v
    e = np.roll(v, -1, axis=0) - v
    # p + t*d = a + s*e, solved per (segment, edge)
    denom = _cross(dx[:, None], dy[:, None], e[None, :, 0], e[None, :, 1])
    wx = a[None, :, 0] - p[0]
    wy = a[None, :, 1] - p[1]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t = _cross(wx, wy, e[None, :, 0], e[None, :, 1]) / denom
        s = _cross(wx, wy, dx[:, None], dy[:, None]) / denom
    ok = (np.abs(denom) > 1e-15) & (s >= -EPS) & (s <= 1 + EPS) & (t > 0) & (t < 1)
    t = np.where(ok, t, np.nan)

    cuts = np.concatenate([np.zeros((idx.size, 1)), t, np.ones((idx.size, 1))], axis=1)
    cuts.sort(axis=1)  # NaN sorts last
    lo = cuts[:, :-1]
    hi = cuts[:, 1:]
    seg_len = np.hypot(dx, dy)[:, None]
    piece = np.isfinite(lo) & np.isfinite(hi) & ((hi - lo) * seg_len > EPS)
    mid = np.where(piece, 0.5 * (lo + hi), 0.0)
    mx = p[0] + mid * dx[:, None]
    my = p[1] + mid * dy[:, None]
    interior = piece & _strictly_inside(v, mx, my)
    z_lo = p[2] + np.where(piece, lo, 0.0) * dz[:, None]
    z_hi = p[2] + np.where(piece, hi, 0.0) * dz[:, None]
    under_roof = np.minimum(z_lo, z_hi) < b.height - EPS
    blocked[idx] = np.any(interior & under_roof, axis=1)
    return blocked


def los_many(scene: Scene, p, targets) -> np.ndarray:
    """Boolean LOS from ``p`` to each row of ``targets`` (shape (k, 3))."""
    p = np.asarray(p, dtype=float)
    q = np.atleast_2d(np.asarray(targets, dtype=float))
    visible = np.ones(len(q), dtype=bool)
    for b in scene.buildings:
        visible &= ~_blocked_by(b, p, q)
    return visible


def segment_los(scene: Scene, p, q) -> bool:
    """True if the open segment p -> q stays outside every building volume."""
    if _same_point(p, q):
        raise ValueError("segment endpoints coincide")
    return bool(los_many(scene, p, [q])[0])


def los_grid(scene: Scene, source) -> list[tuple[tuple[float, float, float], bool]]:
    pts = scene.grid.points()
    vis = los_many(scene, source, pts)
    return [(tuple(float(c) for c in pt), bool(ok)) for pt, ok in zip(pts, vis)]


# ---- file format -----------------------------------------------------------

_TOP_KEYS = {"buildings", "bs", "candidates", "grid", "fov_half_angle_deg"}
_GRID_KEYS = {"xmin", "xmax", "ymin", "ymax", "step", "ue_height"}
_POINT_KEYS = {"x", "y", "z"}
_BUILDING_KEYS = {"footprint", "height"}


def _require_keys(obj, keys: set, where: str, optional: Sequence[str] = ()):
    if not isinstance(obj, dict):
        raise SceneError(f"{where} must be a JSON object")
    unknown = set(obj) - keys
    if unknown:
        raise SceneError(f"unknown key(s) in {where}: {sorted(unknown)}")
    missing = keys - set(obj) - set(optional)
    if missing:
        raise SceneError(f"missing key(s) in {where}: {sorted(missing)}")


def _num(value, where) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(f"{where} must be a number, got {value!r}")
    return float(value)


def _parse_point(obj, where) -> Point3:
    _require_keys(obj, _POINT_KEYS, where)
    return Point3(*(_num(obj[k], f"{where}.{k}") for k in ("x", "y", "z")))


def scene_from_dict(data: dict, validate_los: bool = True) -> Scene:
    _require_keys(data, _TOP_KEYS, "scene", optional=("buildings",))
    raw_buildings = data.get("buildings", [])
    if not isinstance(raw_buildings, list):
        raise SceneError("buildings must be an array")
    buildings = []
    for i, rb in enumerate(raw_buildings):
        _require_keys(rb, _BUILDING_KEYS, f"buildings[{i}]")
        fp = rb["footprint"]
        if not isinstance(fp, list) or not all(isinstance(v, list) and len(v) == 2 for v in fp):
            raise SceneError(f"buildings[{i}].footprint must be an array of [x, y] pairs")
        verts = [(_num(x, "footprint"), _num(y, "footprint")) for x, y in fp]
        try:
            buildings.append(Building(tuple(verts), _num(rb["height"], f"buildings[{i}].height")))
        except SceneError as exc:
            raise SceneError(f"buildings[{i}]: {exc}") from None
    if not isinstance(data["candidates"], list):
        raise SceneError("candidates must be an array")
    candidates = [_parse_point(c, f"candidates[{i}]") for i, c in enumerate(data["candidates"])]
    _require_keys(data["grid"], _GRID_KEYS, "grid")
    grid = GridSpec(**{k: _num(data["grid"][k], f"grid.{k}") for k in _GRID_KEYS})
    scene = Scene(
        buildings=tuple(buildings),
        bs=_parse_point(data["bs"], "bs"),
        candidates=tuple(candidates),
        grid=grid,
        fov_half_angle=_num(data["fov_half_angle_deg"], "fov_half_angle_deg"),
    )
    if validate_los:
        scene.validate_candidates()
    return scene


def scene_to_dict(scene: Scene) -> dict:
    return {
        "buildings": [
            {"footprint": [list(v) for v in b.footprint], "height": b.height}
            for b in scene.buildings
        ],
        "bs": dict(zip("xyz", scene.bs)),
        "candidates": [dict(zip("xyz", c)) for c in scene.candidates],
        "grid": {k: getattr(scene.grid, k) for k in sorted(_GRID_KEYS)},
        "fov_half_angle_deg": scene.fov_half_angle,
    }


def load_scene(path) -> Scene:
    """Read and validate a scene JSON file.

    Raises ``SceneError`` for malformed JSON, unknown or missing keys, broken
    invariants, and candidates without line of sight to the BS.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: invalid JSON ({exc})") from None
    return scene_from_dict(data)
