import json
from pathlib import Path

import numpy as np
import pytest

from risplan.scene import Building, GridSpec, Point3, Scene, SceneError

ROOT = Path(__file__).resolve().parents[1]
TOY_SCENE = ROOT / "scenes" / "toy_campus.json"


def random_scene(rng, n_buildings=10, n_candidates=1, grid_step=10.0, extent=80.0, cand_height=30.0):
    """Random axis-aligned/rotated block scene whose candidates all see the BS."""
    while True:
        buildings = []
        for _ in range(rng.integers(0, n_buildings + 1)):
            cx, cy = rng.uniform(-extent * 0.75, extent * 0.75, 2)
            w, h = rng.uniform(4, 20, 2)
            ang = rng.uniform(0, np.pi)
            c, s = np.cos(ang), np.sin(ang)
            corners = [(-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)]
            fp = tuple((cx + c * x - s * y, cy + s * x + c * y) for x, y in corners)
            buildings.append(Building(fp, float(rng.uniform(5, 28))))
        bs = Point3(*rng.uniform(-extent / 2, extent / 2, 2), 25.0)
        cands = tuple(
            Point3(*rng.uniform(-extent * 0.75, extent * 0.75, 2), cand_height)
            for _ in range(n_candidates)
        )
        scene = Scene(
            tuple(buildings),
            bs,
            cands,
            GridSpec(-extent, extent, -extent, extent, grid_step),
            float(rng.uniform(20, 80)),
        )
        try:
            scene.validate_candidates()
        except SceneError:
            continue
        return scene


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_scene_path():
    return TOY_SCENE


@pytest.fixture
def write_scene(tmp_path):
    def _write(data, name="scene.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    return _write


def minimal_scene_dict(**overrides):
    data = {
        "buildings": [],
        "bs": {"x": 0.0, "y": 0.0, "z": 25.0},
        "candidates": [{"x": 10.0, "y": 0.0, "z": 30.0}],
        "grid": {"xmin": -20, "xmax": 20, "ymin": -20, "ymax": 20, "step": 5, "ue_height": 1.5},
        "fov_half_angle_deg": 60.0,
    }
    data.update(overrides)
    return data
