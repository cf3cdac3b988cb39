import copy
import json

import pytest

from airhaptics.demo import demo_config


@pytest.fixture
def small_cfg():
    """Demo config shrunk to one small device and a coarse grid: fast CLI runs."""
    cfg = demo_config()
    cfg = copy.deepcopy(cfg)
    cfg["layout"]["devices"] = [{
        "rows": 4, "cols": 6, "pitch_m": 0.0102,
        "position_m": [0.0, 0.0, 0.0], "euler_deg": [0.0, 0.0, 0.0],
    }]
    cfg["field"]["focus_m"] = [0.0, 0.0, 0.15]
    cfg["field"]["grid"] = {
        "center_m": [0.0, 0.0, 0.15],
        "u_axis": [1.0, 0.0, 0.0],
        "v_axis": [0.0, 1.0, 0.0],
        "extents": [21, 21],
        "spacing_m": 1.5e-3,
    }
    cfg["field"]["metrics_region_m"] = [0.02, 0.02]
    cfg["schedule"]["trajectory"]["center_m"] = [0.0, 0.0, 0.15]
    cfg["verify"] = {"points": 200, "seed": 0}
    return cfg


@pytest.fixture
def small_cfg_path(small_cfg, tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(small_cfg, indent=2))
    return path
