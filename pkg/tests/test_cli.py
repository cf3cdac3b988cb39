import copy
import json

import pytest

from airhaptics.cli import main
from airhaptics.config import config_hash, load_config
from airhaptics.errors import ConfigError


def run(args):
    return main([str(a) for a in args])


def test_field_writes_all_outputs(small_cfg_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["field", "--config", small_cfg_path, "--out", out]) == 0
    for name in ("field.csv", "field.pgm", "field.json", "plan.csv", "metrics.json"):
        assert (out / name).exists(), name
    metrics = json.loads((out / "metrics.json").read_text())
    assert "fwhm_m" in metrics and "x" in metrics["fwhm_m"]
    assert metrics["fwhm_m"]["x"] > 0
    assert "force_n" in metrics
    assert "fwhm_x" in capsys.readouterr().out


def test_missing_config_exits_2_naming_path(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert run(["field", "--config", missing, "--out", tmp_path / "o"]) == 2
    assert str(missing) in capsys.readouterr().err


def test_single_sample_grid_warns_and_still_writes_field(small_cfg, tmp_path, capsys):
    cfg = copy.deepcopy(small_cfg)
    cfg["field"]["grid"]["extents"] = [1, 1]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert run(["field", "--config", path, "--out", out]) == 0
    assert (out / "field.csv").exists()
    assert not (out / "metrics.json").exists()
    assert "metrics omitted" in capsys.readouterr().err


def test_schedule_line_prints_counts(small_cfg_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["schedule", "--config", small_cfg_path, "--out", out]) == 0
    text = capsys.readouterr().out
    assert "points: 60" in text
    assert "period: 0.200000 s" in text
    assert "frames: 200" in text
    assert (out / "schedule.fsch").exists()
    assert (out / "schedule.csv").exists()


def test_schedule_rounded_edge_prints_perimeter(small_cfg, tmp_path, capsys):
    cfg = copy.deepcopy(small_cfg)
    cfg["schedule"]["trajectory"]["r_x_m"] = 1e-3
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run(["schedule", "--config", path, "--out", tmp_path / "o"]) == 0
    text = capsys.readouterr().out
    assert "perimeter: 13.3649 mm" in text


def test_schedule_zero_step_exits_2(small_cfg, tmp_path, capsys):
    cfg = copy.deepcopy(small_cfg)
    cfg["schedule"]["trajectory"]["step_width_m"] = 0.0
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run(["schedule", "--config", path, "--out", tmp_path / "o"]) == 2
    assert "step_width" in capsys.readouterr().err


def test_am_schedule(small_cfg, tmp_path, capsys):
    cfg = copy.deepcopy(small_cfg)
    cfg["schedule"]["type"] = "am"
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "o"
    assert run(["schedule", "--config", path, "--out", out]) == 0
    assert (out / "schedule.fsch").exists()
    assert "am: sine at 100.0 Hz" in capsys.readouterr().out


def test_metrics_command_prints_json(small_cfg_path, tmp_path, capsys):
    assert run(["metrics", "--config", small_cfg_path, "--out", tmp_path / "o"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "peak_pressure_pa" in doc


def test_field_determinism_byte_identical(small_cfg_path, tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert run(["field", "--config", small_cfg_path, "--out", out]) == 0
        assert run(["schedule", "--config", small_cfg_path, "--out", out]) == 0
        outs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert outs[0].keys() == outs[1].keys()
    for name in outs[0]:
        assert outs[0][name] == outs[1][name], name


def test_threads_do_not_change_output(small_cfg_path, tmp_path):
    out1, out4 = tmp_path / "t1", tmp_path / "t4"
    assert run(["field", "--config", small_cfg_path, "--out", out1, "--threads", 1]) == 0
    assert run(["field", "--config", small_cfg_path, "--out", out4, "--threads", 4]) == 0
    assert (out1 / "field.csv").read_bytes() == (out4 / "field.csv").read_bytes()


def test_verify_default_passes(small_cfg_path, tmp_path, capsys):
    assert run(["verify", "--config", small_cfg_path, "--out", tmp_path / "o"]) == 0
    text = capsys.readouterr().out
    assert "oracle_vs_optimized" in text
    assert "FAIL" not in text


def test_verify_reports_tampered_field(small_cfg_path, tmp_path, capsys):
    out = tmp_path / "o"
    assert run(["field", "--config", small_cfg_path, "--out", out]) == 0
    # verify against the untouched export first: recompute matches
    assert run(["verify", "--config", small_cfg_path, "--out", out]) == 0
    assert "field_file_recompute" in capsys.readouterr().out
    path = out / "field.csv"
    lines = path.read_text().splitlines()
    lines[5] = lines[5].replace(lines[5].split(",")[3], "1.0", 1)
    path.write_text("\n".join(lines) + "\n")
    assert run(["verify", "--config", small_cfg_path, "--out", out]) == 3
    text = capsys.readouterr().out
    assert "field_file_recompute" in text and "FAIL" in text


def test_quantize_bits_flag_overrides_config(small_cfg_path, tmp_path):
    import numpy as np

    from airhaptics.io import read_schedule_binary
    out2, out8 = tmp_path / "b2", tmp_path / "b8"
    assert run(["schedule", "--config", small_cfg_path, "--out", out8]) == 0
    assert run(["schedule", "--config", small_cfg_path, "--out", out2,
                "--quantize-bits", 2]) == 0
    sched = read_schedule_binary(out2 / "schedule.fsch")
    steps = sched.phases / (2 * np.pi / 4)
    np.testing.assert_allclose(steps, np.round(steps), atol=1e-6)
    assert (out2 / "schedule.fsch").read_bytes() != (out8 / "schedule.fsch").read_bytes()


class TestConfig:
    def test_round_trip_identity(self, small_cfg):
        text = json.dumps(small_cfg, sort_keys=True)
        assert json.loads(text) == json.loads(json.dumps(json.loads(text), sort_keys=True))
        assert config_hash(small_cfg) == config_hash(json.loads(text))

    def test_unknown_keys_rejected(self, small_cfg, tmp_path):
        from airhaptics import config as cfgmod
        cfg = copy.deepcopy(small_cfg)
        cfg["layout"]["devices"][0]["pitchm"] = 0.01
        with pytest.raises(ConfigError, match="pitchm"):
            cfgmod.build_layout(cfg)

    def test_invalid_json_reported(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="JSON"):
            load_config(path)

    def test_mirror_section_builds_image_sources(self, small_cfg):
        from airhaptics import config as cfgmod
        cfg = copy.deepcopy(small_cfg)
        cfg["layout"]["devices"][0]["position_m"] = [0.0, 0.0, -0.1]
        cfg["layout"]["mirror"] = {"point_m": [0, 0, 0], "normal": [0, 0, 1],
                                   "coefficient": 0.9}
        layout = cfgmod.build_layout(cfg)
        assert layout.has_images
        assert len(layout) == 2 * 24
        assert layout.mirror_coefficient == 0.9
