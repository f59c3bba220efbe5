import json
import math

import numpy as np
import pytest

from matterwave.cli import (main, parse_area, parse_momentum, parse_sweep,
                            parse_time)
from matterwave.config import ConfigError

from conftest import us2t


# ---------------------------------------------------------------------------
# Value parsing
# ---------------------------------------------------------------------------

def test_parse_time_units():
    assert parse_time("10us") == pytest.approx(us2t(10.0))
    assert parse_time("1.5") == 1.5
    assert parse_time(2.0) == 2.0
    with pytest.raises(ConfigError):
        parse_time("soon")


def test_parse_momentum_units():
    assert parse_momentum("0.5hbark") == 0.5
    assert parse_momentum("-0.25") == -0.25
    with pytest.raises(ConfigError):
        parse_momentum("fast")


def test_parse_area_forms():
    assert parse_area("pi") == pytest.approx(math.pi)
    assert parse_area("pi/2") == pytest.approx(math.pi / 2)
    assert parse_area("1.5pi") == pytest.approx(1.5 * math.pi)
    assert parse_area("2.0") == 2.0
    with pytest.raises(ConfigError):
        parse_area("lots")


def test_parse_sweep():
    sweep = parse_sweep("1..2:3", parse_momentum, "x")
    assert list(sweep) == [1.0, 1.5, 2.0]
    assert list(parse_sweep("0.7", parse_momentum, "x")) == [0.7]
    sweep_us = parse_sweep("10us..20us:2", parse_time, "x")
    assert sweep_us[1] == pytest.approx(us2t(20.0))
    with pytest.raises(ConfigError):
        parse_sweep("1..2", parse_momentum, "x")
    with pytest.raises(ConfigError):
        parse_sweep("1..2:two", parse_momentum, "x")
    with pytest.raises(ConfigError):
        parse_sweep("2..1:5", parse_momentum, "x")


# ---------------------------------------------------------------------------
# Commands (in-process)
# ---------------------------------------------------------------------------

def read_csv(path):
    header, columns, rows = {}, None, []
    for line in path.read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            header[key] = value
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return header, columns, rows


def test_width_command_csv(tmp_path):
    out = tmp_path / "width.csv"
    code = main(["width", "--mechanism", "bragg", "--geometry", "single",
                 "--delta-tau", "12.5us", "--grid-points", "64",
                 "--output", str(out)])
    assert code == 0
    header, columns, rows = read_csv(out)
    assert columns == ["delta_tau_us", "delta_tau_dimless", "width_hbark"]
    assert header["command"] == "width"
    assert len(rows) == 1
    tau_us, tau, width = map(float, rows[0])
    assert tau_us == pytest.approx(12.5)
    assert tau == pytest.approx(us2t(12.5))
    assert 0.3 < width < 1.2


def test_help_and_usage_exit_codes(tmp_path):
    assert main(["--help"]) == 0
    assert main(["width", "--no-such-flag"]) == 1
    assert main(["width", "--mechanism", "bragg"]) == 1  # missing delta-tau
    assert main(["nonsense"]) == 1


def test_numerical_failure_exit_code(tmp_path):
    # an area-zero pulse transfers nothing, so no resonance width exists
    code = main(["width", "--mechanism", "bragg", "--geometry", "single",
                 "--delta-tau", "12.5us", "--area", "0", "--grid-points",
                 "32", "--output", str(tmp_path / "w.csv")])
    assert code == 2


def test_config_file_defaults_and_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "mechanism": "bragg", "geometry": "single",
        "delta-tau": "12.5us", "grid-points": 64,
    }))
    a = tmp_path / "a.csv"
    assert main(["width", "--config", str(cfg), "--output", str(a)]) == 0
    header, _, rows = read_csv(a)
    assert header["config.geometry"] == "single"

    b = tmp_path / "b.csv"
    assert main(["width", "--config", str(cfg), "--geometry", "double",
                 "--output", str(b)]) == 0
    header_b, _, _ = read_csv(b)
    assert header_b["config.geometry"] == "double"


def test_bad_config_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert main(["width", "--config", str(bad)]) == 1
    assert main(["width", "--config", str(tmp_path / "missing.json"),
                 "--mechanism", "bragg", "--delta-tau", "1"]) == 1


def test_cache_reuse_is_byte_identical(tmp_path):
    cache = tmp_path / "cache"
    args = ["diffract", "--mechanism", "bragg", "--geometry", "single",
            "--delta-tau", "12.5us", "--delta-p", "0.05",
            "--grid-points", "64", "--cache-dir", str(cache)]
    cold, warm = tmp_path / "cold.csv", tmp_path / "warm.csv"
    assert main(args + ["--output", str(cold)]) == 0
    assert any(cache.iterdir())
    assert main(args + ["--output", str(warm)]) == 0
    assert cold.read_bytes() == warm.read_bytes()


def test_jobs_do_not_change_output(tmp_path):
    args = ["efficiency", "--mechanism", "raman", "--geometry", "single",
            "--delta-tau", "10us..15us:2", "--delta-p", "0.02..0.08:2",
            "--grid-points", "32"]
    serial, parallel = tmp_path / "serial.csv", tmp_path / "par.csv"
    assert main(args + ["--jobs", "1", "--output", str(serial)]) == 0
    assert main(args + ["--jobs", "2", "--output", str(parallel)]) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_interferometer_command(tmp_path):
    out = tmp_path / "ifm.csv"
    code = main(["interferometer", "--mechanism", "raman", "--geometry",
                 "single", "--delta-tau", "12.5us", "--delta-p", "0.01",
                 "--grid-points", "64", "--output", str(out)])
    assert code == 0
    header, columns, rows = read_csv(out)
    assert columns == ["phase_rad", "intensity"]
    assert len(rows) == 64
    assert float(header["contrast"]) > 0.99
    assert float(header["fit_residual"]) < 1e-8


def test_float_formatting_roundtrips(tmp_path):
    out = tmp_path / "w.csv"
    assert main(["width", "--mechanism", "bragg", "--geometry", "single",
                 "--delta-tau", "12.5us", "--grid-points", "64",
                 "--output", str(out)]) == 0
    _, _, rows = read_csv(out)
    value = float(rows[0][1])
    assert repr(value) == rows[0][1]  # shortest-roundtrip formatting
    assert value == us2t(12.5)
