"""Generates fresh CSV inputs by shelling out to the matterwave CLI."""

import subprocess
import sys

import pytest

pytest.importorskip("matterwave")
pytest.importorskip("matterwave_figures")


def run_cli(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "matterwave.cli"] + args,
        cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def csvs(tmp_path_factory):
    """One fresh CSV per CLI subcommand the recipes consume."""
    root = tmp_path_factory.mktemp("csvs")
    cache = ["--cache-dir", str(root / "cache")]
    paths = {}

    def produce(name, args):
        out = root / f"{name}.csv"
        run_cli(args + cache + ["--output", str(out)], cwd=root)
        paths[name] = out

    produce("diffract", ["diffract", "--mechanism", "bragg", "--geometry",
                         "single", "--delta-tau", "12.5us", "--delta-p",
                         "0.05", "--grid-points", "128"])
    for mechanism in ("raman", "bragg"):
        for geometry in ("single", "double"):
            produce(f"width_{mechanism}_{geometry}",
                    ["width", "--mechanism", mechanism, "--geometry",
                     geometry, "--delta-tau", "15us..30us:2",
                     "--grid-points", "256"])
    produce("efficiency", ["efficiency", "--mechanism", "raman",
                           "--geometry", "single", "--delta-tau",
                           "10us..20us:2", "--delta-p", "0.02..0.1:3",
                           "--grid-points", "64"])
    produce("losses", ["losses", "--mechanism", "bragg", "--geometry",
                       "single", "--delta-tau", "10us..20us:3",
                       "--delta-p", "0.02..0.1:2", "--grid-points", "64"])
    produce("populations", ["populations", "--mechanism", "bragg",
                            "--geometry", "double", "--delta-tau",
                            "25us..50us:2", "--delta-p", "0.1",
                            "--grid-points", "128"])
    produce("interferometer", ["interferometer", "--mechanism", "raman",
                               "--geometry", "single", "--delta-tau",
                               "12.5us", "--delta-p", "0.01",
                               "--grid-points", "64"])
    produce("amplitude_map", ["amplitude-map", "--mechanism", "raman",
                              "--geometry", "single", "--delta-tau",
                              "10us..15us:2", "--delta-p", "0.01..0.05:2",
                              "--grid-points", "64"])
    produce("contrast_map", ["contrast-map", "--mechanism", "raman",
                             "--geometry", "single", "--delta-tau",
                             "10us..15us:2", "--delta-p", "0.01..0.05:2",
                             "--grid-points", "64"])
    produce("optimal_area", ["optimal-area", "--mechanism", "raman",
                             "--delta-tau", "37.5us", "--p0", "0..1:5"])
    produce("transition_scan", ["transition-scan", "--mechanism", "raman",
                                "--delta-tau", "37.5us", "--p0", "0..1:5",
                                "--delta-p", "0.005..0.2:10",
                                "--grid-points", "256",
                                "--width-grid-points", "128"])
    return paths
