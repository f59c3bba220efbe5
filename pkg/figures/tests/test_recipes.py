import json

import pytest

from matterwave_figures.cli import main

RECIPE_INPUTS = {
    "fig3": ["diffract"],
    "fig4": ["width_raman_single", "width_raman_double",
             "width_bragg_single", "width_bragg_double"],
    "fig5": ["efficiency"],
    "fig6": ["losses"],
    "fig7": ["interferometer"],
    "fig8": ["populations"],
    "fig9": ["amplitude_map"],
    "fig10": ["contrast_map"],
    "fig11b": ["optimal_area"],
    "fig11c": ["transition_scan"],
}


def render(recipe, inputs, out):
    args = ["render", "--recipe", recipe, "--out", str(out)]
    for path in inputs:
        args += ["--in", str(path)]
    return main(args)


@pytest.mark.parametrize("recipe", sorted(RECIPE_INPUTS))
def test_every_recipe_renders(recipe, csvs, tmp_path):
    out = tmp_path / f"{recipe}.png"
    assert render(recipe, [csvs[n] for n in RECIPE_INPUTS[recipe]], out) == 0
    assert out.exists() and out.stat().st_size > 0
    sidecar = json.loads((tmp_path / f"{recipe}.png.json").read_text())
    assert sidecar["recipe"] == recipe
    assert sidecar["quantities"]
    for entry in sidecar["quantities"].values():
        assert entry["min"] <= entry["max"]


def test_transition_map_sidecar_range(csvs, tmp_path):
    out = tmp_path / "fig11c.png"
    assert render("fig11c", [csvs["transition_scan"]], out) == 0
    sidecar = json.loads((tmp_path / "fig11c.png.json").read_text())
    eff = sidecar["quantities"]["efficiency"]
    assert eff["min"] <= 0.5 <= 0.95 <= eff["max"]


def test_sidecar_is_deterministic(csvs, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert render("fig7", [csvs["interferometer"]], a) == 0
    assert render("fig7", [csvs["interferometer"]], b) == 0
    sidecar_a = (tmp_path / "a.png.json").read_text()
    sidecar_b = (tmp_path / "b.png.json").read_text()
    assert json.loads(sidecar_a)["quantities"] == \
        json.loads(sidecar_b)["quantities"]


def test_missing_column_rejected(csvs, tmp_path, capsys):
    out = tmp_path / "bad.png"
    # the interferogram recipe needs phase_rad, absent from a width CSV
    assert render("fig7", [csvs["width_raman_single"]], out) == 1
    assert "phase_rad" in capsys.readouterr().err
    assert not out.exists()


def test_empty_csv_rejected(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("# command=interferometer\nphase_rad,intensity\n")
    out = tmp_path / "empty.png"
    assert render("fig7", [empty], out) == 1
    assert "no data rows" in capsys.readouterr().err
    assert not out.exists()


def test_unknown_recipe_rejected(tmp_path):
    assert main(["render", "--recipe", "fig99",
                 "--in", "x.csv", "--out", str(tmp_path / "x.png")]) == 1
