import json
import subprocess
import sys

import pytest

from tamevol import catalog
from tamevol.cli import main
from tamevol.setfile import set_to_dict, load_set


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dim(capsys):
    assert run(capsys, "dim", "--catalog", "circle")[:2] == (0, "1\n")
    assert run(capsys, "dim", "--catalog", "sphere2")[:2] == (0, "2\n")


def test_malformed_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"name": "x", ')
    code, _, err = run(capsys, "dim", "--file", str(p))
    assert code == 2 and "SyntaxError" in err


def test_missing_input_and_unknown_catalog(capsys):
    assert run(capsys, "dim")[0] == 2
    assert run(capsys, "dim", "--catalog", "nope")[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["volume", "--catalog", "circle"])
    assert info.value.code == 2


def test_volume_sphere(capsys, tmp_path):
    out_json = tmp_path / "v.json"
    code, out, _ = run(capsys, "volume", "--catalog", "sphere2", "--r", "10", "--out-json", str(out_json))
    assert code == 0 and "vol_2 sphere2" in out
    data = json.loads(out_json.read_text())
    assert data["value"] == pytest.approx(12.566, rel=1e-2)


def test_growth_outputs(capsys, tmp_path):
    csv_path, json_path = tmp_path / "g.csv", tmp_path / "g.json"
    code, _, _ = run(
        capsys, "growth", "--catalog", "plane(2,3)", "--out-csv", str(csv_path), "--out-json", str(json_path)
    )
    assert code == 0
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "r,volume,error_bound,ratio_to_r_d" and len(rows) == 17
    verdict = json.loads(json_path.read_text())
    assert verdict["bounded"] and verdict["alpha"] == pytest.approx(2.0, abs=0.02)


def test_growth_circle_and_spiral(capsys):
    code, out, _ = run(capsys, "growth", "--catalog", "circle")
    assert code == 0 and '"bounded": true' in out
    code, out, _ = run(capsys, "growth", "--catalog", "archimedean-spiral")
    # the spiral is flagged non-definable, so its violation is expected, not a failure
    assert code == 0 and '"violates-O(r^d)"' in out


def test_growth_violation_of_definable_set_exits_4(tmp_path, capsys):
    spec = catalog.catalog_dict("archimedean-spiral")
    spec = {**spec, "metadata": {}, "cells": [{**spec["cells"][0], "definable": True}]}
    p = tmp_path / "s.json"
    p.write_text(json.dumps(spec))
    assert run(capsys, "growth", "--file", str(p), "--count", "8")[0] == 4


def test_too_few_radii(capsys):
    assert run(capsys, "growth", "--catalog", "circle", "--count", "3")[0] == 2
    assert run(capsys, "growth", "--catalog", "circle", "--rmin", "5", "--rmax", "2")[0] == 2


def test_fit_command(capsys, tmp_path):
    csv_path = tmp_path / "g.csv"
    run(capsys, "growth", "--catalog", "line", "--out-csv", str(csv_path))
    code, out, _ = run(capsys, "fit", "--csv", str(csv_path), "--d", "1")
    assert code == 0 and json.loads(out)["alpha"] == pytest.approx(1.0, abs=0.02)


def test_stoll(capsys):
    for name, verdict in [("complex-line", "algebraic-consistent"), ("complex-exp", "transcendental")]:
        code, out, _ = run(capsys, "stoll", "--catalog", name)
        assert code == 0 and json.loads(out)["verdict"] == verdict
    code, out, _ = run(capsys, "stoll", "--catalog", "complex-parabola", "--d-complex", "1")
    assert json.loads(out)["C_hat"] == pytest.approx(2 * 3.14159, rel=0.02)


def test_lemma_check(capsys, tmp_path):
    code, out, _ = run(capsys, "lemma-check", "--catalog", "flat-square", "--out-json", str(tmp_path / "l.json"))
    assert code == 0
    rows = json.loads((tmp_path / "l.json").read_text())["cells"][0]["rows"]
    assert all(row["ratio"] == pytest.approx(1.0) for row in rows)
    assert run(capsys, "lemma-check", "--catalog", "steep-line", "--tau", "1.0")[0] == 2


def test_cover(capsys):
    code, out, err = run(capsys, "cover", "1", "2", "1.7320508")
    assert code == 0 and json.loads(out)["count"] == 2 and "2 centers" in err
    code, out, _ = run(capsys, "cover", "--d", "2", "--n", "3", "--tau", "1.0", "--seed", "4")
    assert code == 0 and len(json.loads(out)["centers"][0]) == 3
    assert run(capsys, "cover", "--d", "3", "--n", "2")[0] == 2
    assert run(capsys, "cover", "--d", "1", "--n", "3", "--tau", "0.01", "--sample-size", "2000")[0] == 3


def test_examples_list_and_export(capsys, tmp_path):
    code, out, _ = run(capsys, "examples")
    assert code == 0 and "complex-exp" in out and "not definable" in out
    p = tmp_path / "c.json"
    assert run(capsys, "examples", "--export", "circle", "--out-json", str(p))[0] == 0
    assert set_to_dict(load_set(p)) == set_to_dict(catalog.load("circle"))


@pytest.mark.parametrize("name", ["circle", "sphere2", "complex-parabola"])
def test_exported_file_measures_identically(capsys, tmp_path, name):
    p = tmp_path / "x.json"
    run(capsys, "examples", "--export", name, "--out-json", str(p))
    a = run(capsys, "volume", "--catalog", name, "--r", "1.7")[1]
    b = run(capsys, "volume", "--file", str(p), "--r", "1.7")[1]
    assert a == b


def test_growth_bytes_identical_across_threads(capsys, tmp_path):
    outs = []
    for threads in (1, 2, 8):
        c, j = tmp_path / f"{threads}.csv", tmp_path / f"{threads}.json"
        run(capsys, "growth", "--catalog", "sphere2", "--seed", "7", "--threads", str(threads), "--out-csv", str(c), "--out-json", str(j))
        outs.append((c.read_bytes(), j.read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "tamevol.cli", "dim", "--catalog", "paraboloid"], capture_output=True, text=True
    )
    assert out.returncode == 0 and out.stdout == "2\n"
