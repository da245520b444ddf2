import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from symspace.cli import main

SVG_NS = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


# -- Lts commands -------------------------------------------------------------------


@pytest.mark.parametrize("name", ["ex5", "ex6", "sphere2", "hyperbolic2"])
def test_fixtures_pass_axioms(capsys, name):
    code, payload = run_json(capsys, "lts-check", name)
    assert code == 0 and payload["ok"]


def test_lts_check_reports_violation(capsys, tmp_path):
    bad = {"dim": 1, "constants": [[[[1.0]]]]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "lts-check", str(path))
    assert code == 1
    assert "violated axioms: lts1" in out


def test_lts_check_inline_json(capsys):
    code, payload = run_json(capsys, "lts-check", '{"dim": 2, "constants": [[[[0,0],[0,0]],[[0,0],[0,0]]],[[[0,0],[0,0]],[[0,0],[0,0]]]]}')
    assert code == 0 and payload["solvable"] is True


def test_parse_error_reports_position(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "dim": 2,\n  "constants": [1, 2,,]\n}\n')
    code, _, err = run(capsys, "lts-check", str(path))
    assert code == 2
    assert "line 3" in err and "column" in err


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "lts-check", "no-such-file.json")
    assert code == 2 and "no such" in err


def test_embed(capsys):
    code, payload = run_json(capsys, "embed", "hyperbolic2")
    assert code == 0
    assert (payload["dim_m"], payload["dim_h"]) == (2, 1)
    assert payload["jacobi_residual"] <= 1e-10


def test_roots(capsys):
    code, payload = run_json(capsys, "roots", "ex5")
    assert code == 0
    assert len(payload["roots"]) == 2 and all(r["real"] for r in payload["roots"])


def test_exponential_verdicts(capsys):
    assert run(capsys, "exponential", "ex5")[0] == 0
    code, out, _ = run(capsys, "exponential", "ex6")
    assert code == 1 and "witness" in out and "-1" in out
    code, payload = run_json(capsys, "exponential", "sphere2")
    assert code == 1 and payload["eigenvalue"] < 0


def test_non_solvable_without_violation_is_inconclusive(capsys):
    code, out, _ = run(capsys, "exponential", "hyperbolic2")
    assert code == 3 and "inconclusive" in out


# -- geometry commands ----------------------------------------------------------------


def test_midpoint_flat(capsys):
    code, payload = run_json(capsys, "midpoint", "--space", "euclidean:2", "[0,0]", "[2,4]")
    assert code == 0 and payload["status"] == "unique"
    assert payload["solutions"] == [[1.0, 2.0]]


def test_midpoint_ex6_fixture_pair(capsys):
    code, out, _ = run(capsys, "midpoint", "--space", "ex6", "[0,1]", "[3.141592653589793,-1]")
    assert code == 0
    assert "status: multiple" in out and "not isolated" in out


def test_double_flat_example(capsys):
    code, out, _ = run(capsys, "double", "--space", "euclidean:1", "1", "2", "3")
    assert code == 0
    assert "solution 0 4 2" in out


def test_double_even_count_rejected(capsys):
    code, _, err = run(capsys, "double", "--space", "euclidean:2", "[0,0]", "[1,1]")
    assert code == 2 and "odd" in err


def test_double_hyperbolic_criterion(capsys):
    code, payload = run_json(capsys, "double", "--space", "hyperbolic", "[0,0]", "[2,0]", "[0,2]")
    assert code == 1 and payload["status"] == "none-found"
    assert payload["det_squared"] >= 1


def test_place(capsys):
    code, payload = run_json(capsys, "place", "--space", "euclidean:2", "--vector", "[2,4]", "[1,1]")
    assert code == 0 and payload["solutions"] == [[0.0, -1.0]]
    code, payload = run_json(capsys, "place", "--space", "hyperbolic", "--vector", "[10,0]", "[0,0.5]")
    assert code == 1 and payload["status"] == "none-found"


def test_place_needs_exactly_one_element(capsys):
    assert run(capsys, "place", "--space", "euclidean:2", "[1,1]")[0] == 2


def test_unknown_space_is_usage_error(capsys):
    assert run(capsys, "midpoint", "--space", "torus", "[0]", "[1]")[0] == 2


def test_bad_point_is_usage_error(capsys):
    code, _, err = run(capsys, "midpoint", "--space", "ex5", "[0,", "[1,1]")
    assert code == 2 and "column" in err


def test_unsupported_is_inconclusive(capsys):
    assert run(capsys, "place", "--space", "sphere:2", "--matrix", "[[2,0],[0,1]]", "[0,0]")[0] in (2, 3)


def test_argparse_usage_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


# -- SVG --------------------------------------------------------------------------------


def _polylines(svg_text):
    root = ET.fromstring(svg_text)
    assert root.tag == SVG_NS + "svg"
    return root.findall(f".//{SVG_NS}polyline")


def test_plot_svg_one_polyline(capsys):
    code, out, _ = run(capsys, "plot", "--space", "hyperbolic", "[0,0]", "[1,0]", "[0,1]")
    assert code == 0
    assert len(_polylines(out)) == 1


def test_double_svg_one_polyline_per_polygon(capsys):
    code, out, _ = run(capsys, "double", "--space", "ex5", "--format", "svg", "[0,0]", "[1,0.5]", "[0.5,1]")
    assert code == 0
    assert len(_polylines(out)) == 2


# -- verify and determinism -------------------------------------------------------------


def test_verify_all_passes_and_is_deterministic(capsys):
    code, first, _ = run(capsys, "verify", "--format", "json")
    assert code == 0 and json.loads(first)["pass"]
    assert run(capsys, "verify", "--format", "json")[1] == first


def test_verify_tol_override_fails(capsys):
    code, payload = run_json(capsys, "verify", "ex6", "--tol", "1e-30")
    assert code == 1 and not payload["pass"]


def test_verify_single_fixture(capsys):
    code, payload = run_json(capsys, "verify", "ex5.json")
    assert code == 0 and "ex5.json" in payload["results"]


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "symspace.cli", "double", "--space", "euclidean:1", "1", "2", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "0 4 2" in proc.stdout
