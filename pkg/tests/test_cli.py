import json
import shutil

import pytest

from nilforge.cli import main
from nilforge.fixtures import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_timings(obj):
    if isinstance(obj, dict):
        return {k: strip_timings(v) for k, v in obj.items()
                if k != "timings_ms"}
    if isinstance(obj, list):
        return [strip_timings(v) for v in obj]
    return obj


@pytest.fixture()
def uv_path(tmp_path):
    dst = tmp_path / "uv.json"
    shutil.copy(str(fixture_path("uv")), dst)
    return str(dst)


def test_milnor_command(capsys):
    code, out, _ = run(capsys, "milnor", "--poly", "X^5+X^2*Y^2+Y^4")
    assert code == 0
    data = json.loads(out)
    assert data["dim"] == 9
    assert data["nil_index"] == 5
    assert data["tool"] == "nilforge"
    assert "input_sha256" in data and "version" in data


def test_milnor_text_format(capsys):
    code, out, _ = run(capsys, "milnor", "--poly", "X^3+Y^3+Z^3+X*Y*Z",
                       "--format", "text")
    assert code == 0
    assert "dim 7, nil index 3" in out


def test_report_is_deterministic(capsys, tmp_path):
    code1, out1, _ = run(capsys, "milnor", "--poly", "X^4+X*Y^2+Y^3+X*Z^2")
    code2, out2, _ = run(capsys, "milnor", "--poly", "X^4+X*Y^2+Y^3+X*Z^2")
    assert code1 == code2 == 0
    assert strip_timings(json.loads(out1)) == strip_timings(json.loads(out2))


def test_verify_and_invariants_pipeline(capsys, tmp_path):
    code, out, _ = run(capsys, "milnor", "--poly", "X^4+X*Y^2+Y^3+X*Z^2")
    algebra = json.loads(out)["algebra"]
    apath = tmp_path / "dim8.json"
    apath.write_text(json.dumps(algebra))
    code, out, _ = run(capsys, "verify", "--input", str(apath))
    assert code == 0
    assert json.loads(out)["associative"]
    code, out, _ = run(capsys, "invariants", "--input", str(apath))
    assert code == 0
    data = json.loads(out)
    assert data["hilbert"] == [1, 3, 3, 1, 1]
    assert not data["hilbert_symmetric"]


def test_reconstruct_regenerate_roundtrip(capsys, uv_path, tmp_path):
    with open(uv_path, "rb") as fh:
        original = fh.read()
    code, out, _ = run(capsys, "reconstruct", "--input", uv_path)
    assert code == 0
    recon = json.loads(out)
    assert recon["accepted"] and recon["dim"] == 9
    apath = tmp_path / "alg.json"
    apath.write_text(json.dumps({"algebra": recon["algebra"]}))
    code, out, _ = run(capsys, "regenerate", "--input", str(apath))
    assert code == 0
    data = json.loads(out)
    regenerated = {"poly": data["poly"], "vars": data["vars"]}
    assert json.dumps(regenerated, indent=2, sort_keys=True) + "\n" == \
        original.decode("utf-8")


def test_regenerate_accepts_nilpoly_input(capsys, uv_path):
    code, out, _ = run(capsys, "regenerate", "--input", uv_path)
    assert code == 0
    original = json.loads(open(uv_path).read())
    assert json.loads(out)["poly"] == original["poly"]


def test_homogeneity_command_uv(capsys, uv_path):
    code, out, _ = run(capsys, "homogeneity", "--input", uv_path)
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "AH"
    assert data["cross_check"] is True
    assert all(data["per_ell"])


def test_homogeneity_checkpoint_stream(capsys, uv_path):
    code, out, err = run(capsys, "homogeneity", "--input", uv_path,
                         "--checkpoint", "--no-cross-check")
    assert code == 0
    assert err.count("solvable=True") == 8


def test_grading_command(capsys, tmp_path):
    code, out, _ = run(capsys, "milnor", "--poly", "X^4+X*Y^2+Y^3+X*Z^2")
    algebra = json.loads(out)["algebra"]
    apath = tmp_path / "alg.json"
    apath.write_text(json.dumps(algebra))
    code, out, _ = run(capsys, "nilpoly", "--input", str(apath))
    assert code == 0
    ppath = tmp_path / "p.json"
    ppath.write_text(json.dumps({"vars": json.loads(out)["vars"],
                                 "poly": json.loads(out)["poly"]}))
    code, out, _ = run(capsys, "grading", "--input", str(ppath))
    assert code == 0
    assert json.loads(out)["verdict"] == "not_gradable"
    code, out, _ = run(capsys, "jacobi", "--input", str(ppath),
                       "--degree", "3", "--search")
    assert code == 0
    assert json.loads(out)["found"]


def test_derivations_command(capsys, tmp_path):
    code, out, _ = run(capsys, "milnor", "--poly", "X^3+Y^3+Z^3+X*Y*Z")
    apath = tmp_path / "e6.json"
    apath.write_text(json.dumps(json.loads(out)["algebra"]))
    code, out, _ = run(capsys, "derivations", "--input", str(apath), "--aff")
    assert code == 0
    data = json.loads(out)
    assert data["bounds_hold"]
    assert data["aff_dim"] == data["dim"]


def test_smash_command(capsys, tmp_path):
    code, out, _ = run(capsys, "milnor", "--poly", "X^3+Y^3+Z^3+X*Y*Z")
    apath = tmp_path / "e6.json"
    apath.write_text(json.dumps(json.loads(out)["algebra"]))
    code, out, _ = run(capsys, "smash", "--left", str(apath),
                       "--right", str(apath))
    assert code == 0
    assert json.loads(out)["dim"] == 13


def test_family_and_witness_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "family", "--kind", "degree4",
                       "--t", "1", "--eps", "1")
    assert code == 0
    data = json.loads(out)
    assert data["phi"] == "125"
    code, out, _ = run(capsys, "family", "--kind", "e6", "--t", "2")
    assert code == 0
    e6 = json.loads(out)
    ppath = tmp_path / "e6p.json"
    ppath.write_text(json.dumps({"vars": e6["vars"], "poly": e6["poly"]}))
    # identity witness verifies against itself
    wpath = tmp_path / "w.json"
    wpath.write_text(json.dumps({
        "alpha": [[1 if i == j else 0 for j in range(6)] for i in range(6)],
        "epsilon": "1"}))
    code, out, _ = run(capsys, "witness", "--kind", "equivalence",
                       "--p", str(ppath), "--q", str(ppath),
                       "--witness", str(wpath))
    assert code == 0 and json.loads(out)["verified"]
    # corrupted scale: verdict false, exit 1
    wpath.write_text(json.dumps({
        "alpha": [[1 if i == j else 0 for j in range(6)] for i in range(6)],
        "epsilon": "2"}))
    code, out, _ = run(capsys, "witness", "--kind", "equivalence",
                       "--p", str(ppath), "--q", str(ppath),
                       "--witness", str(wpath))
    assert code == 1 and not json.loads(out)["verified"]


def test_witness_transitivity_command(capsys, tmp_path):
    code, out, _ = run(capsys, "milnor", "--poly", "X^4+X*Y^2+Y^3+X*Z^2")
    apath = tmp_path / "alg.json"
    apath.write_text(json.dumps(json.loads(out)["algebra"]))
    # log1(x) = x - x^2/2 + x^3/3 - x^4/4 lies on the hypersurface;
    # basis order is X, Y, Z, X^2, X^3, Y*Z, Z^2, X^4
    point = "1,0,0,-1/2,1/3,0,0,-1/4"
    code, out, _ = run(capsys, "witness", "--kind", "transitivity",
                       "--input", str(apath), "--point", point,
                       "--mode", "socle4")
    assert code == 0
    data = json.loads(out)
    assert data["f_preserved"] and data["maps_point_to_origin"]


def test_analyze_leading_command(capsys, uv_path):
    code, out, _ = run(capsys, "analyze-leading", "--input", uv_path)
    assert code == 0
    data = json.loads(out)
    assert data["degree"] == 5


def test_jacobi_not_found_exit_code(capsys, uv_path):
    code, out, _ = run(capsys, "jacobi", "--input", uv_path, "--degree", "0")
    assert code == 1
    assert not json.loads(out)["found"]


def test_usage_errors(capsys, tmp_path):
    assert main(["unknown-command"]) == 2
    assert main(["milnor"]) == 2          # neither --poly nor --input
    missing = str(tmp_path / "nope.json")
    assert main(["verify", "--input", missing]) == 2


def test_output_file_option(capsys, tmp_path, uv_path):
    out_path = tmp_path / "report.json"
    code, _, _ = run(capsys, "homogeneity", "--input", uv_path,
                     "--no-cross-check", "--output", str(out_path))
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["verdict"] == "AH"
