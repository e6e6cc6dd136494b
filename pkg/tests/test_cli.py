import json

import pytest

from banachgap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_gen_writes_graph(tmp_path, capsys):
    code, out = run(capsys, "gen", "--gen", "cycle:6", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "graph.edges").read_text().startswith("6 6")
    assert json.loads(out)["n"] == 6


def test_gap_exact_hamming(tmp_path, capsys):
    code, out = run(capsys, "gap", "--gen", "hamming:3", "--p", "2", "--out", str(tmp_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == 2.0
    assert payload["bound_kind"] == "exact"
    assert (tmp_path / "gap.json").exists()


def test_gap_estimate_and_minimizer_dump(tmp_path, capsys):
    code, out = run(
        capsys, "gap", "--gen", "cycle:5", "--p", "1.5", "--restarts", "6", "--out", str(tmp_path), "--dump-minimizer"
    )
    assert code == 0
    assert json.loads(out)["bound_kind"] == "upper"
    lines = (tmp_path / "minimizer.csv").read_text().strip().splitlines()
    assert len(lines) == 6  # header + 5 vertices


def test_gap_oracle_method(capsys):
    code, out = run(capsys, "gap", "--gen", "complete:3", "--p", "2", "--method", "oracle", "--resolution", "1e-3")
    assert code == 0
    assert abs(json.loads(out)["value"] - 3.0) < 1e-2


def test_gap_reads_file(tmp_path, capsys):
    run(capsys, "gen", "--gen", "complete:4", "--out", str(tmp_path))
    code, out = run(capsys, "gap", "--file", str(tmp_path / "graph.edges"), "--p", "2")
    assert code == 0
    assert json.loads(out)["value"] == 4.0


def test_gap_reproducible_bytes(tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    run(capsys, "gap", "--gen", "random_regular:12,3", "--p", "1.5", "--seed", "9", "--out", str(a))
    run(capsys, "gap", "--gen", "random_regular:12,3", "--p", "1.5", "--seed", "9", "--out", str(b))
    assert (a / "gap.json").read_bytes() == (b / "gap.json").read_bytes()


def test_kappa_subcommand(capsys):
    code, out = run(capsys, "kappa", "--group", "cyclic:6", "--p", "2", "--nu", "1")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["kappa"]["value"] - 1.0) < 1e-3
    assert payload["sandwich"]["lower_ok"] and payload["sandwich"]["upper_ok"]


def test_gross_subcommand(tmp_path, capsys):
    code, out = run(capsys, "gross", "--gen", "complete:3", "--verify", "--out", str(tmp_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["verified"] and payload["factors"] == 2
    assert (tmp_path / "action.txt").exists()
    assert (tmp_path / "provenance.json").exists()


def test_distort_subcommand(capsys):
    code, out = run(capsys, "distort", "--gen", "hamming:3", "--p", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["certified"]
    assert abs(payload["jv_lower"] - payload["upper"]) < 1e-9


def test_distort_family_sweep(tmp_path, capsys):
    code, out = run(capsys, "distort", "--gen", "hamming", "--family", "2:4", "--p", "2", "--out", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "family.csv").read_text().strip().splitlines()
    assert lines[0] == "n,diam,gn_lower,jv_lower,upper,target_order"
    assert len(lines) == 4
    rows = json.loads(out)
    assert all(abs(r["jv_lower"] - r["upper"]) < 1e-9 for r in rows)


def test_mazur_subcommand(tmp_path, capsys):
    code, out = run(capsys, "mazur", "--p", "4", "--pairs", "5000", "--out", str(tmp_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["violations"] == 0
    assert (tmp_path / "modulus.csv").exists()


def test_verify_fast_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "fast", "--seed", "1")
    assert code == 0
    assert "PASS" in out and "criteria passed" in out


def test_verify_rejects_unknown_ids(capsys):
    with pytest.raises(SystemExit):
        main(["verify", "--suite", "nope"])


def test_error_exit_code(capsys):
    code = main(["gap", "--gen", "cycle:5", "--p", "0.5"])
    assert code == 1


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2
