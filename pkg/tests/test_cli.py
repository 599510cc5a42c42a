"""Command-line front end."""

from __future__ import annotations

import json
import shutil

import pytest
from conftest import DATA

from pqec.circuit import load
from pqec.cli import EXIT_EQUIVALENT, EXIT_NOT_EQUIVALENT, EXIT_USAGE, main


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_equal_files(capsys):
    code, out, _ = run(capsys, "check", DATA / "qaoa3.pqasm", DATA / "qaoa3.pqasm")
    assert code == EXIT_EQUIVALENT
    assert out.startswith("EquivalentSymbolic at ZX")


def test_commuted_rz_json(capsys):
    code, out, _ = run(capsys, "check", DATA / "commuted_rz_a.pqasm", DATA / "commuted_rz_b.pqasm", "--format", "json")
    assert code == EXIT_NOT_EQUIVALENT
    obj = json.loads(out)
    assert obj["stage"] == "RandomRun" and obj["verdict"] == "NonEquivalent"
    assert obj["config"]["runs"] == 2 and obj["config"]["seed"] == 0


def test_seed_env_is_recorded(capsys, monkeypatch):
    monkeypatch.setenv("PQEC_SEED", "9")
    _, out, _ = run(capsys, "check", DATA / "commuted_rz_a.pqasm", DATA / "commuted_rz_b.pqasm", "--format", "json")
    assert json.loads(out)["seed"] == 9


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", tmp_path / "nope.pqasm", DATA / "qaoa3.pqasm")
    assert code == EXIT_USAGE and "error" in err


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.pqasm"
    bad.write_text("qubits 1;\nfoo q[0];\n")
    code, _, err = run(capsys, "check", bad, bad)
    assert code == EXIT_USAGE and f"{bad}:2:1:" in err


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check", "--runs"])
    assert info.value.code == EXIT_USAGE


def test_negative_runs(capsys):
    code, _, _ = run(capsys, "check", DATA / "qaoa3.pqasm", DATA / "qaoa3.pqasm", "--runs", "-1")
    assert code == EXIT_USAGE


def test_trace_self_pair(capsys):
    code, out, _ = run(capsys, "trace", DATA / "qaoa3.pqasm", DATA / "qaoa3.pqasm")
    assert code == EXIT_EQUIVALENT
    assert out.rstrip().endswith("identity reached")


def test_trace_gadget_cancel_shows_gadget_then_lc(capsys):
    code, out, _ = run(capsys, "trace", DATA / "gadget_cancel.pqasm", DATA / "empty2.pqasm")
    rules = [line.split()[0] for line in out.splitlines()]
    assert "unary_gadget" in rules and "lc" in rules[rules.index("unary_gadget") :]
    # what remains is a parameter-free Clifford, so the pair is not equivalent
    assert code == EXIT_NOT_EQUIVALENT and rules[-1] == "residual"


def test_trace_inconclusive(capsys):
    code, out, _ = run(capsys, "trace", DATA / "commuted_rz_a.pqasm", DATA / "commuted_rz_b.pqasm")
    assert code == EXIT_NOT_EQUIVALENT
    assert out.splitlines()[-1].startswith("residual spiders: ")


def test_gen_and_check(capsys, tmp_path):
    code, _, _ = run(capsys, "gen", "--family", "TwoLocalRY", "-n", "4", "--layers", "2", "--entanglement", "full", "--out", tmp_path / "eq")
    assert code == 0
    manifest = json.loads((tmp_path / "eq" / "manifest.json").read_text())
    assert manifest["ground_truth"] == "equivalent" and manifest["errors"] == []
    code, _, _ = run(capsys, "check", tmp_path / "eq" / "original.pqasm", tmp_path / "eq" / "compiled.pqasm")
    assert code == EXIT_EQUIVALENT

    code, _, _ = run(capsys, "gen", "-n", "4", "--flip-prob", "1", "--seed", "3", "--out", tmp_path / "bad")
    manifest = json.loads((tmp_path / "bad" / "manifest.json").read_text())
    assert manifest["ground_truth"] == "not_equivalent" and manifest["errors"]
    code, _, _ = run(capsys, "check", tmp_path / "bad" / "original.pqasm", tmp_path / "bad" / "compiled.pqasm")
    assert code == EXIT_NOT_EQUIVALENT


def test_instantiate(capsys, tmp_path):
    src = tmp_path / "q.pqasm"
    shutil.copy(DATA / "qaoa3.pqasm", src)
    code, out, _ = run(capsys, "instantiate", src, "--set", "theta=0", "--set", "gamma=1/2*pi")
    assert code == 0
    c = load_text(out, tmp_path)
    assert c.count("rzz") == 0 and c.count("rx") == 3 and not c.params
    sigma = tmp_path / "s.json"
    sigma.write_text(json.dumps({"values": {"theta": "pi", "gamma": 0.5}}))
    code, out, _ = run(capsys, "instantiate", src, "--assignment", sigma)
    assert code == 0 and load_text(out, tmp_path).count("rzz") == 3


def test_instantiate_unbound(capsys):
    code, _, err = run(capsys, "instantiate", DATA / "qaoa3.pqasm", "--set", "theta=0")
    assert code == EXIT_USAGE and "gamma" in err


def load_text(text: str, tmp_path):
    p = tmp_path / "out.pqasm"
    p.write_text(text)
    return load(p)


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        main(["check", "--help"])
    out = capsys.readouterr().out
    for flag in ("--runs", "--seed", "--allow-output-permutation", "--dense-limit", "--stimuli", "--tol", "--format", "--timeout-per-stage"):
        assert flag in out
