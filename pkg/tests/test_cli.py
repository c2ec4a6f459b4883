import json
import subprocess
import sys

import pytest

from hypercyl import pg
from hypercyl.cli import EXIT_FAIL, EXIT_PASS, EXIT_SKIPPED, main


@pytest.fixture(autouse=True)
def restore_guards():
    saved = dict(pg.GUARDS)
    yield
    pg.GUARDS.update(saved)


def run(tmp_path, *argv):
    code = main(["--out", str(tmp_path), *argv])
    return code


def load(path):
    with open(path) as fh:
        return json.load(fh)


def test_construct_hypercylinder(tmp_path):
    assert run(tmp_path, "construct", "hypercylinder", "--q", "4", "--r", "3") == EXIT_PASS
    obj = load(tmp_path / "hypercylinder.json")
    assert len(obj["object"]["points"]) == 24
    assert obj["config"]["params"] == {"q": 4, "r": 3}
    summ = load(tmp_path / "hypercylinder.summary.json")["summary"]
    assert summ["size"] == summ["predicted_size"] == 24


def test_construct_cone_and_construction2(tmp_path):
    assert run(tmp_path, "construct", "cone", "--q", "2", "--n", "2", "--r", "3", "--d", "2", "--h", "1") == 0
    assert load(tmp_path / "cone.summary.json")["summary"]["size"] == 13
    assert run(tmp_path, "construct", "construction2", "--q", "2", "--n", "2", "--r", "2", "--d", "2",
               "--h", "1") == 0
    s = load(tmp_path / "construction2.summary.json")["summary"]
    assert s["size"] == 6 and s["hyperoval"]


def test_construct_rejects_bad_params(tmp_path, capsys):
    assert run(tmp_path, "construct", "cone", "--q", "2", "--n", "2", "--r", "3", "--d", "2", "--h", "2") == EXIT_FAIL
    assert "error" in capsys.readouterr().err
    assert run(tmp_path, "construct", "moore", "--q", "2") == EXIT_FAIL


@pytest.mark.parametrize("argv", [
    ["ti-formula", "--q", "2", "--n", "2", "--r", "2", "--h", "1"],
    ["cone-profile", "--q", "2", "--n", "2", "--r", "3", "--d", "2", "--h", "1"],
    ["construction1-type", "--q", "2", "--n", "2", "--r", "2", "--h", "1"],
    ["construction2-type", "--q", "2", "--n", "2", "--r", "3", "--d", "2", "--h", "1"],
    ["km-plane", "--q", "4"],
    ["stability", "--q", "4", "--r", "3", "--trials", "100", "--seed", "7"],
    ["rank-duality", "--q", "2", "--n", "3", "--k", "2"],
])
def test_verify_targets_pass(tmp_path, argv):
    assert run(tmp_path, "verify", *argv) == EXIT_PASS
    rep = load(tmp_path / f"verify-{argv[0]}.json")
    assert rep["status"] == "pass" and rep["checks"]
    assert "seed" in rep["config"]


def test_verify_ti_values(tmp_path):
    run(tmp_path, "verify", "ti-formula", "--q", "2", "--n", "2", "--r", "2", "--h", "1")
    det = load(tmp_path / "verify-ti-formula.json")["checks"][0]["detail"]
    assert det["predicted"] == det["enumerated"] == [2, 3]


def test_verify_stability_records_seed(tmp_path):
    run(tmp_path, "verify", "stability", "--q", "4", "--r", "3", "--trials", "20", "--seed", "7")
    rep = load(tmp_path / "verify-stability.json")
    assert rep["config"]["seed"] == 7 and rep["config"]["params"]["trials"] == 20
    fz = [c for c in rep["checks"] if "perturbations" in c["check"]][0]
    assert fz["detail"]["rejected"] == 20


def test_verify_from_input_file(tmp_path):
    run(tmp_path, "construct", "hypercylinder", "--q", "4", "--r", "3")
    obj = load(tmp_path / "hypercylinder.json")["object"]
    inp = tmp_path / "set.json"
    inp.write_text(json.dumps(obj))
    assert run(tmp_path, "verify", "km-plane", "--input", str(inp)) == EXIT_PASS
    assert run(tmp_path, "verify", "km-plane", "--input", str(tmp_path / "hypercylinder.json")) == EXIT_PASS


def test_guard_makes_verification_skipped(tmp_path):
    code = run(tmp_path, "--max-subspaces", "3", "verify", "ti-formula", "--q", "2", "--n", "2", "--r", "2",
               "--h", "1")
    assert code == EXIT_SKIPPED
    rep = load(tmp_path / "verify-ti-formula.json")
    assert rep["status"] == "skipped"


def test_guard_ceiling_is_enforced(tmp_path, capsys):
    assert run(tmp_path, "--max-subspaces", str(10**9), "catalog") == EXIT_FAIL
    assert "ceiling" in capsys.readouterr().err


def test_code_hamming(tmp_path):
    assert run(tmp_path, "code", "hamming", "--hypercylinder", "--q", "4", "--r", "3") == EXIT_PASS
    js = load(tmp_path / "hamming.json")
    assert [js["summary"][k] for k in ("n", "k", "d")] == [24, 4, 16]
    lines = (tmp_path / "hamming.weights.csv").read_text().splitlines()
    assert lines[0].startswith("# config=") and lines[1] == "weight,count"
    assert lines[2:] == ["0,1", "16,45", "18,192", "24,18"]


def test_code_hamming_from_set(tmp_path):
    run(tmp_path, "construct", "hyperoval", "--q", "4")
    obj = load(tmp_path / "hyperoval.json")["object"]
    (tmp_path / "h.json").write_text(json.dumps(obj))
    assert run(tmp_path, "code", "hamming", "--from-set", str(tmp_path / "h.json")) == EXIT_PASS
    assert load(tmp_path / "hamming.json")["summary"]["weights"] == [4, 6]


def test_code_rank(tmp_path):
    assert run(tmp_path, "code", "rank", "--cone", "--q", "2", "--n", "3", "--r", "2", "--d", "2", "--h", "1") == 0
    s = load(tmp_path / "rank.json")["summary"]
    assert (s["length"], s["k"], s["d"]) == (3, 2, 2) and s["field"] == "8/2"
    assert run(tmp_path, "code", "rank", "--construction1", "--q", "2", "--n", "2", "--r", "2", "--d", "2",
               "--h", "1") == 0


def test_catalog_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "a_again"
    assert main(["--out", str(a), "--seed", "3", "catalog", "--grid", "small"]) == 0
    first = (a / "catalog.csv").read_bytes()
    assert main(["--out", str(a), "--seed", "3", "catalog", "--grid", "small"]) == 0
    assert (a / "catalog.csv").read_bytes() == first
    main(["--out", str(b), "--seed", "3", "catalog"])
    rows = first.decode().splitlines()
    assert rows[0].startswith("# config=") and len(rows) > 10
    cfg = json.loads(rows[0][len("# config="):])
    assert cfg["seed"] == 3 and cfg["command"] == "catalog"


def test_flags_after_subcommand(tmp_path):
    assert main(["verify", "rank-duality", "--q", "2", "--n", "2", "--k", "2", "--seed", "5",
                 "--out", str(tmp_path)]) == 0
    assert load(tmp_path / "verify-rank-duality.json")["config"]["seed"] == 5


def test_stdout_mode(capsys):
    assert main(["construct", "hyperoval", "--q", "2"]) == 0
    out = capsys.readouterr().out
    assert "hyperoval.summary.json" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hypercyl", "verify", "ti-formula", "--q", "2", "--n", "3",
                          "--r", "2", "--h", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["status"] == "pass"
