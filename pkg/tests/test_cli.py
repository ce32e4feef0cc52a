import json

import pytest

from xisp.cli import main


def _run(argv, capsys):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def vec(tmp_path):
    def write(entries, name="v.json"):
        p = tmp_path / name
        p.write_text(json.dumps({"entries": [[str(k), str(c)] for k, c in entries]}))
        return str(p)
    return write


def test_tnorm_of_a_unit_vector(vec, capsys):
    assert _run(["tnorm", vec([(4, 1)])], capsys) == (0, {"value": "1"})


def test_tnorm_batch_keeps_order_in_parallel(vec, capsys):
    a, b = vec([(4, 1)], "a.json"), vec([(2, 3), (3, "-1/2")], "b.json")
    code, out = _run(["tnorm", a, b, "--jobs", "2"], capsys)
    assert code == 0
    assert [o["value"] for o in out] == ["1", "3"]


def test_norm_certificate_output(vec, capsys):
    code, out = _run(["norm", vec([(3, 1), (4, 1), (5, 1)]), "--budget", "2,2,4"], capsys)
    assert code == 0
    assert out["budget"] == "2,2,4"
    assert out["config"]["mode"] == "scaled"
    assert "/" in out["lower"] or out["lower"].isdigit()


def test_malformed_input_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = _run(["tnorm", str(bad)], capsys)
    assert code == 2 and out["error"] == "malformed"
    code, _ = _run(["norm", str(bad), "--budget", "0,1,1"], capsys)
    assert code == 2


def test_infeasible_exits_three(capsys):
    code, out = _run(["scc", "--n", "3", "--eps", "1/8"], capsys)
    assert code == 3 and "estimate" in out


def test_schreier_commands(vec, capsys):
    code, out = _run(["schreier", "member", "--set", "3,4,5", "--n", "1"], capsys)
    assert code == 0 and out["member"]
    code, out = _run(["schreier", "member", "--set", "2,3,4", "--n", "1"], capsys)
    assert not out["member"] and out["witness"] is None
    code, out = _run(["schreier", "maxsum", "--vector", vec([(2, 1), (3, 5), (4, 2)]), "--n", "1"], capsys)
    assert out["value"] == "7"


def test_scc_output_validates(capsys):
    code, out = _run(["scc", "--n", "2", "--eps", "1/4"], capsys)
    assert code == 0 and out["validation"] == "valid"


def test_build_session_replay_is_byte_identical(tmp_path, capsys, monkeypatch):
    outputs = []
    for name in ("one", "two"):
        d = tmp_path / name
        d.mkdir()
        monkeypatch.setenv("XISP_SESSION", str(d / "session.json"))
        out = d / "out.json"
        assert main(["build", "dependent", "--n", "2", "--out", str(out)]) == 0
        outputs.append((out.read_bytes(), (d / "session.registry.json").read_bytes()))
    assert outputs[0] == outputs[1]


def test_session_mode_mismatch_is_rejected(tmp_path, capsys):
    s = str(tmp_path / "s.json")
    assert main(["build", "exact-pair", "--n", "3", "--session", s]) == 0
    capsys.readouterr()
    code, out = _run(["build", "exact-pair", "--n", "3", "--session", s, "--mode", "faithful"], capsys)
    assert code == 2


def test_verify_reports_failure_with_exit_one(capsys):
    code, out = _run(["verify", "restriction-bound"], capsys)
    assert code == 1 and not out["passed"]


def test_verify_success(capsys):
    code, out = _run(["verify", "three-bar-sandwich"], capsys)
    assert code == 0 and out["passed"]


def test_unknown_suite(capsys):
    code, out = _run(["verify", "nope"], capsys)
    assert code == 2
