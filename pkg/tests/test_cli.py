import json

import pytest

from negdep.cli import main, EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE


def write_json(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def distribution_file(tmp_path, points, name="d.json"):
    p = f"1/{len(points)}"
    data = {"number_mode": "rational", "atoms": [{"x": list(x), "p": p} for x in points]}
    return write_json(tmp_path / name, data)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture(autouse=True)
def clear_mode_env(monkeypatch):
    monkeypatch.delenv("NEGDEP_NUM_MODE", raising=False)


class TestCheck:
    def test_antithetic_is_negative_dependent(self, tmp_path, capsys):
        path = distribution_file(tmp_path, [(0, 1), (1, 0)])
        code, report = run(capsys, ["check", path])
        assert code == EXIT_OK
        assert report["status"] == "ok"
        assert report["command"] == "check"
        assert report["config"]["number_mode"] == "rational"
        assert report["result"]["verdicts"]["NA"]["status"] == "holds"

    def test_comonotone_exits_with_negative_verdict(self, tmp_path, capsys):
        path = distribution_file(tmp_path, [(0, 0), (1, 1)])
        code, report = run(capsys, ["check", path])
        assert code == EXIT_NEGATIVE
        assert report["status"] == "negative"
        assert report["result"]["verdicts"]["NCD"]["status"] == "fails"

    def test_gaussian_model(self, tmp_path, capsys):
        path = write_json(tmp_path / "model.json", {"cov": [[1, -1], [-1, 1]]})
        code, report = run(capsys, ["check", path])
        assert code == EXIT_OK
        assert report["result"]["gaussian"]["holds"]

    def test_missing_file(self, tmp_path, capsys):
        code = main(["check", str(tmp_path / "absent.json")])
        assert code == EXIT_ERROR
        assert "FileNotFoundError" in capsys.readouterr().err

    def test_save_dir(self, tmp_path, capsys):
        path = distribution_file(tmp_path, [(0, 1), (1, 0)])
        code, report = run(capsys, ["check", path, "--save-dir", str(tmp_path / "out")])
        assert code == EXIT_OK
        assert (tmp_path / "out").is_dir()
        assert report["result"]["saved_to"]


def test_conditional_structure(tmp_path, capsys):
    path = distribution_file(tmp_path, [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)])
    code, report = run(capsys, ["conditional-na", path, "--no-cross-check"])
    assert code == EXIT_OK
    assert report["config"]["options"]["no_cross_check"] == "True"


class TestConstructGaussian:
    def test_valid_variances(self, capsys):
        code, report = run(capsys, ["construct-gaussian", "--variances", "2,1,1"])
        assert code == EXIT_OK
        assert report["result"]["trace"]["order"] == [1, 2, 0]

    def test_rational_mode(self, capsys):
        code, report = run(capsys, ["--mode", "rational", "construct-gaussian", "--variances", "1,1,1,1"])
        assert code == EXIT_OK
        assert report["result"]["trace"]["cov"][0][1] == "-1/3"
        assert report["config"]["number_mode"] == "rational"

    def test_precondition_fails(self, capsys):
        assert main(["construct-gaussian", "--variances", "3,1,1"]) == EXIT_ERROR

    def test_bad_list(self, capsys):
        assert main(["construct-gaussian", "--variances", ","]) == EXIT_ERROR


def test_jm_cov3_invalid_is_negative(capsys):
    code, report = run(capsys, ["--mode", "rational", "jm-cov3", "--variances", "5,1,1"])
    assert code == EXIT_NEGATIVE
    assert report["status"] == "negative"


def test_jm_feasible(tmp_path, capsys):
    law = {"support": [0, 1], "probs": ["1/2", "1/2"]}
    path = write_json(tmp_path / "m.json", {"number_mode": "rational", "marginals": [law, law]})
    code, report = run(capsys, ["jm-feasible", path])
    assert code == EXIT_OK
    assert report["result"]["jointly_mixable"]
    assert report["result"]["center"] == "1"


def test_ot_solve(tmp_path, capsys):
    law = {"support": [-1, 0, 1], "probs": ["1/3", "1/3", "1/3"]}
    path = write_json(tmp_path / "m.json", {"number_mode": "rational", "marginals": [law] * 3})
    code, report = run(capsys, ["ot-solve", "--marginals", path, "--uncertainty", "all"])
    assert code == EXIT_OK
    assert report["result"]["value"] == "2/3"
    assert report["config"]["inputs"] == [path]


def test_verify_optimality(capsys):
    code, report = run(capsys, ["verify-optimality", "--support=-1,0,1", "--n", "3"])
    assert code == EXIT_OK
    assert report["result"]["holds"]
    assert report["result"]["checks"][0]["value"] == "2/3"


def test_sample_is_reproducible(tmp_path, capsys):
    path = write_json(tmp_path / "model.json", {"cov": [[1, -1], [-1, 1]]})
    _, first = run(capsys, ["sample", path, "--count", "20", "--seed", "5"])
    _, second = run(capsys, ["sample", path, "--count", "20", "--seed", "5"])
    assert len(first["result"]["samples"]) == 20
    assert first["result"]["samples"] == second["result"]["samples"]
    assert first["config"]["seed"] == 5
    assert first["result"]["sum_std"] == pytest.approx(0.0, abs=1e-9)


def test_output_file(tmp_path, capsys):
    target = tmp_path / "reports" / "report.json"
    code = main(["-o", str(target), "construct-gaussian", "--variances", "2,1,1"])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    report = json.loads(target.read_text(encoding="utf-8"))
    assert report["status"] == "ok"
    assert report["config"]["output"] == str(target)


def test_usage_error_exits_with_one():
    with pytest.raises(SystemExit) as exc:
        main(["construct-gaussian"])
    assert exc.value.code == EXIT_ERROR


def test_conditional_alias(tmp_path, capsys):
    path = distribution_file(tmp_path, [(0, 1), (1, 0)])
    code, report = run(capsys, ["theorem1", path])
    assert code == EXIT_OK
    assert report["result"]["status"] == "applies"
    assert report["result"]["consistent"]


def test_verify_optimality_alias(capsys):
    code, report = run(capsys, ["verify-thm-opt", "--support=-1,0,1", "--n", "3"])
    assert code == EXIT_OK
    assert report["result"]["checks"][0]["value"] == "2/3"


def test_explore_ncd_uses_requested_cost(tmp_path, capsys):
    law = {"support": [-1, 0, 1], "probs": ["1/3", "1/3", "1/3"]}
    path = write_json(tmp_path / "m.json", {"number_mode": "rational", "marginals": [law] * 3})
    code, report = run(capsys, ["ot-solve", "--marginals", path, "--cost", "var", "--explore-ncd"])
    assert code == EXIT_OK
    assert report["result"]["minimizer"]["cost"] == {"kind": "variance"}
    assert report["result"]["value"] == "2/3"
    assert report["result"]["ncd_attains"]


def test_explore_ncd_rejects_unknown_cost(tmp_path):
    law = {"support": [-1, 1], "probs": ["1/2", "1/2"]}
    path = write_json(tmp_path / "m.json", {"number_mode": "rational", "marginals": [law] * 2})
    assert main(["ot-solve", "--marginals", path, "--cost", "convex", "--explore-ncd"]) == EXIT_ERROR
