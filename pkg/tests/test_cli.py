"""
End-to-end tests through the command-line entry point
"""

import json

import pytest

from src.cli import EXIT_ANALYTIC_FAILURE, EXIT_INPUT_ERROR, EXIT_OK, main
from src.main import run_bounds
from src.utils.study_io import load_study


@pytest.fixture(autouse=True)
def quiet_environment(monkeypatch):
    monkeypatch.delenv("UNITSELECT_FORMAT", raising=False)
    monkeypatch.setattr("src.config.Config.SHOW_PROGRESS", False)


def _run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def _write(path, document) -> str:
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


CORRUPTED_STUDY = {
    "benefit_vector": {"complier": 1, "always_taker": -1, "never_taker": -1, "defier": -1},
    "groups": [
        {
            "id": "ok",
            "experimental": {"counts": {"treated_n": 750, "treated_y": 450, "control_n": 750, "control_y": 225}},
        },
        {
            "id": "corrupted",
            "experimental": {"probabilities": {"p_y_do_x": 0.9, "p_y_do_xp": 0.1}},
            "observational": {"probabilities": {"xy": 0.05, "xyp": 0.5, "xpy": 0.05, "xpyp": 0.4}},
        },
    ],
}


class TestBounds:

    def test_vaccine_experimental(self, capsys, inputs_dir):
        code, report = _run_json(capsys, "bounds", "--input", str(inputs_dir / "vaccine_experimental.json"))
        assert code == EXIT_OK
        estimates = {row["group_id"]: row["estimate"] for row in report["groups"]}
        assert estimates["c1"] == pytest.approx(-0.1, abs=1e-12)
        assert estimates["c2"] == pytest.approx(0.1, abs=1e-12)
        assert [entry["group_id"] for entry in report["ranking"]] == ["c2", "c1"]
        assert report["groups"][0]["sigma"] == 2.0
        assert not report["groups"][0]["gain_equality"]
        assert not report["groups"][0]["ab_expressible"]

    def test_with_observational(self, capsys, inputs_dir):
        code, report = _run_json(capsys, "bounds", "--input", str(inputs_dir / "vaccine_with_observational.json"))
        assert code == EXIT_OK
        c2 = next(row for row in report["groups"] if row["group_id"] == "c2")
        assert c2["estimate"] == pytest.approx(0.35, abs=1e-12)
        assert c2["l"] == pytest.approx(0.65, abs=1e-12)

    def test_gain_equal_override(self, capsys, inputs_dir):
        code, report = _run_json(
            capsys, "bounds", "--input", str(inputs_dir / "vaccine_experimental.json"),
            "--benefit-vector", "1,0,0,-1",
        )
        assert code == EXIT_OK
        assert [row["estimate"] for row in report["groups"]] == pytest.approx([0.3, 0.4], abs=1e-12)
        for row in report["groups"]:
            assert row["point_identified"]
            assert row["ab_expressible"]
            assert row["ab_heuristic"] == {"a": 1.0, "b": 1.0}

    def test_preset_override(self, capsys, inputs_dir):
        code, report = _run_json(
            capsys, "bounds", "--input", str(inputs_dir / "vaccine_experimental.json"),
            "--preset", "increased_customers",
        )
        assert code == EXIT_OK
        assert report["benefit_vector"] == {"beta": 1.0, "gamma": 0.0, "theta": 0.0, "delta": -1.0}

    def test_json_matches_api(self, capsys, inputs_dir):
        path = str(inputs_dir / "vaccine_with_observational.json")
        _, report = _run_json(capsys, "bounds", "--input", path)
        api = run_bounds(load_study(path))
        for parsed, row in zip(report["groups"], api.groups):
            for field in ("sigma", "w", "l", "u", "lower", "upper", "estimate"):
                assert parsed[field] == getattr(row, field)

    def test_estimator_choice(self, capsys, inputs_dir):
        _, report = _run_json(
            capsys, "bounds", "--input", str(inputs_dir / "vaccine_experimental.json"), "--estimator", "lower",
        )
        assert [row["estimate"] for row in report["groups"]] == pytest.approx([-0.4, -0.2], abs=1e-12)

    def test_table_output(self, capsys, inputs_dir):
        code = main(["bounds", "--input", str(inputs_dir / "vaccine_experimental.json"), "--format", "table"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "Ranking: c2 > c1" in out
        assert "[-0.4, 0.2]" in out

    def test_format_from_environment(self, capsys, monkeypatch, inputs_dir):
        monkeypatch.setenv("UNITSELECT_FORMAT", "json")
        assert main(["bounds", "--input", str(inputs_dir / "vaccine_experimental.json")]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["command"] == "bounds"

    def test_incompatible_group(self, capsys, tmp_path):
        path = _write(tmp_path / "corrupted.json", CORRUPTED_STUDY)
        code, report = _run_json(capsys, "bounds", "--input", path)
        assert code == EXIT_ANALYTIC_FAILURE
        assert report["incompatible_groups"] == ["corrupted"]
        bad = report["groups"][1]
        assert not bad["compatible"]
        assert bad["violations"]
        assert [entry["group_id"] for entry in report["ranking"]] == ["ok"]

    def test_schema_error_names_path(self, capsys, tmp_path):
        doc = json.loads(json.dumps(CORRUPTED_STUDY))
        doc["groups"][0]["experimental"]["counts"]["treated_y"] = -3
        code = main(["bounds", "--input", _write(tmp_path / "bad.json", doc)])
        assert code == EXIT_INPUT_ERROR
        assert "groups[0].experimental.counts.treated_y" in capsys.readouterr().err

    def test_missing_file(self, capsys, tmp_path):
        assert main(["bounds", "--input", str(tmp_path / "absent.json")]) == EXIT_INPUT_ERROR

    def test_save_dir(self, capsys, tmp_path, inputs_dir):
        code = main([
            "bounds", "--input", str(inputs_dir / "vaccine_experimental.json"), "--save-dir", str(tmp_path),
        ])
        assert code == EXIT_OK
        saved = list(tmp_path.glob("unitselect_bounds_*.json"))
        assert len(saved) == 1


class TestCompare:

    def test_vaccine_disagreement(self, capsys, inputs_dir):
        code, report = _run_json(
            capsys, "compare", "--input", str(inputs_dir / "vaccine_experimental.json"), "--ab", "1,1",
        )
        assert code == EXIT_OK
        rows = {row["group_id"]: row for row in report["groups"]}
        assert rows["c1"]["heuristic_value"] == pytest.approx(0.3, abs=1e-12)
        assert rows["c1"]["heuristic_decision"] is True
        assert rows["c1"]["benefit_decision"] is False
        assert rows["c1"]["disagreement"] is True
        assert rows["c2"]["disagreement"] is False
        assert report["disagreements"] == 1
        assert report["benefit_gap"] == {
            "complier": 0.0, "always_taker": -1.0, "never_taker": -1.0, "defier": 0.0,
        }

    def test_matching_heuristic_never_disagrees(self, capsys, inputs_dir):
        code, report = _run_json(
            capsys, "compare", "--input", str(inputs_dir / "car_increased_customers.json"), "--ab", "1,1",
        )
        assert code == EXIT_OK
        assert report["disagreements"] == 0

    def test_empty_heuristic(self, capsys, inputs_dir):
        _, report = _run_json(
            capsys, "compare", "--input", str(inputs_dir / "vaccine_experimental.json"), "--ab", "0,0",
        )
        assert all(row["heuristic_value"] == 0.0 for row in report["groups"])

    def test_table_summary(self, capsys, inputs_dir):
        main(["compare", "--input", str(inputs_dir / "vaccine_experimental.json"), "--ab", "1,1", "--format", "table"])
        out = capsys.readouterr().out
        assert "DISAGREE" in out
        assert "Disagreements: 1 of 2 group(s)" in out

    @pytest.mark.parametrize("value", ["1", "a,b", "nan,1", "1,2,3"])
    def test_bad_heuristic(self, capsys, inputs_dir, value):
        code = main(["compare", "--input", str(inputs_dir / "vaccine_experimental.json"), "--ab", value])
        assert code == EXIT_INPUT_ERROR


class TestSimulate:

    def test_vaccine_arms_exact(self, capsys, tmp_path, inputs_dir):
        out = tmp_path / "study.json"
        code = main([
            "simulate", "--truth", str(inputs_dir / "vaccine_truth.json"),
            "--n-per-arm", "750", "--exact", "--out", str(out),
        ])
        assert code == EXIT_OK
        doc = json.loads(out.read_text(encoding="utf-8"))
        counts = {g["id"]: g["experimental"]["counts"] for g in doc["groups"]}
        assert (counts["c1"]["treated_y"], counts["c1"]["control_y"]) == (450, 225)
        assert (counts["c2"]["treated_y"], counts["c2"]["control_y"]) == (525, 225)
        assert all("observational" not in g for g in doc["groups"])
        assert doc["metadata"]["exact"] is True

    def test_pipeline_on_simulated_counts(self, capsys, tmp_path, inputs_dir):
        out = tmp_path / "study.json"
        main([
            "simulate", "--truth", str(inputs_dir / "vaccine_truth.json"),
            "--n-per-arm", "750", "--exact", "--out", str(out),
        ])
        _, report = _run_json(capsys, "bounds", "--input", str(out), "--preset", "increased_customers")
        assert [row["estimate"] for row in report["groups"]] == pytest.approx([0.3, 0.4], abs=1e-12)

    def test_confounded_observational_counts(self, capsys, tmp_path, inputs_dir):
        out = tmp_path / "study.json"
        code = main([
            "simulate", "--truth", str(inputs_dir / "vaccine_truth_confounded.json"),
            "--n-per-arm", "750", "--n-obs", "360", "--exact", "--out", str(out),
        ])
        assert code == EXIT_OK
        doc = json.loads(out.read_text(encoding="utf-8"))
        c2 = next(g for g in doc["groups"] if g["id"] == "c2")
        assert c2["observational"]["counts"] == {"xy": 5, "xyp": 95, "xpy": 13, "xpyp": 247}

    def test_seeded_runs_are_byte_identical(self, capsys, tmp_path, inputs_dir):
        paths = []
        for name, workers in (("a.json", "1"), ("b.json", "1"), ("c.json", "3")):
            path = tmp_path / name
            code = main([
                "simulate", "--truth", str(inputs_dir / "vaccine_truth.json"),
                "--n-per-arm", "500", "--n-obs", "300", "--seed", "7",
                "--workers", workers, "--out", str(path),
            ])
            assert code == EXIT_OK
            paths.append(path)
        first = paths[0].read_bytes()
        assert all(path.read_bytes() == first for path in paths[1:])
        assert json.loads(first)["metadata"]["seed"] == 7

    def test_stdout(self, capsys, inputs_dir):
        code = main(["simulate", "--truth", str(inputs_dir / "vaccine_truth.json"), "--n-per-arm", "10", "--seed", "1"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["groups"]) == 2

    def test_truth_without_benefit_vector(self, capsys, tmp_path):
        truth = _write(tmp_path / "truth.json", {"groups": [{
            "id": "g",
            "response_types": {"complier": 1.0, "always_taker": 0.0, "never_taker": 0.0, "defier": 0.0},
        }]})
        assert main(["simulate", "--truth", truth, "--n-per-arm", "10"]) == EXIT_INPUT_ERROR
        assert main(["simulate", "--truth", truth, "--n-per-arm", "10", "--preset", "increased_customers"]) == EXIT_OK

    def test_invalid_arm_size(self, capsys, inputs_dir):
        assert main(["simulate", "--truth", str(inputs_dir / "vaccine_truth.json"), "--n-per-arm", "0"]) == EXIT_INPUT_ERROR


class TestVerify:

    def test_vaccine_passes(self, capsys, inputs_dir):
        code, report = _run_json(
            capsys, "verify", "--input", str(inputs_dir / "vaccine_with_observational.json"), "--grid-step", "0.05",
        )
        assert code == EXIT_OK
        assert [row["verdict"] for row in report["groups"]] == ["PASS", "PASS"]
        assert report["failures"] == 0
        assert report["groups"][0]["tolerance"] == pytest.approx(0.4)

    def test_incompatible_study(self, capsys, tmp_path):
        code, report = _run_json(capsys, "verify", "--input", _write(tmp_path / "corrupted.json", CORRUPTED_STUDY))
        assert code == EXIT_ANALYTIC_FAILURE
        assert [row["verdict"] for row in report["groups"]] == ["PASS", "INCOMPATIBLE"]

    def test_point_identified_range(self, capsys, inputs_dir):
        code, report = _run_json(
            capsys, "verify", "--input", str(inputs_dir / "vaccine_experimental.json"),
            "--preset", "increased_customers", "--match-tolerance", "1e-9",
        )
        assert code == EXIT_OK
        for row in report["groups"]:
            assert row["brute_force_max"] - row["brute_force_min"] <= row["tolerance"]

    @pytest.mark.parametrize("step", ["0", "0.5", "abc"])
    def test_bad_grid_step(self, capsys, inputs_dir, step):
        code = main(["verify", "--input", str(inputs_dir / "vaccine_experimental.json"), "--grid-step", step])
        assert code == EXIT_INPUT_ERROR


class TestDecompose:

    def test_heuristic(self, capsys):
        code, report = _run_json(capsys, "decompose", "--ab", "45000,50000")
        assert code == EXIT_OK
        assert report["gain_equality"] is True
        assert report["response_type_weights"] == {
            "complier": 45000.0, "always_taker": -5000.0, "never_taker": 0.0, "defier": -50000.0,
        }
        assert report["ab_heuristic"] == {"a": 45000.0, "b": 50000.0}

    def test_preset_without_heuristic(self, capsys):
        code, report = _run_json(capsys, "decompose", "--preset", "nonimmediate_profit")
        assert code == EXIT_OK
        assert report["gain_equality"] is False
        assert report["ab_heuristic"] is None
        assert report["sigma"] == 2000.0

    def test_table(self, capsys):
        assert main(["decompose", "--benefit-vector", "1,-1,-1,-1", "--format", "table"]) == EXIT_OK
        assert "A/B representation: none" in capsys.readouterr().out

    def test_requires_a_source(self, capsys):
        assert main(["decompose"]) == EXIT_INPUT_ERROR
