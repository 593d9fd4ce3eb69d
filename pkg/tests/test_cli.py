import hashlib
import json

import pytest

from main import main


def run(capsys, *argv):
    code = main(["--quiet", *argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out else None, err


# ═══════════════════════════════════════════════════════════════════
# check
# ═══════════════════════════════════════════════════════════════════


class TestCheck:

    def test_two_point(self, capsys, fixture_dir):
        path = fixture_dir / "two_point.json"
        code, report, _ = run_json(capsys, "check", str(path))
        assert code == 0
        assert report["command"] == "check"
        assert report["input_digest"] == hashlib.sha256(path.read_bytes()).hexdigest()
        assert report["sections"]["summary"] == {"states": 2, "properties": 4, "passed": True}
        assert all(row["passed"] for row in report["sections"]["ortho"])

    def test_missing_top(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "check", str(fixture_dir / "missing_top.json"))
        assert code == 2
        failed = [row for row in report["sections"]["axioms"] if not row["passed"]]
        assert failed[0]["axiom"] == "axiom1"
        assert "axiom1" in report["witnesses"]

    def test_duplicate_closed_set(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "check", str(fixture_dir / "duplicate_closed_set.json"))
        assert code == 2
        assert report["witnesses"] == {"axiom3": ["{p,q}"]}
        failed = [row["axiom"] for row in report["sections"]["axioms"] if not row["passed"]]
        assert failed == ["axiom3"]

    def test_truncated_json(self, capsys, fixture_dir):
        code, out, err = run(capsys, "check", str(fixture_dir / "truncated.json"))
        assert code == 1
        assert out == ""
        assert "Parse error" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "check", str(tmp_path / "nope.json"))
        assert code == 1
        assert "Cannot read" in err

    def test_unknown_state(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"states": ["p"], "closed_sets": [["p"], ["z"]]}))
        code, _, _ = run(capsys, "check", str(path))
        assert code == 1

    def test_lattice_document(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "check", str(fixture_dir / "pentagon.json"))
        assert code == 0
        assert report["sections"]["lattice"]["elements"] == 5

    def test_model_config(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "check", str(fixture_dir / "icosahedron_eps1.json"))
        assert code == 0
        assert report["sections"]["summary"]["properties"] == 14


# ═══════════════════════════════════════════════════════════════════
# analyze
# ═══════════════════════════════════════════════════════════════════


class TestAnalyze:

    def test_fano_topological(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--topological", str(fixture_dir / "fano.json"))
        assert code == 0
        section = report["sections"]["topological"]
        assert len(section["topological"]) == 2
        assert not section["all_topological"]
        assert not section["t_classical"]
        assert section["t_classical_system"]["states"] == [section["topological"][-1]]
        assert len(report["witnesses"]["not_topological"]) == 14

    def test_sierpinski_all_topological(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--topological", str(fixture_dir / "sierpinski.json"))
        assert code == 0
        assert report["sections"]["topological"]["all_topological"]
        assert report["sections"]["topological"]["t_classical"]

    def test_mo2_classical_and_thm3(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--classical", "--thm3", str(fixture_dir / "mo2.json"))
        assert code == 0
        assert len(report["sections"]["classical"]["classical"]) == 2
        assert report["sections"]["classical"]["totally_nonclassical"]
        assert report["sections"]["thm3"]["holds"]

    def test_classical_needs_ortho(self, capsys, fixture_dir):
        code, _, err = run(capsys, "analyze", "--classical", str(fixture_dir / "fano.json"))
        assert code == 2
        assert "orthocomplementation" in err

    def test_pentagon_has_no_ortho(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--ortho-search", str(fixture_dir / "pentagon.json"))
        assert code == 2
        assert report["sections"]["ortho_search"]["count"] == 0
        assert report["sections"]["ortho_search"]["verdict"] == "no orthocomplementation exists"

    def test_ortho_search_on_sps(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--ortho-search", "--classical", str(fixture_dir / "mo2.json"))
        assert code == 0
        assert report["sections"]["ortho_search"]["count"] == 3

    def test_size_cap_exceeded(self, capsys, fixture_dir):
        code, _, err = run(capsys, "--size-cap", "4", "analyze", "--ortho-search", str(fixture_dir / "mo2.json"))
        assert code == 2
        assert "cap" in err

    def test_prop2_condition_fails_on_fano(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--prop2", str(fixture_dir / "fano.json"))
        assert code == 0
        section = report["sections"]["prop2"]
        assert section["unconditional_holds"]
        assert not section["condition_holds"]
        assert "prop2_condition" in report["witnesses"]

    def test_coverage_two_point(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--coverage", str(fixture_dir / "two_point.json"))
        assert code == 0
        section = report["sections"]["coverage"]
        assert section["topological"]["kind"] == "partition"
        assert section["same_structure"]

    def test_axiom_failure(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "analyze", "--topological", str(fixture_dir / "missing_top.json"))
        assert code == 2
        assert "axioms" in report["sections"]


# ═══════════════════════════════════════════════════════════════════
# decompose
# ═══════════════════════════════════════════════════════════════════


class TestDecompose:

    def test_mixed_sum(self, capsys, fixture_dir, tmp_path):
        code, report, _ = run_json(capsys, "decompose", "--out-dir", str(tmp_path),
                                   str(fixture_dir / "mo2_plus_two_point.json"))
        assert code == 0
        summands = report["sections"]["decomposition"]["summands"]
        assert sorted(x["states"] for x in summands) == [1, 1, 4]
        assert all(x["totally_nonclassical"] for x in summands)
        for x in summands:
            written = tmp_path / x["file"]
            assert written.exists()
            code, _, _ = run(capsys, "check", str(written))
            assert code == 0

    def test_needs_ortho(self, capsys, fixture_dir, tmp_path):
        code, _, _ = run(capsys, "decompose", "--out-dir", str(tmp_path), str(fixture_dir / "fano.json"))
        assert code == 2

    def test_duplicate_closed_set(self, capsys, fixture_dir, tmp_path):
        code, report, _ = run_json(capsys, "decompose", "--out-dir", str(tmp_path),
                                   str(fixture_dir / "duplicate_closed_set.json"))
        assert code == 2
        row = next(r for r in report["sections"]["axioms"] if r["axiom"] == "axiom3")
        assert row["witness"] == ["{p,q}"]
        assert list(tmp_path.iterdir()) == []


# ═══════════════════════════════════════════════════════════════════
# model
# ═══════════════════════════════════════════════════════════════════


class TestModel:

    def test_build_round_trip(self, capsys, tmp_path):
        out = tmp_path / "pair.json"
        code, report, _ = run_json(capsys, "model", "build", "--preset", "pair", "--output", str(out))
        assert code == 0
        assert report["sections"]["model"] == {"states": 2, "properties": 4, "tests": 2}
        written = json.loads(out.read_text())
        assert written == report["sections"]["document"]
        code, report, _ = run_json(capsys, "check", str(out))
        assert code == 0

    def test_build_bad_epsilon(self, capsys):
        code, _, err = run(capsys, "model", "build", "--epsilon", "2")
        assert code == 1
        assert err

    def test_simulate_csv(self, capsys):
        argv = ["model", "simulate", "--theta", "0", "60", "90", "180", "--epsilon", "1",
                "--n", "20000", "--seed", "5", "--format", "csv"]
        code, out, _ = run(capsys, *argv)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "epsilon,d,direction_index,theta,trials,up_count,analytic_probability"
        assert len(lines) == 5
        probabilities = [float(line.split(",")[-1]) for line in lines[1:]]
        assert probabilities == pytest.approx([1.0, 0.75, 0.5, 0.0])
        _, again, _ = run(capsys, *argv)
        assert again == out

    def test_simulate_seed_in_report(self, capsys):
        code, report, _ = run_json(capsys, "model", "simulate", "--n", "100", "--seed", "11")
        assert code == 0
        assert report["seed"] == 11
        assert report["sections"]["rows"][0]["up_count"] == 100

    def test_simulate_bad_spec(self, capsys):
        code, _, _ = run(capsys, "model", "simulate", "--epsilon", "0.8", "--d", "0.5")
        assert code == 2

    def test_sweep_csv(self, capsys):
        code, out, _ = run(capsys, "model", "sweep", "--preset", "cube", "--eps", "1", "0", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "epsilon,closed_sets,topological,defect,t_classical"
        assert lines[1].startswith("1.0,10,")

    def test_sweep_endpoints(self, capsys):
        code, report, _ = run_json(capsys, "model", "sweep", "--preset", "icosahedron",
                                   "--d-resolution", "3", "--eps", "1", "0.05")
        assert code == 0
        assert report["sections"]["endpoints"] == {"defect_first": 66, "defect_last": 0, "defect_decreases": True}

    def test_sweep_config_grid(self, capsys, tmp_path):
        path = tmp_path / "cube.json"
        path.write_text(json.dumps({"preset": "cube", "d_grid": [-0.5, 0.0, 0.5]}))
        code, explicit, _ = run_json(capsys, "model", "sweep", "--config", str(path), "--eps", "1", "0.5")
        assert code == 0
        _, uniform, _ = run_json(capsys, "model", "sweep", "--preset", "cube", "--d-resolution", "3",
                                 "--eps", "1", "0.5")
        assert explicit["sections"]["rows"] == uniform["sections"]["rows"]

    def test_sweep_ascending(self, capsys):
        code, _, _ = run(capsys, "model", "sweep", "--eps", "0", "1")
        assert code == 2

    def test_counterexample_cube(self, capsys):
        code, report, _ = run_json(capsys, "model", "counterexample", "--preset", "cube")
        assert code == 0
        section = report["sections"]["counterexample"]
        assert section["found"]
        assert (section["union_size"], section["join_size"]) == (5, 8)
        assert {"a_u", "b_u", "join"} <= set(report["witnesses"])

    def test_counterexample_config_file(self, capsys, fixture_dir):
        code, report, _ = run_json(capsys, "model", "counterexample",
                                   "--config", str(fixture_dir / "icosahedron_eps0.json"))
        assert code == 0
        assert report["sections"]["counterexample"]["join_size"] == 12

    def test_counterexample_pair(self, capsys):
        code, report, _ = run_json(capsys, "model", "counterexample", "--preset", "pair")
        assert code == 2
        assert report["sections"]["counterexample"]["verdict"] == "insufficient sample"

    def test_counterexample_octahedron(self, capsys):
        code, _, err = run(capsys, "model", "counterexample", "--preset", "octahedron")
        assert code == 2
        assert "equator" in err

    def test_config_must_be_a_model(self, capsys, fixture_dir):
        code, _, _ = run(capsys, "model", "build", "--config", str(fixture_dir / "fano.json"))
        assert code == 1


# ═══════════════════════════════════════════════════════════════════
# fixture and usage
# ═══════════════════════════════════════════════════════════════════


class TestFixture:

    @pytest.mark.parametrize("name", ["mo2", "mo2+two-point", "fano", "pentagon", "mo2-lattice"])
    def test_written_fixture_checks(self, capsys, tmp_path, name):
        out = tmp_path / "fixture.json"
        code, _, _ = run(capsys, "fixture", name, "--output", str(out))
        assert code == 0
        code, _, _ = run(capsys, "check", str(out))
        assert code == 0

    def test_output_is_deterministic(self, capsys):
        _, first, _ = run(capsys, "fixture", "mo3")
        _, second, _ = run(capsys, "fixture", "mo3")
        assert first == second


class TestUsage:

    def test_missing_command(self):
        with pytest.raises(SystemExit) as e:
            main([])
        assert e.value.code == 1

    def test_unknown_fixture(self):
        with pytest.raises(SystemExit) as e:
            main(["fixture", "dodecahedron"])
        assert e.value.code == 1

    def test_bad_size_cap(self):
        with pytest.raises(SystemExit) as e:
            main(["--size-cap", "0", "check", "x.json"])
        assert e.value.code == 1
