import json
import subprocess
import sys
import warnings

import numpy as np
import pytest

from fdivot import io
from fdivot.cli import EXIT_FAILED, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, main
from fdivot.errors import InputError
from fdivot.instances import random_problem

BENCH = {"marginal_x": [0.5, 0.5], "marginal_y": [0.5, 0.5], "cost": [[0, 1], [1, 0]], "lambda": 1.0}


@pytest.fixture
def bench_file(tmp_path):
    path = tmp_path / "bench.json"
    path.write_text(json.dumps(BENCH))
    return path


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


class TestJson:
    def test_problem_round_trip(self, tmp_path, rng):
        prob = random_problem(rng, 4, 3, lam=0.37)
        io.write_json(io.problem_to_dict(prob), tmp_path / "p.json")
        back = io.read_problem(tmp_path / "p.json")
        np.testing.assert_array_equal(back.cost, prob.cost)
        np.testing.assert_array_equal(back.px, prob.px)
        assert back.lam == prob.lam

    def test_special_floats(self):
        assert io.dumps([1.0, float("inf"), -float("inf"), 3]) == "[1.0, Infinity, -Infinity, 3]\n"
        assert json.loads(io.dumps({"a": 0.1})) == {"a": 0.1}

    def test_small_drift_is_renormalized(self):
        doc = dict(BENCH, marginal_x=[0.5, 0.5 + 1e-8])
        with pytest.warns(UserWarning, match="renormalizing"):
            prob = io.problem_from_dict(doc)
        assert prob.px.sum() == pytest.approx(1.0, abs=1e-15)

    def test_exact_sum_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            io.problem_from_dict(BENCH)

    def test_large_drift_rejected(self):
        with pytest.raises(InputError, match="marginal_y"):
            io.problem_from_dict(dict(BENCH, marginal_y=[0.5, 0.51]))

    @pytest.mark.parametrize("field", ["marginal_x", "marginal_y", "cost", "lambda"])
    def test_missing_field_named(self, field):
        doc = {k: v for k, v in BENCH.items() if k != field}
        with pytest.raises(InputError, match=field):
            io.problem_from_dict(doc)

    def test_bad_cost_shape(self):
        with pytest.raises(InputError, match="shape"):
            io.problem_from_dict(dict(BENCH, cost=[[0, 1, 2], [1, 0, 2]]))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{not json")
        with pytest.raises(InputError, match="invalid JSON"):
            io.read_json(path)


class TestCli:
    def test_solve_benchmark(self, bench_file, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert main(["solve", "--problem", str(bench_file), "--divergence", "kl", "--out", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["primal"] == pytest.approx(0.3798855, abs=1e-6)
        assert doc["converged"] is True
        assert doc["generator"] == "kl"
        assert "out" not in doc["manifest"]

    def test_solve_to_stdout_and_csv(self, bench_file, tmp_path, capsys):
        csv_path = tmp_path / "joint.csv"
        assert main(["solve", "--problem", str(bench_file), "--csv", str(csv_path)]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        joint = np.loadtxt(csv_path, delimiter=",")
        np.testing.assert_array_equal(joint, np.array(doc["joint"]))

    def test_solve_alpha(self, bench_file, capsys):
        assert main(["solve", "--problem", str(bench_file), "--divergence", "alpha:0.5"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["generator"] == "alpha:0.5"
        assert np.array(doc["joint"]).sum() == pytest.approx(1.0)

    def test_lambda_override(self, bench_file, capsys):
        assert main(["solve", "--problem", str(bench_file), "--lambda", "0.25"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["lambda"] == 0.25
        assert doc["manifest"]["lambda_override"] == 0.25

    def test_missing_cost_exits_one(self, tmp_path, capsys):
        path = _write(tmp_path, "bad.json", {k: v for k, v in BENCH.items() if k != "cost"})
        assert main(["solve", "--problem", path]) == EXIT_INPUT
        assert "cost" in capsys.readouterr().err

    def test_missing_file_exits_one(self, tmp_path, capsys):
        assert main(["solve", "--problem", str(tmp_path / "none.json")]) == EXIT_INPUT
        assert "not found" in capsys.readouterr().err

    def test_unknown_divergence_exits_one(self, bench_file, capsys):
        assert main(["solve", "--problem", str(bench_file), "--divergence", "chi2"]) == EXIT_INPUT

    def test_non_convergence_exits_two(self, tmp_path, capsys):
        prob = random_problem(4, 8, 8, lam=0.05)
        path = tmp_path / "p.json"
        io.write_json(io.problem_to_dict(prob), path)
        assert main(["solve", "--problem", str(path), "--max-iters", "1"]) == EXIT_NOT_CONVERGED
        assert json.loads(capsys.readouterr().out)["converged"] is False

    def test_transform_benchmark(self, bench_file, capsys):
        assert main(["transform", "--problem", str(bench_file), "--from", "kl", "--to", "reverse_kl"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["cost"][0][0] == pytest.approx(0.6839397, abs=1e-7)
        assert doc["cost"][0][1] == pytest.approx(1.8591409, abs=1e-7)
        assert doc["admissible_for_target"] is True
        # the output is itself a valid problem file
        io.problem_from_dict(doc)

    def test_transform_from_prior_result(self, bench_file, tmp_path, capsys):
        res = tmp_path / "r.json"
        main(["solve", "--problem", str(bench_file), "--out", str(res)])
        argv = ["transform", "--problem", str(bench_file), "--from", "kl", "--to", "jensen_shannon"]
        assert main(argv + ["--potentials", str(res)]) == EXIT_OK
        via_file = json.loads(capsys.readouterr().out)
        assert main(argv) == EXIT_OK
        inline = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(via_file["cost"], inline["cost"], atol=1e-12)

    def test_equivalence_passes(self, bench_file, capsys):
        assert main(["equivalence", "--problem", str(bench_file), "--from", "kl", "--to", "hellinger_sq"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["passed"] is True
        assert doc["max_joint_discrepancy"] <= 1e-6

    def test_equivalence_inconclusive(self, tmp_path, capsys):
        # the symmetric benchmark converges in one sweep, so use a stiff instance
        path = tmp_path / "p.json"
        io.write_json(io.problem_to_dict(random_problem(4, 8, 8, lam=0.05)), path)
        argv = ["equivalence", "--problem", str(path), "--from", "kl", "--to", "reverse_kl"]
        assert main(argv + ["--max-iters", "1"]) == EXIT_NOT_CONVERGED
        assert json.loads(capsys.readouterr().out)["inconclusive"] is True

    def test_exit_code_constants(self):
        assert (EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_FAILED) == (0, 1, 2, 3)

    def test_gen_is_reproducible(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert main(["gen", "--seed", "7", "--n", "5", "--m", "6", "--lambda", "0.3", "--out", str(path)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        prob = io.read_problem(a)
        assert prob.shape == (5, 6)
        assert main(["solve", "--problem", str(a), "--divergence", "jensen_shannon"]) == EXIT_OK

    def test_gen_seeds_differ(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["gen", "--seed", "1", "--n", "3", "--m", "3", "--out", str(a)])
        main(["gen", "--seed", "2", "--n", "3", "--m", "3", "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()

    def test_divergence(self, tmp_path, capsys):
        p = _write(tmp_path, "p.json", [0.75, 0.25])
        q = _write(tmp_path, "q.json", {"q": [0.5, 0.5]})
        assert main(["divergence", "--p", p, "--q", q, "--divergence", "kl"]) == EXIT_OK
        text = capsys.readouterr().out.strip()
        assert text == "0.130812035941"
        assert main(["divergence", "--p", p, "--q", q, "--divergence", "reverse_kl"]) == EXIT_OK
        assert float(capsys.readouterr().out) == pytest.approx(0.1438410, abs=1e-7)

    def test_divergence_shape_mismatch(self, tmp_path, capsys):
        p = _write(tmp_path, "p.json", [0.5, 0.5])
        q = _write(tmp_path, "q.json", [0.2, 0.3, 0.5])
        assert main(["divergence", "--p", p, "--q", q]) == EXIT_INPUT

    def test_module_entry_point(self, bench_file):
        proc = subprocess.run(
            [sys.executable, "-m", "fdivot", "solve", "--problem", str(bench_file)],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["converged"] is True
