import json
import math

import numpy as np
import pytest

from renyi_bounds.cli import main
from renyi_bounds.divergences import RHO1, TAU, d_sandwiched
from renyi_bounds.markov import markov_product
from renyi_bounds.linalg import random_density
from renyi_bounds.serialization import dump_state


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_divergence_builtin(capsys):
    code, out, _ = run(capsys, "compute", "d_sandwiched", "--input", "builtin:TAU", "--sigma", "builtin:RHO1",
                       "--alpha", "1.5")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(d_sandwiched(TAU, RHO1, 1.5), rel=1e-14)


def test_compute_alpha_domain(capsys):
    code, _, err = run(capsys, "compute", "d_sandwiched", "--input", "builtin:TAU", "--sigma", "builtin:RHO1",
                       "--alpha", "0.3")
    assert code == 2 and "domain" in err


def test_compute_cond_entropy_identity(capsys, tmp_path):
    p = tmp_path / "i4.json"
    dump_state(p, np.eye(4) / 4, (2, 2))
    code, out, _ = run(capsys, "compute", "cond_entropy_up", "--input", str(p), "--alpha", "2")
    res = json.loads(out)
    assert code == 0 and res["converged"]
    assert res["value"] == pytest.approx(math.log(2), abs=1e-12)
    assert len(res["witness"]) == 2


def test_compute_kernel_violation(capsys, tmp_path):
    p = tmp_path / "pure.json"
    dump_state(p, np.diag([1.0, 0.0]), (2,))
    code, _, _ = run(capsys, "compute", "d_sandwiched", "--input", "builtin:TAU", "--sigma", str(p), "--alpha", "2")
    assert code == 2


@pytest.mark.parametrize("content", ["{bad", json.dumps({"matrix": [[1, 0]]})])
def test_compute_parse_error(capsys, tmp_path, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code, _, _ = run(capsys, "compute", "cond_entropy_up", "--input", str(p), "--alpha", "2")
    assert code == 3


def test_missing_file_and_bad_builtin(capsys):
    assert run(capsys, "compute", "cond_entropy_up", "--input", "/nonexistent.json", "--alpha", "2")[0] == 3
    assert run(capsys, "compute", "cond_entropy_up", "--input", "builtin:NOPE", "--alpha", "2")[0] == 3
    assert run(capsys, "nonsense")[0] == 3


def test_compute_bound_matches_sweep(capsys):
    code, out, _ = run(capsys, "compute", "bound", "--alpha", "2", "--epsilon", "0.01", "--d-a", "2",
                       "--approach", "mixed")
    v = json.loads(out)["value"]
    code2, csv_text, _ = run(capsys, "sweep", "--alpha", "2", "--epsilon", "0.01", "--dims", "2")
    assert code == code2 == 0
    row = csv_text.strip().splitlines()[1].split(",")
    assert float(row[5]) == pytest.approx(v, rel=1e-11)


def test_compute_markov_gap_and_inf(capsys, tmp_path, rng):
    rho, dims = markov_product(random_density(2, seed=rng), random_density(4, seed=rng), (2, 2))
    p = tmp_path / "mc.json"
    dump_state(p, rho, dims)
    code, out, _ = run(capsys, "compute", "markov_gap", "--input", str(p))
    assert code == 0 and json.loads(out)["value"] < 1e-8
    code, out, _ = run(capsys, "compute", "max_cmi", "--input", str(p))
    assert code == 0 and abs(json.loads(out)["value"]) < 1e-5


def test_sweep_to_file_formats(capsys, tmp_path):
    grid = tmp_path / "g.json"
    grid.write_text(json.dumps({"alphas": [1.1, 20], "eps": [0.01], "dims": [2]}))
    out = tmp_path / "s.csv"
    assert run(capsys, "sweep", "--grid", str(grid), "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "alpha,eps,d_a,axiomatic,operator_space,mixed,winner"
    assert lines[1].endswith("axiomatic") and lines[2].endswith("operator_space")
    assert run(capsys, "sweep", "--grid", str(grid), "--out", str(tmp_path / "s.json"), "--format", "json")[0] == 0
    assert json.loads((tmp_path / "s.json").read_text())["columns"][-1] == "winner"


def test_counterexample_command(capsys, tmp_path):
    code, out, _ = run(capsys, "counterexample", "--out", str(tmp_path / "c.json"))
    assert code == 0
    assert "petz chain" in out and "holds" in out and "6.12339404686" in out
    rep = json.loads((tmp_path / "c.json").read_text())
    assert rep["holds"] and rep["matrices"]["TAU"][0][1] == [0.49, 0.0]


def test_verify_pass_and_negative_control(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "verify", "divergence-laws", "--trials", "10", "--out", str(out))
    assert code == 0 and "PASS" in text
    code, text, _ = run(capsys, "verify", "divergence-laws", "--trials", "50", "--corrupt", "--out", str(out))
    assert code == 1
    rep = json.loads(out.read_text())
    failing = [c for c in rep["checks"] if not c["passed"]]
    assert failing and failing[0]["witness"] is not None


def test_verify_flag_validation(capsys):
    assert run(capsys, "verify", "alaff", "--alpha", "2")[0] == 2


def test_markov_command(capsys, tmp_path, rng):
    rho, dims = markov_product(random_density(2, seed=rng), random_density(4, seed=rng), (2, 2))
    p = tmp_path / "mc.json"
    dump_state(p, rho, dims)
    code, out, _ = run(capsys, "markov", "--input", str(p), "--alpha", "2", "--cert-param", "0.125")
    res = json.loads(out)
    assert code == 0 and res["holds"] and abs(res["cmi_value"]) < 1e-7
    assert run(capsys, "markov", "--input", str(p), "--alpha", "2", "--cert-param", "0.4")[0] == 2


def test_threads_env(monkeypatch):
    from renyi_bounds.verify import max_workers
    monkeypatch.setenv("RENYI_THREADS", "1")
    assert max_workers() == 1
