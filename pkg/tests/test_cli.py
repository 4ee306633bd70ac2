import pytest

from robustqmf import cli


def test_minfind_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "trials.csv"
    rc = cli.main(["minfind-run", "--algo", "pivot-qmf", "--n", "32", "--delta", "0",
                   "--trials", "5", "--seed", "1", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# robustqmf-trials")
    assert len(lines) == 7


def test_minfind_run_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("algorithm=pivot-qmf\nkind=grid\nn=24\ntarget_delta=1\n"
                   "adversary=mark-all-below\ndelta_prob=0.1\ntrials=3\nbase_seed=5\n")
    out = tmp_path / "trials.csv"
    rc = cli.main(["minfind-run", "--algo", "robust", "--config", str(cfg),
                   "--out", str(out)])
    assert rc == 0
    body = out.read_text()
    assert "pivot-qmf" in body and "mark-all-below" in body


def test_minfind_run_rejects_bad_config(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("algorithm=pivot-qmf\nwho=me\n")
    with pytest.raises(ValueError):
        cli.main(["minfind-run", "--algo", "robust", "--config", str(cfg)])


def test_scaling_command(tmp_path):
    out = tmp_path / "scaling.csv"
    rc = cli.main(["scaling", "--algo", "pivot-qmf", "--sizes", "16,32,64,128",
                   "--trials", "4", "--seed", "2", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.startswith("n,mean_quantum_queries")
    assert "# slope=" in text


def test_hypothesis_command(tmp_path):
    out = tmp_path / "hyp.csv"
    rc = cli.main(["hypothesis", "--generate", "gridded", "--n", "31", "--domain", "32",
                   "--trials", "3", "--seed", "4", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5


def test_verify_grover_command(tmp_path):
    out = tmp_path / "grover.csv"
    rc = cli.main(["verify-grover", "--max-size", "8", "--max-iters", "4",
                   "--out", str(out)])
    assert rc == 0
    assert out.read_text().startswith("size,t,g,analytic,reference,abs_error")


def test_verify_grover_tolerance_failure(tmp_path):
    rc = cli.main(["verify-grover", "--max-size", "8", "--max-iters", "3",
                   "--tolerance", "0", "--out", str(tmp_path / "g.csv")])
    assert rc == 1


def test_accept_single_criterion_json_summary(tmp_path):
    import json

    summary = tmp_path / "summary.json"
    rc = cli.main(["accept", "--only", "1", "--summary", str(summary)])
    assert rc == 0
    payload = json.loads(summary.read_text())
    assert len(payload) == 1
    assert payload[0]["number"] == 1
    assert payload[0]["passed"] is True
