import json
import subprocess
import sys

A2_JOB = {
    "schema": 1,
    "potential": {"n_vars": 1, "terms": [[[3], "1/3"]]},
    "n_max": 4,
    "h_order": 6,
    "t_order": 3,
}


def run_cli(*args, timeout=600):
    return subprocess.run(
        [sys.executable, "-m", "bvcorr.cli", *args],
        capture_output=True,
        timeout=timeout,
    )


def write_job(tmp_path, doc, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_basis_command(tmp_path):
    path = write_job(tmp_path, A2_JOB)
    r = run_cli("basis", "--input", path)
    assert r.returncode == 0
    assert b"dimension 2" in r.stdout
    assert b"x" in r.stdout


def test_basis_quartic(tmp_path):
    doc = dict(A2_JOB, potential={"n_vars": 1, "terms": [[[4], "1/4"]]})
    path = write_job(tmp_path, doc)
    r = run_cli("basis", "--input", path)
    assert r.returncode == 0
    assert b"dimension 3" in r.stdout


def test_non_isolated_rejeted(tmp_path):
    doc = dict(A2_JOB, potential={"n_vars": 2, "terms": [[[2, 1], "1"]]})
    path = write_job(tmp_path, doc)
    r = run_cli("basis", "--input", path)
    assert r.returncode == 2
    assert b"non-isolated" in r.stderr


def test_invalid_schema_rejected(tmp_path):
    path = write_job(tmp_path, {"schema": 2})
    r = run_cli("basis", "--input", path)
    assert r.returncode == 2


def test_two_variable_splitting_rejected(tmp_path):
    # isolated singularity, but the shipped splitting homotopy fails its
    # side-condition verification in two variables: rejected, not computed
    doc = dict(
        A2_JOB,
        potential={"n_vars": 2, "terms": [[[3, 0], "1/3"], [[0, 3], "1/3"]]},
    )
    path = write_job(tmp_path, doc)
    assert run_cli("basis", "--input", path).returncode == 0  # Milnor layer fine
    r = run_cli("solve", "--input", path)
    assert r.returncode == 2


def test_solve_and_json_bundle(tmp_path):
    path = write_job(tmp_path, A2_JOB)
    out = tmp_path / "bundle.json"
    r = run_cli("solve", "--input", path, "--json", str(out), "--audit")
    assert r.returncode == 0
    assert b"anomaly-free: True" in r.stdout
    bundle = json.loads(out.read_text())
    assert bundle["anomaly_free"] is True
    assert bundle["reports"]["level-zero"]["ok"] is True
    assert "audit" in bundle
    # machine table agrees with a human line
    assert bundle["tables"]["mhat"]["3"]["x,x,x"] == {"1": {"h^0": "-1"}}
    assert b"[x,x,x] -> (-1)*[1]" in r.stdout


def test_solve_byte_stable(tmp_path):
    path = write_job(tmp_path, A2_JOB)
    r1 = run_cli("solve", "--input", path)
    r2 = run_cli("solve", "--input", path)
    assert r1.stdout == r2.stdout
    assert r1.returncode == r2.returncode == 0


def test_fault_injection_exits_3(tmp_path):
    path = write_job(tmp_path, A2_JOB)
    r = run_cli("solve", "--input", path, "--inject-fault")
    assert r.returncode == 3
    assert b"FAIL" in r.stdout


def test_resource_cap_exits_4(tmp_path):
    path = write_job(tmp_path, dict(A2_JOB, n_max=9))
    r = run_cli("solve", "--input", path)
    assert r.returncode == 4


def test_fmanifold_command(tmp_path):
    path = write_job(tmp_path, A2_JOB)
    r = run_cli("fmanifold", "--input", path)
    assert r.returncode == 0
    assert b"check wdvv: pass" in r.stdout
    assert b"PDE sign resolution: plus" in r.stdout
    assert b"check generating-function: pass" in r.stdout


def test_fmanifold_iota_validation(tmp_path):
    doc = dict(A2_JOB, iota=["1", "5"])
    path = write_job(tmp_path, doc)
    r = run_cli("fmanifold", "--input", path)
    assert r.returncode == 0
    bad = dict(A2_JOB, iota=["2", "0"])
    r = run_cli("fmanifold", "--input", write_job(tmp_path, bad, "bad.json"))
    assert r.returncode == 2


def test_threads_flag_accepted(tmp_path):
    path = write_job(tmp_path, A2_JOB)
    r = run_cli("basis", "--input", path, "--threads", "4")
    assert r.returncode == 0


def test_outputs_filter(tmp_path):
    doc = dict(A2_JOB, outputs=["mhat"])
    path = write_job(tmp_path, doc)
    r = run_cli("solve", "--input", path)
    assert r.returncode == 0
    assert b"mhat (on-shell products)" in r.stdout
    assert b"pi0 (iterated correlation products)" not in r.stdout
    bad = dict(A2_JOB, outputs=["nope"])
    r = run_cli("solve", "--input", write_job(tmp_path, bad, "b.json"))
    assert r.returncode == 2


def test_fmanifold_byte_stable(tmp_path):
    path = write_job(tmp_path, A2_JOB)
    r1 = run_cli("fmanifold", "--input", path)
    r2 = run_cli("fmanifold", "--input", path)
    assert r1.stdout == r2.stdout
    assert r1.returncode == r2.returncode == 0
