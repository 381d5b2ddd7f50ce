"""End-to-end checks of the ``wfermat`` command line interface.

Every invocation goes through ``python -m wfermat.cli`` in a subprocess so
argument parsing, stdin/stdout wiring, and exit codes are exercised exactly
as a shell user sees them.  Outputs are compared against direct library
calls to confirm the CLI is a thin adapter.
"""
import json
import math
import subprocess
import sys

import numpy as np

from wfermat.documents import parse_document, run_document, serialize


def run_cli(args, stdin_text=None):
    return subprocess.run(
        [sys.executable, "-m", "wfermat.cli", *args],
        input=stdin_text,
        capture_output=True,
        text=True,
    )


TETRA_DOC = {
    "version": "1",
    "kind": "forward",
    "geometry": {
        "points": {
            "vertices": [
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ]
        }
    },
    "parameters": {"weights": [1.0, 1.0, 1.0, 1.0]},
}


def test_solve_from_stdin_matches_library(tmp_path):
    text = json.dumps(TETRA_DOC)
    proc = run_cli(["solve"], stdin_text=text)
    assert proc.returncode == 0, proc.stderr
    expected = serialize(run_document("solve", parse_document(TETRA_DOC)))
    assert proc.stdout == expected
    # same document via --input and --output round-trips byte-identically
    inp = tmp_path / "doc.json"
    outp = tmp_path / "result.json"
    inp.write_text(text)
    proc2 = run_cli(["solve", "--input", str(inp), "--output", str(outp)])
    assert proc2.returncode == 0 and proc2.stdout == ""
    assert outp.read_text() == expected


def test_cli_is_deterministic():
    text = json.dumps(TETRA_DOC)
    outs = {run_cli(["solve"], stdin_text=text).stdout for _ in range(3)}
    assert len(outs) == 1


def test_degrees_flag_equals_document_flag():
    base = {
        "version": "1",
        "kind": "mixed-inverse",
        "geometry": {"angles": {"alpha_102": 120.0, "alpha_103": 120.0}},
        "parameters": {"c": 1.0, "residual": 1.0 / 3.0},
    }
    by_flag = run_cli(["mixed-inverse", "--degrees"], stdin_text=json.dumps(base))
    by_doc = run_cli(["mixed-inverse"], stdin_text=json.dumps(dict(base, degrees=True)))
    assert by_flag.returncode == by_doc.returncode == 0
    assert json.loads(by_flag.stdout)["output"] == json.loads(by_doc.stdout)["output"]
    weights = json.loads(by_flag.stdout)["output"]["weights"]
    assert all(abs(w - 1.0 / 3.0) < 1e-12 for w in weights)


def test_validation_errors_exit_2_with_field():
    doc = json.dumps({k: v for k, v in TETRA_DOC.items() if k != "parameters"})
    proc = run_cli(["solve"], stdin_text=doc)
    assert proc.returncode == 2
    assert proc.stdout == ""
    err = json.loads(proc.stderr)["error"]
    assert err["field"] == "parameters.weights"

    proc = run_cli(["inverse"], stdin_text=json.dumps(TETRA_DOC))
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]["field"] == "kind"

    proc = run_cli(["solve"], stdin_text="{not json")
    assert proc.returncode == 2
    assert "error" in json.loads(proc.stderr)


def test_error_exit_codes_by_family():
    # geometric validation problems exit 2 ...
    doc = {
        "version": "1",
        "kind": "mixed-inverse",
        "geometry": {
            "points": {
                "a0": [9.0, 9.0, 9.0],
                "vertices": TETRA_DOC["geometry"]["points"]["vertices"],
            }
        },
        "parameters": {"c": 1.0, "residual": 0.2},
    }
    proc = run_cli(["mixed-inverse"], stdin_text=json.dumps(doc))
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]["type"] == "NotInterior"

    # ... while an infeasible free weight is a numerical failure, exit 3
    quad = {
        "version": "1",
        "kind": "plasticity-quad",
        "geometry": {
            "points": {
                "a0": [0.0, 0.0, 0.0],
                "vertices": [[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]],
            }
        },
        "parameters": {"c": 2.0, "residual": 0.2, "b4": 5.0},
    }
    proc = run_cli(["plasticity-quad"], stdin_text=json.dumps(quad))
    assert proc.returncode == 3
    assert json.loads(proc.stderr)["error"]["type"] == "NonpositiveWeight"


def test_verify_failure_exits_3():
    doc = json.loads(json.dumps(TETRA_DOC))
    doc["kind"] = "verify"
    doc["parameters"]["expected_point"] = [0.25, 0.0, 0.0]
    proc = run_cli(["verify"], stdin_text=json.dumps(doc))
    assert proc.returncode == 3
    out = json.loads(proc.stdout)["output"]
    assert out["checks"]["expected_point_recovered"] is False
    doc["parameters"]["expected_point"] = [0.0, 0.0, 0.0]
    proc = run_cli(["verify"], stdin_text=json.dumps(doc))
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["output"]["all_checks_passed"] is True


def test_sweep_writes_csv():
    rng = np.random.default_rng(5)
    verts = [[1.2, 0.1, 0.0], [-0.2, 1.1, 0.0], [-1.3, -0.4, 0.0], [0.3, -1.2, 0.0]]
    doc = {
        "version": "1",
        "kind": "plasticity-quad",
        "geometry": {"points": {"a0": [0.0, 0.0, 0.0], "vertices": verts}},
        "parameters": {"c": 2.0, "residual": 0.3},
    }
    proc = run_cli(["plasticity-quad", "--sweep", "7"], stdin_text=json.dumps(doc))
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == "b4,w1,w2,w3,w4,a0_deviation"
    assert len(lines) == 8
    for row in lines[1:]:
        cells = [float(x) for x in row.split(",")]
        assert len(cells) == 6
        assert cells[4] == cells[0]  # w4 is the swept weight
        assert cells[5] < 1e-8
    # sample positions follow the midpoint rule on the feasible interval
    b4s = [float(row.split(",")[0]) for row in lines[1:]]
    gaps = np.diff(b4s)
    assert np.allclose(gaps, gaps[0])

    bad = dict(doc, parameters={"c": 2.0, "residual": 0.3, "b4": 0.1})
    proc2 = run_cli(["plasticity-quad", "--sweep", "0"], stdin_text=json.dumps(bad))
    assert proc2.returncode == 2


def test_angles_command_reports_roots():
    doc = {
        "version": "1",
        "kind": "angles",
        "geometry": {
            "angles": {
                "alpha_102": math.acos(-1.0 / 3.0),
                "alpha_103": math.acos(-1.0 / 3.0),
                "alpha_104": math.acos(-1.0 / 3.0),
                "alpha_203": math.acos(-1.0 / 3.0),
                "alpha_204": math.acos(-1.0 / 3.0),
                "bits": [1, -1],
            }
        },
    }
    proc = run_cli(["angles"], stdin_text=json.dumps(doc))
    assert proc.returncode == 0, proc.stderr
    pairs = json.loads(proc.stdout)["output"]["pairs"]
    roots = pairs["3,4"]["cos_roots"]
    assert min(abs(r - (-1.0 / 3.0)) for r in roots) < 1e-12
    assert max(abs(r - 1.0) for r in roots) > 0.5  # the other root is +1
    assert abs(pairs["3,4"]["resolved_cos"] - (-1.0 / 3.0)) < 1e-12
