import json

import pytest

from orthantwalks.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_flagship(capsys, flagship, model_file):
    path = model_file(flagship)
    code, out, _ = run(capsys, "analyze", path)
    assert code == 0
    doc = json.loads(out)
    assert doc["drift"] == [-1, -1, -1]
    assert doc["drift_class"] == "reluctant"
    assert doc["integer_projection"] == [1, 1, 1]
    assert doc["rho"] == pytest.approx(0.1178511301977579, abs=1e-9)
    assert doc["rng"] == "numpy.PCG64"


def test_analyze_grammar_dump(capsys, flagship, model_file):
    code, _, err = run(capsys, "analyze", model_file(flagship), "--grammar")
    assert code == 0
    assert "W =" in err


def test_analyze_invalid_model_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"steps": [{"step": [1, 0, 0]}, {"step": [0, 1, 0]}]}))
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2
    assert "span-violation" in err


def test_missing_file_exits_4(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent/model.json")
    assert code == 4


def test_sample_writes_records_and_summary(capsys, tmp_path, flagship, model_file):
    out_path = str(tmp_path / "walks.ndjson")
    code, out, _ = run(
        capsys, "sample", model_file(flagship), "--min-len", "5", "--max-len", "10",
        "--count", "7", "--seed", "3", "--out", out_path,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["counters"]["accepted"] == 7
    assert doc["seed"] == 3
    lines = [l for l in open(out_path) if l.strip()]
    assert len(lines) == 7


def test_sample_draws_seed_when_absent(capsys, flagship, model_file):
    code, out, err = run(
        capsys, "sample", model_file(flagship), "--min-len", "1", "--max-len", "5", "--count", "1"
    )
    assert code == 0
    assert "seed:" in err


def test_sample_seed_from_model_file(capsys, flagship, model_file):
    path = model_file(flagship, seed=123)
    code, out, err = run(
        capsys, "sample", path, "--min-len", "1", "--max-len", "5", "--count", "1"
    )
    assert code == 0
    assert json.loads(out)["seed"] == 123
    assert "seed:" not in err


def test_sample_exhaustion_exits_3(capsys, flagship, model_file):
    code, out, _ = run(
        capsys, "sample", model_file(flagship), "--min-len", "300", "--max-len", "305",
        "--count", "5", "--seed", "1", "--max-attempts", "100",
    )
    assert code == 3
    doc = json.loads(out)
    assert doc["error"] == "attempts-exhausted"
    assert doc["counters"]["free_draws"] == 100


def test_naive_command(capsys, flagship, model_file):
    code, out, _ = run(
        capsys, "naive", model_file(flagship), "--len", "4", "--count", "5", "--seed", "2"
    )
    assert code == 0
    assert json.loads(out)["counters"]["accepted"] == 5


def test_naive_exhaustion_exits_3(capsys, flagship, model_file):
    code, out, _ = run(
        capsys, "naive", model_file(flagship), "--len", "80", "--count", "1",
        "--seed", "2", "--max-attempts", "500",
    )
    assert code == 3


def test_verify_small(capsys, flagship, model_file):
    code, out, _ = run(
        capsys, "verify", model_file(flagship), "--length", "6", "--samples", "4000", "--seed", "5"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["p_value"] > 0.001
    assert 0 < doc["rmse"] < 0.01


def test_bench_reports_both_engines(capsys, flagship, model_file):
    code, out, _ = run(
        capsys, "bench", model_file(flagship), "--target-len", "12", "--count", "5",
        "--window", "2", "--seed", "8",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["engines"]["naive"]["accepted"] == 5
    assert doc["engines"]["boltzmann"]["accepted"] == 5
    assert doc["naive_over_boltzmann"] is not None


def _sample_records(capsys, model_file, flagship, tmp_path, count=12):
    out_path = str(tmp_path / "walks.ndjson")
    code, _, _ = run(
        capsys, "sample", model_file(flagship), "--min-len", "6", "--max-len", "10",
        "--count", str(count), "--seed", "17", "--out", out_path,
    )
    assert code == 0
    return out_path


@pytest.mark.parametrize("fmt,ext", [("csv", "csv"), ("ply", "ply"), ("obj", "obj")])
def test_export_formats(capsys, tmp_path, flagship, model_file, fmt, ext):
    records = _sample_records(capsys, model_file, flagship, tmp_path)
    out = str(tmp_path / ("walks." + ext))
    code, _, _ = run(capsys, "export", records, "--format", fmt, "--out", out)
    assert code == 0
    assert len(open(out).read()) > 0


def test_hull_command(capsys, tmp_path, flagship, model_file):
    records = _sample_records(capsys, model_file, flagship, tmp_path, count=40)
    out = str(tmp_path / "hull.obj")
    code, stdout, _ = run(capsys, "hull", records, "--step", "6", "--out", out)
    assert code == 0
    doc = json.loads(stdout)
    if "degenerate" not in doc:
        assert doc["vertices"] >= 4


def test_byte_identical_reruns(capsys, tmp_path, flagship, model_file):
    path = model_file(flagship)
    outs = []
    for name in ("a.ndjson", "b.ndjson"):
        out_path = str(tmp_path / name)
        code, _, _ = run(
            capsys, "sample", path, "--min-len", "5", "--max-len", "9",
            "--count", "10", "--seed", "31", "--out", out_path,
        )
        assert code == 0
        outs.append(open(out_path, "rb").read())
    assert outs[0] == outs[1]


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
