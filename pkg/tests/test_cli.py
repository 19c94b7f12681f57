import csv
import json
import math

import pytest

from qwlab.cli import main
from qwlab.io import read_measure_csv, read_state_csv, write_state_csv

R2 = 1 / math.sqrt(2)
EYE2 = {"entries": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
HADAMARD = {"a": [R2, 0], "b": [R2, 0], "delta_arg": math.pi}


def write_config(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def thm1_config(**extra):
    cfg = {
        "model": "thm1",
        "coins": {
            "minus": {"sigma": 0.3, "delta_arg": 0.9},
            "origin": {"a": [0.6, 0], "b": [0, 0.8], "delta_arg": 0.2},
            "plus": {"sigma": 1.7, "delta_arg": 0.9},
        },
        "boundary": {"alpha": [R2, 0], "beta": [0, R2]},
        "M": 40,
    }
    cfg.update(extra)
    return cfg


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_examples(tmp_path, capsys):
    cfg = {"model": "thm1", "coins": {"bulk": {"sigma": 0, "delta_arg": 0}, "origin": HADAMARD}}
    code, out, _ = run(capsys, "validate", "--config", write_config(tmp_path, cfg))
    assert code == 0
    lams = json.loads(out)["admissible_lambda"]
    assert [complex(*v) for v in lams] == [1, -1]

    cfg["coins"] = {
        "minus": {"sigma": 0, "delta_arg": math.pi},
        "origin": HADAMARD,
        "plus": {"sigma": 0, "delta_arg": 0},
    }
    code, _, err = run(capsys, "validate", "--config", write_config(tmp_path, cfg))
    assert code == 4 and err.startswith("error:")


def test_validate_parse_and_unitarity_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", "--config", str(bad))[0] == 2
    assert run(capsys, "validate", "--config", str(tmp_path / "missing.json"))[0] == 2
    cfg = {"model": "thm1", "coins": {"bulk": {"sigma": 0, "delta_arg": 0}, "origin": {"entries": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}}}
    assert run(capsys, "validate", "--config", write_config(tmp_path, cfg))[0] == 3
    cfg["coins"]["origin"] = {"a": [1, 0], "b": [1, 0], "delta_arg": 0}
    assert run(capsys, "validate", "--config", write_config(tmp_path, cfg))[0] == 3
    cfg["model"] = "thm9"
    assert run(capsys, "validate", "--config", write_config(tmp_path, cfg))[0] == 2


def test_evolve_identity_t5(tmp_path, capsys):
    cfg = {
        "coins": {"bulk": EYE2},
        "initial_state": {"sites": [{"x": 0, "amplitudes": [[1, 0], [0, 0]]}]},
        "t": 5,
    }
    code, out, _ = run(capsys, "evolve", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path))
    assert code == 0
    mu = read_measure_csv(tmp_path / "measure_t5.csv")
    assert [x for x, v in mu if v != 0] == [-5] and mu.at(-5) == 1


def test_evolve_t0_is_identity(tmp_path, capsys):
    cfg = {
        "coins": {"bulk": EYE2, "origin": HADAMARD},
        "initial_state": {"sites": [{"x": -1, "amplitudes": [[0.6, 0], [0, 0]]}, {"x": 1, "amplitudes": [[0, 0], [0, 0.8]]}]},
    }
    code, _, _ = run(capsys, "evolve", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path), "--t", "0")
    assert code == 0
    psi = read_state_csv(tmp_path / "state_t0.csv")
    assert psi.xmin == -1 and psi.at(-1)[0] == 0.6 and psi.at(1)[1] == 0.8j and psi.at(0).sum() == 0


def test_evolve_hadamard_norm_drift(tmp_path, capsys):
    cfg = {
        "coins": {"bulk": {"sigma": 0.4, "delta_arg": 1.0}, "origin": HADAMARD},
        "initial_state": {"sites": [{"x": 0, "amplitudes": [[R2, 0], [0, R2]]}]},
    }
    code, out, _ = run(capsys, "evolve", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path), "--t", "10")
    assert code == 0 and json.loads(out)["norm_drift"] <= 1e-12


def test_evolve_without_initial_state(tmp_path, capsys):
    assert run(capsys, "evolve", "--config", write_config(tmp_path, thm1_config()))[0] == 2


def test_stationary_thm1_diagonal_defect_uniform(tmp_path, capsys):
    cfg = thm1_config()
    cfg["coins"]["origin"] = {"a": [0, 1], "b": [0, 0], "delta_arg": 0.3}
    code, _, _ = run(capsys, "stationary", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path))
    assert code == 0
    pw = json.loads((tmp_path / "piecewise.json").read_text())
    assert pw["left"] == pytest.approx(1, abs=1e-12) and pw["right"] == pytest.approx(1, abs=1e-12)
    assert pw["residual"] <= 1e-12
    for name in ("state.csv", "measure.csv", "solution.json", "sgf_trace.json"):
        assert (tmp_path / name).exists()
    mu = read_measure_csv(tmp_path / "measure.csv")
    assert max(abs(v - 1) for _, v in mu) <= 1e-12


def test_stationary_explain(tmp_path, capsys):
    code, out, _ = run(capsys, "stationary", "--config", write_config(tmp_path, thm1_config()), "--out", str(tmp_path), "--explain")
    assert code == 0
    trace = json.loads(out)
    assert set(trace["sides"]) == {"plus", "minus"}


def test_stationary_thm3_gamma_zero(tmp_path, capsys):
    cfg = {"model": "thm3", "coins": {"bulk": {"sigma": 0.5, "delta_arg": 1.1}}, "boundary": {"alpha": [0.6, 0], "beta": [0, 0.8], "gamma": [0, 0]}}
    code, _, _ = run(capsys, "stationary", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path))
    assert code == 0
    mu = read_measure_csv(tmp_path / "measure.csv")
    assert max(abs(v - 1) for _, v in mu) <= 1e-12


def test_stationary_thm2_diagonal_defect(tmp_path, capsys):
    cfg = {
        "model": "thm2",
        "coins": {
            "minus": {"sigma": 0.2, "delta_arg": 1.0},
            "origin": {"entries": [[[0, 1], [0, 0], [0, 0]], [[0, 0], [-1, 0], [0, 0]], [[0, 0], [0, 0], [1, 0]]]},
            "plus": {"sigma": 0.7, "delta_arg": 0.5},
        },
        "boundary": {"alpha": [0.6, 0], "beta": [0, 0.8]},
    }
    code, _, _ = run(capsys, "stationary", "--config", write_config(tmp_path, cfg), "--out", str(tmp_path))
    assert code == 0
    diag = json.loads((tmp_path / "diagnostic.json").read_text())
    assert max(abs(b["deviation"]) for b in diag["branches"]) <= 1e-12


def test_verify_thm1_passes(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--config", write_config(tmp_path, thm1_config()), "--t-max", "20", "--tol", "1e-10")
    assert code == 0 and json.loads(out)["passed"]


def test_verify_corrupted_state_fails(tmp_path, capsys):
    cfg_path = write_config(tmp_path, thm1_config())
    assert run(capsys, "stationary", "--config", cfg_path, "--out", str(tmp_path))[0] == 0
    psi = read_state_csv(tmp_path / "state.csv")
    bad = psi.with_amplitude(5, 1, psi.at(5)[1] + 1e-3)
    write_state_csv(bad, tmp_path / "bad.csv")
    assert run(capsys, "verify", "--config", cfg_path, "--state", str(tmp_path / "state.csv"))[0] == 0
    code, out, _ = run(capsys, "verify", "--config", cfg_path, "--state", str(tmp_path / "bad.csv"))
    assert code == 5 and not json.loads(out)["passed"]


def test_verify_thm3_nonzero_gamma(tmp_path, capsys):
    cfg = {"model": "thm3", "coins": {"bulk": {"sigma": 0.5, "delta_arg": 1.1}}, "boundary": {"alpha": [0.6, 0], "beta": [0, 0.6], "gamma": [0.4, 0.3]}, "M": 60}
    code, out, _ = run(capsys, "verify", "--config", write_config(tmp_path, cfg), "--t-max", "50")
    rep = json.loads(out)
    assert code == 0 and rep["stationarity_passed"]
    assert rep["eigen_residual"] > 0.1


def sweep_config(grid, seed=3):
    cfg = thm1_config(seed=seed, M=30, t_max=10)
    cfg["coins"]["origin"] = {"random": True}
    cfg["grid"] = grid
    return cfg


GRID_10x10 = {
    "sigma": {"start": 0, "stop": 2 * math.pi, "num": 10},
    "delta_arg": {"start": -math.pi, "stop": math.pi, "num": 10},
}


def test_sweep_grid(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--config", write_config(tmp_path, sweep_config(GRID_10x10)), "--out", str(tmp_path))
    assert code == 0
    with open(tmp_path / "sweep.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 100
    assert max(float(r["residual"]) for r in rows) <= 1e-12
    assert max(float(r["stationarity_deviation"]) for r in rows) <= 1e-10
    assert len({r["seed"] for r in rows}) == 100


def test_sweep_deterministic_across_runs_and_threads(tmp_path, capsys, monkeypatch):
    grid = {"sigma": [0.1, 1.0, 2.0], "boundary_angle": [0.0, 0.7], "boundary_phase": [0.0, 1.5]}
    cfg = write_config(tmp_path, sweep_config(grid))
    outputs = []
    for i, threads in enumerate(("1", "1", "4")):
        monkeypatch.setenv("QWLAB_THREADS", threads)
        out = tmp_path / f"run{i}"
        assert run(capsys, "sweep", "--config", cfg, "--out", str(out))[0] == 0
        outputs.append((out / "sweep.csv").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    monkeypatch.setenv("QWLAB_THREADS", "1")
    assert run(capsys, "sweep", "--config", cfg, "--out", str(tmp_path / "other"), "--seed", "4")[0] == 0
    assert (tmp_path / "other" / "sweep.csv").read_bytes() != outputs[0]


@pytest.mark.parametrize("grid", [{}, {"sigma": []}])
def test_sweep_empty_grid(tmp_path, capsys, grid):
    assert run(capsys, "sweep", "--config", write_config(tmp_path, sweep_config(grid)), "--out", str(tmp_path))[0] == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("index,")


def test_sweep_thm2_and_thm3(tmp_path, capsys):
    cfg2 = {
        "model": "thm2",
        "seed": 1,
        "coins": {"minus": {"sigma": 0.2, "delta_arg": 1.0}, "origin": {"random": True}, "plus": {"sigma": 0.7, "delta_arg": 0.5}},
        "grid": {"boundary_angle": [0.2, 1.0]},
    }
    assert run(capsys, "sweep", "--config", write_config(tmp_path, cfg2), "--out", str(tmp_path / "t2"))[0] == 0
    header = (tmp_path / "t2" / "sweep.csv").read_text().splitlines()[0]
    assert header.endswith("printed_max_deviation")
    cfg3 = {"model": "thm3", "coins": {"bulk": {"sigma": 0.5, "delta_arg": 1.1}}, "grid": {"gamma": [0.0, 0.5], "sigma": [0.1, 0.2]}}
    assert run(capsys, "sweep", "--config", write_config(tmp_path, cfg3), "--out", str(tmp_path / "t3"))[0] == 0
    with open(tmp_path / "t3" / "sweep.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4 and max(float(r["stationarity_deviation"]) for r in rows) <= 1e-10


def test_sweep_unknown_axis(tmp_path, capsys):
    assert run(capsys, "sweep", "--config", write_config(tmp_path, sweep_config({"colour": [1]})), "--out", str(tmp_path))[0] == 2
