"""End-to-end tests for the graph-thresholds command line."""

import io

import pandas as pd
import pytest
import yaml
from typer.testing import CliRunner

from graph_thresholds import __version__
from graph_thresholds.cli import app

runner = CliRunner()


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def record(result):
    assert result.exit_code == 0, result.output
    return yaml.safe_load(result.stdout)


# Graph commands

def test_capacity_of_complete_graph():
    document = record(invoke("capacity", "--graph", "k3"))
    assert document["record"] == "capacity"
    assert document["value"] == pytest.approx(2 / 3)
    assert document["method"] == "closed_form"
    assert document["config"]["command"] == "capacity"
    assert document["config"]["seed_source"] in ("default", "environment")


def test_capacity_of_graph_file(write_record):
    path = write_record("g.yaml", {"vertex_count": 3, "edges": [[0, 1], [1, 0], [1, 2]]})
    document = record(invoke("capacity", "--graph", path, "--method", "enum"))
    assert document["method"] == "support_enum"
    assert document["value"] == pytest.approx(0.5)


def test_capacity_enum_with_grid_option():
    document = record(invoke("capacity", "--graph", "k3", "--method", "enum", "--grid", 20))
    assert document["method"] == "support_enum"
    assert document["value"] == pytest.approx(2 / 3, abs=1e-2)
    assert document["config"]["options"]["grid_steps"] == 20
    assert invoke("capacity", "--graph", "k3", "--method", "enum", "--grid-steps", 20).exit_code == 0


def test_capacity_not_converged_reports_best_point():
    result = invoke("capacity", "--graph", "k3", "--method", "numeric", "--max-iterations", 1, "--tolerance=-1")
    assert result.exit_code == 1
    assert "record: not_converged" in result.output
    assert "no restart converged" in result.output
    assert "best:" in result.output
    assert "maximizer:" in result.output
    assert "lower_bound: true" in result.output


def test_bad_graph_exits_with_one(write_record, tmp_path):
    assert invoke("capacity", "--graph", tmp_path / "missing.yaml").exit_code == 1
    duplicate = write_record("d.yaml", "vertex_count: 2\nedges:\n  - [0, 1]\n  - [0, 1]\n")
    result = invoke("capacity", "--graph", duplicate)
    assert result.exit_code == 1
    assert "duplicate" in result.output


def test_rank_and_hom():
    assert record(invoke("rank", "--graph", "t5"))["ranks"] == [4, 3, 2, 1, 0]
    assert record(invoke("hom", "--source", "c4", "--target", "k2"))["exists"] is True
    assert record(invoke("hom", "--source", "k3", "--target", "k2"))["exists"] is False


# Output formats

def test_text_format():
    result = invoke("--format", "text", "capacity", "--graph", "k3")
    assert result.exit_code == 0
    assert "capacity" in result.stdout
    assert "closed_form" in result.stdout


def csv_report(*args):
    result = invoke("-f", "csv", *args)
    assert result.exit_code == 0, result.output
    header = [line for line in result.stdout.splitlines() if line.startswith("#")]
    return header, pd.read_csv(io.StringIO(result.stdout), comment="#")


def test_csv_format():
    header, frame = csv_report("capacity", "--graph", "k3", "--seed", 5)
    assert header[0] == "# record: capacity"
    assert "# value: 0.666666666667" in header
    assert "# method: closed_form" in header
    assert "# config.seed: 5" in header
    assert "# config.seed_source: option" in header
    assert list(frame.columns) == ["vertex", "weight"]
    assert len(frame) == 3


def test_csv_format_carries_scalars_for_rank_and_threshold():
    header, frame = csv_report("rank", "--graph", "t5")
    assert "# ranks: 4, 3, 2, 1, 0" in header
    assert "# longest_path: 4" in header
    assert any(line.startswith("# config.seed: ") for line in header)
    assert len(frame) == 5

    header, frame = csv_report("simulate-threshold", "--edge-prob", "1.0", "--p", 2, "--window", 6, "--trials", 4, "--seed", 3)
    assert "# record: threshold" in header
    assert "# path_probability: 1.0" in header
    assert "# bound_verified: True" in header
    assert "# config.seed: 3" in header
    assert len(frame) == 4


# Models

def test_model_probe(write_record):
    path = write_record("m.yaml", {"variant": "bernoulli", "window": 4, "weights": [1 / 3, 1 / 3, 1 / 3]})
    document = record(invoke("model-probe", "--model", path, "--event", "order:0,1", "--equal", "--marginal", "0,2"))
    assert document["probability"] == pytest.approx(1 / 3)
    assert document["equal_probability"] == pytest.approx(1 / 3)
    assert document["marginal_indices"] == [0, 2]


def test_model_probe_needs_a_query(write_record):
    path = write_record("m.yaml", {"variant": "bernoulli", "window": 2, "weights": [0.5, 0.5]})
    assert invoke("model-probe", "--model", path).exit_code == 1
    assert invoke("model-probe", "--model", path, "--marginal", "0,x").exit_code == 1


# Threshold simulation

def test_simulate_complete_edges():
    document = record(invoke("simulate-threshold", "--edge-prob", "1.0", "--p", 3, "--window", 8, "--trials", 10))
    assert document["record"] == "threshold"
    assert document["path_probability"] == 1.0
    assert document["bound_verified"] is True


def test_simulation_is_deterministic_for_a_seed():
    args = ("simulate-threshold", "--edge-prob", "0.5", "--p", 2, "--window", 6, "--trials", 200, "--seed", 9)
    first, second = invoke(*args), invoke(*args)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout
    assert record(first)["config"]["seed_source"] == "option"


def test_simulation_writes_trial_csv(tmp_path):
    path = tmp_path / "trials.csv"
    result = invoke("simulate-threshold", "--edge-prob", "0.3", "--p", 2, "--trials", 25, "--csv", path)
    assert result.exit_code == 0
    frame = pd.read_csv(path)
    assert len(frame) == 25
    assert "longest_path" in frame.columns


def test_simulation_argument_errors():
    assert invoke("simulate-threshold", "--p", 2).exit_code == 1
    assert invoke("simulate-threshold", "--edge-prob", "0.5", "--reals", "0.1", "--p", 2).exit_code == 1
    assert invoke("simulate-threshold", "--edge-prob", "0.5", "--p", 2, "--seed=-1").exit_code == 1


# Extraction commands

@pytest.fixture
def parity_inputs(write_record):
    fn = write_record("fn.yaml", {"arity": 1, "size": 6, "values": [0, 1, 0, 1, 0, 1]})
    metric = write_record("points.yaml", {"matrix": [[0.0, 1.0], [1.0, 0.0]]})
    return fn, metric


def test_ramsey_extract(parity_inputs):
    fn, metric = parity_inputs
    document = record(invoke("ramsey-extract", "--fn", fn, "--metric", metric, "--eps", "0.5", "--size", 3))
    assert document["record"] == "extraction"
    assert document["J"] == [0, 2, 4]


def test_infeasible_size_exits_with_two(parity_inputs):
    fn, metric = parity_inputs
    result = invoke("ramsey-extract", "--fn", fn, "--metric", metric, "--eps", "0.5", "--size", 4)
    assert result.exit_code == 2
    assert "record: infeasible" in result.output
    assert "max_achievable: 3" in result.output


def test_arity_mismatch(parity_inputs):
    fn, metric = parity_inputs
    assert invoke("ramsey-extract", "--fn", fn, "--metric", metric, "--k", 2, "--eps", "0.5", "--size", 2).exit_code == 1


def test_intersect(write_record):
    mu = write_record("mu.yaml", {"mu": [0.5, 0.25, 0.25]})
    sets = write_record("sets.yaml", {"arity": 1, "size": 3, "rows": [[1, 1, 0], [1, 0, 1], [1, 1, 1]]})
    document = record(invoke("intersect", "--sets", sets, "--mu", mu, "--lambda", "0.75", "--eps", "0.1", "--size", 1))
    assert document["record"] == "intersection"
    assert document["bound_holds"] is True


def test_lipschitz(write_record):
    fn = write_record("fn.yaml", {"arity": 2, "size": 6, "values": [0] * 15})
    metric = write_record("points.yaml", {"matrix": [[0.0, 1.0], [1.0, 0.0]]})
    document = record(invoke("lipschitz", "--fn", fn, "--metric", metric, "--geometric", 6, "--size", 6))
    assert document["passed"] is True
    assert invoke("lipschitz", "--fn", fn, "--metric", metric, "--size", 2).exit_code == 1


# Info

def test_version_and_config():
    result = invoke("version")
    assert result.exit_code == 0 and __version__ in result.stdout
    result = invoke("config")
    assert result.exit_code == 0
    assert "Default seed" in result.stdout
