"""Config validation, builders, deterministic execution, persistence."""

import json
import math

import numpy as np
import pytest

from cliffordlab import (
    car_identity_suite,
    element_from_spec,
    execute,
    form_from_spec,
    random_interaction,
    random_one_particle,
    sub_rng,
    validate_config,
)
from cliffordlab.modes import ModeSpace


# ---------------------------------------------------------------------- #
# validation


def test_validate_fills_defaults():
    cfg = validate_config({"command": "car-check", "seed": 1})
    assert cfg["n"] == 4
    assert cfg["samples"] == 200
    assert cfg["csv"] is True


def test_validate_requires_command():
    with pytest.raises(ValueError, match="command"):
        validate_config({"seed": 1})
    with pytest.raises(ValueError, match="unknown command"):
        validate_config({"command": "frobnicate", "seed": 1})


def test_validate_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown config keys"):
        validate_config({"command": "car-check", "seed": 1, "extra": 2})
    # keys legal for one command are rejected for another
    with pytest.raises(ValueError, match="unknown config keys"):
        validate_config({"command": "car-check", "seed": 1, "beta": 2.0})


@pytest.mark.parametrize("n", [0, 13, 2.5])
def test_validate_rejects_bad_mode_counts(n):
    with pytest.raises(ValueError):
        validate_config({"command": "car-check", "seed": 1, "n": n})


@pytest.mark.parametrize(
    "command", ["car-check", "lsi-scan", "ground-state", "perturb", "physical"])
def test_randomized_commands_require_a_seed(command):
    with pytest.raises(ValueError, match="seed"):
        validate_config({"command": command})


def test_converge_needs_no_seed():
    cfg = validate_config({"command": "converge"})
    assert cfg["command"] == "converge"


@pytest.mark.parametrize("seed", [-1, 2**64, "7", 1.5])
def test_validate_rejects_bad_seeds(seed):
    with pytest.raises(ValueError):
        validate_config({"command": "car-check", "seed": seed})


def test_validate_rejects_bad_samples_and_tolerances():
    with pytest.raises(ValueError):
        validate_config({"command": "car-check", "seed": 1, "samples": 0})
    with pytest.raises(ValueError):
        validate_config({"command": "car-check", "seed": 1, "tolerances": 3})
    with pytest.raises(ValueError):
        validate_config({"command": "car-check", "seed": 1,
                         "tolerances": {"certificate": "tight"}})
    cfg = validate_config({"command": "lsi-scan", "seed": 1,
                           "tolerances": {"certificate": 1e-8}})
    assert cfg["tolerances"]["certificate"] == 1e-8


# ---------------------------------------------------------------------- #
# builders


def test_form_specs(space2):
    assert form_from_spec(space2, None).label == "number"
    assert form_from_spec(space2, "number").label == "number"
    assert form_from_spec(space2, "clifford-dirichlet").label == "clifford-dirichlet"
    assert form_from_spec(space2, "degenerate-number").label == "degenerate-number"
    a = [[1.0, 0.2], [0.2, 1.5]]
    assert form_from_spec(space2, {"dGamma": a}).label == "dGamma"
    custom = form_from_spec(space2, {"matrix": np.eye(4).tolist()})
    assert custom.label == "custom"
    with pytest.raises(ValueError):
        form_from_spec(space2, "heat-kernel")
    with pytest.raises(ValueError):
        form_from_spec(space2, {"spectrum": [0, 1]})


def test_element_spec_monomials(space2):
    rng = sub_rng(1, 0)
    el = element_from_spec(space2, {"monomials": {"": 0.5, "1": 1.0,
                                                  "1,2": [0.0, 2.0]}}, rng)
    assert el.coeffs[0] == 0.5
    assert el.coeffs[space2.mode_mask(1)] == 1.0
    mask12 = space2.mode_mask(1) | space2.mode_mask(2)
    assert el.coeffs[mask12] == 2.0j


@pytest.mark.parametrize("key", ["0", "3", "1,1", "x", "1,,2"])
def test_element_spec_rejects_bad_monomial_keys(space2, key):
    with pytest.raises(ValueError):
        element_from_spec(space2, {"monomials": {key: 1.0}}, sub_rng(1, 0))


def test_element_spec_random_and_errors(space2):
    el = element_from_spec(space2, {"random": {"scale": 0.3}}, sub_rng(2, 0))
    assert np.max(np.abs(el.coeffs - el.adjoint().coeffs)) <= 1e-12
    with pytest.raises(ValueError):
        element_from_spec(space2, {"monomials": {}, "random": {}}, sub_rng(2, 1))
    with pytest.raises(ValueError):
        element_from_spec(space2, 7, sub_rng(2, 2))


def test_random_one_particle_has_exact_gap():
    op = random_one_particle(3, 0.5, sub_rng(3, 0))
    assert op.mu == pytest.approx(0.5, abs=1e-12)
    assert op.n == 3


def test_random_interaction_respects_norm_cap():
    space = ModeSpace(3)
    alpha = random_interaction(space, 0.1, sub_rng(4, 0))
    assert np.linalg.norm(alpha.matrix, 2) <= 0.1 + 1e-12


# ---------------------------------------------------------------------- #
# the algebra self-test


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_car_identity_suite_is_tight(n):
    out = car_identity_suite(ModeSpace(n), samples=10, seed=0)
    checks = ["car_basis", "car_random", "car_modes", "field_selfadjoint",
              "traciality", "unitarity", "vacuum_column"]
    assert all(out[k] <= 1e-12 for k in checks)
    assert out["worst"] == max(out[k] for k in checks)


# ---------------------------------------------------------------------- #
# execution and persistence


def test_execute_is_deterministic():
    cfg = {"command": "lsi-scan", "n": 1, "seed": 9, "samples": 60,
           "best_constants": False}
    a = execute(dict(cfg)).to_json(include_wall_time=False)
    b = execute(dict(cfg)).to_json(include_wall_time=False)
    assert a == b


def test_execute_payload_shape():
    res = execute({"command": "car-check", "n": 2, "seed": 3, "samples": 5})
    payload = res.payload()
    assert payload["schema_version"] == 1
    assert payload["command"] == "car-check"
    assert isinstance(payload["version"], str)
    assert all(isinstance(v, bool) for v in payload["verdicts"].values())
    assert res.passed
    assert res.failures == []
    assert payload["wall_time_s"] >= 0.0


def test_execute_reports_failures():
    res = execute({"command": "lsi-scan", "n": 1, "seed": 9, "samples": 60,
                   "beta": 0.9, "best_constants": False})
    assert not res.passed
    assert "certificate_valid" in res.failures


def test_write_outputs(tmp_path):
    out = tmp_path / "run"
    res = execute({"command": "converge", "family": "scale",
                   "out": str(out)})
    result_file = out / "result.json"
    assert result_file.exists()
    payload = json.loads(result_file.read_text())
    assert payload["command"] == "converge"
    assert payload["passed"] == res.passed
    csvs = sorted(p.name for p in out.glob("*.csv"))
    assert "diagnostics.csv" in csvs
    header = (out / "diagnostics.csv").read_text().splitlines()[0]
    assert header.split(",")[:2] == ["n", "k"]


def test_write_can_skip_csv(tmp_path):
    out = tmp_path / "run"
    execute({"command": "converge", "family": "constant", "length": 4,
             "out": str(out), "csv": False})
    assert (out / "result.json").exists()
    assert list(out.glob("*.csv")) == []


def test_csv_floats_round_trip(tmp_path):
    out = tmp_path / "run"
    execute({"command": "converge", "family": "scale",
             "out": str(out)})
    rows = (out / "diagnostics.csv").read_text().splitlines()
    cols = rows[0].split(",")
    first = dict(zip(cols, rows[1].split(",")))
    # repr round-trip: the JSON payload holds the same float exactly
    payload = json.loads((out / "result.json").read_text())
    table_row = payload["tables"]["diagnostics"][0]
    assert float(first["tail_psi"]) == table_row["tail_psi"]


def test_non_finite_and_complex_values_serialize():
    from cliffordlab.runner import _jsonable

    assert _jsonable(float("inf")) == "inf"
    assert _jsonable(float("nan")) == "nan"
    assert _jsonable(np.float64(0.5)) == 0.5
    assert _jsonable(np.bool_(True)) is True
    assert _jsonable(1 + 2j) == {"re": 1.0, "im": 2.0}
    assert _jsonable(np.arange(3)) == [0, 1, 2]


def test_ground_state_command_measured_gamma():
    res = execute({"command": "ground-state", "n": 2, "seed": 5, "samples": 60,
                   "form": "degenerate-number", "auto_gamma": True,
                   "starts": 6})
    assert res.passed
    assert res.margins["beta"] == 2.0  # command default
    gamma = res.margins["gamma"]
    assert gamma == pytest.approx(-(math.log(2.0) / 2.0 + 1e-4), abs=1e-6)
    assert res.margins["m0"] == 2
    assert res.margins["bound"] >= 2.0 - 1e-6
    assert res.verdicts["nondegeneracy_consistent"]


def test_physical_command_inline_operators():
    res = execute({
        "command": "physical", "n": 2, "seed": 8, "samples": 60,
        "A": [[1.0, 0.0], [0.0, 1.25]],
        "alpha": {"monomials": {"1": 0.05}},
    })
    assert res.passed
    assert res.margins["mu"] == pytest.approx(1.0, abs=1e-12)
    assert res.verdicts["interaction_identity"]
    assert res.verdicts["number_domination"]
