"""Batch command execution: config validation, dispatch, persistence.

A run is a single JSON config document -> a RunResult with verdicts, margins
and tables.  Identical configs reproduce identical numeric output (the RNG is
counter-based and every sweep derives per-sample streams from the config
seed), so result files are byte-stable apart from the wall-time field.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._version import __version__
from .algebra import CliffordElement, trace_product
from .entropy import (
    convergence_theorems,
    default_k_grid,
    entropy_sublevel_separation,
)
from .fock import field_operator, _annihilator_matrix
from .forms import (
    EnergyForm,
    clifford_dirichlet_form,
    degenerate_number_form,
    number_form,
    second_quantized_form,
)
from .lsi import (
    degeneracy_bound_check,
    ground_state,
    lsi_best_constants,
    lsi_check,
    measure_gamma,
    nondegeneracy_criterion,
)
from .modes import MAX_MODES, ModeSpace
from .perturbation import (
    OneParticleOperator,
    closed_form_c_beta,
    gibbs_state,
    log_partition,
    perturbed_lsi_and_stability,
    physical_hamiltonian,
    trace_norm_distance,
    variational_c_beta,
)
from .sampling import (
    constant_family,
    escaping_mass_family,
    random_element,
    random_selfadjoint,
    scale_family,
    sub_rng,
)
from .standard_form import State, standard_form_axioms

_COMMON_KEYS = {"command", "n", "seed", "samples", "out", "csv", "tolerances"}
_COMMAND_KEYS = {
    "car-check": set(),
    "lsi-scan": {"beta", "gamma", "form", "measure_gamma", "best_constants", "starts"},
    "ground-state": {"beta", "gamma", "form", "auto_gamma", "cluster_tol", "starts"},
    "perturb": {"beta", "gamma", "form", "h"},
    "converge": {"family", "length", "ratio", "k_grid", "tol", "psi_weight", "budget"},
    "physical": {"A", "alpha", "mu", "alpha_norm"},
}
_RANDOMIZED = {"car-check", "lsi-scan", "ground-state", "perturb", "physical"}
_DEFAULT_N = {"car-check": 4, "lsi-scan": 2, "ground-state": 3, "perturb": 2,
              "converge": 3, "physical": 3}


def _as_int(value, name: str) -> int:
    """Strict integer coercion: ints and integral floats only (JSON numbers)."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{name} must be an integer, got {value!r}")
        value = int(value)
    return value


def validate_config(config: dict) -> dict:
    """Normalize a config document; unknown keys and bad values are errors."""
    if not isinstance(config, dict):
        raise ValueError("config must be a JSON object")
    command = config.get("command")
    if command not in _COMMAND_KEYS:
        raise ValueError(f"unknown command {command!r}; expected one of "
                         f"{sorted(_COMMAND_KEYS)}")
    allowed = _COMMON_KEYS | _COMMAND_KEYS[command]
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise ValueError(f"unknown config keys for {command}: {unknown}")
    out = dict(config)
    n = _as_int(out.get("n", _DEFAULT_N[command]), "n")
    if not 1 <= n <= MAX_MODES:
        raise ValueError(f"n must be between 1 and {MAX_MODES}, got {n}")
    out["n"] = n
    if command in _RANDOMIZED:
        if "seed" not in out:
            raise ValueError(f"{command} is randomized: a seed is mandatory")
        seed = _as_int(out["seed"], "seed")
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        out["seed"] = seed
    else:
        out["seed"] = _as_int(out.get("seed", 0), "seed")
    samples = _as_int(out.get("samples", 200), "samples")
    if samples < 1:
        raise ValueError("samples must be positive")
    out["samples"] = samples
    out["csv"] = bool(out.get("csv", True))
    tolerances = out.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ValueError("tolerances must be a map")
    out["tolerances"] = {str(k): float(v) for k, v in tolerances.items()}
    return out


# ---------------------------------------------------------------------- #
# spec -> object builders


def form_from_spec(space: ModeSpace, spec) -> EnergyForm:
    """'number' | 'clifford-dirichlet' | 'degenerate-number' |
    {'dGamma': [[...]]} | {'matrix': [[...]]}."""
    if spec in (None, "number"):
        return number_form(space)
    if spec == "clifford-dirichlet":
        return clifford_dirichlet_form(space)
    if spec == "degenerate-number":
        return degenerate_number_form(space)
    if isinstance(spec, dict) and "dGamma" in spec:
        return second_quantized_form(space, np.asarray(spec["dGamma"], dtype=float),
                                     label="dGamma")
    if isinstance(spec, dict) and "matrix" in spec:
        return EnergyForm(space, np.asarray(spec["matrix"], dtype=complex),
                          label="custom")
    raise ValueError(f"malformed form spec: {spec!r}")


def _parse_monomial_key(space: ModeSpace, key: str) -> int:
    if key == "":
        return 0
    modes = [int(tok) for tok in key.split(",")]
    mask = 0
    for m in modes:
        if not 1 <= m <= space.n:
            raise ValueError(f"monomial key {key!r} uses a mode outside 1..{space.n}")
        bit = space.mode_mask(m)
        if mask & bit:
            raise ValueError(f"monomial key {key!r} repeats a mode")
        mask |= bit
    return mask


def element_from_spec(space: ModeSpace, spec, rng) -> CliffordElement:
    """{'monomials': {'1': c, '1,2': [re, im], ...}} or {'random': {'scale': s}}."""
    if isinstance(spec, dict) and "monomials" in spec and "random" in spec:
        raise ValueError("element spec must give either monomials or random, "
                         "not both")
    if isinstance(spec, dict) and "monomials" in spec:
        coeffs = np.zeros(space.dim, dtype=complex)
        for key, val in spec["monomials"].items():
            if isinstance(val, (list, tuple)):
                value = complex(val[0], val[1])
            else:
                value = complex(val)
            coeffs[_parse_monomial_key(space, str(key))] = value
        return CliffordElement(space, coeffs)
    if isinstance(spec, dict) and "random" in spec:
        scale = float(spec["random"].get("scale", 1.0))
        return random_selfadjoint(space, rng, scale=scale)
    raise ValueError(f"malformed element spec: {spec!r}")


def random_one_particle(n: int, mu: float, rng) -> OneParticleOperator:
    """A random real symmetric A with min eigenvalue exactly mu."""
    m = rng.standard_normal((n, n))
    sym = (m + m.T) / 2.0
    shift = mu - float(np.linalg.eigvalsh(sym)[0])
    return OneParticleOperator(sym + shift * np.eye(n))


def random_interaction(space: ModeSpace, cap: float, rng) -> CliffordElement:
    """A random self-adjoint element rescaled to operator norm exactly cap."""
    alpha = random_selfadjoint(space, rng)
    w, _ = alpha.eigh()
    norm = float(np.abs(w).max())
    if norm < 1e-300:
        return alpha
    return (cap / norm) * alpha


# ---------------------------------------------------------------------- #
# results


@dataclass
class RunResult:
    command: str
    config: dict
    verdicts: dict
    margins: dict
    tables: dict = field(default_factory=dict)
    wall_time_s: float = 0.0
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(bool(v) for v in self.verdicts.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.verdicts.items() if not v]

    def payload(self, include_wall_time: bool = True) -> dict:
        out = {
            "command": self.command,
            "config": _jsonable(self.config),
            "verdicts": _jsonable(self.verdicts),
            "margins": _jsonable(self.margins),
            "tables": _jsonable(self.tables),
            "passed": self.passed,
            "failures": self.failures,
            "version": self.version,
            "schema_version": 1,
        }
        if include_wall_time:
            out["wall_time_s"] = self.wall_time_s
        return out

    def to_json(self, include_wall_time: bool = True) -> str:
        return json.dumps(self.payload(include_wall_time), sort_keys=True, indent=2)

    def write(self, out_dir, csv_tables: bool = True) -> Path:
        return write_payload(self.payload(), out_dir, csv_tables=csv_tables)


def write_payload(payload: dict, out_dir, csv_tables: bool = True) -> Path:
    """Persist a result payload: result.json plus one CSV per table."""
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    result_file = out_path / "result.json"
    result_file.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    if not csv_tables:
        return result_file
    for name, rows in payload.get("tables", {}).items():
        if not (isinstance(rows, list) and rows and isinstance(rows[0], dict)):
            continue
        with open(out_path / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return result_file


def _csv_cell(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else repr(val)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return repr(obj)


# ---------------------------------------------------------------------- #
# identity suite (shared by the car-check command and the test suite)


def car_identity_suite(space: ModeSpace, samples: int = 20, seed: int = 0) -> dict:
    """Worst deviations of the canonical anticommutation and trace identities.

    Covers: {B_x, B_y} = 2(x|y) for the basis fields and random real vectors,
    B_x* = B_x for real x, mode-operator CAR, traciality tau(ab) = tau(ba),
    and unitarity of the coordinate identification (inner products through
    matrices against the trace form).
    """
    rng = sub_rng(seed, 0)
    dim, n = space.dim, space.n
    eye = np.eye(dim)

    basis_fields = []
    for i in range(1, n + 1):
        x = np.zeros(n)
        x[i - 1] = 1.0
        basis_fields.append(field_operator(space, x).matrix)
    car = 0.0
    for i in range(n):
        for j in range(n):
            anti = basis_fields[i] @ basis_fields[j] + basis_fields[j] @ basis_fields[i]
            car = max(car, float(np.max(np.abs(anti - 2.0 * (i == j) * eye))))

    mode_car = 0.0
    for i in range(1, n + 1):
        ai = _annihilator_matrix(n, i)
        for j in range(1, n + 1):
            aj = _annihilator_matrix(n, j)
            mode_car = max(mode_car, float(np.max(np.abs(ai @ aj + aj @ ai))))
            anti = ai @ aj.conj().T + aj.conj().T @ ai
            mode_car = max(mode_car, float(np.max(np.abs(anti - (i == j) * eye))))

    adjoint = 0.0
    rand_car = 0.0
    for _ in range(samples):
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        bx = field_operator(space, x).matrix
        by = field_operator(space, y).matrix
        anti = bx @ by + by @ bx - 2.0 * float(x @ y) * eye
        rand_car = max(rand_car, float(np.max(np.abs(anti))))
        adjoint = max(adjoint, float(np.max(np.abs(bx - bx.conj().T))))

    traciality = 0.0
    unitarity = 0.0
    vacuum_column = 0.0
    for _ in range(samples):
        a = random_element(space, rng)
        b = random_element(space, rng)
        traciality = max(traciality, abs(trace_product(a, b) - trace_product(b, a)))
        # coordinate inner product vs the trace form, both through full matrices
        lhs = complex(np.vdot(a.matrix[:, 0], b.matrix[:, 0]))
        rhs = complex(np.trace(a.matrix.conj().T @ b.matrix) / dim)
        unitarity = max(unitarity, abs(lhs - rhs))
        vacuum_column = max(vacuum_column,
                            float(np.max(np.abs(a.matrix[:, 0] - a.coeffs))))

    return {
        "n": n,
        "samples": samples,
        "car_basis": car,
        "car_random": rand_car,
        "car_modes": mode_car,
        "field_selfadjoint": adjoint,
        "traciality": traciality,
        "unitarity": unitarity,
        "vacuum_column": vacuum_column,
        "worst": max(car, rand_car, mode_car, adjoint, traciality, unitarity,
                     vacuum_column),
    }


# ---------------------------------------------------------------------- #
# commands


def _cmd_car_check(cfg: dict) -> tuple[dict, dict, dict]:
    space = ModeSpace(cfg["n"])
    suite = car_identity_suite(space, samples=cfg["samples"], seed=cfg["seed"])
    margins = dict(suite)
    verdicts = {"identities": suite["worst"] <= 1e-12}
    tables = {}
    if space.n <= 4:
        axioms = standard_form_axioms(space, samples=min(cfg["samples"], 24),
                                      seed=cfg["seed"])
        margins["axioms"] = axioms
        verdicts["standard_form"] = (
            axioms["jmj_equals_commutant"]
            and axioms["jmj_commutes_margin"] <= 1e-11
            and axioms["jaj_right_mult_margin"] <= 1e-11
            and axioms["j_fixes_cone_margin"] <= 1e-10
            and axioms["ajaj_preserves_cone_margin"] <= 1e-9)
    return verdicts, margins, tables


def _cmd_lsi_scan(cfg: dict) -> tuple[dict, dict, dict]:
    space = ModeSpace(cfg["n"])
    form = form_from_spec(space, cfg.get("form"))
    psi = State.trace_state(space)
    beta = float(cfg.get("beta", 2.0))
    starts = int(cfg.get("starts", 16))
    cert_tol = cfg["tolerances"].get("certificate", 1e-9)
    if cfg.get("measure_gamma"):
        gamma, gamma_report = measure_gamma(form, psi, beta, seed=cfg["seed"],
                                            n_samples=cfg["samples"], starts=starts)
    else:
        gamma, gamma_report = float(cfg.get("gamma", 0.0)), None
    cert = lsi_check(form, psi, beta, gamma, n_samples=cfg["samples"],
                     seed=cfg["seed"], starts=starts, tol=cert_tol)
    verdicts = {"certificate_valid": cert.is_valid()}
    margins = {
        "worst_deficiency": cert.worst_deficiency,
        "beta": beta,
        "gamma": gamma,
        "optimizer": cert.optimizer_report,
    }
    if gamma_report is not None:
        margins["gamma_measurement"] = gamma_report
    tables = {"deficiency_samples": [
        {"sample": i, "S": row[0], "E": row[1], "deficiency": row[2]}
        for i, row in enumerate(cert.samples_table)
    ]}
    if cfg.get("best_constants", True):
        best = lsi_best_constants(form, psi, seed=cfg["seed"],
                                  n_samples=cfg["samples"], starts=starts)
        margins["best_constants"] = best
    return verdicts, margins, tables


def _cmd_ground_state(cfg: dict) -> tuple[dict, dict, dict]:
    space = ModeSpace(cfg["n"])
    form = form_from_spec(space, cfg.get("form"))
    psi = State.trace_state(space)
    beta = float(cfg.get("beta", 2.0))
    starts = int(cfg.get("starts", 16))
    if cfg.get("auto_gamma"):
        gamma, _ = measure_gamma(form, psi, beta, seed=cfg["seed"],
                                 n_samples=cfg["samples"], starts=starts)
    else:
        gamma = float(cfg.get("gamma", 0.0))
    cert = lsi_check(form, psi, beta, gamma, n_samples=cfg["samples"],
                     seed=cfg["seed"], starts=starts,
                     tol=cfg["tolerances"].get("certificate", 1e-9))
    report = ground_state(form, cluster_tol=float(cfg.get("cluster_tol", 1e-8)))
    bound = degeneracy_bound_check(report, cert)
    criterion = nondegeneracy_criterion(report, cert)
    verdicts = {
        "certificate_valid": cert.is_valid(),
        "degeneracy_bound": bound["verdict"],
        "nondegeneracy_consistent": (not criterion["applicable"])
        or criterion.get("verdict", False),
    }
    margins = {
        "lambda0": report.lambda0,
        "m0": report.m0,
        "bound": bound["bound"],
        "beta": beta,
        "gamma": gamma,
        "worst_deficiency": cert.worst_deficiency,
        "ground_min_eigenvalue": report.ground_min_eigenvalue,
        "notes": report.notes,
    }
    tables = {"degeneracy": [{
        "lambda0": report.lambda0, "m0": report.m0, "bound": bound["bound"],
        "exponent": bound["exponent"], "partition_sum": bound["partition_sum"],
    }]}
    return verdicts, margins, tables


def _cmd_perturb(cfg: dict) -> tuple[dict, dict, dict]:
    space = ModeSpace(cfg["n"])
    form = form_from_spec(space, cfg.get("form"))
    rng = sub_rng(cfg["seed"], 1)
    h = (element_from_spec(space, cfg["h"], rng) if "h" in cfg
         else CliffordElement.zero(space))
    beta = float(cfg.get("beta", 2.0))
    gamma0 = float(cfg.get("gamma", 0.0))
    psi = State.trace_state(space)
    value, minimizer, var_report = variational_c_beta(h, psi, beta, seed=cfg["seed"])
    closed = log_partition(h, beta)
    gibbs = gibbs_state(h, beta)
    stability = perturbed_lsi_and_stability(form, psi, beta, gamma0, h,
                                            n_samples=cfg["samples"],
                                            seed=cfg["seed"])
    gibbs_gap = trace_norm_distance(minimizer.rho, gibbs.rho)
    verdicts = {
        "variational_matches_partition": abs(value - closed) <= 1e-4,
        "minimizer_matches_gibbs": gibbs_gap <= 1e-3,
        "stability_bounds": stability.all_hold,
        "perturbed_certificate_valid": stability.certificate.is_valid(),
    }
    margins = {
        "c_beta": closed,
        "variational_value": value,
        "variational_gap": abs(value - closed),
        "gibbs_trace_distance": gibbs_gap,
        "gamma_h": stability.gamma_h,
        "lambda_h": stability.lambda_h,
        "lambda_0": stability.lambda_0,
        "variational_report": var_report,
    }
    tables = {"stability": [
        {"bound": name, "lhs": sides["lhs"], "rhs": sides["rhs"],
         "slack": sides["rhs"] - sides["lhs"], "holds": sides["holds"]}
        for name, sides in stability.bounds.items()
    ]}
    return verdicts, margins, tables


def _cmd_converge(cfg: dict) -> tuple[dict, dict, dict]:
    space = ModeSpace(cfg["n"])
    family_name = cfg.get("family", "scale")
    length = int(cfg.get("length", 0)) or None
    k_grid = np.asarray(cfg["k_grid"], dtype=float) if "k_grid" in cfg else default_k_grid()
    tol = float(cfg.get("tol", 1e-8))
    if family_name == "scale":
        seq = scale_family(space, **({"length": length} if length else {}),
                           **({"ratio": float(cfg["ratio"])} if "ratio" in cfg else {}))
        psi = State.trace_state(space)
    elif family_name == "constant":
        seq = constant_family(space, **({"length": length} if length else {}))
        psi = State.trace_state(space)
    elif family_name == "escaping":
        seq, psi = escaping_mass_family(
            space, **({"length": length} if length else {}),
            **({"psi_weight": float(cfg["psi_weight"])} if "psi_weight" in cfg else {}))
    else:
        raise ValueError(f"unknown family {family_name!r}")
    report = convergence_theorems(seq, psi, k_grid=k_grid, tol=tol)
    diag = report["diagnostics"]
    verdicts = {
        "biconditional_consistent": report["biconditional_consistent"],
        "overlap_criterion_consistent": report["overlap_criterion_consistent"],
        "overlap_bound_holds": diag.verdicts.get("overlap_bound_worst_slack", 0.0) >= -1e-10,
    }
    margins = {
        "classification": {
            "norm_to_zero": report["norm_to_zero"],
            "vanishing": report["vanishing"],
            "uniformly_integrable": report["uniformly_integrable"],
            "overlaps_to_zero": report["overlaps_to_zero"],
        },
        "epsilon_table": report["epsilon_table"],
    }
    tables = {"diagnostics": diag.rows()}
    if "budget" in cfg:
        sep = entropy_sublevel_separation(
            [s for s in seq if abs(s.norm - 1.0) <= 1e-9], psi,
            float(cfg["budget"]))
        margins["sublevel_separation"] = {
            "certified_overlap_bound": sep["certified_overlap_bound"],
            "k_star": sep["k_star"],
            "worst_margin": sep["worst_margin"],
        }
        verdicts["sublevel_separated"] = sep["separated"]
    return verdicts, margins, tables


def _cmd_physical(cfg: dict) -> tuple[dict, dict, dict]:
    space = ModeSpace(cfg["n"])
    rng_a = sub_rng(cfg["seed"], 101)
    rng_alpha = sub_rng(cfg["seed"], 102)
    mu_floor = float(cfg.get("mu", 0.5))
    if "A" in cfg:
        one_particle = OneParticleOperator(np.asarray(cfg["A"], dtype=float))
    else:
        one_particle = random_one_particle(space.n, mu_floor, rng_a)
    if "alpha" in cfg:
        alpha = element_from_spec(space, cfg["alpha"], rng_alpha)
    else:
        alpha = random_interaction(space, float(cfg.get("alpha_norm", 0.1)), rng_alpha)
    e_h, summary = physical_hamiltonian(space, one_particle, alpha,
                                        n_samples=cfg["samples"], seed=cfg["seed"])
    verdicts = {
        "interaction_identity": summary["identity_ok"],
        "number_domination": summary["domination_ok"],
        "free_certificate_valid": summary["free_certificate"].is_valid(),
        "perturbed_certificate_valid": summary["perturbed_certificate"].is_valid(),
        "unique_ground_state": summary["m0"] == 1,
        "strictly_positive_ground_state": summary["strictly_positive"],
        "pipeline": summary["verdict"],
    }
    margins = {
        "mu": summary["mu"],
        "beta": summary["beta"],
        "identity_margin": summary["interaction_identity_margin"],
        "domination_margin": summary["number_domination_margin"],
        "lambda_h": e_h.lambda0,
        "m0": summary["m0"],
        "ground_min_eigenvalue": summary["ground_min_eigenvalue"],
    }
    tables = {"stability": [
        {"bound": name, "lhs": sides["lhs"], "rhs": sides["rhs"],
         "slack": sides["rhs"] - sides["lhs"], "holds": sides["holds"]}
        for name, sides in summary["stability"].bounds.items()
    ]}
    return verdicts, margins, tables


_COMMANDS = {
    "car-check": _cmd_car_check,
    "lsi-scan": _cmd_lsi_scan,
    "ground-state": _cmd_ground_state,
    "perturb": _cmd_perturb,
    "converge": _cmd_converge,
    "physical": _cmd_physical,
}


def execute(config: dict) -> RunResult:
    """Validate and run one command; write outputs if the config names a path."""
    cfg = validate_config(config)
    start = time.perf_counter()
    verdicts, margins, tables = _COMMANDS[cfg["command"]](cfg)
    wall = time.perf_counter() - start
    result = RunResult(command=cfg["command"], config=cfg, verdicts=verdicts,
                       margins=margins, tables=tables, wall_time_s=wall)
    if cfg.get("out"):
        result.write(cfg["out"], csv_tables=bool(cfg.get("csv", True)))
    return result
