"""Logarithmic Sobolev certificates, best constants, and ground states.

The inequality checked throughout is

    S(phi_xi | psi) <= beta * (E[xi] - gamma)     (unit xi in the cone)

so a certificate is the measured worst deficiency S - beta*(E - gamma) over
samples plus a multi-start ascent.  A valid certificate bounds the ground
multiplicity by e^{beta*(lambda0 - gamma)} and, below ln 2, forces a unique,
strictly positive ground vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import CliffordElement
from .forms import EnergyForm, check_markovian
from .modes import ModeSpace
from .sampling import corner_cone_vectors, random_state, sub_rng, two_point_state
from .standard_form import L2Vector, State, cone_defect, modulus

CERT_TOL = 1e-9
ENERGY_FLOOR = 1e-6
GAMMA_MARGIN = 1e-4


# ---------------------------------------------------------------------- #
# deficiency evaluation


def _log_density(psi: State) -> np.ndarray:
    if not psi.is_faithful():
        raise ValueError("the reference state must be faithful")
    return psi.rho.functional_calculus(np.log).matrix


def _entropy_energy(form: EnergyForm, psi_log: np.ndarray, phi: State) -> tuple[float, float]:
    """(S(phi|psi), E[xi_phi]) for a unit state phi."""
    dim = phi.space.dim
    w, _ = phi.rho.eigh()
    w = np.maximum(w, 0.0)
    mask = w > 0.0
    ent = float(np.sum(w[mask] * np.log(w[mask]))) / dim
    cross = float(np.sum(phi.rho.matrix * psi_log.T).real) / dim
    energy = form.value(phi.vector())
    return ent - cross, energy


def deficiency(form: EnergyForm, psi: State, beta: float, gamma: float,
               phi: State) -> float:
    """S(phi|psi) - beta*(E[xi_phi] - gamma)."""
    s, e = _entropy_energy(form, _log_density(psi), phi)
    return s - beta * (e - gamma)


# ---------------------------------------------------------------------- #
# probes and the ascent optimizer


def _probe_states(space: ModeSpace, psi: State, seed: int, n_samples: int) -> list[State]:
    """Deterministic probe set: Ginibre states, cone corners, the two-point
    ray on mode 1, and mixtures shrinking onto psi."""
    probes = [random_state(space, sub_rng(seed, j)) for j in range(n_samples)]
    probes.extend(State.from_vector(v) for v in corner_cone_vectors(space))
    for r in np.geomspace(2e-3, 1.0, 12):
        probes.append(two_point_state(space, 1, float(r)))
    anchor = random_state(space, sub_rng(seed, n_samples + 1))
    one = CliffordElement.identity(space)
    for eps in np.geomspace(1e-3, 0.5, 8):
        coeffs = (1.0 - eps) * psi.rho.coeffs + eps * anchor.rho.coeffs
        probes.append(State(CliffordElement(space, coeffs), check=False))
    probes.append(State(CliffordElement(space, psi.rho.coeffs.copy()), check=False))
    probes.append(State(one, check=False))
    return probes


def _theta_phase(space: ModeSpace) -> np.ndarray:
    # coefficients of a self-adjoint element are real on even-sign monomials
    # and imaginary on odd-sign ones
    return np.where(space.conjugation_signs > 0, 1.0 + 0.0j, 1.0j)


def _theta_state(space: ModeSpace, theta: np.ndarray) -> State | None:
    a = CliffordElement(space, theta * _theta_phase(space))
    rho = a * a
    t = rho.trace().real
    if t <= 1e-280:
        return None
    return State(CliffordElement(space, rho.coeffs / t), check=False)


def _ascend(space: ModeSpace, objective, rng, starts: int = 16, iters: int = 60,
            fd: float = 1e-6, extra_starts: list | None = None) -> tuple[float, np.ndarray | None]:
    """Multi-start projected gradient ascent on the unit theta sphere.

    The objective is scale-invariant in theta, so iterates stay normalized.
    Gradients are central finite differences; no global-optimality claim.
    """
    dim = space.dim
    start_list = [rng.standard_normal(dim) for _ in range(max(starts - 1, 0))]
    e0 = np.zeros(dim)
    e0[0] = 1.0
    start_list.append(e0 + 1e-3 * rng.standard_normal(dim))
    if extra_starts:
        start_list.extend(extra_starts)
    best_val, best_theta = -np.inf, None
    for theta0 in start_list:
        theta = theta0 / np.linalg.norm(theta0)
        f = objective(theta)
        step = 0.25
        for _ in range(iters):
            grad = np.zeros(dim)
            for k in range(dim):
                up = theta.copy()
                dn = theta.copy()
                up[k] += fd
                dn[k] -= fd
                grad[k] = (objective(up) - objective(dn)) / (2.0 * fd)
            gnorm = np.linalg.norm(grad)
            if not np.isfinite(gnorm) or gnorm < 1e-12:
                break
            moved = False
            while step >= 1e-10:
                trial = theta + step * grad / gnorm
                trial = trial / np.linalg.norm(trial)
                ft = objective(trial)
                if ft > f + 1e-15:
                    theta, f, moved = trial, ft, True
                    step = min(step * 1.5, 1.0)
                    break
                step *= 0.5
            if not moved:
                break
        if f > best_val:
            best_val, best_theta = f, theta
    return best_val, best_theta


# ---------------------------------------------------------------------- #
# certificates


@dataclass
class LsiCertificate:
    """Measured certificate for S(phi_xi|psi) <= beta*(E[xi] - gamma)."""

    beta: float
    gamma: float
    psi: State
    worst_deficiency: float
    n_samples: int
    form_label: str = ""
    tol: float = CERT_TOL
    optimizer_report: dict = field(default_factory=dict)
    samples_table: np.ndarray | None = None  # rows (S, E, deficiency)

    def is_valid(self, tol: float | None = None) -> bool:
        return self.worst_deficiency <= (self.tol if tol is None else tol)


def lsi_check(form: EnergyForm, psi: State, beta: float, gamma: float,
              n_samples: int = 400, seed: int = 2026, starts: int = 16,
              tol: float = CERT_TOL) -> LsiCertificate:
    """Evaluate the deficiency on probes plus a multi-start ascent.

    The probe set is deterministic in ``seed``; the certificate records the
    worst observed deficiency, the free-energy estimate min(E - S/beta), and
    whether gamma equals E[xi_psi] (in which case validity states the
    energy-variation form of the inequality).
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    psi_log = _log_density(psi)
    space = form.space
    probes = _probe_states(space, psi, seed, n_samples)
    table = np.zeros((len(probes), 3))
    for idx, phi in enumerate(probes):
        s, e = _entropy_energy(form, psi_log, phi)
        table[idx] = (s, e, s - beta * (e - gamma))
    sample_worst = float(table[:, 2].max())

    def objective(theta):
        st = _theta_state(space, theta)
        if st is None:
            return -np.inf
        s, e = _entropy_energy(form, psi_log, st)
        return s - beta * (e - gamma)

    opt_val, _ = _ascend(space, objective, sub_rng(seed, 10 ** 6), starts=starts)
    worst = max(sample_worst, opt_val)
    energy_at_psi = form.value(psi.vector())
    report = {
        "starts": starts,
        "optimizer_best": float(opt_val),
        "sample_best": sample_worst,
        "free_energy_gamma_estimate": float(np.min(table[:, 1] - table[:, 0] / beta)),
        "energy_at_psi": float(energy_at_psi),
        "gamma_is_ground_energy": bool(abs(gamma - energy_at_psi) <= 1e-12),
    }
    return LsiCertificate(beta=beta, gamma=gamma, psi=psi, worst_deficiency=float(worst),
                          n_samples=len(probes), form_label=form.label, tol=tol,
                          optimizer_report=report, samples_table=table)


def lsi_best_constants(form: EnergyForm, psi: State, seed: int = 2026,
                       n_samples: int = 800, starts: int = 16,
                       gamma: float = 0.0,
                       energy_floor: float = ENERGY_FLOOR) -> dict:
    """Estimate beta* = sup S(phi_xi|psi) / (E[xi] - gamma) with gamma fixed.

    The ratio is evaluated above an energy floor (the sup is typically
    approached as xi -> xi_psi where S and E both vanish; the floor keeps
    rounding noise in S/E bounded by ~1e-9).  The estimate is a lower bound:
    grid plus local ascent, no global claim.
    """
    psi_log = _log_density(psi)
    space = form.space
    probes = _probe_states(space, psi, seed, n_samples)
    best_ratio, best_idx = -np.inf, None
    for idx, phi in enumerate(probes):
        s, e = _entropy_energy(form, psi_log, phi)
        if e - gamma >= energy_floor:
            ratio = s / (e - gamma)
            if ratio > best_ratio:
                best_ratio, best_idx = ratio, idx
    if best_idx is None:
        raise ValueError("no probe has energy above the floor; the form is "
                         "degenerate at this gamma")

    def objective(theta):
        st = _theta_state(space, theta)
        if st is None:
            return -np.inf
        s, e = _entropy_energy(form, psi_log, st)
        if e - gamma < energy_floor:
            return -np.inf
        return s / (e - gamma)

    phase = _theta_phase(space)
    near_psi = np.real(psi.rho.sqrt().coeffs / phase).astype(float)
    e1 = np.zeros(space.dim)
    e1[0] = 1.0
    if space.dim > 1:
        e1[1] = 2e-3
    opt_val, _ = _ascend(space, objective, sub_rng(seed, 10 ** 6 + 1), starts=starts,
                         extra_starts=[near_psi + 1e-3, e1])
    beta_star = float(max(best_ratio, opt_val))
    return {
        "beta_star": beta_star,
        "gamma": gamma,
        "grid_best": float(best_ratio),
        "optimizer_best": float(opt_val),
        "energy_floor": energy_floor,
        "n_samples": len(probes),
        "form_label": form.label,
    }


def measure_gamma(form: EnergyForm, psi: State, beta: float, seed: int = 2026,
                  n_samples: int = 400, starts: int = 16,
                  margin: float = GAMMA_MARGIN) -> tuple[float, dict]:
    """Measured gamma making the certificate hold: min(E - S/beta) - margin.

    Ground-eigenspace positive vectors are added to the probe set, so the
    measured constant already accounts for the entropy carried by degenerate
    ground states; the safety margin keeps a same-seed lsi_check valid.
    """
    psi_log = _log_density(psi)
    space = form.space
    probes = _probe_states(space, psi, seed, n_samples)
    report = ground_state(form)
    if report.positive_basis:
        for p in report.positive_basis:
            probes.append(State.from_vector(p.normalized()))
        if len(report.positive_basis) >= 2:
            mix = report.positive_basis[0] + report.positive_basis[1]
            probes.append(State.from_vector(mix.normalized()))
    best = -np.inf
    for phi in probes:
        s, e = _entropy_energy(form, psi_log, phi)
        best = max(best, s - beta * e)

    def objective(theta):
        st = _theta_state(space, theta)
        if st is None:
            return -np.inf
        s, e = _entropy_energy(form, psi_log, st)
        return s - beta * e

    opt_val, _ = _ascend(space, objective, sub_rng(seed, 10 ** 6 + 2), starts=starts)
    top = max(best, opt_val)
    gamma_hat = -top / beta - margin
    return float(gamma_hat), {
        "sup_entropy_minus_beta_energy": float(top),
        "optimizer_best": float(opt_val),
        "margin": margin,
        "n_probes": len(probes),
    }


# ---------------------------------------------------------------------- #
# ground states


@dataclass
class GroundStateReport:
    """Bottom eigenvalue data of an energy form."""

    form: EnergyForm
    lambda0: float
    m0: int
    eigenbasis: list[L2Vector]
    positive_basis: list[L2Vector] | None
    residuals: list[float]
    cluster_tol: float
    ground_min_eigenvalue: float | None = None  # min eig of a_{xi0} when m0 = 1
    bound: float | None = None  # filled by degeneracy_bound_check
    notes: list[str] = field(default_factory=list)

    @property
    def strictly_positive(self) -> bool:
        return (self.ground_min_eigenvalue is not None
                and self.ground_min_eigenvalue > 1e-8)


def _j_real_basis(space: ModeSpace, basis: np.ndarray) -> list[np.ndarray]:
    """Orthonormal J-real vectors spanning a J-invariant subspace."""
    sigma = space.conjugation_signs
    target = basis.shape[1]
    out: list[np.ndarray] = []
    candidates = []
    for k in range(target):
        v = basis[:, k]
        candidates.append(v + sigma * np.conj(v))
        candidates.append(1j * (v - sigma * np.conj(v)))
    for w in candidates:
        w = w.astype(complex)
        for u in out:
            w = w - u * np.vdot(u, w)
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            out.append(w / nrm)
        if len(out) == target:
            break
    if len(out) != target:
        raise ArithmeticError("failed to build a conjugation-fixed eigenbasis; "
                              "is the generator real?")
    return out


def _arc_extremes(space: ModeSpace, v0: np.ndarray, v1: np.ndarray,
                  grid: int = 1440, tol: float = 1e-11) -> list[np.ndarray] | None:
    """Extreme rays of the cone section of a 2-plane spanned by J-real vectors.

    Scans theta -> min eig of the representative of cos(theta) v0 +
    sin(theta) v1 and bisects the boundary of the nonnegative arc.  Returns
    None when the section has no interior arc structure to resolve.
    """

    def min_eig(theta: float) -> float:
        vec = np.cos(theta) * v0 + np.sin(theta) * v1
        w, _ = CliffordElement(space, vec).eigh()
        return float(w[0])

    thetas = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    vals = np.array([min_eig(t) for t in thetas])
    inside = vals >= -tol
    if not inside.any() or inside.all():
        return None
    # rotate so the scan starts outside the cone, then find the single arc
    start = int(np.argmin(inside))
    order = np.roll(np.arange(grid), -start)
    runs = []
    current = None
    for pos in range(grid):
        idx = order[pos]
        if inside[idx] and current is None:
            current = [pos, pos]
        elif inside[idx]:
            current[1] = pos
        elif current is not None:
            runs.append(current)
            current = None
    if current is not None:
        runs.append(current)
    if len(runs) != 1:
        return None
    lo_pos, hi_pos = runs[0]
    step = 2.0 * np.pi / grid

    def bisect(t_out: float, t_in: float) -> float:
        for _ in range(80):
            mid = 0.5 * (t_out + t_in)
            if min_eig(mid) >= -tol:
                t_in = mid
            else:
                t_out = mid
        return t_in

    t_lo_in = thetas[order[lo_pos]]
    t_hi_in = thetas[order[hi_pos]]
    t_lo = bisect(t_lo_in - step, t_lo_in)
    t_hi = bisect(t_hi_in + step, t_hi_in)
    extremes = []
    for t in (t_lo, t_hi):
        vec = np.cos(t) * v0 + np.sin(t) * v1
        extremes.append(vec / np.linalg.norm(vec))
    return extremes


def ground_state(form: EnergyForm, cluster_tol: float = 1e-8) -> GroundStateReport:
    """Diagonalize, cluster the bottom eigenvalue, and extract positive vectors.

    A positive representative always exists for a real form with the modulus
    contraction (the bottom eigenspace meets the cone); for m0 = 1 it is
    |xi_0|, for m0 = 2 the two extreme rays of the cone section are found by
    arc bisection when the moduli of the eigenbasis are degenerate.  If no
    construction passes its residual check, positive_basis is None with a
    note -- existence is a theorem, this particular construction is not.
    """
    space = form.space
    vals = form.eigenvalues
    lam0 = float(vals[0])
    spread = max(float(vals[-1] - vals[0]), 1.0)
    m0 = int(np.sum(vals <= lam0 + cluster_tol * spread))
    raw_basis = form.ground_space(cluster_tol * spread)
    notes: list[str] = []
    residuals: list[float] = []

    sigma = space.conjugation_signs
    h = form.matrix
    j_real_gen = bool(np.max(np.abs((sigma[:, None] * np.conj(h)) * sigma[None, :] - h)) <= 1e-10)
    if j_real_gen:
        basis_vecs = _j_real_basis(space, raw_basis)
    else:
        basis_vecs = [raw_basis[:, k] for k in range(m0)]
        notes.append("generator does not commute with J; eigenbasis left complex")
    eigenbasis = [L2Vector(space, v) for v in basis_vecs]

    def residual(vec: np.ndarray) -> float:
        return float(np.linalg.norm(h @ vec - lam0 * vec))

    positive_basis: list[L2Vector] | None = None
    ground_min_eig = None
    res_tol = 1e-8 * max(abs(lam0), 1.0)
    if j_real_gen:
        if m0 == 1:
            p = modulus(eigenbasis[0]).fock
            if np.linalg.norm(p) > 1e-12 and residual(p) <= res_tol:
                positive_basis = [L2Vector(space, p / np.linalg.norm(p))]
            else:
                notes.append("modulus of the ground vector failed its residual check")
        else:
            # moduli heuristic: acceptable only when the moduli are eigenvectors
            # with pairwise disjoint supports (orthogonal as positive vectors)
            moduli = []
            for v in basis_vecs:
                p = modulus(L2Vector(space, v)).fock
                nrm = np.linalg.norm(p)
                if nrm > 1e-12:
                    moduli.append(p / nrm)
            disjoint = all(abs(np.vdot(moduli[i], moduli[j])) <= 1e-9
                           for i in range(len(moduli)) for j in range(i + 1, len(moduli)))
            if (len(moduli) == m0 and disjoint
                    and all(residual(p) <= res_tol for p in moduli)):
                positive_basis = [L2Vector(space, p) for p in moduli]
            elif m0 == 2:
                extremes = _arc_extremes(space, basis_vecs[0], basis_vecs[1])
                if extremes is not None:
                    ok = all(residual(v) <= res_tol for v in extremes)
                    ok = ok and all(cone_defect(L2Vector(space, v)) <= 1e-9
                                    for v in extremes)
                    if ok:
                        positive_basis = [L2Vector(space, v) for v in extremes]
                        notes.append("positive basis from cone-section extreme rays")
            if positive_basis is None:
                notes.append("no positive basis construction passed its checks")
        if positive_basis:
            residuals = [residual(p.fock) for p in positive_basis]
            if m0 == 1:
                w, _ = positive_basis[0].element.eigh()
                ground_min_eig = float(w[0])
    else:
        notes.append("positive basis skipped for a non-real generator")

    return GroundStateReport(form=form, lambda0=lam0, m0=m0, eigenbasis=eigenbasis,
                             positive_basis=positive_basis, residuals=residuals,
                             cluster_tol=cluster_tol,
                             ground_min_eigenvalue=ground_min_eig, notes=notes)


def degeneracy_bound_check(report: GroundStateReport, cert: LsiCertificate,
                           tol: float = 1e-9) -> dict:
    """m0 <= e^{beta*(lambda0 - gamma)} plus the support-weight chain.

    Also verifies, for each positive basis vector, psi(s_i) >= e^{-beta*
    (lambda0-gamma)} and the partition bound sum_i psi(s_i) <= 1.
    """
    if cert.form_label != report.form.label:
        raise ValueError(f"certificate for {cert.form_label!r} does not match "
                         f"form {report.form.label!r}")
    exponent = cert.beta * (report.lambda0 - cert.gamma)
    bound = math.exp(exponent)
    report.bound = bound
    holds = report.m0 <= bound + max(tol, 1e-6)
    support_weights = []
    support_ok = True
    partition_sum = 0.0
    if report.positive_basis:
        floor = math.exp(-exponent)
        for p in report.positive_basis:
            phi_p = State.from_vector(p.normalized())
            weight = float(cert.psi.expect(phi_p.support()).real)
            support_weights.append(weight)
            support_ok = support_ok and (weight >= floor - 1e-9)
        partition_sum = float(sum(support_weights))
    partition_ok = partition_sum <= 1.0 + 1e-9
    return {
        "m0": report.m0,
        "bound": bound,
        "exponent": exponent,
        "holds": bool(holds),
        "support_weights": support_weights,
        "support_bound_holds": bool(support_ok),
        "partition_sum": partition_sum,
        "partition_holds": bool(partition_ok),
        "certificate_valid": cert.is_valid(),
        "verdict": bool(holds and support_ok and partition_ok and cert.is_valid()),
    }


def nondegeneracy_criterion(report: GroundStateReport, cert: LsiCertificate,
                            seed: int = 17) -> dict:
    """beta*(lambda0 - gamma) < ln 2 forces m0 = 1 and a ground Dirichlet form.

    When applicable, shifts the form to E0 = E - lambda0, sets psi0 to the
    ground vector state, verifies E0[xi_psi0] = 0, and re-checks Markovianity
    with respect to psi0.  Inapplicability (threshold >= ln 2) is reported,
    not raised.
    """
    if cert.form_label != report.form.label:
        raise ValueError(f"certificate for {cert.form_label!r} does not match "
                         f"form {report.form.label!r}")
    threshold = cert.beta * (report.lambda0 - cert.gamma)
    out = {
        "threshold": float(threshold),
        "ln2": math.log(2.0),
        "certificate_valid": cert.is_valid(),
        "applicable": bool(threshold < math.log(2.0) and cert.is_valid()),
    }
    if not out["applicable"]:
        out["reason"] = ("certificate invalid" if not cert.is_valid()
                         else "beta*(lambda0-gamma) >= ln 2")
        return out
    out["m0"] = report.m0
    out["m0_is_one"] = report.m0 == 1
    if report.m0 != 1 or not report.positive_basis:
        out["verdict"] = False
        return out
    ground = report.positive_basis[0].normalized()
    psi0 = State.from_vector(ground)
    e0 = report.form.shifted(-report.lambda0)
    e0_at_ground = e0.value(ground)
    markov = check_markovian(e0, psi0, samples=12, rng=sub_rng(seed, 0))
    out.update({
        "e0_at_ground": float(e0_at_ground),
        "ground_energy_zero": bool(abs(e0_at_ground) <= 1e-8),
        "markov_report": markov,
        "verdict": bool(report.m0 == 1 and abs(e0_at_ground) <= 1e-8 and markov["passed"]),
    })
    return out
