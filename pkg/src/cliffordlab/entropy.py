"""Relative entropy and spectral convergence diagnostics.

The relative modular square root R_phi is the positive operator determined by
R_phi (x xi_psi) = J x* xi_phi for x in the algebra; in coordinates it is
left multiplication by sqrt(rho_phi) composed with right multiplication by
rho_psi^{-1/2}.  Relative entropy is computed both spectrally,
S = (xi_psi | R^2 ln R^2 xi_psi), and through densities,
S = tau(rho_phi ln rho_phi - rho_phi ln rho_psi); the two routes must agree.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import CliffordElement
from .standard_form import L2Vector, State

DEFAULT_SEQ_TOL = 1e-8


def default_k_grid() -> np.ndarray:
    """Spectral thresholds 2^j for j = -2..20."""
    return 2.0 ** np.arange(-2, 21)


@dataclass
class RNOperator:
    """Eigendata of the relative square root R_phi with reference psi."""

    phi: State
    psi: State
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def apply(self, fock: np.ndarray) -> np.ndarray:
        return self.matrix @ fock

    def weights(self, xi: L2Vector) -> np.ndarray:
        """|<v_j | xi>|^2 over the eigenbasis."""
        return np.abs(self.eigenvectors.conj().T @ xi.fock) ** 2

    def tail(self, xi: L2Vector, k: float) -> float:
        """(xi | E(k, inf) xi), the spectral weight of xi strictly above k."""
        w = self.weights(xi)
        return float(np.sum(w[self.eigenvalues > k]))


def rn_operator(phi: State, psi: State) -> RNOperator:
    """Build R_phi for a faithful reference psi."""
    if phi.space.n != psi.space.n:
        raise ValueError("states live on different mode spaces")
    if not psi.is_faithful():
        raise ValueError("the reference state must be faithful")
    sqrt_phi = phi.rho.sqrt()
    inv_sqrt_psi = psi.rho.functional_calculus(lambda w: 1.0 / np.sqrt(w))
    mat = sqrt_phi.matrix @ inv_sqrt_psi.right_matrix()
    mat = (mat + mat.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(mat)
    vals = np.maximum(vals, 0.0)
    return RNOperator(phi=phi, psi=psi, matrix=mat, eigenvalues=vals, eigenvectors=vecs)


def relative_entropy(phi: State, psi: State, route: str = "spectral") -> float:
    """S(phi | psi) by the requested route ("spectral" or "density")."""
    if route == "spectral":
        rn = rn_operator(phi, psi)
        lam2 = rn.eigenvalues ** 2
        w = rn.weights(psi.vector())
        mask = lam2 > 0.0
        return float(np.sum(lam2[mask] * np.log(lam2[mask]) * w[mask]))
    if route == "density":
        if not psi.is_faithful():
            raise ValueError("the reference state must be faithful")
        dim = phi.space.dim
        w_phi, _ = phi.rho.eigh()
        w_phi = np.maximum(w_phi, 0.0)
        mask = w_phi > 0.0
        ent = float(np.sum(w_phi[mask] * np.log(w_phi[mask]))) / dim
        log_psi = psi.rho.functional_calculus(np.log)
        cross = float(np.trace(phi.rho.matrix @ log_psi.matrix).real) / dim
        return ent - cross
    raise ValueError(f"unknown route {route!r}; expected 'spectral' or 'density'")


def support_entropy_bound(phi: State, psi: State, tol: float = 1e-10) -> tuple[float, float]:
    """(S(phi|psi), -ln psi(s_phi)); the entropy dominates the support bound.

    Raises ArithmeticError if the bound fails beyond ``tol`` (it cannot fail
    mathematically, so a violation flags numerical breakdown).
    """
    if not (phi.is_state() and psi.is_state()):
        raise ValueError("the support bound is stated for unit-norm states")
    s = relative_entropy(phi, psi, route="density")
    weight = psi.expect(phi.support()).real
    bound = -math.log(weight)
    if s < bound - tol:
        raise ArithmeticError(f"support bound violated: S={s!r} < {bound!r}")
    return s, bound


def entropy_tail_bound_check(phi: State, psi: State,
                             k_grid: np.ndarray | None = None) -> dict:
    """Tail weights (xi_phi | E^phi(k, inf) xi_phi) against two entropy bounds.

    The provable bound is tail(k) <= S_+ / (2 ln k) for k > 1, where
    S_+ = (xi_phi | max(ln R^2, 0) xi_phi) is the positive part of the
    spectral entropy integral; it holds because on the tail ln lambda^2
    exceeds 2 ln k and the remaining spectrum at or above 1 only adds
    nonnegative terms.  The naive bound replaces S_+ with the full relative
    entropy S = S_+ - S_-; since S_- <= 1/e for unit states it is correct up
    to 1/(2 e ln k) and asymptotically sharp, but it can genuinely fail at
    small k when the spectrum below 1 carries weight (``worst_slack`` then
    goes negative while ``provable_worst_slack`` never does).
    """
    if k_grid is None:
        k_grid = default_k_grid()
    ks = np.asarray([k for k in k_grid if k > 1.0])
    rn = rn_operator(phi, psi)
    s = relative_entropy(phi, psi, route="density")
    xi_phi = phi.vector()
    lam2 = rn.eigenvalues ** 2
    w_phi = rn.weights(xi_phi)
    mask = lam2 > 1.0
    s_plus = float(np.sum(np.log(lam2[mask]) * w_phi[mask]))
    tails = np.array([rn.tail(xi_phi, k) for k in ks])
    bounds = s / (2.0 * np.log(ks))
    provable = s_plus / (2.0 * np.log(ks))
    slack = bounds - tails
    provable_slack = provable - tails
    return {
        "entropy": s,
        "entropy_positive_part": s_plus,
        "k": ks,
        "tails": tails,
        "bounds": bounds,
        "provable_bounds": provable,
        "worst_slack": float(slack.min()) if len(ks) else float("inf"),
        "provable_worst_slack": (float(provable_slack.min())
                                 if len(ks) else float("inf")),
    }


# ---------------------------------------------------------------------- #
# sequence diagnostics


@dataclass
class SequenceDiagnostics:
    """Per-member, per-threshold spectral bookkeeping of a state sequence.

    Tables are indexed [member, k]; ``verdicts`` carries the threshold
    decisions together with the tolerance that produced them (the tables are
    the primary output, the booleans are a summary).
    """

    k_grid: np.ndarray
    tail_psi: np.ndarray
    tail_self: np.ndarray
    norms: np.ndarray
    overlaps: np.ndarray
    tol: float
    verdicts: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []
        for m in range(len(self.norms)):
            for j, k in enumerate(self.k_grid):
                out.append({
                    "n": m + 1,
                    "k": float(k),
                    "tail_psi": float(self.tail_psi[m, j]),
                    "tail_self": float(self.tail_self[m, j]),
                    "norm": float(self.norms[m]),
                    "overlap": float(self.overlaps[m]),
                })
        return out

    def to_csv(self, path) -> None:
        rows = self.rows()
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["n", "k", "tail_psi", "tail_self",
                                                    "norm", "overlap"])
            writer.writeheader()
            writer.writerows(rows)


def _sequence_tables(seq: list[State], psi: State, k_grid: np.ndarray) -> tuple:
    tail_psi = np.zeros((len(seq), len(k_grid)))
    tail_self = np.zeros_like(tail_psi)
    norms = np.zeros(len(seq))
    overlaps = np.zeros(len(seq))
    xi_psi = psi.vector()
    for m, phi in enumerate(seq):
        rn = rn_operator(phi, psi)
        xi_phi = phi.vector()
        w_psi = rn.weights(xi_psi)
        w_self = rn.weights(xi_phi)
        for j, k in enumerate(k_grid):
            mask = rn.eigenvalues > k
            tail_psi[m, j] = np.sum(w_psi[mask])
            tail_self[m, j] = np.sum(w_self[mask])
        norms[m] = phi.norm
        overlaps[m] = float(xi_psi.inner(xi_phi).real)
    return tail_psi, tail_self, norms, overlaps


def relative_vanishing(seq: list[State], psi: State, k_grid: np.ndarray | None = None,
                       tol: float = DEFAULT_SEQ_TOL) -> SequenceDiagnostics:
    """Tails of the sequence relative to psi, with the vanishing verdict.

    Vanishing is declared when the final member's psi-tail sits below ``tol``
    at every grid threshold.  The overlap bound tail <= (xi_psi|xi_phi)/k is
    checked alongside and reported as a worst slack.
    """
    if k_grid is None:
        k_grid = default_k_grid()
    k_grid = np.asarray(k_grid, dtype=float)
    tail_psi, tail_self, norms, overlaps = _sequence_tables(seq, psi, k_grid)
    vanishing = bool(np.all(tail_psi[-1] <= tol))
    overlap_bound_slack = float(np.min(overlaps[:, None] / k_grid[None, :] - tail_psi))
    diag = SequenceDiagnostics(k_grid=k_grid, tail_psi=tail_psi, tail_self=tail_self,
                               norms=norms, overlaps=overlaps, tol=tol)
    diag.verdicts = {
        "vanishing": vanishing,
        "overlap_bound_worst_slack": overlap_bound_slack,
    }
    return diag


def uniform_integrability(family: list[State], psi: State,
                          k_grid: np.ndarray | None = None,
                          tol: float = DEFAULT_SEQ_TOL) -> SequenceDiagnostics:
    """Self-tails of the family, with the UI verdict.

    UI is declared when the family's largest self-tail at the top grid
    threshold sits below ``tol`` (any finite family with bounded spectrum
    passes once the grid reaches past its top eigenvalue).
    """
    if k_grid is None:
        k_grid = default_k_grid()
    k_grid = np.asarray(k_grid, dtype=float)
    tail_psi, tail_self, norms, overlaps = _sequence_tables(family, psi, k_grid)
    sup_tail = tail_self.max(axis=0)
    diag = SequenceDiagnostics(k_grid=k_grid, tail_psi=tail_psi, tail_self=tail_self,
                               norms=norms, overlaps=overlaps, tol=tol)
    diag.verdicts = {
        "uniformly_integrable": bool(sup_tail[-1] <= tol),
        "sup_tail_self": sup_tail,
    }
    return diag


def convergence_theorems(seq: list[State], psi: State,
                         k_grid: np.ndarray | None = None,
                         tol: float = DEFAULT_SEQ_TOL,
                         epsilons: tuple = (0.1, 0.01, 0.001)) -> dict:
    """Classify a sequence on the three axes (norm -> 0, vanishing, UI).

    Checks the desk-scale renditions of the two convergence statements:
    vanishing together with UI must match norm convergence, and UI together
    with vanishing overlaps must imply norm convergence.  The epsilon table
    records, for each epsilon, the UI threshold k_eps and the resulting
    norm bounds by both proofs evaluated on the final member.
    """
    if k_grid is None:
        k_grid = default_k_grid()
    k_grid = np.asarray(k_grid, dtype=float)
    diag = relative_vanishing(seq, psi, k_grid, tol)
    sup_tail = diag.tail_self.max(axis=0)
    vanishing = diag.verdicts["vanishing"]
    ui = bool(sup_tail[-1] <= tol)
    norm_to_zero = bool(diag.norms[-1] <= tol)
    overlaps_to_zero = bool(diag.overlaps[-1] <= tol)
    psi_norm2 = psi.norm

    table = []
    delta = k_grid[0]
    delta_idx = 0
    for eps in epsilons:
        idx = np.nonzero(sup_tail < eps)[0]
        if len(idx) == 0:
            table.append({"epsilon": eps, "k_eps": None})
            continue
        k_eps = float(k_grid[idx[0]])
        split_bound = float(delta ** 2 * psi_norm2
                            + k_eps ** 2 * diag.tail_psi[-1, delta_idx]
                            + diag.tail_self[-1, idx[0]])
        overlap_bound = float(diag.tail_self[-1, idx[0]] + k_eps * diag.overlaps[-1])
        table.append({
            "epsilon": eps,
            "k_eps": k_eps,
            "delta": float(delta),
            "norm_bound_split": split_bound,
            "norm_bound_overlap": overlap_bound,
            "norm_last": float(diag.norms[-1]),
            "bounds_hold": bool(diag.norms[-1] <= min(split_bound, overlap_bound) + 1e-10),
        })

    report = {
        "norm_to_zero": norm_to_zero,
        "vanishing": vanishing,
        "uniformly_integrable": ui,
        "overlaps_to_zero": overlaps_to_zero,
        "biconditional_consistent": (vanishing and ui) == norm_to_zero,
        "overlap_criterion_consistent": (not (ui and overlaps_to_zero)) or norm_to_zero,
        "epsilon_table": table,
        "diagnostics": diag,
        "tol": tol,
    }
    return report


def entropy_sublevel_separation(family: list[State], psi: State, budget: float,
                                k_grid: np.ndarray | None = None,
                                tol: float = 1e-10) -> dict:
    """Uniform overlap floor for states with entropy at most ``budget``.

    Every unit state phi with S(phi|psi) <= budget satisfies
    (xi_psi | xi_phi) >= (1 - budget/(2 ln k))/k for every k > 1; the
    certified bound is the maximum over a log grid (any grid point is a valid
    certificate).  Members over the budget raise ValueError.
    """
    if budget < 0.0:
        raise ValueError("entropy budget must be nonnegative")
    k_top = max(2.0 ** 20, math.exp(budget / 2.0 + 4.0))
    if k_grid is None:
        k_grid = np.geomspace(1.0 + 1e-6, k_top, 512)
    ks = np.asarray([k for k in k_grid if k > 1.0])
    bounds = (1.0 - budget / (2.0 * np.log(ks))) / ks
    certified = float(bounds.max())
    k_star = float(ks[int(bounds.argmax())])

    entropies, overlaps, norm_ok = [], [], []
    xi_psi = psi.vector()
    for phi in family:
        s = relative_entropy(phi, psi, route="density")
        if s > budget + tol:
            raise ValueError(f"family member has entropy {s:.6g} over the budget {budget:.6g}")
        entropies.append(s)
        overlaps.append(float(xi_psi.inner(phi.vector()).real))
        norm_ok.append(phi.norm <= psi.norm + budget + tol)
    overlaps = np.array(overlaps)
    return {
        "budget": budget,
        "certified_overlap_bound": certified,
        "k_star": k_star,
        "entropies": entropies,
        "overlaps": overlaps,
        "norm_bound_holds": bool(all(norm_ok)),
        "separated": bool(np.all(overlaps >= certified - tol)),
        "worst_margin": float((overlaps - certified).min()) if len(family) else float("inf"),
    }
