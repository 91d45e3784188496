"""Energy forms on the L2 space and their order-theoretic properties.

An EnergyForm wraps a selfadjoint generator K acting on Fock coordinates;
the quadratic form is E[xi] = (xi | K xi) and the semigroup is e^{-tK}.
The check_* functions probe realness, positivity preservation, the
contraction inequality E[|xi|] <= E[xi], and Markovianity (invariance of the
order interval [0, xi_tau]); each returns a report dict with measured
margins rather than raising, so callers can also exercise forms that are
designed to fail.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import CliffordElement
from .fock import second_quantize, _annihilator_matrix
from .modes import ModeSpace
from .standard_form import (
    L2Vector,
    State,
    cone_defect,
    conjugation,
    modulus,
    trace_vector,
    wedge,
)

DEFAULT_TIMES = (0.1, 0.5, 1.0, 2.0)


@dataclass
class EnergyForm:
    """Quadratic form xi -> (xi | K xi) with K selfadjoint on Fock space."""

    space: ModeSpace
    matrix: np.ndarray
    label: str = "energy"

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.space.dim, self.space.dim):
            raise ValueError("generator has the wrong shape for this mode space")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(mat))):
            raise ValueError("generator must be selfadjoint")
        self.matrix = (mat + mat.conj().T) / 2.0

    @cached_property
    def _eigh(self) -> tuple[np.ndarray, np.ndarray]:
        vals, vecs = np.linalg.eigh(self.matrix)
        return vals, vecs

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigh[0]

    @property
    def lambda0(self) -> float:
        """Bottom of the spectrum."""
        return float(self.eigenvalues[0])

    def degeneracy(self, tol: float = 1e-8) -> int:
        """Dimension of the bottom eigenspace, resolved at ``tol``."""
        vals = self.eigenvalues
        return int(np.sum(vals <= vals[0] + tol))

    def ground_space(self, tol: float = 1e-8) -> np.ndarray:
        """Orthonormal Fock-coordinate basis of the bottom eigenspace."""
        vals, vecs = self._eigh
        return vecs[:, vals <= vals[0] + tol]

    def value(self, xi: L2Vector) -> float:
        return float(np.vdot(xi.fock, self.matrix @ xi.fock).real)

    def semigroup_matrix(self, t: float) -> np.ndarray:
        vals, vecs = self._eigh
        return (vecs * np.exp(-t * vals)) @ vecs.conj().T

    def evolve(self, xi: L2Vector, t: float) -> L2Vector:
        return L2Vector(self.space, self.semigroup_matrix(t) @ xi.fock)

    def shifted(self, c: float) -> "EnergyForm":
        return EnergyForm(self.space, self.matrix + c * np.eye(self.space.dim),
                          label=f"{self.label}+{c:g}")


def second_quantized_form(space: ModeSpace, one_particle: np.ndarray,
                          label: str = "second-quantized") -> EnergyForm:
    """dGamma(A) as an energy form; A must be real symmetric."""
    return EnergyForm(space, second_quantize(space, one_particle).matrix, label=label)


def number_form(space: ModeSpace) -> EnergyForm:
    """The number form E[xi] = (xi | N xi) = sum_i ||a_i xi||^2."""
    return second_quantized_form(space, np.eye(space.n), label="number")


def clifford_dirichlet_form(space: ModeSpace) -> EnergyForm:
    """The canonical Dirichlet form of the gradient derivations (= number form)."""
    form = number_form(space)
    form.label = "clifford-dirichlet"
    return form


def degenerate_number_form(space: ModeSpace) -> EnergyForm:
    """Number form with the first mode's energy zeroed.

    The bottom eigenvalue 0 then has multiplicity two (vacuum and the first
    mode), giving a two-fold degenerate Markovian form whose ground cone
    extremes are (1 ± e_1) xi_tau / sqrt(2).
    """
    diag = np.ones(space.n)
    diag[0] = 0.0
    return second_quantized_form(space, np.diag(diag), label="degenerate-number")


def cone_escape_form(space: ModeSpace, gap: float = 1.0) -> EnergyForm:
    """A designed-to-fail control: ground vector outside the positive cone.

    K = gap * (I - u u*) with u the unit vector at angle pi/3 between xi_tau
    and e_1 xi_tau.  The semigroup pushes the cone toward span(u), whose
    representative has a negative spectral part, so positivity preservation
    and the modulus contraction both fail measurably.
    """
    tau = trace_vector(space).fock
    e1 = CliffordElement.generator(space, 1).coeffs
    u = np.cos(np.pi / 3) * tau + np.sin(np.pi / 3) * e1
    u = u / np.linalg.norm(u)
    mat = gap * (np.eye(space.dim) - np.outer(u, u.conj()))
    return EnergyForm(space, mat, label="cone-escape")


# ---------------------------------------------------------------------- #
# gradient derivations


class DerivationStack:
    """The n annihilation derivations delta_i with their graded Leibniz rule.

    delta_i acts on coefficients as the Fock annihilator acts on vectors;
    on the algebra it is the left partial derivative, a superderivation:
    delta_i(ab) = delta_i(a) b + grade(a) delta_i(b), with grade the parity
    automorphism.  The induced form sum_i ||delta_i xi||^2 equals the number
    form.
    """

    def __init__(self, space: ModeSpace):
        self.space = space

    def apply(self, i: int, a: CliffordElement) -> CliffordElement:
        mat = _annihilator_matrix(self.space.n, i)
        return CliffordElement(self.space, mat @ a.coeffs)

    def grade(self, a: CliffordElement) -> CliffordElement:
        return CliffordElement(self.space, self.space.parity_signs * a.coeffs)

    def leibniz_defect(self, i: int, a: CliffordElement, b: CliffordElement) -> float:
        lhs = self.apply(i, a * b)
        rhs = self.apply(i, a) * b + self.grade(a) * self.apply(i, b)
        return float(np.linalg.norm(lhs.coeffs - rhs.coeffs))

    def form_value(self, xi: L2Vector) -> float:
        total = 0.0
        for i in range(1, self.space.n + 1):
            total += float(np.linalg.norm(_annihilator_matrix(self.space.n, i) @ xi.fock) ** 2)
        return total


# ---------------------------------------------------------------------- #
# property checks (report dicts; never raise on failure)


def _random_real_vectors(space: ModeSpace, samples: int, rng) -> list[L2Vector]:
    # J-real vectors are coefficient vectors of self-adjoint elements: real
    # entries where the monomial's conjugation sign is +1, imaginary where -1
    phase = np.where(space.conjugation_signs > 0, 1.0 + 0.0j, 1.0j)
    out = []
    for _ in range(samples):
        fock = rng.standard_normal(space.dim) * phase
        out.append(L2Vector(space, fock / np.linalg.norm(fock)))
    return out


def _random_cone_vectors(space: ModeSpace, samples: int, rng) -> list[L2Vector]:
    out = []
    for _ in range(samples):
        coeffs = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        g = CliffordElement(space, coeffs)
        root = (g * g.adjoint()).sqrt()
        fock = root.coeffs / np.linalg.norm(root.coeffs)
        out.append(L2Vector(space, fock))
    return out


def check_real(form: EnergyForm, samples: int = 20, rng=None,
               times: tuple = DEFAULT_TIMES) -> dict:
    """Semigroup commutes with the conjugation: real vectors stay real."""
    rng = rng if rng is not None else np.random.default_rng(0)
    worst = 0.0
    for xi in _random_real_vectors(form.space, samples, rng):
        for t in times:
            eta = form.evolve(xi, t)
            defect = np.linalg.norm(eta.fock - conjugation(eta).fock)
            worst = max(worst, float(defect))
    return {"label": form.label, "property": "real", "worst_defect": worst,
            "passed": worst <= 1e-10}


def check_positivity_preserving(form: EnergyForm, samples: int = 20, rng=None,
                                times: tuple = DEFAULT_TIMES,
                                tol: float = 1e-10) -> dict:
    """Semigroup maps the positive cone into itself.

    Probes are random cone vectors plus the deterministic corner set; the
    certificate value is the worst (most negative) eigenvalue of the evolved
    vectors' representatives.  This is a sampled certificate, not a proof.
    """
    from .sampling import corner_cone_vectors

    rng = rng if rng is not None else np.random.default_rng(1)
    probes = _random_cone_vectors(form.space, samples, rng)
    probes.extend(corner_cone_vectors(form.space))
    worst = 0.0
    worst_eig = np.inf
    for xi in probes:
        for t in times:
            eta = form.evolve(xi, t)
            worst = max(worst, cone_defect(eta))
            if eta.is_real(tol=1e-8):
                worst_eig = min(worst_eig, float(eta.element.eigh()[0][0]))
    return {"label": form.label, "property": "positivity", "worst_defect": worst,
            "worst_min_eigenvalue": float(worst_eig),
            "samples": len(probes), "passed": worst <= tol}


def check_beurling_deny(form: EnergyForm, samples: int = 40, rng=None,
                        tol: float = 1e-9) -> dict:
    """Modulus contraction E[|xi|] <= E[xi] over random real vectors."""
    rng = rng if rng is not None else np.random.default_rng(2)
    worst = -np.inf
    for xi in _random_real_vectors(form.space, samples, rng):
        excess = form.value(modulus(xi)) - form.value(xi)
        worst = max(worst, excess)
    return {"label": form.label, "property": "modulus-contraction",
            "worst_excess": float(worst), "passed": worst <= tol}


def check_markovian(form: EnergyForm, psi: State | None = None, samples: int = 20,
                    rng=None, times: tuple = DEFAULT_TIMES, tol: float = 1e-8) -> dict:
    """Markovianity with respect to psi, by form and by semigroup.

    Form side: E[xi ∧ xi_psi] <= E[xi] over random real vectors.  Semigroup
    side: T_t xi <= xi_psi whenever xi is real with xi <= xi_psi, probed on
    wedged random vectors.  Contractivity ||T_t xi|| <= ||xi|| is checked
    alongside.  psi defaults to the trace.
    """
    rng = rng if rng is not None else np.random.default_rng(3)
    psi = psi if psi is not None else State.trace_state(form.space)
    xi_psi = psi.vector()
    worst_excess = -np.inf
    worst_interval = 0.0
    worst_expansion = -np.inf
    probes = _random_real_vectors(form.space, samples, rng)
    probes.extend(_random_cone_vectors(form.space, max(samples // 2, 1), rng))
    for xi in probes:
        capped = wedge(xi, xi_psi)
        worst_excess = max(worst_excess, form.value(capped) - form.value(xi))
        for t in times:
            eta = form.evolve(capped, t)
            worst_interval = max(worst_interval, cone_defect(xi_psi - eta))
            nrm = xi.norm()
            worst_expansion = max(worst_expansion,
                                  form.evolve(xi, t).norm() / nrm - 1.0)
    passed = (worst_excess <= tol and worst_interval <= tol
              and worst_expansion <= tol)
    return {"label": form.label, "property": "markov",
            "form_worst_excess": float(worst_excess),
            "interval_worst_defect": float(worst_interval),
            "contraction_worst_expansion": float(worst_expansion),
            "passed": bool(passed)}


def check_leibniz(space: ModeSpace, samples: int = 20, rng=None,
                  tol: float = 1e-10) -> dict:
    """Graded Leibniz rule of the annihilation derivations on random pairs."""
    rng = rng if rng is not None else np.random.default_rng(4)
    stack = DerivationStack(space)
    worst = 0.0
    for _ in range(samples):
        a = CliffordElement(space, rng.standard_normal(space.dim)
                            + 1j * rng.standard_normal(space.dim))
        b = CliffordElement(space, rng.standard_normal(space.dim)
                            + 1j * rng.standard_normal(space.dim))
        for i in range(1, space.n + 1):
            worst = max(worst, stack.leibniz_defect(i, a, b))
    return {"property": "leibniz", "worst_defect": worst, "passed": worst <= tol}


def dirichlet_report(form: EnergyForm, samples: int = 20, seed: int = 0) -> dict:
    """All order-theoretic checks for one form, bundled."""
    rng = np.random.default_rng(seed)
    return {
        "label": form.label,
        "lambda0": form.lambda0,
        "degeneracy": form.degeneracy(),
        "real": check_real(form, samples, rng),
        "positivity": check_positivity_preserving(form, samples, rng),
        "modulus_contraction": check_beurling_deny(form, 2 * samples, rng),
        "markov": check_markovian(form, samples=samples, rng=rng),
    }
