"""Standard form of the Clifford algebra: L^2 vectors, cone calculus, states.

L^2(M, tau) is identified with Fock space through the duality transform, so a
vector xi is a coefficient array and a_xi is the Clifford element with those
coefficients.  The modular conjugation is J(a xi_tau) = a* xi_tau, the
positive cone is L^2_+ = {xi : a_xi >= 0}, and states are given by densities
rho with xi_phi = sqrt(rho) xi_tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import CliffordElement, trace_product
from .modes import ModeSpace

REAL_TOL = 1e-12
CONE_TOL = 1e-10
FAITHFUL_TOL = 1e-12


class L2Vector:
    """A vector of the standard-form Hilbert space in Fock coordinates."""

    __slots__ = ("space", "fock", "_element")

    def __init__(self, space: ModeSpace, fock):
        fock = np.asarray(fock, dtype=complex)
        if fock.shape != (space.dim,):
            raise ValueError(f"expected {space.dim} coordinates, got shape {fock.shape}")
        self.space = space
        self.fock = fock
        self._element = None

    @property
    def element(self) -> CliffordElement:
        """The algebra element a_xi with xi = a_xi xi_tau (same coordinates)."""
        if self._element is None:
            self._element = CliffordElement(self.space, self.fock)
        return self._element

    def norm(self) -> float:
        return float(np.linalg.norm(self.fock))

    def inner(self, other: "L2Vector") -> complex:
        return complex(np.vdot(self.fock, other.fock))

    def normalized(self) -> "L2Vector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return L2Vector(self.space, self.fock / nrm)

    def is_real(self, tol: float = REAL_TOL) -> bool:
        """Whether J xi = xi (equivalently a_xi is self-adjoint)."""
        scale = max(np.abs(self.fock).max(), 1.0)
        dev = np.abs(self.space.conjugation_signs * np.conj(self.fock) - self.fock).max()
        return bool(dev <= tol * scale)

    def is_positive(self, tol: float = CONE_TOL) -> bool:
        return cone_defect(self) <= tol

    def __add__(self, other):
        return L2Vector(self.space, self.fock + other.fock)

    def __sub__(self, other):
        return L2Vector(self.space, self.fock - other.fock)

    def __mul__(self, t):
        return L2Vector(self.space, self.fock * t)

    __rmul__ = __mul__

    def __repr__(self):
        return f"L2Vector(n={self.space.n}, norm={self.norm():.6g})"


@dataclass
class ConePair:
    """Jordan decomposition xi = positive - negative with orthogonal parts."""

    positive: L2Vector
    negative: L2Vector


def trace_vector(space: ModeSpace) -> L2Vector:
    """xi_tau, the GNS vector of the trace (the Fock vacuum)."""
    fock = np.zeros(space.dim, dtype=complex)
    fock[0] = 1.0
    return L2Vector(space, fock)


def conjugation(xi: L2Vector) -> L2Vector:
    """The modular conjugation J(a xi_tau) = a* xi_tau (antiunitary)."""
    return L2Vector(xi.space, xi.space.conjugation_signs * np.conj(xi.fock))


def left_action(a: CliffordElement, xi: L2Vector) -> L2Vector:
    return L2Vector(xi.space, a.matrix @ xi.fock)


def right_action(a: CliffordElement, xi: L2Vector) -> L2Vector:
    """xi = b xi_tau  ->  (b a) xi_tau."""
    return L2Vector(xi.space, a.right_matrix() @ xi.fock)


# ---------------------------------------------------------------------- #
# cone calculus


def cone_defect(xi: L2Vector) -> float:
    """max(0, -min eig a_xi) / max(||a_xi||, 1): scaled distance from positivity."""
    if not xi.is_real(tol=1e-8):
        return float("inf")
    w, _ = xi.element.eigh()
    scale = max(np.abs(w).max(), 1.0)
    return float(max(0.0, -w[0]) / scale)


def cone_membership(xi: L2Vector, tol: float = CONE_TOL) -> bool:
    return cone_defect(xi) <= tol


def positive_decomposition(xi: L2Vector) -> ConePair:
    """xi = xi_+ - xi_- with xi_± in the cone and (xi_+ | xi_-) = 0.

    Computed by spectral calculus of a_xi; this coincides with the metric
    projection onto the cone because the cone is self-dual.
    """
    if not xi.is_real(tol=1e-8):
        raise ValueError("positive decomposition requires a real vector (J xi = xi)")
    pos = xi.element.positive_part()
    positive = L2Vector(xi.space, pos.coeffs)
    negative = positive - xi
    return ConePair(positive=positive, negative=negative)


def modulus(xi: L2Vector) -> L2Vector:
    """|xi| = xi_+ + xi_-, the vector of |a_xi|."""
    if not xi.is_real(tol=1e-8):
        raise ValueError("modulus requires a real vector")
    return L2Vector(xi.space, xi.element.absolute_value().coeffs)


def wedge(xi: L2Vector, xi_psi: L2Vector) -> L2Vector:
    """xi ∧ xi_psi = xi_psi - (xi_psi - xi)_+ : projection onto {eta <= xi_psi}."""
    if not xi.is_real(tol=1e-8):
        raise ValueError("wedge requires a real vector")
    if not cone_membership(xi_psi):
        raise ValueError("wedge requires a cone reference vector")
    return xi_psi - positive_decomposition(xi_psi - xi).positive


def trace_wedge(xi: L2Vector) -> L2Vector:
    """xi ∧ xi_tau through functional calculus min(s, 1) of a_xi."""
    if not xi.is_real(tol=1e-8):
        raise ValueError("wedge requires a real vector")
    capped = xi.element.functional_calculus(lambda w: np.minimum(w, 1.0))
    return L2Vector(xi.space, capped.coeffs)


# ---------------------------------------------------------------------- #
# states


class State:
    """A positive normal functional phi(a) = tau(rho a) with density rho.

    ``norm`` is phi(1) = tau(rho); states proper have norm 1.
    """

    __slots__ = ("space", "rho", "_vector")

    def __init__(self, rho: CliffordElement, check: bool = True, tol: float = CONE_TOL):
        self.space = rho.space
        if check:
            if not rho.is_selfadjoint(tol=1e-10):
                raise ValueError("a density must be self-adjoint")
            w, _ = rho.eigh()
            if w[0] < -tol * max(np.abs(w).max(), 1.0):
                raise ValueError(f"a density must be positive (min eigenvalue {w[0]:.3e})")
        self.rho = rho
        self._vector = None

    @classmethod
    def trace_state(cls, space: ModeSpace) -> "State":
        return cls(CliffordElement.identity(space), check=False)

    @classmethod
    def from_vector(cls, xi: L2Vector, tol: float = CONE_TOL) -> "State":
        """The vector state of a cone vector: rho = a_xi^2."""
        if not cone_membership(xi, tol):
            raise ValueError("vector states of the cone require a positive vector")
        a = xi.element
        return cls(a * a, check=False)

    @property
    def norm(self) -> float:
        """phi(1) = tau(rho), the functional norm of a positive functional."""
        return float(self.rho.trace().real)

    def is_state(self, tol: float = 1e-10) -> bool:
        return abs(self.norm - 1.0) <= tol

    def expect(self, a: CliffordElement) -> complex:
        """phi(a) = tau(rho a)."""
        return trace_product(self.rho, a)

    def vector(self) -> L2Vector:
        """xi_phi = sqrt(rho) xi_tau, the cone representative of phi."""
        if self._vector is None:
            self._vector = L2Vector(self.space, self.rho.sqrt().coeffs)
        return self._vector

    def support(self, tol: float = 1e-12) -> CliffordElement:
        """The support projection s_phi of the density."""
        return self.rho.support(tol)

    def is_faithful(self, tol: float = FAITHFUL_TOL) -> bool:
        """min eig(rho) > tol * ||rho|| (strictly positive density)."""
        w, _ = self.rho.eigh()
        return bool(w[0] > tol * max(np.abs(w).max(), 1.0))

    def __repr__(self):
        return f"State(n={self.space.n}, norm={self.norm:.6g}, faithful={self.is_faithful()})"


def state_vector(phi: State) -> L2Vector:
    return phi.vector()


def support_projection(phi: State) -> CliffordElement:
    return phi.support()


def is_faithful(phi: State) -> bool:
    return phi.is_faithful()


# ---------------------------------------------------------------------- #
# axioms report


def standard_form_axioms(space: ModeSpace, samples: int = 24, seed: int = 7,
                         commutant_limit: int = 5) -> dict:
    """Numerical audit of the standard-form axioms.

    Returns a report with: the commutation margin of J M J against M, the
    numerically computed commutant and center dimensions, cone invariance
    under J and under a J a J, and the identity J a J = right multiplication
    by a*.  Factoriality is reported through the center dimension, never
    asserted.
    """
    n, dim = space.n, space.dim
    if n > commutant_limit:
        raise ValueError(f"commutant computation is limited to n <= {commutant_limit}")
    rng = np.random.default_rng(seed)
    gens = [CliffordElement.generator(space, i).matrix for i in range(1, n + 1)]
    sigma = space.conjugation_signs

    def conj_by_J(mat):
        return (sigma[:, None] * np.conj(mat)) * sigma[None, :]

    # J M J commutes with M (generators suffice on both sides)
    comm_margin = 0.0
    for gi in gens:
        jgj = conj_by_J(gi)
        for gj in gens:
            comm_margin = max(comm_margin, np.abs(jgj @ gj - gj @ jgj).max())

    # commutant dimension: solve [X, e_i] = 0 for all generators
    rows = []
    eye = np.eye(dim)
    for g in gens:
        rows.append(np.kron(g.T, eye) - np.kron(eye, g))
    stacked = np.vstack(rows)
    svals = np.linalg.svd(stacked, compute_uv=False)
    commutant_dim = int(np.sum(svals <= 1e-8 * max(svals.max(), 1.0)))

    # center dimension: elements commuting with every generator, inside M
    cmaps = []
    for i in range(1, n + 1):
        gi = CliffordElement.generator(space, i)
        lm = gi.matrix
        rm = gi.right_matrix()
        cmaps.append(lm - rm)  # coeffs of e_i a - a e_i as a linear map on coeffs
    cstack = np.vstack(cmaps)
    csvals = np.linalg.svd(cstack, compute_uv=False)
    center_dim = int(np.sum(csvals <= 1e-8 * max(csvals.max(), 1.0)))

    # J a J = right multiplication by a*
    jaj_margin = 0.0
    for _ in range(samples):
        coeffs = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        a = CliffordElement(space, coeffs / np.linalg.norm(coeffs))
        jaj = conj_by_J(a.matrix)
        jaj_margin = max(jaj_margin, np.abs(jaj - a.adjoint().right_matrix()).max())

    # cone invariance under J and under a J a J
    j_cone_margin = 0.0
    ajaj_margin = 0.0
    for _ in range(samples):
        g = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        gel = CliffordElement(space, g)
        pos = gel * gel.adjoint()
        eta = L2Vector(space, pos.coeffs / np.linalg.norm(pos.coeffs))
        j_cone_margin = max(j_cone_margin, np.linalg.norm(conjugation(eta).fock - eta.fock))
        coeffs = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        a = CliffordElement(space, coeffs / np.linalg.norm(coeffs))
        amat = a.matrix
        v = amat @ (conj_by_J(amat) @ eta.fock)
        ajaj_margin = max(ajaj_margin, cone_defect(L2Vector(space, v)))

    return {
        "n": n,
        "jmj_commutes_margin": float(comm_margin),
        "commutant_dim": commutant_dim,
        "jmj_dim": dim,  # dim J M J = dim M
        "jmj_equals_commutant": commutant_dim == dim,
        "center_dim": center_dim,
        "jaj_right_mult_margin": float(jaj_margin),
        "j_fixes_cone_margin": float(j_cone_margin),
        "ajaj_preserves_cone_margin": float(ajaj_margin),
        "samples": samples,
    }
