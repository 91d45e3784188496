"""Deterministic random generators and constructed state families.

All randomness flows through counter-based Philox streams keyed by
(seed, stream index), so per-sample sub-seeds survive any execution order.
"""

from __future__ import annotations

import numpy as np

from .algebra import CliffordElement
from .modes import ModeSpace
from .standard_form import L2Vector, State


def sub_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """A Philox stream keyed by (seed, stream); independent per stream index."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))


def random_element(space: ModeSpace, rng: np.random.Generator, scale: float = 1.0) -> CliffordElement:
    """Ginibre-type element: iid complex Gaussian monomial coefficients."""
    coeffs = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
    return CliffordElement(space, scale * coeffs / np.sqrt(2.0 * space.dim))


def random_selfadjoint(space: ModeSpace, rng: np.random.Generator, scale: float = 1.0) -> CliffordElement:
    g = random_element(space, rng)
    h = g + g.adjoint()
    return CliffordElement(space, (scale / 2.0) * h.coeffs)


def random_state(space: ModeSpace, rng: np.random.Generator,
                 smoothing: float = 0.0) -> State:
    """rho = G G* / tau(G G*) for a Ginibre element G; full rank almost surely.

    ``smoothing`` mixes in that fraction of the trace density, which bounds the
    condition number when the state is used as a faithful reference.
    """
    g = random_element(space, rng)
    rho = g * g.adjoint()
    rho = CliffordElement(space, rho.coeffs / rho.trace().real)
    if smoothing > 0.0:
        rho = CliffordElement(
            space, (1.0 - smoothing) * rho.coeffs + smoothing * CliffordElement.identity(space).coeffs)
    return State(rho, check=False)


def random_cone_vector(space: ModeSpace, rng: np.random.Generator) -> L2Vector:
    """A unit cone vector sqrt(rho) xi_tau from a Ginibre density."""
    return random_state(space, rng).vector().normalized()


def random_real_vector(space: ModeSpace, rng: np.random.Generator) -> L2Vector:
    """A unit real vector (J xi = xi), i.e. a_xi self-adjoint."""
    a = random_selfadjoint(space, rng)
    return L2Vector(space, a.coeffs).normalized()


def corner_cone_vectors(space: ModeSpace) -> list[L2Vector]:
    """Deterministic low-rank cone vectors: xi_tau, the generator half-projections
    (1 ± e_i)/sqrt(2) xi_tau, and compressed pair projections p_i p_j p_i xi_tau."""
    one = CliffordElement.identity(space)
    out = [L2Vector(space, one.coeffs)]
    projs = []
    for i in range(1, space.n + 1):
        e = CliffordElement.generator(space, i)
        for sgn in (+1.0, -1.0):
            p = CliffordElement(space, (one.coeffs + sgn * e.coeffs) / 2.0)
            projs.append(p)
            out.append(L2Vector(space, p.coeffs).normalized())
    for i in range(0, len(projs), 2):
        for j in range(i + 2, len(projs), 2):
            comp = projs[i] * projs[j] * projs[i]
            nrm = np.linalg.norm(comp.coeffs)
            if nrm > 1e-12:
                out.append(L2Vector(space, comp.coeffs / nrm))
    return out


def two_point_state(space: ModeSpace, mode: int, r: float) -> State:
    """rho = 1 + r e_mode, the two-point density with eigenvalues 1 ± r."""
    if not 0.0 <= r <= 1.0:
        raise ValueError("two-point parameter must lie in [0, 1]")
    one = CliffordElement.identity(space)
    e = CliffordElement.generator(space, mode)
    return State(CliffordElement(space, one.coeffs + r * e.coeffs), check=False)


# ---------------------------------------------------------------------- #
# constructed families for the convergence theorems


def scale_family(space: ModeSpace, length: int = 16, ratio: float = 16.0) -> list[State]:
    """phi_m = ratio^{-m} tau: norms, tails and overlaps all decay to zero."""
    one = CliffordElement.identity(space)
    return [State(CliffordElement(space, one.coeffs * ratio ** (-m)), check=False)
            for m in range(1, length + 1)]


def constant_family(space: ModeSpace, length: int = 8, seed: int = 11) -> list[State]:
    """phi_m = phi fixed: norm does not vanish; the finite family is still
    uniformly integrable."""
    phi = random_state(space, sub_rng(seed, 0), smoothing=0.05)
    return [phi] * length


def escaping_mass_family(space: ModeSpace, length: int = 8, psi_weight: float = 1e-10,
                         growth: float = 4.0, decay: float = 0.25):
    """Spectral mass escaping upward: vanishing relative to psi but not UI.

    On the corner p = (1 + e_1)/2 the reference density puts weight
    2*psi_weight while the members put the growing weight growth^m there (and
    a decaying weight elsewhere), so every fixed spectral window eventually
    sees only psi-mass psi_weight, yet the members' own mass growth^m/2 runs
    away to high spectrum.  Returns (members, psi).
    """
    if not 0.0 < psi_weight < 0.5:
        raise ValueError("psi_weight must lie in (0, 1/2)")
    one = CliffordElement.identity(space).coeffs
    e1 = CliffordElement.generator(space, 1).coeffs
    # 2u p + 2(1-u)(1-p) = 1 + (2u - 1) e_1
    psi = State(CliffordElement(space, one + (2.0 * psi_weight - 1.0) * e1), check=False)
    members = []
    for m in range(1, length + 1):
        g, d = growth ** m, decay ** m
        # g p + d (1-p) = (g+d)/2 + (g-d)/2 e_1
        members.append(State(CliffordElement(
            space, 0.5 * (g + d) * one + 0.5 * (g - d) * e1), check=False))
    return members, psi
