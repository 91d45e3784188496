"""Creation/annihilation operators and second quantization on Fock space.

Annihilators follow the Jordan-Wigner convention: a_i acts as the parity
string on modes below i, as the lowering operator on mode i, and as the
identity above.  With the lexicographic basis order of ModeSpace this makes
a_i |s> = (-1)^{s_1 + ... + s_{i-1}} |s - delta_i| whenever mode i is occupied.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .modes import ModeSpace

_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # |1> -> |0>
_RAISE = _LOWER.T
_PARITY = np.diag([1.0, -1.0])
_ID2 = np.eye(2)


@dataclass(frozen=True)
class FockOperator:
    """A dense operator on Fock space with a human-readable label."""

    matrix: np.ndarray
    label: str

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T, f"({self.label})*")

    def __matmul__(self, other):
        mat = other.matrix if isinstance(other, FockOperator) else other
        return self.matrix @ mat


@lru_cache(maxsize=None)
def _annihilator_matrix(n: int, i: int) -> np.ndarray:
    mat = np.array([[1.0]])
    for j in range(1, n + 1):
        if j < i:
            factor = _PARITY
        elif j == i:
            factor = _LOWER
        else:
            factor = _ID2
        mat = np.kron(mat, factor)
    mat.setflags(write=False)
    return mat


def annihilator(space: ModeSpace, i: int) -> FockOperator:
    """The annihilation operator of mode i (1-based)."""
    space.mode_mask(i)  # validates the index
    return FockOperator(_annihilator_matrix(space.n, i), f"a_{i}")


def creator(space: ModeSpace, i: int) -> FockOperator:
    """The creation operator of mode i."""
    space.mode_mask(i)
    return FockOperator(_annihilator_matrix(space.n, i).T, f"a*_{i}")


def creation_operator(space: ModeSpace, x: np.ndarray) -> FockOperator:
    """C_x = sum_i x_i a*_i; complex-linear in x."""
    x = np.asarray(x, dtype=complex).reshape(space.n)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for i in range(space.n):
        if x[i] != 0:
            mat += x[i] * _annihilator_matrix(space.n, i + 1).T
    return FockOperator(mat, "C_x")


def annihilation_operator(space: ModeSpace, y: np.ndarray) -> FockOperator:
    """A_y = (C_y)*; antilinear in y."""
    y = np.asarray(y, dtype=complex).reshape(space.n)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for i in range(space.n):
        if y[i] != 0:
            mat += np.conj(y[i]) * _annihilator_matrix(space.n, i + 1)
    return FockOperator(mat, "A_y")


def field_operator(space: ModeSpace, x: np.ndarray) -> FockOperator:
    """B_x = C_x + A_{Jx}; complex-linear, satisfies B_x B_y + B_y B_x = 2(Jx|y).

    For x in the real basis these are the self-adjoint Clifford generators
    e_i = a*_i + a_i.
    """
    x = np.asarray(x, dtype=complex).reshape(space.n)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for i in range(space.n):
        if x[i] != 0:
            a = _annihilator_matrix(space.n, i + 1)
            mat += x[i] * (a.T + a)
    return FockOperator(mat, "B_x")


def number_operator(space: ModeSpace) -> FockOperator:
    """N = dGamma(I); diagonal with the occupation numbers."""
    return FockOperator(np.diag(space.occupations.astype(float)), "N")


def _require_real_symmetric(space: ModeSpace, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.shape != (space.n, space.n):
        raise ValueError(f"expected a {space.n}x{space.n} matrix, got shape {A.shape}")
    scale = max(np.abs(A).max(), 1.0)
    if np.abs(A - A.conj().T).max() > 1e-12 * scale:
        raise ValueError("one-particle operator must be self-adjoint")
    if np.abs(A.imag).max() > 1e-12 * scale:
        raise ValueError("one-particle operator must commute with the conjugation "
                         "(real matrix in the distinguished basis)")
    return A.real


def second_quantize(space: ModeSpace, A: np.ndarray) -> FockOperator:
    """dGamma(A) = sum_ij A_ij a*_i a_j for a real-symmetric one-particle A.

    Assembled directly over the occupation basis: the (i, j) hopping term
    connects |t> (mode j occupied) to |t - delta_j + delta_i> with the product
    of the two Jordan-Wigner parity signs.
    """
    A = _require_real_symmetric(space, A)
    n, dim = space.n, space.dim
    states = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=float)
    occ_bits = [(states >> (n - i)) & 1 for i in range(1, n + 1)]  # occ_bits[i-1][t]
    # parity of modes strictly below mode i, per state
    par = np.zeros((n, dim), dtype=np.int64)
    for i in range(1, n):
        par[i] = par[i - 1] + occ_bits[i - 1]
    for j in range(1, n + 1):
        occ_j = occ_bits[j - 1].astype(bool)
        sign_j = np.where(par[j - 1][occ_j] % 2 == 0, 1.0, -1.0)
        lowered = states[occ_j] - (1 << (n - j))
        for i in range(1, n + 1):
            if A[i - 1, j - 1] == 0.0:
                continue
            free_i = ((lowered >> (n - i)) & 1) == 0
            target = lowered[free_i] + (1 << (n - i))
            par_i = np.bitwise_count((lowered[free_i] >> (n - i + 1)).astype(np.uint64))
            sign = sign_j[free_i] * np.where(par_i % 2 == 0, 1.0, -1.0)
            mat[target, states[occ_j][free_i]] += A[i - 1, j - 1] * sign
    return FockOperator(mat, "dGamma(A)")


def gamma(space: ModeSpace, U: np.ndarray) -> FockOperator:
    """Second-quantized unitary Gamma(U): x_1 ^ ... ^ x_k -> Ux_1 ^ ... ^ Ux_k.

    U must be unitary and commute with the conjugation J (i.e. be real
    orthogonal in the distinguished basis).
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (space.n, space.n):
        raise ValueError(f"expected a {space.n}x{space.n} matrix, got shape {U.shape}")
    if np.abs(U @ U.conj().T - np.eye(space.n)).max() > 1e-10:
        raise ValueError("Gamma requires a unitary one-particle matrix")
    if np.abs(U.imag).max() > 1e-12 * max(np.abs(U).max(), 1.0):
        raise ValueError("Gamma requires a one-particle matrix commuting with the conjugation")
    n, dim = space.n, space.dim
    creators = [creation_operator(space, U[:, i]).matrix for i in range(n)]
    mat = np.zeros((dim, dim), dtype=complex)
    for t in range(dim):
        col = np.zeros(dim, dtype=complex)
        col[0] = 1.0
        for i in range(n, 0, -1):  # apply highest occupied mode first
            if t & (1 << (n - i)):
                col = creators[i - 1] @ col
        mat[:, t] = col
    return FockOperator(mat, "Gamma(U)")


def parity(space: ModeSpace) -> FockOperator:
    """S = Gamma(-I), the grading symmetry (-1)^{|s|}."""
    return FockOperator(np.diag(space.parity_signs), "S")
