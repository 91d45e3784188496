"""The Clifford algebra of a mode space, realized on its Fock space.

Elements are stored as coefficient vectors over the 2^n monomial basis
e_S = e_{i_1} ... e_{i_k} (i_1 < ... < i_k, e_i the self-adjoint field
operators of the real basis).  Subsets share the occupation-basis indexing of
ModeSpace, which makes the duality transform a ~> a Omega the identity on
coordinates: e_S Omega = |s_S> with coefficient exactly +1 in the chosen
Jordan-Wigner convention, so an element's coefficient vector *is* the Fock
vector of a xi_tau, and the matrix of an element is recovered columnwise from
e_A e_B = eps(A,B) e_{A xor B} with
eps(A,B) = (-1)^{#{(a,b) in A x B : a > b}}.

The normalized trace is the vacuum state tau(a) = (Omega | a Omega); on the
algebra it coincides with tr/2^n and is tracial.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .modes import ModeSpace


@lru_cache(maxsize=None)
def _xor_table(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.uint16)
    table = idx[:, None] ^ idx[None, :]
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _sign_tables(n: int):
    """(left, right) sign tables: left[u,t] = eps(u^t, t), right[u,t] = eps(t, u^t)."""
    dim = 1 << n
    idx = np.arange(dim, dtype=np.uint64)
    x = (idx[:, None] ^ idx[None, :]).astype(np.uint64)  # u xor t
    t = np.broadcast_to(idx[None, :], (dim, dim))
    par_left = np.zeros((dim, dim), dtype=np.uint8)
    par_right = np.zeros((dim, dim), dtype=np.uint8)
    one = np.uint64(1)
    for b in range(n):
        below = np.uint64((1 << b) - 1)
        bit = np.uint64(b)
        bit_t = ((t >> bit) & one).astype(np.uint8)
        bit_x = ((x >> bit) & one).astype(np.uint8)
        par_left ^= bit_t & (np.bitwise_count(x & below) & one).astype(np.uint8)
        par_right ^= bit_x & (np.bitwise_count(t & below) & one).astype(np.uint8)
    left = np.where(par_left == 0, 1, -1).astype(np.int8)
    right = np.where(par_right == 0, 1, -1).astype(np.int8)
    left.setflags(write=False)
    right.setflags(write=False)
    return left, right


def reorder_sign(space: ModeSpace, mask_a: int, mask_b: int) -> int:
    """eps(A, B) for subset bit masks: the sign in e_A e_B = eps e_{A xor B}."""
    sign = 0
    for b in range(space.n):
        if mask_b >> b & 1:
            sign ^= int(mask_a & ((1 << b) - 1)).bit_count() & 1
    return 1 - 2 * sign


class CliffordElement:
    """An element of the Clifford algebra in monomial coordinates.

    Parameters
    ----------
    space : ModeSpace
    coeffs : array_like, shape (2^n,)
        Coefficients over the monomial basis; equal to the Fock coordinates
        of a Omega.
    """

    __slots__ = ("space", "coeffs", "_matrix", "_eigh")

    def __init__(self, space: ModeSpace, coeffs, matrix: np.ndarray | None = None):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (space.dim,):
            raise ValueError(f"expected {space.dim} coefficients, got shape {coeffs.shape}")
        self.space = space
        self.coeffs = coeffs
        self._matrix = matrix
        self._eigh = None

    # ------------------------------------------------------------------ #
    # constructors

    @classmethod
    def identity(cls, space: ModeSpace) -> "CliffordElement":
        c = np.zeros(space.dim, dtype=complex)
        c[0] = 1.0
        return cls(space, c)

    @classmethod
    def zero(cls, space: ModeSpace) -> "CliffordElement":
        return cls(space, np.zeros(space.dim, dtype=complex))

    @classmethod
    def monomial(cls, space: ModeSpace, modes: Iterable[int]) -> "CliffordElement":
        """e_S for S a set of mode indices (1-based, strictly between 1 and n)."""
        mask = 0
        for i in modes:
            m = space.mode_mask(i)
            if mask & m:
                raise ValueError("monomial mode indices must be distinct")
            mask |= m
        c = np.zeros(space.dim, dtype=complex)
        c[mask] = 1.0
        return cls(space, c)

    @classmethod
    def generator(cls, space: ModeSpace, i: int) -> "CliffordElement":
        """The i-th self-adjoint generator e_i."""
        return cls.monomial(space, [i])

    @classmethod
    def from_matrix(cls, space: ModeSpace, matrix: np.ndarray,
                    check: bool = False, tol: float = 1e-9) -> "CliffordElement":
        """Recover an element from its Fock matrix (the vacuum column).

        With check=True the matrix is rebuilt from the recovered coefficients
        and membership in the algebra is enforced up to ``tol``.
        """
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (space.dim, space.dim):
            raise ValueError(f"expected a {space.dim}x{space.dim} matrix")
        elem = cls(space, matrix[:, 0].copy())
        if check:
            scale = max(np.abs(matrix).max(), 1.0)
            if np.abs(elem.matrix - matrix).max() > tol * scale:
                raise ValueError("matrix is not an element of the Clifford algebra")
        else:
            elem._matrix = matrix
        return elem

    # ------------------------------------------------------------------ #
    # representation

    @property
    def matrix(self) -> np.ndarray:
        """Left-multiplication (= Fock) matrix of the element."""
        if self._matrix is None:
            left, _ = _sign_tables(self.space.n)
            self._matrix = left * self.coeffs[_xor_table(self.space.n)]
        return self._matrix

    def right_matrix(self) -> np.ndarray:
        """Matrix of right multiplication xi -> xi . a on Fock coordinates."""
        _, right = _sign_tables(self.space.n)
        return right * self.coeffs[_xor_table(self.space.n)]

    # ------------------------------------------------------------------ #
    # *-algebra structure

    def adjoint(self) -> "CliffordElement":
        return CliffordElement(self.space, self.space.conjugation_signs * np.conj(self.coeffs))

    def trace(self) -> complex:
        """tau(a) = (Omega | a Omega), the normalized trace."""
        return complex(self.coeffs[0])

    def is_selfadjoint(self, tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.coeffs).max(), 1.0)
        return bool(np.abs(self.adjoint().coeffs - self.coeffs).max() <= tol * scale)

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._check_same_space(other)
        return CliffordElement(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        self._check_same_space(other)
        return CliffordElement(self.space, self.coeffs - other.coeffs)

    def __neg__(self) -> "CliffordElement":
        return CliffordElement(self.space, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            self._check_same_space(other)
            return CliffordElement(self.space, self.matrix @ other.coeffs)
        return CliffordElement(self.space, self.coeffs * complex(other))

    def __rmul__(self, other):
        return CliffordElement(self.space, complex(other) * self.coeffs)

    def _check_same_space(self, other: "CliffordElement"):
        if other.space.n != self.space.n:
            raise ValueError("elements live on different mode spaces")

    # ------------------------------------------------------------------ #
    # spectral calculus (self-adjoint elements)

    def eigh(self):
        """Cached eigendecomposition of the Fock matrix (self-adjoint only)."""
        if self._eigh is None:
            if not self.is_selfadjoint(tol=1e-10):
                raise ValueError("spectral calculus requires a self-adjoint element")
            mat = self.matrix
            self._eigh = np.linalg.eigh((mat + mat.conj().T) / 2.0)
        return self._eigh

    def min_eigenvalue(self) -> float:
        return float(self.eigh()[0][0])

    def functional_calculus(self, fn: Callable[[np.ndarray], np.ndarray]) -> "CliffordElement":
        """f(a) through the eigendecomposition; stays in the algebra."""
        w, v = self.eigh()
        fw = np.asarray(fn(w))
        mat = (v * fw) @ v.conj().T
        return CliffordElement.from_matrix(self.space, mat)

    def positive_part(self) -> "CliffordElement":
        return self.functional_calculus(lambda w: np.maximum(w, 0.0))

    def absolute_value(self) -> "CliffordElement":
        return self.functional_calculus(np.abs)

    def sqrt(self) -> "CliffordElement":
        return self.functional_calculus(lambda w: np.sqrt(np.maximum(w, 0.0)))

    def support(self, tol: float = 1e-12) -> "CliffordElement":
        """Spectral projection onto the range of |a|."""
        w, _ = self.eigh()
        cut = tol * max(np.abs(w).max(), 1.0)
        return self.functional_calculus(lambda ww: (np.abs(ww) > cut).astype(float))

    def __repr__(self):
        return f"CliffordElement(n={self.space.n}, tau={self.trace():.6g})"


# ---------------------------------------------------------------------- #
# trace pairings


def trace_product(a: CliffordElement, b: CliffordElement) -> complex:
    """tau(a b) = sum_S sigma_S a_S b_S (no matrix work needed)."""
    a._check_same_space(b)
    return complex(np.sum(a.space.conjugation_signs * a.coeffs * b.coeffs))


def hilbert_inner(a: CliffordElement, b: CliffordElement) -> complex:
    """tau(a* b), the GNS inner product of the trace."""
    a._check_same_space(b)
    return complex(np.vdot(a.coeffs, b.coeffs))


def duality_transform(a: CliffordElement) -> np.ndarray:
    """D(a xi_tau) = a Omega; the identity on coordinates in this realization."""
    return a.coeffs.copy()
