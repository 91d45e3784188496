"""Finite fermionic mode spaces.

The one-particle space is C^n with a distinguished real basis x_1, ..., x_n
and the conjugation J given by entrywise complex conjugation in that basis.
The antisymmetric Fock space over it has dimension 2^n; its occupation basis
is indexed by bit strings s in {0,1}^n in lexicographic order with mode 1
most significant, so the vacuum sits at index 0 and mode i corresponds to
bit position n - i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_MODES = 12  # hard desk-scale limit (matrix side 4096)


@dataclass(frozen=True)
class ModeSpace:
    """A fixed number of fermionic modes and the derived index bookkeeping."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int):
            raise TypeError(f"mode count must be an int, got {type(self.n).__name__}")
        if not 1 <= self.n <= MAX_MODES:
            raise ValueError(f"mode count must be in 1..{MAX_MODES}, got {self.n}")

    @property
    def dim(self) -> int:
        """Dimension of the Fock space (and of the Clifford algebra)."""
        return 1 << self.n

    @property
    def occupations(self) -> np.ndarray:
        """Particle number of each occupation basis state, shape (2^n,)."""
        return _occupations(self.n)

    @property
    def conjugation_signs(self) -> np.ndarray:
        """Signs sigma_S = (-1)^{k(k-1)/2}, k = |S|, for the monomial adjoint.

        The modular conjugation acts on coordinates as f -> sigma * conj(f).
        """
        return _conjugation_signs(self.n)

    @property
    def parity_signs(self) -> np.ndarray:
        """(-1)^{|s|} over the occupation basis (diagonal of the parity operator)."""
        return _parity_signs(self.n)

    def mode_mask(self, i: int) -> int:
        """Bit mask of mode i (1-based; mode 1 is most significant)."""
        if not 1 <= i <= self.n:
            raise ValueError(f"mode index must be in 1..{self.n}, got {i}")
        return 1 << (self.n - i)

    def conjugate(self, x: np.ndarray) -> np.ndarray:
        """The conjugation J on the one-particle space (coordinatewise)."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {x.shape}")
        return np.conj(x)

    def basis_vector(self, i: int) -> np.ndarray:
        """Real basis vector x_i of the one-particle space."""
        if not 1 <= i <= self.n:
            raise ValueError(f"mode index must be in 1..{self.n}, got {i}")
        e = np.zeros(self.n, dtype=complex)
        e[i - 1] = 1.0
        return e


@lru_cache(maxsize=None)
def _occupations(n: int) -> np.ndarray:
    occ = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    occ.setflags(write=False)
    return occ


@lru_cache(maxsize=None)
def _conjugation_signs(n: int) -> np.ndarray:
    k = _occupations(n)
    signs = np.where((k * (k - 1) // 2) % 2 == 0, 1.0, -1.0)
    signs.setflags(write=False)
    return signs


@lru_cache(maxsize=None)
def _parity_signs(n: int) -> np.ndarray:
    signs = np.where(_occupations(n) % 2 == 0, 1.0, -1.0)
    signs.setflags(write=False)
    return signs
