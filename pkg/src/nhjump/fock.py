"""Pauli algebra and particle-number-capped spinless fermion Fock spaces."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .errors import IndexOutOfRange, InvalidCap


def pauli_ops():
    """Return ``(sx, sy, sz, sp, sm)`` in the basis ``{|0> = up, |1> = down}``."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    sp = (sx + 1j * sy) / 2
    sm = (sx - 1j * sy) / 2
    return sx, sy, sz, sp, sm


def kron(a, b) -> np.ndarray:
    """System factor ``a`` on the left, ancilla factor ``b`` on the right."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


@dataclass(frozen=True)
class FockSpace:
    n_sites: int
    max_particles: int

    def __post_init__(self):
        if self.n_sites < 1:
            raise InvalidCap(f"n_sites must be >= 1, got {self.n_sites}")
        if not 0 <= self.max_particles <= self.n_sites:
            raise InvalidCap(f"max_particles={self.max_particles} outside [0, {self.n_sites}]")

    @cached_property
    def basis(self) -> tuple[int, ...]:
        """Occupation bitmasks (bit j = site j), ordered by (popcount, value)."""
        states = [s for s in range(1 << self.n_sites) if bin(s).count("1") <= self.max_particles]
        return tuple(sorted(states, key=lambda s: (bin(s).count("1"), s)))

    @cached_property
    def index(self) -> dict[int, int]:
        return {s: i for i, s in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return sum(comb(self.n_sites, p) for p in range(self.max_particles + 1))

    def occupations(self) -> np.ndarray:
        return np.array([bin(s).count("1") for s in self.basis])

    def state(self, occupied) -> np.ndarray:
        """Basis vector ``c_{j1}^dag c_{j2}^dag ... |vac>`` for sites in ``occupied``.

        Creation operators are applied right to left, so the returned vector
        carries the corresponding fermionic sign.
        """
        vec = np.zeros(self.dim, dtype=complex)
        vec[0] = 1.0
        for j in reversed(list(occupied)):
            vec = creator(self, j) @ vec
        return vec


def fock_space(n_sites: int, max_particles: int) -> FockSpace:
    return FockSpace(n_sites, max_particles)


def annihilator(space: FockSpace, site: int) -> np.ndarray:
    """Matrix of ``c_site`` with Jordan-Wigner sign ``(-1)^(# occupied sites < site)``."""
    if not 0 <= site < space.n_sites:
        raise IndexOutOfRange(f"site {site} outside [0, {space.n_sites})")
    c = np.zeros((space.dim, space.dim), dtype=complex)
    bit = 1 << site
    below = bit - 1
    for col, s in enumerate(space.basis):
        if s & bit:
            t = s ^ bit
            c[space.index[t], col] = (-1) ** bin(s & below).count("1")
    return c


def creator(space: FockSpace, site: int) -> np.ndarray:
    """``c_site^dagger``; maps states at the particle cap to zero."""
    return annihilator(space, site).conj().T


def number_operator(space: FockSpace) -> np.ndarray:
    return np.diag(space.occupations().astype(complex))
