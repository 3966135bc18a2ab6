"""Fermion chain with collective one-body loss; its no-jump limit is the
Hatano-Nelson model with asymmetric hopping ``J_R = -J + k/2``, ``J_L = -J - k/2``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..fock import FockSpace, annihilator, number_operator
from ..liouvillian import LindbladModel


@dataclass(frozen=True)
class HatanoNelsonParams:
    n_sites: int = 10
    J: float = 1.0
    kappa: float = 1.0
    bc: str = "OBC"
    max_particles: int = 2

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("need at least two sites")
        if self.bc not in ("OBC", "PBC"):
            raise ValueError(f"bc must be OBC or PBC, got {self.bc!r}")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")

    def bonds(self) -> list[tuple[int, int]]:
        b = [(j, j + 1) for j in range(self.n_sites - 1)]
        if self.bc == "PBC":
            b.append((self.n_sites - 1, 0))
        return b


def hatano_nelson(p: HatanoNelsonParams) -> LindbladModel:
    """Hopping ``-J (c_{j+1}^dag c_j + h.c.)``, one loss channel ``c_j - i c_{j+1}`` per bond."""
    space = FockSpace(p.n_sites, p.max_particles)
    c = [annihilator(space, j) for j in range(p.n_sites)]
    h0 = np.zeros((space.dim, space.dim), dtype=complex)
    channels = []
    for j, k in p.bonds():
        hop = c[k].conj().T @ c[j]
        h0 += -p.J * (hop + hop.conj().T)
        channels.append((p.kappa, c[j] - 1j * c[k]))
    return LindbladModel(h0, tuple(channels), observables={"N": number_operator(space)},
                         label=f"hatano-nelson-{p.bc}")


def fock_of(p: HatanoNelsonParams) -> FockSpace:
    return FockSpace(p.n_sites, p.max_particles)


def pair_state(p: HatanoNelsonParams, sites=(0, 1)) -> np.ndarray:
    """Density matrix of ``c_a^dag c_b^dag |vac>``."""
    psi = fock_of(p).state(sites)
    return np.outer(psi, psi.conj())
