"""Mean-field BCS superfluid with two-body loss.

Momentum grid ``k_m = pi m / (N - 1)``, ``m = 0..N-1``; each grid point is one
pair channel ``(k up, -k down)`` with dispersion ``xi = -2J cos k - mu``.
Points ``m`` and ``N-1-m`` have ``xi`` of opposite sign (for ``mu = 0``) and the
same quasiparticle energy.

The restricted space holds the BCS ground state and the N two-quasiparticle
excitations, in that order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import BranchAmbiguity, DimensionMismatch, NoConvergence, VanishingDissipation
from ..linalg import as_matrix, dagger
from ..liouvillian import LindbladModel


@dataclass(frozen=True)
class BcsParams:
    J: float = 1.0
    mu: float = 0.0
    U0: float = 1.8
    kappa: float = 0.1
    N: int = 10
    U1: Optional[complex] = None  # default: U0 + i kappa / 2

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")

    @property
    def coupling(self) -> complex:
        """Effective gap-equation coupling; calibrated to ``U0 + i kappa/2``."""
        return complex(self.U0 + 0.5j * self.kappa) if self.U1 is None else complex(self.U1)

    def momenta(self) -> np.ndarray:
        return np.pi * np.arange(self.N) / (self.N - 1)

    def xi(self) -> np.ndarray:
        return -2.0 * self.J * np.cos(self.momenta()) - self.mu


@dataclass(frozen=True)
class BcsMode:
    k: float
    xi: float
    E: complex
    u: complex
    v: complex


def _energies(xi: np.ndarray, delta: complex) -> np.ndarray:
    return np.sqrt(xi.astype(complex) ** 2 + delta ** 2)


def gap_residual(p: BcsParams, delta: complex) -> float:
    return float(abs(p.N / p.coupling - np.sum(0.5 / _energies(p.xi(), delta))))


def default_gap_guess(p: BcsParams) -> complex:
    return 0.1 * p.J * (1 + 1j * p.kappa / (2 * abs(p.U0)))


def bcs_gap_solve(p: BcsParams, init: Optional[complex] = None, tol: float = 1e-12,
                  max_iter: int = 100) -> complex:
    """Complex Newton solve of ``N/U1 = sum_k 1 / (2 sqrt(xi_k^2 + D^2))``.

    The sign of ``D`` is fixed to ``Re D >= 0``; only ``D^2`` enters.
    """
    if p.coupling == 0:
        raise ValueError("U1 must be non-zero")
    xi = p.xi()
    target = p.N / p.coupling
    d = complex(default_gap_guess(p) if init is None else init)
    with np.errstate(all="ignore"):  # divergence is detected explicitly below
        for _ in range(max_iter):
            e = _energies(xi, d)
            f = np.sum(0.5 / e) - target
            if abs(f) <= tol:
                break
            df = -np.sum(0.5 * d / e ** 3)
            if df == 0 or not np.isfinite(df):
                raise NoConvergence("zero derivative in gap equation")
            d = d - f / df
            if not np.isfinite(d):
                raise NoConvergence("Newton iteration diverged")
        else:
            raise NoConvergence(f"gap equation residual {abs(f):.2e} after {max_iter} iterations")
    if d.real < 0:
        d = -d
    _check_branch(_energies(xi, d))
    return d


def _check_branch(e: np.ndarray) -> None:
    if np.any(np.abs(e.real) < 1e-12):
        raise BranchAmbiguity("quasiparticle energy on the square-root branch cut")


def bcs_modes(p: BcsParams, delta: complex) -> list[BcsMode]:
    """Quasiparticle energies and coherence factors, with ``Re v <= 0``."""
    xi = p.xi()
    e = _energies(xi, delta)
    _check_branch(e)
    u = np.sqrt((e + xi) / (2 * e))
    v = np.sqrt((e - xi) / (2 * e))
    v = np.where(v.real > 0, -v, v)
    return [BcsMode(float(k), float(x), complex(ee), complex(uu), complex(vv))
            for k, x, ee, uu, vv in zip(p.momenta(), xi, e, u, v)]


def pair_partner(p: BcsParams, m: int) -> int:
    return p.N - 1 - m


@dataclass(frozen=True)
class BcsRestrictedSpace:
    modes: list
    jumps: list  # L_k, one (N+1)x(N+1) matrix per grid mode
    h_mf: np.ndarray
    partners: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.modes) + 1

    def energy_operator(self, kappa: float) -> np.ndarray:
        """Mean-field ``H0 + H_I``: ``H_MF + (i kappa/2) sum_k L_k^dag L_k``."""
        return self.h_mf + 0.5j * kappa * sum(dagger(L) @ L for L in self.jumps)

    def quasiparticle_number(self) -> np.ndarray:
        return np.diag([0.0] + [2.0] * len(self.modes)).astype(complex)


def jump_matrix(modes: list[BcsMode], k: int) -> np.ndarray:
    """Pair-loss operator of grid mode ``k`` in the restricted basis."""
    n = len(modes) + 1
    m = modes[k]
    uv = m.u * m.v
    L = np.diag(np.full(n, uv, dtype=complex))
    L[0, k + 1] = m.u ** 2
    L[k + 1, 0] = -m.v ** 2
    L[k + 1, k + 1] = -uv
    return L


def bcs_restricted_model(p: BcsParams, modes: list[BcsMode]):
    """Returns ``(LindbladModel, BcsRestrictedSpace)``.

    The no-jump generator is the mean-field ``H_MF = diag(0, 2E_k)`` (constant
    dropped), declared directly rather than derived from the channels.
    """
    e = np.array([m.E for m in modes])
    h_mf = np.diag(np.concatenate([[0.0], 2 * e])).astype(complex)
    jumps = [jump_matrix(modes, k) for k in range(len(modes))]
    space = BcsRestrictedSpace(modes, jumps, h_mf, [pair_partner(p, m) for m in range(p.N)])
    model = LindbladModel(
        H0=np.diag(np.diag(h_mf).real).astype(complex),
        channels=tuple((p.kappa, L) for L in jumps),
        nh_hamiltonian=h_mf,
        observables={"E_aver": space.energy_operator(p.kappa)},
        label="bcs-restricted",
    )
    return model, space


def ground_state(p: BcsParams) -> np.ndarray:
    rho = np.zeros((p.N + 1, p.N + 1), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def bcs_ground_corrections(p: BcsParams, modes: list[BcsMode]) -> tuple[float, float]:
    """``E0 = -2 sum Im E_k`` and ``E1 = -kappa sum |u_k|^2 |v_k|^2``.

    ``E1`` equals ``i`` times the first-order composite eigenvalue of the ground mode.
    """
    e = np.array([m.E for m in modes])
    u = np.array([m.u for m in modes])
    v = np.array([m.v for m in modes])
    e0 = -2.0 * float(np.sum(e.imag))
    e1 = -p.kappa * float(np.sum(np.abs(u) ** 2 * np.abs(v) ** 2))
    return e0, e1


def bcs_normalization(p: BcsParams, modes: list[BcsMode]) -> float:
    """``|N0|^2`` of the first-order corrected ground pair."""
    e = np.array([m.E for m in modes])
    a = p.kappa ** 2 * np.abs(np.array([m.u for m in modes])) ** 4 \
        * np.abs(np.array([m.v for m in modes])) ** 4
    s = np.sum(a / (4 * e.conj() ** 2)) + np.sum(a / (4 * e ** 2)) + np.sum(a / (16 * e.imag ** 2))
    return float(np.real(1.0 / (s + 1.0)))


@dataclass(frozen=True)
class GroundPair:
    """Ground state and its first-order corrections in the composite restricted
    space (index ``a*(N+1) + b``, system ``a``, ancilla ``b``)."""

    right0: np.ndarray
    right1: np.ndarray
    left0: np.ndarray
    left1: np.ndarray
    norm_sq: float

    def overlap(self) -> complex:
        return complex(np.vdot(self.left0 + self.left1, self.right0 + self.right1))


def bcs_first_order_states(p: BcsParams, modes: list[BcsMode]) -> GroundPair:
    """Closed-form first-order corrections to the right and left ground states."""
    n = len(modes) + 1
    e = np.array([m.E for m in modes])
    if np.any(np.abs(e.imag) < 1e-14):
        raise VanishingDissipation("Im E_k vanishes; ground-state correction is singular")
    kap = p.kappa
    r0 = np.zeros(n * n, dtype=complex)
    r0[0] = 1.0
    l0 = r0.copy()
    r1 = np.zeros_like(r0)
    l1 = np.zeros_like(r0)
    for k, m in enumerate(modes, start=1):
        u, v, E = m.u, m.v, m.E
        r1[0 * n + k] = -1j * kap * u * v * np.conj(v) ** 2 / (2 * np.conj(E))
        r1[k * n + 0] = 1j * kap * np.conj(u) * np.conj(v) * v ** 2 / (2 * E)
        r1[k * n + k] = -kap * abs(v) ** 4 / (4 * E.imag)
        l1[0 * n + k] = -1j * kap * np.conj(u) * np.conj(v) * u ** 2 / (2 * E)
        l1[k * n + 0] = 1j * kap * np.conj(u) ** 2 * u * v / (2 * np.conj(E))
        l1[k * n + k] = -kap * abs(u) ** 4 / (4 * E.imag)
    return GroundPair(r0, r1, l0, l1, bcs_normalization(p, modes))


def bcs_observables(rho, p: BcsParams, modes: list[BcsMode]):
    """``(E_aver, P0, [P_k])`` for a restricted-space density matrix."""
    rho = as_matrix(rho)
    if rho.shape != (p.N + 1, p.N + 1):
        raise DimensionMismatch(f"rho is {rho.shape}, restricted dim is {p.N + 1}")
    _, space = bcs_restricted_model(p, modes)
    e_aver = float(np.real(np.trace(rho @ space.energy_operator(p.kappa))))
    d = np.real(np.diag(rho))
    return e_aver, float(d[0]), d[1:].tolist()
