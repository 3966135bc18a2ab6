"""Non-Hermitian Rayleigh-Schroedinger perturbation theory with biorthogonal
inner products, and its use for approximate master-equation dynamics.

Given an unperturbed eigensystem ``{e_n, |psi_n>, <psi~_n|}`` and a
perturbation ``V`` with matrix elements ``W_kn = <psi~_k|V|psi_n>``:

    e1_n    = W_nn
    psi1_n  = sum_{k not~ n} W_kn / (e_n - e_k) |psi_k>
    e2_n    = sum_{k not~ n} W_nk W_kn / (e_n - e_k)

where ``k not~ n`` excludes the degenerate group of ``n``. Inside each group ``V``
is diagonalized first. Corrections use intermediate normalization
(``<psi~_n|psi1_n> = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DefectiveMatrix, DegenerateCoupling, DimensionMismatch, SingularNormalization
from .linalg import BiorthoEigensystem, as_matrix, dagger, degenerate_groups, eig_biortho
from .liouvillian import (LindbladModel, composite_free_eigensystem, effective_nh_hamiltonian,
                          jump_superoperator, unvec, vec)
from .dynamics import _normalize, _times, validate_state

DEG_REL_TOL = 1e-9


@dataclass(frozen=True)
class PerturbedMode:
    """Corrections for one mode. ``left*`` are kets ``|psi~>`` of the dual family."""

    index: int
    e0: complex
    e1: complex
    e2: complex
    psi0: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    left0: np.ndarray
    left1: np.ndarray
    left2: np.ndarray


@dataclass(frozen=True)
class PerturbedEigensystem:
    order: int
    modes: list
    assembled: BiorthoEigensystem
    pair_norms: np.ndarray  # |N_n|^2 = 1 / <l_n|r_n> before rescaling
    left_corrected: np.ndarray  # perturbative left vectors, rescaled to <l_n|r_n> = 1

    def operator(self) -> np.ndarray:
        """The truncated operator ``sum_n e_n |r_n><l_n|`` the eigensystem represents."""
        return self.assembled.reconstruct()


def _adapt_degenerate(es0: BiorthoEigensystem, V: np.ndarray, tol: float | None):
    """Basis in which V is diagonal inside every degenerate group of es0."""
    e0 = es0.eigenvalues
    scale = max(1.0, np.abs(e0).max())
    tol = DEG_REL_TOL * scale if tol is None else tol
    right = es0.right.astype(complex).copy()
    left = es0.left.astype(complex).copy()
    groups = degenerate_groups(e0, tol)
    W = dagger(left) @ V @ right
    label = np.empty(len(e0), dtype=int)
    wnorm = max(np.abs(W).max(initial=0.0), 1e-300)
    for gi, g in enumerate(groups):
        label[g] = gi
        if len(g) == 1:
            continue
        block = W[np.ix_(g, g)]
        off = np.abs(block - np.diag(np.diag(block))).max()
        if off <= 1e-13 * wnorm:
            continue
        try:
            bes = eig_biortho(block, tol=1e-8)
        except DefectiveMatrix as exc:
            raise DegenerateCoupling(
                f"perturbation is not diagonalizable inside a degenerate group of size {len(g)}"
            ) from exc
        right[:, g] = right[:, g] @ bes.right
        left[:, g] = left[:, g] @ bes.left
    W = dagger(left) @ V @ right
    return right, left, W, label


def _corrections(es0: BiorthoEigensystem, V, order: int, deg_tol: float | None = None):
    V = as_matrix(V)
    if V.shape != (es0.dim, es0.dim):
        raise DimensionMismatch(f"V is {V.shape}, eigensystem dim {es0.dim}")
    e0 = es0.eigenvalues
    right, left, W, label = _adapt_degenerate(es0, V, deg_tol)
    same = label[:, None] == label[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.where(same, 0.0, 1.0 / (e0[None, :] - e0[:, None]))  # D[k, n] = 1/(e_n - e_k)
    w = np.diag(W).copy()
    P = W * D  # right first-order coefficients, column n
    Q = W * D.T  # left first-order coefficients (bra), row n
    n = len(e0)
    e1 = w
    e2 = np.zeros(n, dtype=complex)
    P2 = np.zeros_like(P)
    Q2 = np.zeros_like(Q)
    if order >= 2:
        e2 = np.einsum("nk,kn->n", W, P)
        P2 = D * (W @ P) - D * P * w[None, :]
        Q2 = (Q @ W) * D.T - w[:, None] * Q * D.T
    psi1 = right @ P
    psi2 = right @ P2
    # bra <l1_n| = sum_k Q_nk <psi~_k|  ->  ket |l1_n> = sum_k conj(Q_nk) |psi~_k>
    left1 = left @ Q.conj().T
    left2 = left @ Q2.conj().T
    modes = [
        PerturbedMode(i, complex(e0[i]), complex(e1[i]), complex(e2[i]),
                      right[:, i], psi1[:, i], psi2[:, i], left[:, i], left1[:, i], left2[:, i])
        for i in range(n)
    ]
    return modes


def correct_first_order(es0: BiorthoEigensystem, V, deg_tol: float | None = None) -> list:
    return _corrections(es0, V, 1, deg_tol)


def correct_second_order(es0: BiorthoEigensystem, V, deg_tol: float | None = None) -> list:
    """First- and second-order corrections (e1, psi1, e2, psi2 all filled)."""
    return _corrections(es0, V, 2, deg_tol)


def assemble(es0: BiorthoEigensystem, modes: list, order: int) -> PerturbedEigensystem:
    """Corrected eigensystem truncated at ``order``.

    Each pair is rescaled so ``<l_n|r_n> = 1``; the dual family stored in
    ``assembled`` is then re-derived as the rows of ``R^{-1}`` so the result is
    exactly biorthonormal and complete.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    r = np.column_stack([m.psi0 + m.psi1 + (m.psi2 if order == 2 else 0) for m in modes])
    l = np.column_stack([m.left0 + m.left1 + (m.left2 if order == 2 else 0) for m in modes])
    e = np.array([m.e0 + m.e1 + (m.e2 if order == 2 else 0) for m in modes])
    s = np.einsum("in,in->n", l.conj(), r)
    if np.any(np.abs(s) < 1e-12):
        raise SingularNormalization(f"pair overlap {np.abs(s).min():.2e}")
    l_scaled = l / s.conj()[None, :]
    try:
        dual = dagger(np.linalg.inv(r))
    except np.linalg.LinAlgError as exc:
        raise SingularNormalization("corrected right vectors are linearly dependent") from exc
    assembled = BiorthoEigensystem(e, r, dual)
    return PerturbedEigensystem(order, modes, assembled, 1.0 / s, l_scaled)


def composite_split(model: LindbladModel, jump_scale: float = 1.0):
    """Free eigensystem of ``H~0`` and the jump coupling ``V~`` (vec coordinates)."""
    heff = effective_nh_hamiltonian(model)
    es = eig_biortho(heff)
    free = composite_free_eigensystem(es)
    V = 1j * jump_scale * jump_superoperator(model)
    return free, V


def perturbed_eigensystem(model: LindbladModel, order: int, jump_scale: float = 1.0):
    free, V = composite_split(model, jump_scale)
    modes = _corrections(free, V, order)
    return assemble(free, modes, order)


def perturbative_evolve(model: LindbladModel, rho0, times, order: int = 1,
                        jump_scale: float = 1.0, normalize: bool = True) -> list[np.ndarray]:
    """Approximate ``rho(t)`` from the perturbed composite eigensystem.

    ``rho(t) = sum_n exp(-i e_n t) <l_n|rho0> rho_n`` with ``e_n`` truncated at
    ``order``; the result is divided by its trace at each output time.
    ``jump_scale`` multiplies the jump coupling only (used for order checks).
    The output is not Hermitized.
    """
    rho0 = validate_state(rho0)
    if rho0.shape[0] != model.dim:
        raise DimensionMismatch(f"rho0 is {rho0.shape}, model dim {model.dim}")
    pes = perturbed_eigensystem(model, order, jump_scale)
    es = pes.assembled
    c0 = dagger(es.left) @ vec(rho0)
    out = []
    for t in _times(times):
        v = es.right @ (c0 * np.exp(-1j * es.eigenvalues * t))
        rho = unvec(v, model.dim)
        out.append(_normalize(rho) if normalize else rho)
    return out

