"""Dense complex matrices and biorthogonal eigensystems.

Matrices are plain ``numpy`` complex arrays; ``as_matrix`` is the single
validation gate. Eigenvectors are stored as columns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DefectiveMatrix, DimensionMismatch, SingularFactor

TAU_BIO = 1e-9
DEGENERACY_TOL = 1e-10


def as_matrix(a, square: bool = True) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, np.abs(a).max(initial=0.0))
    return bool(np.abs(a - dagger(a)).max(initial=0.0) <= tol * scale)


@dataclass(frozen=True)
class BiorthoEigensystem:
    """Eigenvalues with paired right/left eigenvectors, ``<l_m|r_n> = delta_mn``.

    ``right[:, n]`` is ``|r_n>`` and ``left[:, n]`` is ``|l_n>``.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def overlap(self) -> np.ndarray:
        """Matrix of ``<l_m|r_n>``."""
        return dagger(self.left) @ self.right

    def reconstruct(self) -> np.ndarray:
        return (self.right * self.eigenvalues) @ dagger(self.left)


def _sort_order(w: np.ndarray) -> np.ndarray:
    # rounding keeps numerically-equal keys from reordering on roundoff noise
    return np.lexsort((np.round(w.imag, 10), np.round(w.real, 10)))


def _fix_gauge(r: np.ndarray) -> np.ndarray:
    """Unit-normalize columns; largest-magnitude entry made real positive."""
    r = r / np.linalg.norm(r, axis=0)
    mag = np.abs(r)
    idx = np.argmax(mag >= mag.max(axis=0) * (1 - 1e-9), axis=0)
    phase = r[idx, np.arange(r.shape[1])]
    return r * (np.abs(phase) / phase)


def degenerate_groups(w: np.ndarray, tol: float) -> list[np.ndarray]:
    """Cluster indices of ``w`` whose values lie within ``tol`` (single linkage)."""
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.argsort(w.real)
    for a_pos, a in enumerate(order):
        for b in order[a_pos + 1:]:
            if w[b].real - w[a].real > tol:
                break
            if abs(w[a] - w[b]) <= tol:
                parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(sorted(g)) for g in sorted(groups.values(), key=min)]


def check_eigensystem(m: np.ndarray, es: BiorthoEigensystem) -> float:
    """Largest of the pairing, biorthogonality and completeness residuals."""
    scale = max(1.0, np.abs(m).max(initial=0.0))
    w = es.eigenvalues
    res_r = np.abs(m @ es.right - es.right * w).max(initial=0.0) / scale
    res_l = np.abs(dagger(m) @ es.left - es.left * w.conj()).max(initial=0.0) / scale
    eye = np.eye(es.dim)
    res_bio = np.abs(es.overlap() - eye).max(initial=0.0)
    res_comp = completeness_residual(es)
    return float(max(res_r, res_l, res_bio, res_comp))


def eig_biortho(m, tol: float = TAU_BIO) -> BiorthoEigensystem:
    """Biorthonormal eigendecomposition of a diagonalizable matrix.

    Eigenvalues are sorted by (real, imag). Right vectors are unit-norm with the
    largest entry real positive; left vectors are the rows of ``R^{-1}``, which
    fixes ``<l_n|r_n> = 1`` and biorthogonality within degenerate groups at once.
    Hermitian input goes through ``eigh`` so that left and right coincide.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if n == 0:
        raise DimensionMismatch("empty matrix")
    if is_hermitian(m):
        w, r = np.linalg.eigh((m + dagger(m)) / 2)
        w = w.astype(complex)
        order = _sort_order(w)
        w, r = w[order], _fix_gauge(r[:, order].astype(complex))
        es = BiorthoEigensystem(w, r, r.copy())
    else:
        w, r = sla.eig(m)
        order = _sort_order(w)
        w, r = w[order], r[:, order]
        scale = max(1.0, np.abs(w).max())
        for g in degenerate_groups(w, DEGENERACY_TOL * scale):
            if len(g) > 1:
                # orthonormal basis of the (assumed) eigenspace, one shared eigenvalue
                q, _ = np.linalg.qr(r[:, g])
                r[:, g] = q
                w[g] = w[g].mean()
        r = _fix_gauge(r)
        try:
            left = dagger(np.linalg.inv(r))
        except np.linalg.LinAlgError as exc:
            raise DefectiveMatrix("eigenvector matrix is singular") from exc
        if not np.all(np.isfinite(left)):
            raise DefectiveMatrix("eigenvector matrix is singular")
        es = BiorthoEigensystem(w, r, left)
    res = check_eigensystem(m, es)
    if not res <= tol:
        raise DefectiveMatrix(f"eigensystem residual {res:.3e} exceeds tolerance {tol:.1e}")
    return es


def completeness_residual(es: BiorthoEigensystem) -> float:
    """max |sum_n |r_n><l_n| - I|."""
    return float(np.abs(es.right @ dagger(es.left) - np.eye(es.dim)).max(initial=0.0))


def similarity_factor(es: BiorthoEigensystem, tol: float = TAU_BIO) -> np.ndarray:
    """Invertible ``A`` with ``|r_n> = A|n>`` and ``|l_n> = (A^-1)^dagger |n>``.

    ``U = A A^dagger`` is then the Hermitian map taking right to left vectors.
    """
    a = es.right.copy()
    try:
        a_inv = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise SingularFactor("right eigenvector matrix is singular") from exc
    eye = np.eye(es.dim)
    res = max(np.abs(a @ eye - es.right).max(), np.abs(dagger(a_inv) @ eye - es.left).max())
    if not res <= tol:
        raise SingularFactor(f"reconstruction residual {res:.3e} exceeds {tol:.1e}")
    return a


def biortho_trace(rho, es: BiorthoEigensystem) -> complex:
    """Trace evaluated in the biorthogonal basis, ``sum_n <l_n|rho|r_n>``.

    Equal to the ordinary trace for every ``rho`` because the basis is complete.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != es.dim:
        raise DimensionMismatch(f"rho is {rho.shape}, eigensystem has dim {es.dim}")
    return complex(np.einsum("in,ij,jn->", es.left.conj(), rho, es.right))


def element_trace(rho, es: BiorthoEigensystem) -> complex:
    """Sum of diagonal elements ``rho_nn = <l_n|rho|l_n>``.

    Coincides with the ordinary trace only when the eigenvectors are orthonormal
    or ``rho`` is diagonal in the right-vector basis.
    """
    rho = as_matrix(rho)
    if rho.shape[0] != es.dim:
        raise DimensionMismatch(f"rho is {rho.shape}, eigensystem has dim {es.dim}")
    return complex(np.einsum("in,ij,jn->", es.left.conj(), rho, es.left))
