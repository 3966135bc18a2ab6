"""Lindblad models, Liouvillians and the composite (system x ancilla) Hamiltonian.

Vectorization is row-major: ``vec(rho)[m*N + n] = rho[m, n]``. With that,
``vec(A rho B) = (A kron B^T) vec(rho)``, so the system acts on the left tensor
factor and the ancilla carries the transposed right action. The composite
Hamiltonian is ``i`` times the Liouvillian:

    H~ = H kron I - I kron H* + i sum_m k_m F_m kron F_m*.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, LengthMismatch
from .linalg import BiorthoEigensystem, as_matrix, dagger, is_hermitian

CONVENTION = "system(x)ancilla, ancilla carries transposed right-action, row-major vec"


@dataclass(frozen=True)
class LindbladModel:
    """``H0`` plus ``(rate, operator)`` dissipation channels.

    ``nh_hamiltonian`` lets a model declare its no-jump generator directly
    (the restricted BCS model does); otherwise it is derived from ``H0`` and
    the channels. ``observables`` carries named operators for reporting.
    """

    H0: np.ndarray
    channels: tuple = ()
    nh_hamiltonian: Optional[np.ndarray] = None
    observables: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        h0 = as_matrix(self.H0)
        object.__setattr__(self, "H0", h0)
        n = h0.shape[0]
        chans = []
        for rate, op in self.channels:
            op = as_matrix(op)
            if op.shape != (n, n):
                raise DimensionMismatch(f"channel operator {op.shape} vs dim {n}")
            if rate < 0:
                raise ValueError(f"negative rate {rate}")
            chans.append((float(rate), op))
        object.__setattr__(self, "channels", tuple(chans))
        if self.nh_hamiltonian is None:
            if not is_hermitian(h0):
                raise ValueError("H0 must be Hermitian (declare nh_hamiltonian for NH models)")
        else:
            heff = as_matrix(self.nh_hamiltonian)
            if heff.shape != (n, n):
                raise DimensionMismatch("nh_hamiltonian shape mismatch")
            object.__setattr__(self, "nh_hamiltonian", heff)

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    @property
    def is_lindblad(self) -> bool:
        """True when the no-jump part is derived from the channels (trace preserving)."""
        return self.nh_hamiltonian is None


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray
    kind: str  # full | nojump | composite
    heff: Optional[np.ndarray] = None
    convention: str = CONVENTION

    @property
    def dim(self) -> int:
        """Hilbert-space dimension N of the underlying system (matrix is N^2 x N^2)."""
        return int(round(np.sqrt(self.matrix.shape[0])))

    def trace_defect(self) -> float:
        """``|1_vec^T L| / |L|``; zero for a trace-preserving generator."""
        one = vec(np.eye(self.dim))
        norm = max(np.abs(self.matrix).max(), 1e-300)
        return float(np.abs(one @ self.matrix).max() / norm)


@dataclass(frozen=True)
class CompositeHamiltonian(Superoperator):
    """``H~ = i L`` together with its split into free part and jump coupling.

    ``free_eigensystem`` is the biorthogonal eigensystem of ``H~0 = H kron I - I kron H*``
    built from the product vectors ``|r_m>|r_n>*``; ``free`` holds its eigenvalues
    ``E_m - E_n*``. ``jump`` is ``V~`` in vec coordinates and ``jump_biortho`` is the same
    operator in the product basis.
    """

    system: Optional[BiorthoEigensystem] = None
    free_eigensystem: Optional[BiorthoEigensystem] = None
    jump: Optional[np.ndarray] = None
    jump_biortho: Optional[np.ndarray] = None

    @property
    def free(self) -> np.ndarray:
        return self.free_eigensystem.eigenvalues

    def free_biortho(self) -> np.ndarray:
        return np.diag(self.free)


def vec(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvec(v, dim: Optional[int] = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if dim is None:
        dim = int(round(np.sqrt(v.shape[0])))
    return v.reshape(dim, dim)


def effective_nh_hamiltonian(model: LindbladModel) -> np.ndarray:
    """``H0 - (i/2) sum_m k_m F_m^dag F_m`` (or the model's declared NH part)."""
    if model.nh_hamiltonian is not None:
        return model.nh_hamiltonian.copy()
    h = model.H0.copy()
    for rate, op in model.channels:
        h = h - 0.5j * rate * (dagger(op) @ op)
    return h


def jump_superoperator(model: LindbladModel) -> np.ndarray:
    """``sum_m k_m F_m kron F_m*``."""
    n = model.dim
    out = np.zeros((n * n, n * n), dtype=complex)
    for rate, op in model.channels:
        out += rate * np.kron(op, op.conj())
    return out


def _nojump_matrix(heff: np.ndarray) -> np.ndarray:
    eye = np.eye(heff.shape[0])
    return -1j * (np.kron(heff, eye) - np.kron(eye, heff.conj()))


def build_nojump(model: LindbladModel) -> Superoperator:
    heff = effective_nh_hamiltonian(model)
    return Superoperator(_nojump_matrix(heff), "nojump", heff=heff)


def build_full(model: LindbladModel) -> Superoperator:
    heff = effective_nh_hamiltonian(model)
    return Superoperator(_nojump_matrix(heff) + jump_superoperator(model), "full", heff=heff)


def composite_free_eigensystem(es: BiorthoEigensystem) -> BiorthoEigensystem:
    """Eigensystem of ``H kron I - I kron H*`` from that of ``H``.

    Product index ``m*N + n`` labels ``|r_m>|r_n>*`` with eigenvalue ``E_m - E_n*``.
    """
    w = (es.eigenvalues[:, None] - es.eigenvalues.conj()[None, :]).reshape(-1)
    right = np.kron(es.right, es.right.conj())
    left = np.kron(es.left, es.left.conj())
    return BiorthoEigensystem(w, right, left)


def build_composite(model: LindbladModel, es: BiorthoEigensystem) -> CompositeHamiltonian:
    """Composite Hamiltonian ``H~ = i L_full`` with its free/jump split.

    ``es`` must be the eigensystem of ``effective_nh_hamiltonian(model)``.
    """
    heff = effective_nh_hamiltonian(model)
    if es.dim != model.dim:
        raise DimensionMismatch(f"eigensystem dim {es.dim} vs model dim {model.dim}")
    free_es = composite_free_eigensystem(es)
    jump = 1j * jump_superoperator(model)
    matrix = 1j * (_nojump_matrix(heff)) + jump
    jump_bio = dagger(free_es.left) @ jump @ free_es.right
    return CompositeHamiltonian(
        matrix, "composite", heff=heff, system=es, free_eigensystem=free_es,
        jump=jump, jump_biortho=jump_bio,
    )


def map_rho_to_state(rho, es: BiorthoEigensystem) -> np.ndarray:
    """Components ``rho_mn = <l_m|rho|l_n>`` flattened as ``m*N + n``."""
    rho = as_matrix(rho)
    if rho.shape[0] != es.dim:
        raise DimensionMismatch(f"rho is {rho.shape}, eigensystem has dim {es.dim}")
    return (dagger(es.left) @ rho @ es.left).reshape(-1)


def map_state_to_rho(psi, es: BiorthoEigensystem) -> np.ndarray:
    """``rho = sum_mn rho_mn |r_m><r_n|``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (es.dim ** 2,):
        raise DimensionMismatch(f"state has shape {psi.shape}, expected ({es.dim ** 2},)")
    c = psi.reshape(es.dim, es.dim)
    return es.right @ c @ dagger(es.right)


def _sorted(w: np.ndarray) -> np.ndarray:
    return w[np.lexsort((w.imag, w.real))]


def charge_sectors(charge) -> list[np.ndarray]:
    """Index blocks of equal value of a conserved diagonal charge."""
    charge = np.round(np.asarray(charge, dtype=float), 9)
    return [np.flatnonzero(charge == q) for q in np.unique(charge)]


def liouvillian_charge(occupations) -> np.ndarray:
    """Diagonal of ``N kron I - I kron N`` in vec coordinates."""
    occ = np.asarray(occupations, dtype=float)
    return (occ[:, None] - occ[None, :]).reshape(-1)


def spectrum(s: Superoperator, method: str = "dense", sectors=None) -> np.ndarray:
    """Eigenvalues sorted by (real, imag).

    ``method="kronecker"`` uses ``eig(A kron I - I kron B) = {a_i - b_j}`` and is only
    valid for no-jump Liouvillians. ``sectors`` is a list of index arrays of a
    block-diagonal decomposition (see ``charge_sectors``); off-block couplings are
    checked to vanish before the blocks are diagonalized separately.
    """
    if method == "kronecker":
        if s.kind != "nojump" or s.heff is None:
            raise ValueError("kronecker method requires a no-jump superoperator")
        e = np.linalg.eigvals(s.heff)
        return _sorted((-1j * (e[:, None] - e.conj()[None, :])).reshape(-1))
    if method != "dense":
        raise ValueError(f"unknown method {method!r}")
    m = s.matrix
    if sectors is None:
        return _sorted(np.linalg.eigvals(m))
    covered = np.concatenate(sectors)
    if len(covered) != m.shape[0] or len(np.unique(covered)) != m.shape[0]:
        raise ValueError("sectors must partition the index set")
    label = np.empty(m.shape[0], dtype=int)
    for i, idx in enumerate(sectors):
        label[idx] = i
    rows, cols = np.nonzero(m)
    if np.any(label[rows] != label[cols]):
        raise ValueError("superoperator couples different sectors")
    parts = [np.linalg.eigvals(m[np.ix_(idx, idx)]) for idx in sectors]
    return _sorted(np.concatenate(parts))


@dataclass(frozen=True)
class MatchReport:
    max_distance: float
    tol: float
    passed: bool
    pairs: np.ndarray  # (k, 2) indices into (a, b)

    def as_dict(self) -> dict:
        return {"max_distance": self.max_distance, "tol": self.tol, "passed": self.passed,
                "n": int(len(self.pairs))}


def spectra_match(a, b, tol: float) -> MatchReport:
    """Greedy nearest-pair matching of two eigenvalue lists.

    Pairs are taken in order of increasing distance, each element used once.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths differ: {len(a)} vs {len(b)}")
    if len(a) == 0:
        return MatchReport(0.0, tol, True, np.zeros((0, 2), dtype=int))
    d = np.abs(a[:, None] - b[None, :])
    order = np.argsort(d, axis=None, kind="stable")
    used_a = np.zeros(len(a), dtype=bool)
    used_b = np.zeros(len(b), dtype=bool)
    pairs = []
    n = len(a)
    for flat in order:
        i, j = divmod(int(flat), n)
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        pairs.append((i, j))
        if len(pairs) == n:
            break
    pairs = np.array(pairs)
    dmax = float(d[pairs[:, 0], pairs[:, 1]].max())
    return MatchReport(dmax, tol, dmax <= tol, pairs)
