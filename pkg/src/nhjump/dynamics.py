"""Time evolution: spectral expansion of the Liouvillian, matrix-exponential
fallback, and normalized no-jump evolution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (DefectiveMatrix, DimensionMismatch, InvalidState, InvariantViolation,
                     VanishingNorm)
from .linalg import TAU_BIO, as_matrix, dagger, eig_biortho
from .liouvillian import (LindbladModel, Superoperator, build_full, effective_nh_hamiltonian,
                          unvec, vec)

SPECTRAL_MAX_DIM = 1024  # superoperator size above which "auto" skips the dense eigensolver
ZERO_MODE_TOL = 1e-9
TRACELESS_TOL = 1e-8
MIN_TRACE = 1e-300


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values)
        if t.shape[0] != v.shape[0]:
            raise ValueError("times and values differ in length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SpectralModes:
    """``rho(t) = sum_n c_n(0) exp(-i e_n t) rho_n`` with ``e_n`` eigenvalues of ``H~ = i L``."""

    rates: np.ndarray
    rhos: np.ndarray  # (M, N, N)
    c0: np.ndarray

    def at(self, t: float) -> np.ndarray:
        c = self.c0 * np.exp(-1j * self.rates * t)
        return np.tensordot(c, self.rhos, axes=1)

    def zero_modes(self, tol: float = ZERO_MODE_TOL) -> np.ndarray:
        scale = max(1.0, np.abs(self.rates).max())
        return np.flatnonzero(np.abs(self.rates) <= tol * scale)


def validate_state(rho, tol: float = 1e-10) -> np.ndarray:
    try:
        rho = as_matrix(rho)
    except ValueError as exc:
        raise InvalidState(str(exc)) from exc
    if np.abs(rho - dagger(rho)).max() > tol:
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidState(f"trace {np.trace(rho).real:.3e} != 1")
    if np.linalg.eigvalsh((rho + dagger(rho)) / 2).min() < -tol:
        raise InvalidState("density matrix is not positive semidefinite")
    return rho


def spectral_modes(s: Superoperator, rho0, tol: float = TAU_BIO) -> SpectralModes:
    """Eigen-expansion of ``vec(rho0)`` in the right eigenvectors of ``H~``.

    Zero modes are rescaled to unit trace; the remaining modes stay in the
    eigensolver gauge. For a trace-preserving full Liouvillian every decaying
    mode must be traceless, which is checked.
    """
    rho0 = as_matrix(rho0)
    n = s.dim
    if rho0.shape != (n, n):
        raise DimensionMismatch(f"rho0 is {rho0.shape}, superoperator acts on dim {n}")
    h = s.matrix if s.kind == "composite" else 1j * s.matrix
    es = eig_biortho(h, tol)
    c0 = dagger(es.left) @ vec(rho0)
    rhos = es.right.T.reshape(-1, n, n).copy()
    traces = np.einsum("kii->k", rhos)
    scale = max(1.0, np.abs(es.eigenvalues).max())
    zero = np.abs(es.eigenvalues) <= ZERO_MODE_TOL * scale
    for k in np.flatnonzero(zero & (np.abs(traces) > TRACELESS_TOL)):
        rhos[k] /= traces[k]
        c0[k] *= traces[k]
    if s.kind != "nojump" and s.trace_defect() <= 1e-10:
        bad = np.abs(traces[~zero]).max(initial=0.0)
        if bad > TRACELESS_TOL:
            raise InvariantViolation(f"decaying mode with trace {bad:.2e}")
    return SpectralModes(es.eigenvalues, rhos, c0)


def _expm_propagate(gen: np.ndarray, v0: np.ndarray, times: np.ndarray) -> list[np.ndarray]:
    """``exp(gen t) v0`` on a grid, stepping between consecutive times."""
    out = []
    v = v0.copy()
    t_prev = 0.0
    small = gen.shape[0] <= SPECTRAL_MAX_DIM
    cache: dict[float, np.ndarray] = {}
    sparse_gen = None if small else sp.csr_matrix(gen)
    for t in times:
        dt = float(t - t_prev)
        if dt != 0.0:
            if small:
                key = round(dt, 14)
                if key not in cache:
                    cache[key] = sla.expm(gen * dt)
                v = cache[key] @ v
            else:
                v = spla.expm_multiply(sparse_gen * dt, v)
        out.append(v.copy())
        t_prev = t
    return out


def _normalize(rho: np.ndarray) -> np.ndarray:
    tr = np.trace(rho)
    if not abs(tr) >= MIN_TRACE:
        raise VanishingNorm(f"trace {abs(tr):.3e} below {MIN_TRACE:.0e}")
    return rho / tr


def _times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).reshape(-1)
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    return t


def evolve_master(model: LindbladModel, rho0, times, method: str = "auto",
                  normalize: bool = False) -> list[np.ndarray]:
    """Solve the master equation exactly on a time grid.

    ``method`` is ``"spectral"``, ``"expm"`` or ``"auto"`` (spectral for small
    Liouvillians, falling back to the exponential if the Liouvillian is defective).
    ``normalize`` divides by the trace at each output time; only needed for
    models with a declared NH part, whose generator is not trace preserving.
    """
    rho0 = validate_state(rho0)
    if rho0.shape[0] != model.dim:
        raise DimensionMismatch(f"rho0 is {rho0.shape}, model dim {model.dim}")
    t = _times(times)
    s = build_full(model)
    n = model.dim
    rhos = None
    if method in ("auto", "spectral"):
        if method == "spectral" or s.matrix.shape[0] <= SPECTRAL_MAX_DIM:
            try:
                modes = spectral_modes(s, rho0)
                rhos = [modes.at(ti) for ti in t]
            except DefectiveMatrix:
                if method == "spectral":
                    raise
    elif method != "expm":
        raise ValueError(f"unknown method {method!r}")
    if rhos is None:
        rhos = [unvec(v, n) for v in _expm_propagate(s.matrix, vec(rho0), t)]
    for i, ti in enumerate(t):
        if ti == 0.0:
            rhos[i] = rho0.copy()
    if normalize:
        rhos = [_normalize(r) for r in rhos]
    return rhos


def evolve_nh(model: LindbladModel, rho0, times) -> list[np.ndarray]:
    """No-jump evolution ``e^{-iHt} rho0 e^{iH^dag t}``, renormalized at each output time."""
    rho0 = validate_state(rho0)
    if rho0.shape[0] != model.dim:
        raise DimensionMismatch(f"rho0 is {rho0.shape}, model dim {model.dim}")
    heff = effective_nh_hamiltonian(model)
    out = []
    for ti in _times(times):
        u = sla.expm(-1j * heff * ti)
        out.append(_normalize(u @ rho0 @ dagger(u)))
    return out


def expectation(obs, rho) -> complex:
    obs = as_matrix(obs)
    rho = as_matrix(rho)
    if obs.shape != rho.shape:
        raise DimensionMismatch(f"observable {obs.shape} vs state {rho.shape}")
    return complex(np.einsum("ij,ji->", obs, rho))


def real_expectations(obs, rhos, tol: float = 1e-8) -> np.ndarray:
    """Expectation values of a physical observable; imaginary parts must vanish."""
    vals = np.array([expectation(obs, r) for r in rhos])
    worst = np.abs(vals.imag).max(initial=0.0)
    if worst > tol:
        raise InvariantViolation(f"observable has imaginary part {worst:.2e}")
    return vals.real
