"""Dissipative two-level atom with decay, bit-flip and phase-flip channels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..fock import pauli_ops
from ..liouvillian import LindbladModel


@dataclass(frozen=True)
class TlsParams:
    omega: float = 1.0
    gamma_p: float = 0.1
    gamma_x: float = 0.01
    gamma_z: float = 0.5

    def __post_init__(self):
        if min(self.gamma_p, self.gamma_x, self.gamma_z) < 0:
            raise ValueError("rates must be non-negative")


def tls_model(p: TlsParams) -> LindbladModel:
    """``H0 = (w/2) sz`` with channels ``(gp, s-)``, ``(gx, sx)``, ``(gz, sz)``.

    With unit-weight Lindblad terms the dissipator reads
    ``gx sx rho sx + gz sz rho sz`` plus the decay, and the no-jump Hamiltonian is
    ``(w/2) sz - i gp/2 s+s- - i gx/2 sx^2 - i gz/2 sz^2``.
    """
    sx, _, sz, _, sm = pauli_ops()
    return LindbladModel(
        H0=0.5 * p.omega * sz,
        channels=((p.gamma_p, sm), (p.gamma_x, sx), (p.gamma_z, sz)),
        observables={"sigma_z": sz},
        label="tls",
    )


def excited_state() -> np.ndarray:
    """``|0><0|`` (spin up, ``<sz> = +1``)."""
    return np.diag([1.0, 0.0]).astype(complex)


def tls_reference(p: TlsParams) -> dict:
    """Closed-form perturbative corrections for the composite TLS.

    Modes are in the product order ``|0>|0>, |0>|1>, |1>|0>, |1>|1>`` (system
    first), which is also the vec index. ``psi1[:, j]`` is the first-order
    correction of mode ``j`` in that basis; ``psi2`` vanishes identically.
    """
    w, gp, gx, gz = p.omega, p.gamma_p, p.gamma_x, p.gamma_z
    e0 = np.array([
        -1j * (gp + gx + gz),
        w - 1j * (gp / 2 + gx + gz),
        -w - 1j * (gp / 2 + gx + gz),
        -1j * (gx + gz),
    ])
    e1 = np.array([1j * gz, -1j * gz, -1j * gz, 1j * gz])
    e2 = np.array([
        -1j * gx * (gp + gx) / gp,
        -gx ** 2 / (2 * w),
        gx ** 2 / (2 * w),
        1j * gx * (gp + gx) / gp,
    ])
    psi1 = np.zeros((4, 4), dtype=complex)
    psi1[3, 0] = -(gp + gx) / gp
    psi1[2, 1] = 1j * gx / (2 * w)
    psi1[1, 2] = -1j * gx / (2 * w)
    psi1[0, 3] = gx / gp
    return {"e0": e0, "e1": e1, "e2": e2, "psi1": psi1, "psi2": np.zeros((4, 4), dtype=complex)}
