import numpy as np
import pytest

from nhjump.errors import DimensionMismatch, LengthMismatch
from nhjump.fock import annihilator, pauli_ops
from nhjump.linalg import eig_biortho
from nhjump.liouvillian import (LindbladModel, build_composite, build_full, build_nojump,
                                charge_sectors, effective_nh_hamiltonian, jump_superoperator,
                                liouvillian_charge, map_rho_to_state, map_state_to_rho, spectra_match,
                                spectrum, unvec, vec)
from nhjump.models import HatanoNelsonParams, TlsParams, hatano_nelson, tls_model
from nhjump.models.hatano_nelson import fock_of

from conftest import random_complex, random_density

sx, sy, sz, sp, sm = pauli_ops()


def lindblad_rhs(model, rho):
    out = -1j * (model.H0 @ rho - rho @ model.H0)
    for k, f in model.channels:
        fd = f.conj().T
        out += k * (f @ rho @ fd - 0.5 * (fd @ f @ rho + rho @ fd @ f))
    return out


def damping(kappa=0.3, h0=None):
    return LindbladModel(np.zeros((2, 2)) if h0 is None else h0, ((kappa, sm),))


def test_vec_convention(rng):
    a, b, rho = (random_complex(rng, 3) for _ in range(3))
    np.testing.assert_allclose(vec(a @ rho @ b), np.kron(a, b.T) @ vec(rho), atol=1e-12)
    np.testing.assert_allclose(unvec(vec(rho)), rho)


def test_model_validation():
    with pytest.raises(ValueError):
        LindbladModel(np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        LindbladModel(np.eye(2), ((1.0, np.eye(3)),))
    with pytest.raises(ValueError):
        LindbladModel(np.eye(2), ((-1.0, sm),))


def test_effective_hamiltonian_no_channels():
    h = np.diag([0.0, 1.0])
    np.testing.assert_allclose(effective_nh_hamiltonian(LindbladModel(h)), h)


def test_effective_hamiltonian_tls():
    p = TlsParams(omega=1.3, gamma_p=0.2, gamma_x=0.05, gamma_z=0.4)
    expected = 0.5 * p.omega * sz - 0.5j * p.gamma_p * sp @ sm \
        - 0.5j * (p.gamma_x + p.gamma_z) * np.eye(2)
    np.testing.assert_allclose(effective_nh_hamiltonian(tls_model(p)), expected, atol=1e-14)


def test_hatano_nelson_asymmetric_hopping():
    p = HatanoNelsonParams(n_sites=4, J=1.0, kappa=0.6, bc="OBC")
    heff = effective_nh_hamiltonian(hatano_nelson(p))
    s = fock_of(p)
    c = [annihilator(s, j) for j in range(4)]
    jr, jl = -p.J + p.kappa / 2, -p.J - p.kappa / 2
    expected = np.zeros_like(heff)
    for j in range(3):
        expected += jr * c[j + 1].conj().T @ c[j] + jl * c[j].conj().T @ c[j + 1]
    onsite = [1, 2, 2, 1]  # each bond loss contributes -i k/2 n on both its sites
    for j in range(4):
        expected += -0.5j * p.kappa * onsite[j] * c[j].conj().T @ c[j]
    np.testing.assert_allclose(heff, expected, atol=1e-14)
    n = np.diag(s.occupations())
    assert np.abs(heff @ n - n @ heff).max() <= 1e-14


def test_full_finite_difference_oracle(rng):
    model = tls_model(TlsParams())
    L = build_full(model).matrix
    assert L.shape == (4, 4)
    for _ in range(5):
        rho = random_density(rng, 2)
        np.testing.assert_allclose(L @ vec(rho), vec(lindblad_rhs(model, rho)), atol=1e-10)
    hn = hatano_nelson(HatanoNelsonParams(n_sites=3))
    rho = random_density(rng, hn.dim)
    np.testing.assert_allclose(build_full(hn).matrix @ vec(rho), vec(lindblad_rhs(hn, rho)),
                               atol=1e-10)


def test_amplitude_damping_steady_state_and_spectrum():
    k = 0.3
    s = build_full(damping(k))
    w, v = np.linalg.eig(s.matrix)
    null = unvec(v[:, np.argmin(np.abs(w))])
    null = null / np.trace(null)
    np.testing.assert_allclose(null, np.diag([0, 1]), atol=1e-12)
    np.testing.assert_allclose(np.sort_complex(spectrum(s)), np.sort_complex([-k, -k / 2, -k / 2, 0]),
                               atol=1e-12)


def test_closed_system_spectrum():
    w = 0.7
    s = build_full(LindbladModel(np.diag([0.0, w])))
    got = spectrum(s)
    np.testing.assert_allclose(got, [-1j * w, 0, 0, 1j * w], atol=1e-14)
    np.testing.assert_allclose(build_nojump(LindbladModel(np.diag([0.0, w]))).matrix, s.matrix)


def test_full_minus_nojump_is_jump_term():
    model = tls_model(TlsParams())
    diff = build_full(model).matrix - build_nojump(model).matrix
    expected = sum(k * np.kron(f, f.conj()) for k, f in model.channels)
    np.testing.assert_allclose(diff, expected, atol=1e-15)
    np.testing.assert_allclose(jump_superoperator(model), expected, atol=1e-15)


def test_trace_preservation_and_zero_mode():
    for model in (tls_model(TlsParams()), hatano_nelson(HatanoNelsonParams(n_sites=4))):
        s = build_full(model)
        assert s.trace_defect() <= 1e-10
        assert np.abs(spectrum(s)).min() <= 1e-10
    w = spectrum(build_full(tls_model(TlsParams())))
    assert np.sum(np.abs(w) <= 1e-10) == 1


def test_hermiticity_propagation(rng):
    model = hatano_nelson(HatanoNelsonParams(n_sites=4, bc="PBC"))
    rho = random_density(rng, model.dim)
    out = unvec(build_full(model).matrix @ vec(rho))
    assert np.abs(out - out.conj().T).max() <= 1e-12


def test_block_triangular_structure():
    p = HatanoNelsonParams(n_sites=4)
    model = hatano_nelson(p)
    occ = fock_of(p).occupations()
    # order the vec index by total particle number of (row, col)
    tot = (occ[:, None] + occ[None, :]).reshape(-1)
    order = np.argsort(tot, kind="stable")
    full = build_full(model).matrix[np.ix_(order, order)]
    nj = build_nojump(model).matrix[np.ix_(order, order)]
    t = tot[order]
    lower_t = t[:, None] > t[None, :]
    assert np.abs(full[lower_t]).max() == 0  # jumps only lower the particle number
    assert np.abs(nj[t[:, None] != t[None, :]]).max() == 0


@pytest.mark.parametrize("bc", ["OBC", "PBC"])
def test_hatano_nelson_spectra_coincide_n6(bc):
    model = hatano_nelson(HatanoNelsonParams(n_sites=6, bc=bc))
    rep = spectra_match(spectrum(build_full(model)), spectrum(build_nojump(model)), 1e-8)
    assert rep.passed, rep.max_distance


def test_sector_and_kronecker_spectra_agree_with_dense():
    p = HatanoNelsonParams(n_sites=4, bc="PBC")
    model = hatano_nelson(p)
    full, nj = build_full(model), build_nojump(model)
    sectors = charge_sectors(liouvillian_charge(fock_of(p).occupations()))
    assert spectra_match(spectrum(full), spectrum(full, sectors=sectors), 1e-10).passed
    assert spectra_match(spectrum(nj), spectrum(nj, method="kronecker"), 1e-10).passed
    with pytest.raises(ValueError):
        spectrum(full, method="kronecker")
    with pytest.raises(ValueError):
        spectrum(full, sectors=[np.arange(3)])


def test_composite_free_and_jump_tls():
    p = TlsParams(omega=1.0, gamma_p=0.1, gamma_x=0.01, gamma_z=0.5)
    w, gp, gx, gz = p.omega, p.gamma_p, p.gamma_x, p.gamma_z
    model = tls_model(p)
    es = eig_biortho(effective_nh_hamiltonian(model))
    comp = build_composite(model, es)
    # product basis (system, ancilla) = 00, 01, 10, 11 with 0 = excited
    h0 = np.diag([-1j * (gp + gx + gz), w - 1j * (gp / 2 + gx + gz),
                  -w - 1j * (gp / 2 + gx + gz), -1j * (gx + gz)])
    v = 1j * np.array([[gz, 0, 0, gx], [0, -gz, gx, 0], [0, gx, -gz, 0], [gp + gx, 0, 0, gz]])
    np.testing.assert_allclose(comp.matrix - comp.jump, h0, atol=1e-12)
    np.testing.assert_allclose(comp.jump, v, atol=1e-12)
    # the free eigensystem is sorted by (Re, Im); compare the diagonal as a multiset
    fb = comp.free_biortho()
    assert np.abs(fb - np.diag(np.diag(fb))).max() <= 1e-12
    assert spectra_match(np.diag(fb), np.diag(h0), 1e-12).passed


def test_composite_spectrum_is_i_times_full(rng):
    model = hatano_nelson(HatanoNelsonParams(n_sites=3, bc="PBC"))
    es = eig_biortho(effective_nh_hamiltonian(model))
    comp = build_composite(model, es)
    a = np.linalg.eigvals(comp.matrix)
    b = 1j * spectrum(build_full(model))
    assert spectra_match(a, b, 1e-10).passed


def test_composite_without_coupling_is_diagonal(rng):
    h = random_complex(rng, 3)
    h = h + h.conj().T
    model = LindbladModel(h)
    es = eig_biortho(h)
    comp = build_composite(model, es)
    d = comp.free_eigensystem.left.conj().T @ comp.matrix @ comp.free_eigensystem.right
    e = es.eigenvalues
    np.testing.assert_allclose(d, np.diag((e[:, None] - e.conj()[None, :]).reshape(-1)), atol=1e-12)
    np.testing.assert_allclose(comp.jump_biortho, 0)


def test_state_mapping(rng):
    es = eig_biortho(random_complex(rng, 4))
    r0 = es.right[:, 0]
    psi = map_rho_to_state(np.outer(r0, r0.conj()), es)
    expect = np.zeros(16)
    expect[0] = 1
    np.testing.assert_allclose(psi, expect, atol=1e-12)
    rho = random_density(rng, 4)
    np.testing.assert_allclose(map_state_to_rho(map_rho_to_state(rho, es), es), rho, atol=1e-10)
    h = random_complex(rng, 4)
    hes = eig_biortho(h + h.conj().T)
    np.testing.assert_allclose(map_rho_to_state(rho, hes),
                               (hes.right.conj().T @ rho @ hes.right).reshape(-1), atol=1e-12)
    with pytest.raises(DimensionMismatch):
        map_state_to_rho(np.zeros(5), es)


def test_spectra_match_reports():
    a = np.array([1 + 1j, -2, 0.5j])
    assert spectra_match(a, a, 1e-12).max_distance == 0
    rep = spectra_match(a, a[::-1] + 1e-6, 1e-8)
    assert rep.max_distance == pytest.approx(1e-6, rel=1e-6)
    assert not rep.passed
    with pytest.raises(LengthMismatch):
        spectra_match(a, a[:2], 1e-8)
