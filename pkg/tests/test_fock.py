import numpy as np
import pytest
from hypothesis import given, strategies as st

from nhjump.errors import IndexOutOfRange, InvalidCap
from nhjump.fock import (FockSpace, annihilator, creator, fock_space, kron, number_operator,
                         pauli_ops)


def test_pauli_algebra():
    sx, sy, sz, sp, sm = pauli_ops()
    np.testing.assert_allclose(sz @ sz, np.eye(2))
    np.testing.assert_allclose(sp @ sm, np.diag([1, 0]))
    np.testing.assert_allclose(sx @ sy - sy @ sx, 2j * sz)


@pytest.mark.parametrize("n,cap,dim", [(2, 2, 4), (10, 2, 56), (3, 0, 1)])
def test_dimensions(n, cap, dim):
    assert fock_space(n, cap).dim == dim
    assert len(fock_space(n, cap).basis) == dim


def test_invalid_caps():
    with pytest.raises(InvalidCap):
        FockSpace(3, 4)
    with pytest.raises(InvalidCap):
        FockSpace(0, 0)


def test_basis_order():
    assert FockSpace(3, 2).basis == (0, 1, 2, 4, 3, 5, 6)


def test_single_site():
    s = FockSpace(1, 1)
    c = annihilator(s, 0)
    empty, full = np.array([1, 0]), np.array([0, 1])
    np.testing.assert_allclose(c @ full, empty)
    np.testing.assert_allclose(c @ empty, 0)


def test_two_site_antisymmetry():
    s = FockSpace(2, 2)
    c0d, c1d = creator(s, 0), creator(s, 1)
    vac = s.state(())
    np.testing.assert_allclose(c0d @ c1d @ vac, -(c1d @ c0d @ vac))
    assert np.abs(c0d @ c1d @ vac).sum() == 1


def test_pair_overlap_10_sites():
    s = FockSpace(10, 2)
    c1, c2 = annihilator(s, 1), annihilator(s, 2)
    psi = creator(s, 1) @ creator(s, 2) @ s.state(())
    assert (c2 @ c1 @ psi)[0] == pytest.approx(1.0)
    np.testing.assert_allclose(s.state((1, 2)), psi)


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        annihilator(FockSpace(3, 2), 3)


def test_kron():
    sz = pauli_ops()[2]
    np.testing.assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_allclose(kron(sz, np.eye(2)), np.diag([1, 1, -1, -1]))
    rng = np.random.default_rng(3)
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)


def test_number_operator():
    np.testing.assert_allclose(number_operator(FockSpace(2, 2)), np.diag([0, 1, 1, 2]))
    s = FockSpace(10, 2)
    n = number_operator(s)
    assert set(np.round(np.linalg.eigvalsh(n), 12)) == {0, 1, 2}
    c = [annihilator(s, j) for j in range(10)]
    hop = sum(c[j + 1].conj().T @ c[j] for j in range(9))
    hop = hop + hop.conj().T
    assert np.abs(n @ hop - hop @ n).max() <= 1e-12


@given(st.integers(1, 5), st.data())
def test_anticommutation(n, data):
    cap = data.draw(st.integers(1, n))
    s = FockSpace(n, cap)
    c = [annihilator(s, j) for j in range(n)]
    low = np.diag((s.occupations() <= cap - 1).astype(float))
    for i in range(n):
        for j in range(n):
            assert np.abs(c[i] @ c[j] + c[j] @ c[i]).max() == 0
            acomm = c[i] @ c[j].conj().T + c[j].conj().T @ c[i]
            np.testing.assert_allclose(acomm @ low, (i == j) * low, atol=1e-14)
        nj = c[i].conj().T @ c[i]
        assert set(np.round(np.diag(nj).real, 12)) <= {0.0, 1.0}
        assert np.abs(nj - np.diag(np.diag(nj))).max() == 0


def test_deterministic_construction():
    a = annihilator(FockSpace(6, 2), 3)
    b = annihilator(FockSpace(6, 2), 3)
    assert a.tobytes() == b.tobytes()
