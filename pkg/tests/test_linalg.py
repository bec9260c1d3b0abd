import numpy as np
import pytest

from qproc.errors import QprocError
from qproc.linalg import hermitian_eigvalsh, jacobi_eigh, real_embedding


def test_jacobi_matches_lapack_on_random_hermitian(rng):
    for _ in range(200):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = a + a.conj().T
        assert np.allclose(hermitian_eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-12)


def test_jacobi_eigenvectors_diagonalize(rng):
    a = rng.normal(size=(8, 8))
    a = a + a.T
    w, v = jacobi_eigh(a)
    assert np.allclose(v.T @ a @ v, np.diag(w), atol=1e-11)
    assert np.allclose(v.T @ v, np.eye(8), atol=1e-12)


def test_real_embedding_doubles_spectrum():
    h = np.array([[2.0, 1j], [-1j, 0.5]])
    w = np.linalg.eigvalsh(real_embedding(h))
    assert np.allclose(w[0::2], np.linalg.eigvalsh(h))
    assert np.allclose(w[1::2], np.linalg.eigvalsh(h))


def test_diagonal_input_converges_immediately():
    w, v = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    assert w.tolist() == [-1.0, 2.0, 3.0]


def test_sweep_limit_raises():
    a = np.array([[1.0, 0.5], [0.5, 2.0]])
    with pytest.raises(QprocError):
        jacobi_eigh(a, max_sweeps=0)
