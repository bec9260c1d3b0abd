import numpy as np
import pytest

from qproc.bloch import PAULIS, QubitState
from qproc.reconstruct import TestPair

RHO_X = QubitState([1.0, 0.0, 0.0])
RHO_Y = QubitState([0.0, 1.0, 0.0])
RHO_Z = QubitState([0.0, 0.0, 1.0])
RHO_0 = QubitState([0.0, 0.0, 0.0])

# test-state sequences used for n = 0..4 in the universal-NOT case study
UNOT_SEQUENCES = {
    0: [],
    1: [RHO_Z],
    2: [RHO_Z, RHO_Y],
    3: [RHO_X, RHO_Y, RHO_Z],
    4: [RHO_X, RHO_Y, RHO_Z, RHO_0],
}


def unot_pairs(n):
    return [TestPair(s, QubitState(-s.r)) for s in UNOT_SEQUENCES[n]]


def identity_pairs(n):
    return [TestPair(s, s) for s in UNOT_SEQUENCES[n]]


def act_on_operator(M, X):
    """Channel action on an arbitrary 2x2 operator through its Pauli coefficients."""
    x = np.array([np.trace(p @ X) for p in PAULIS])
    y = np.asarray(M) @ x
    return 0.5 * sum(y[k] * PAULIS[k] for k in range(4))


def brute_force_choi(M):
    """(id x E) applied to |phi+><phi+| assembled from the matrix units |i><j|."""
    C = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            unit = np.zeros((2, 2))
            unit[i, j] = 1.0
            C += 0.5 * np.kron(unit, act_on_operator(M, unit))
    return C


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def random_pure(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
