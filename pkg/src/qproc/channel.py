"""Affine (Pauli-transfer) representation of qubit channels.

A channel acts on Bloch vectors as ``r -> T r + t`` and is stored as the
4x4 real matrix

    M = [[1, 0],
         [t, T]]

with ``M[k, l] = Tr(sigma_k E[sigma_l]) / 2`` so that the identity channel
is the identity matrix.
"""
from dataclasses import dataclass

import numpy as np

from .bloch import PAULIS, QubitState
from .errors import InputError

_FIRST_ROW = np.array([1.0, 0.0, 0.0, 0.0])


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AffineChannel:
    M: np.ndarray

    def __post_init__(self):
        m = np.array(self.M, dtype=float)
        if m.shape != (4, 4):
            raise InputError(f"channel matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputError("channel matrix has non-finite entries")
        if not np.array_equal(m[0], _FIRST_ROW):
            raise InputError(f"first row must be (1, 0, 0, 0), got {m[0].tolist()}")
        object.__setattr__(self, "M", _readonly(m))

    @property
    def t(self):
        return self.M[1:, 0]

    @property
    def T(self):
        return self.M[1:, 1:]

    def is_unital(self, tol=1e-12):
        return bool(np.all(np.abs(self.t) <= tol))

    def __repr__(self):
        return f"AffineChannel({self.M.tolist()})"


@dataclass(frozen=True, eq=False)
class DiagonalForm:
    """``T = R_U diag(lam) R_V`` with proper rotations and ``tau = R_U^T t``."""

    lam: np.ndarray
    tau: np.ndarray
    R_U: np.ndarray
    R_V: np.ndarray

    def channel(self):
        """The diagonal-form map ``r_j -> lam_j r_j + tau_j``."""
        return channel_from_blocks(np.diag(self.lam), self.tau)


def channel_from_blocks(T, t):
    T = np.asarray(T, dtype=float)
    t = np.asarray(t, dtype=float)
    if T.shape != (3, 3) or t.shape != (3,):
        raise InputError("T must be 3x3 and t a 3-vector")
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1:, 0] = t
    m[1:, 1:] = T
    return AffineChannel(m)


def identity_channel():
    return AffineChannel(np.eye(4))


def universal_not():
    """The (unphysical) universal NOT, ``r -> -r``."""
    return channel_from_blocks(-np.eye(3), np.zeros(3))


def apply(E, s):
    return QubitState(E.T @ s.r + E.t)


def compose(E2, E1):
    """``E2 after E1``."""
    m = E2.M @ E1.M
    m[0] = _FIRST_ROW
    return AffineChannel(m)


def is_rotation(R, tol=1e-10):
    R = np.asarray(R, dtype=float)
    return (
        R.shape == (3, 3)
        and np.allclose(R @ R.T, np.eye(3), atol=tol)
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


def rotation_matrix(axis, angle):
    """Rodrigues rotation by ``angle`` about ``axis``."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


def rotation_channel(R, tol=1e-10):
    if not is_rotation(R, tol):
        raise InputError("rotation_channel needs an orthogonal matrix with det +1")
    return channel_from_blocks(R, np.zeros(3))


def unitary_to_rotation(U):
    """SO(3) image of a 2x2 unitary: ``R_kl = Tr(s_k U s_l U^dag) / 2``."""
    U = np.asarray(U, dtype=complex)
    return np.array(
        [[0.5 * np.trace(PAULIS[k] @ U @ PAULIS[l] @ U.conj().T).real for l in (1, 2, 3)] for k in (1, 2, 3)]
    )


def diagonal_form(E):
    """Reduce ``E`` to its signed singular-value form.

    Reflections from the SVD are absorbed so both rotations are proper;
    ``|lam_1| >= |lam_2| >= |lam_3|``, ``lam_1, lam_2 >= 0`` and ``lam_3``
    carries the sign of ``det T``.
    """
    U, s, Vt = np.linalg.svd(E.T)
    lam = s.copy()
    if np.linalg.det(U) < 0:
        U[:, 2] *= -1
        lam[2] *= -1
    if np.linalg.det(Vt) < 0:
        Vt[2, :] *= -1
        lam[2] *= -1
    lam[2] += 0.0  # no negative zero
    tau = U.T @ E.t
    return DiagonalForm(_readonly(lam), _readonly(tau), _readonly(U), _readonly(Vt))


def mix(E1, E2, k):
    """Convex mixture ``k E1 + (1 - k) E2`` formed on the matrices."""
    m = k * E1.M + (1.0 - k) * E2.M
    m[0] = _FIRST_ROW
    return AffineChannel(m)


def in_frame(E, frame):
    """Matrix of ``E`` with inputs and outputs expressed in ``frame``."""
    R = frame.axes
    return channel_from_blocks(R @ E.T @ R.T, R @ E.t)
