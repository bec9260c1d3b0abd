"""Small fixed-size linear algebra used by the CP tests.

The Hermitian eigensolver is a cyclic Jacobi iteration on the real
symmetric embedding

    H = A + iB  ->  [[A, -B], [B, A]]

whose spectrum is the spectrum of ``H`` with every eigenvalue doubled.
"""
import math

import numpy as np

from .errors import QprocError

OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100


def real_embedding(h):
    h = np.asarray(h, dtype=complex)
    a, b = h.real, h.imag
    return np.block([[a, -b], [b, a]])


def jacobi_eigh(a, tol=OFFDIAG_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` in ascending order and the
    eigenvectors as columns of ``v``.  Converges when the Frobenius norm of
    the off-diagonal part falls below ``tol * max(1, ||a||_F)``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(a)))
    mask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(a[mask] ** 2)))
        if off < tol * scale:
            order = np.argsort(np.diag(a), kind="stable")
            return np.diag(a)[order], v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    raise QprocError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def hermitian_eigvalsh(h, tol=OFFDIAG_TOL, max_sweeps=MAX_SWEEPS):
    """Ascending eigenvalues of a complex Hermitian matrix via Jacobi."""
    w, _ = jacobi_eigh(real_embedding(h), tol=tol, max_sweeps=max_sweeps)
    # each eigenvalue appears twice in the embedding
    return 0.5 * (w[0::2] + w[1::2])
