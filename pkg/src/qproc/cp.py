"""Positivity and complete positivity of qubit channels.

Complete positivity is decided by the spectrum of the normalized Choi
matrix ``C = (id x E)(|phi+><phi+|)``.  For unital maps the four tetrahedron
inequalities ``|l1 +- l2| <= |1 +- l3|`` on the signed singular values are
evaluated as well and must agree with the spectrum.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .bloch import PAULIS
from .channel import diagonal_form
from .errors import InputError
from .linalg import hermitian_eigvalsh

DEFAULT_TOL = 1e-9

# C = sum_kl M[k, l] * CHOI_BASIS[k, l]
CHOI_BASIS = np.array([[0.25 * np.kron(PAULIS[l].T, PAULIS[k]) for l in range(4)] for k in range(4)])


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    C: np.ndarray

    def partial_trace_output(self):
        """Trace over the second (output) tensor factor."""
        return np.einsum("ijkj->ik", self.C.reshape(2, 2, 2, 2))

    def eigenvalues(self):
        return hermitian_eigvalsh(self.C)


@dataclass(frozen=True)
class CpVerdict:
    is_positive: bool
    is_cp: bool
    min_choi_eigenvalue: float
    violated_inequalities: list = field(default_factory=list)


def choi_matrix(E):
    return ChoiMatrix(np.einsum("kl,klij->ij", E.M, CHOI_BASIS))


def unital_choi_spectrum(lam):
    """Closed-form Choi eigenvalues of the unital map ``diag(1, lam)``."""
    l1, l2, l3 = lam
    return np.sort(
        np.array(
            [
                1 + l1 - l2 - l3,
                1 - l1 + l2 - l3,
                1 - l1 - l2 + l3,
                1 + l1 + l2 + l3,
            ]
        )
        / 4.0
    )


def min_choi_eigenvalue(E):
    return float(choi_matrix(E).eigenvalues()[0])


def _tetrahedron_slack(lam):
    l1, l2, l3 = (float(x) for x in lam)
    return [
        1 + l3 - (l1 + l2),
        1 + l3 + (l1 + l2),
        1 - l3 - (l1 - l2),
        1 - l3 + (l1 - l2),
    ]


def tetrahedron_check(lam, tol=DEFAULT_TOL):
    """Evaluate the four CP inequalities for unital maps.

    Index 0: ``l1 + l2 <= 1 + l3``; 1: ``-(l1 + l2) <= 1 + l3``;
    2: ``l1 - l2 <= 1 - l3``; 3: ``-(l1 - l2) <= 1 - l3``.  Together they
    are ``|l1 +- l2| <= |1 +- l3|`` inside the cube ``|l_k| <= 1``.
    """
    if max(abs(float(x)) for x in lam) > 1.0 + tol:
        raise InputError(f"lambda {list(lam)} lies outside the positivity cube |l_k| <= 1")
    violated = [i for i, s in enumerate(_tetrahedron_slack(lam)) if s < -tol]
    return not violated, violated


def max_image_norm(E):
    """Maximize ``|T u + t|`` over unit vectors ``u``.

    Stationary points satisfy ``(mu I - A) u = b`` with ``A = T^T T`` and
    ``b = T^T t``; the global maximum has ``mu >= max eig(A)`` and ``mu`` is
    the root of the secular equation ``sum c_i^2 / (mu - a_i)^2 = 1``.
    Returns ``(norm, u)``.
    """
    T, t = E.T, E.t
    a, Q = np.linalg.eigh(T.T @ T)
    c = Q.T @ (T.T @ t)
    a_max = a[-1]

    def value(u):
        return float(np.linalg.norm(T @ u + t))

    candidates = [Q[:, -1], -Q[:, -1]]
    cn = float(np.linalg.norm(c))
    if cn > 1e-15:

        def secular(mu):
            return float(np.sum(c**2 / (mu - a) ** 2)) - 1.0

        lo = a_max + 1e-14 * max(1.0, abs(a_max))
        hi = a_max + cn
        while secular(hi) > 0:  # rounding can leave the bracket a hair short
            hi = a_max + 2.0 * (hi - a_max)
        if secular(lo) > 0:
            mu = brentq(secular, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            u = c / (mu - a)
            candidates.append(Q @ (u / np.linalg.norm(u)))
        else:
            # hard case: c has (almost) no weight on the top eigenvector
            top = np.isclose(a, a_max, rtol=0, atol=1e-12)
            u = np.zeros(3)
            u[~top] = -c[~top] / (a[~top] - a_max)
            rest = max(0.0, 1.0 - float(u @ u))
            for sign in (1.0, -1.0):
                w = u.copy()
                w[np.argmax(top)] = sign * np.sqrt(rest)
                candidates.append(Q @ (w / np.linalg.norm(w)))
    best = max(candidates, key=value)
    return value(best), best


def is_positive_map(E, tol=DEFAULT_TOL):
    """True iff ``E`` maps the Bloch ball into itself (up to ``tol``)."""
    norm, _ = max_image_norm(E)
    return norm <= 1.0 + tol


def is_completely_positive(E, tol=DEFAULT_TOL):
    mu = min_choi_eigenvalue(E)
    is_cp = mu >= -tol
    violated = []
    if E.is_unital(tol=1e-12):
        # the four slacks are 4x the Choi eigenvalues, so no cube precondition here
        slack = _tetrahedron_slack(diagonal_form(E).lam)
        violated = [i for i, s in enumerate(slack) if s < -4.0 * tol]
        if (not violated) != is_cp and abs(mu) > 1e-8:
            raise AssertionError(f"tetrahedron verdict disagrees with Choi spectrum {mu}")
    return CpVerdict(
        is_positive=is_positive_map(E, tol),
        is_cp=bool(is_cp),
        min_choi_eigenvalue=mu,
        violated_inequalities=list(violated),
    )
