"""Qubit states as Bloch vectors.

A state is ``rho = (I + r . sigma) / 2``.  Raw tomography can give
``|r| > 1``, so :class:`QubitState` accepts any finite vector; use
:meth:`QubitState.physical` when the unit-ball constraint must hold.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SIGMA_X, SIGMA_Y, SIGMA_Z)

AXES = ("x", "y", "z")
PHYSICAL_TOL = 1e-12


def _frozen(a, shape):
    a = np.array(a, dtype=float)
    if a.shape != shape:
        raise InputError(f"expected shape {shape}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QubitState:
    r: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", _frozen(self.r, (3,)))

    @classmethod
    def physical(cls, r, tol=PHYSICAL_TOL):
        s = cls(r)
        if not s.is_physical(tol):
            raise InputError(f"Bloch vector {s.r.tolist()} lies outside the unit ball")
        return s

    @classmethod
    def from_density_matrix(cls, rho):
        rho = np.asarray(rho, dtype=complex)
        return cls([np.trace(rho @ s).real for s in PAULIS[1:]])

    @property
    def norm(self):
        return float(np.linalg.norm(self.r))

    # |r| is the distance from the total mixture: 0 mixed, 1 pure
    purity = norm

    def is_physical(self, tol=PHYSICAL_TOL):
        return self.norm <= 1.0 + tol

    def density_matrix(self):
        x, y, z = self.r
        return 0.5 * (I2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)

    def __eq__(self, other):
        if not isinstance(other, QubitState):
            return NotImplemented
        return bool(np.array_equal(self.r, other.r))

    def __hash__(self):
        return hash(self.r.tobytes())

    def __repr__(self):
        return f"QubitState({self.r.tolist()})"


TOTAL_MIXTURE = QubitState([0.0, 0.0, 0.0])


@dataclass(frozen=True)
class MeasurementRecord:
    """Pauli statistics for one state: click counts or mean values.

    ``counts`` is ``((plus_x, minus_x), (plus_y, minus_y), (plus_z, minus_z))``;
    ``expectations`` is ``(<sx>, <sy>, <sz>)``.  Exactly one is set.
    """

    counts: tuple = None
    expectations: tuple = None

    def __post_init__(self):
        if (self.counts is None) == (self.expectations is None):
            raise InputError("record needs exactly one of counts or expectations")
        if self.counts is not None:
            counts = tuple((int(p), int(m)) for p, m in self.counts)
            if len(counts) != 3:
                raise InputError("counts must cover the three axes x, y, z")
            for axis, (p, m) in zip(AXES, counts):
                if p < 0 or m < 0:
                    raise InputError(f"negative counts on axis {axis}")
                if p + m < 1:
                    raise InputError(f"zero total counts on axis {axis}")
            object.__setattr__(self, "counts", counts)
        else:
            ex = tuple(float(e) for e in self.expectations)
            if len(ex) != 3:
                raise InputError("expectations must cover the three axes x, y, z")
            for axis, e in zip(AXES, ex):
                if not (-1.0 <= e <= 1.0):
                    raise InputError(f"expectation on axis {axis} is outside [-1, 1]: {e}")
            object.__setattr__(self, "expectations", ex)

    @classmethod
    def from_counts(cls, counts):
        return cls(counts=counts)

    @classmethod
    def from_expectations(cls, expectations):
        return cls(expectations=expectations)

    def mean_values(self):
        if self.expectations is not None:
            return np.array(self.expectations)
        return np.array([(p - m) / (p + m) for p, m in self.counts])


@dataclass(frozen=True, eq=False)
class OperatorFrame:
    """Adapted Pauli basis ``S_x, S_y, S_z`` as rows of a proper rotation.

    ``origin_in_span`` flags that the affine hull of the states that built
    the frame contains the total mixture.
    """

    axes: np.ndarray
    origin_in_span: bool = False

    def __post_init__(self):
        axes = _frozen(self.axes, (3, 3))
        if not np.allclose(axes @ axes.T, np.eye(3), atol=1e-10) or np.linalg.det(axes) < 0:
            raise InputError("frame axes must form a proper rotation")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def standard(cls):
        return cls(np.eye(3))

    def to_frame(self, v):
        return self.axes @ np.asarray(v, dtype=float)

    def from_frame(self, v):
        return self.axes.T @ np.asarray(v, dtype=float)


def state_from_record(rec):
    """Bloch vector from the measured Pauli means; no physicality clamp."""
    return QubitState(rec.mean_values())


def record_from_state(s):
    return MeasurementRecord.from_expectations(tuple(s.r))


def regularize_state(s):
    """Admix white noise until the state is physical.

    Returns ``(state, k)`` with ``r_c = k r`` and ``k = min(1, 1/|r|)``.
    """
    norm = s.norm
    # a normalized vector can come out a few ulps long; leave it alone
    if norm <= 1.0 + 4 * np.finfo(float).eps:
        return s, 1.0
    k = 1.0 / norm
    return QubitState(s.r / norm), k


def mix_state(s, k):
    """``k * rho + (1 - k) * I/2``, i.e. ``r -> k r``."""
    if not 0.0 <= k <= 1.0:
        raise InputError(f"mixing weight k={k} outside [0, 1]")
    return QubitState(k * s.r)


def _complete_from_axis(e3):
    # standard axis least aligned with e3, lowest index on ties
    i = int(np.argmin(np.abs(e3)))
    a = np.zeros(3)
    a[i] = 1.0
    e1 = a - (a @ e3) * e3
    e1 /= np.linalg.norm(e1)
    return e1


def _rows(e1, e3):
    return np.array([e1, np.cross(e3, e1), e3])


def _line_sphere_point(r1, r2):
    d = r2 - r1
    a = d @ d
    b = 2.0 * (r1 @ d)
    c = r1 @ r1 - 1.0
    disc = max(b * b - 4.0 * a * c, 0.0)
    roots = [(-b + np.sqrt(disc)) / (2.0 * a), (-b - np.sqrt(disc)) / (2.0 * a)]
    points = [r1 + s * d for s in roots]
    # larger overlap with r1 wins, then lexicographic order
    points.sort(key=lambda p: (-round(float(p @ r1), 12), tuple(np.round(p, 12))))
    p = points[0]
    return p / np.linalg.norm(p)


def adapted_frame_from_states(states, tol=1e-10):
    """Build the adapted operator basis for one to three test states.

    One state: ``S_z`` along its Bloch vector.  Two states: ``S_z`` at the
    pure state where their line leaves the Bloch ball and ``S_x`` along the
    part of the line direction orthogonal to it.  Three states:
    Gram-Schmidt over the Bloch vectors.
    """
    rs = [np.asarray(s.r, dtype=float) for s in states]
    n = len(rs)
    if not 1 <= n <= 3:
        raise InputError(f"adapted frame needs 1 to 3 states, got {n}")
    if all(np.linalg.norm(r) < tol for r in rs):
        raise InputError("all Bloch vectors are zero; the frame is undetermined")

    if n == 1:
        e3 = rs[0] / np.linalg.norm(rs[0])
        return OperatorFrame(_rows(_complete_from_axis(e3), e3))

    if n == 2:
        r1, r2 = rs
        d = r2 - r1
        if np.linalg.norm(d) < tol:
            raise InputError("the two test states coincide")
        e3 = _line_sphere_point(r1, r2)
        perp = d - (d @ e3) * e3
        if np.linalg.norm(perp) < tol * np.linalg.norm(d):
            return OperatorFrame(_rows(_complete_from_axis(e3), e3), origin_in_span=True)
        return OperatorFrame(_rows(perp / np.linalg.norm(perp), e3))

    diffs = np.array([rs[1] - rs[0], rs[2] - rs[0]])
    if np.linalg.matrix_rank(diffs, tol=tol) < 2:
        raise InputError("the three test states are not affinely independent")
    basis = []
    for r in rs:
        v = r - sum((r @ b) * b for b in basis)
        if np.linalg.norm(v) > tol:
            basis.append(v / np.linalg.norm(v))
        if len(basis) == 2:
            break
    e3, e1 = basis
    normal = np.cross(diffs[0], diffs[1])
    origin_in_span = abs(normal @ rs[0]) < tol * np.linalg.norm(normal)
    return OperatorFrame(_rows(e1, e3), origin_in_span=bool(origin_in_span))
