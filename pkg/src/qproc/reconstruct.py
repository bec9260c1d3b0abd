"""Channel estimation from zero to four input/output test pairs.

With four linearly independent inputs the affine map is solved exactly.
With fewer, every direction outside the span of the inputs is sent to the
total mixture ("zero-fill"): the estimate is linear on the span with
``t = 0`` unless the affine hull of the inputs contains the total mixture,
in which case ``t`` is the measured image of the total mixture.

Two strategies turn the raw estimate into a CP map:

* strategy 1 searches the entries the data leave free for a CP completion
  and, failing that, admixes white noise into the outputs;
* strategy 2 keeps the zero-filled map and mixes it with the average
  channel.
"""
import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .bloch import OperatorFrame, QubitState, adapted_frame_from_states, regularize_state
from .channel import AffineChannel, channel_from_blocks
from .cp import CHOI_BASIS, DEFAULT_TOL, CpVerdict, is_completely_positive
from .errors import InputError
from .linalg import real_embedding
from .regularize import Mode, average_channel, regularize_map, regularize_outputs

GRID_STEP = 1e-3
FREE_ENTRY_BOUND = 2.0
# refinement target: boundary located where the Choi spectrum is numerically zero
REFINE_TOL = 1e-12


@dataclass(frozen=True)
class TestPair:
    __test__ = False  # keep pytest from collecting this class

    input: QubitState
    output: QubitState

    def __post_init__(self):
        if not isinstance(self.input, QubitState):
            object.__setattr__(self, "input", QubitState(self.input))
        if not isinstance(self.output, QubitState):
            object.__setattr__(self, "output", QubitState(self.output))
        if not self.input.is_physical():
            raise InputError(f"test input {self.input.r.tolist()} is not a physical state")


class Strategy(str, enum.Enum):
    COMPLETE = "complete"
    ZERO_FILL = "zero-fill"
    OUTPUT_NOISE = "output-noise"
    MAP_MIX = "map-mix"


@dataclass(frozen=True)
class ReconstructionReport:
    channel: AffineChannel
    n_pairs: int
    strategy: Strategy
    k: float
    frame: OperatorFrame
    cp_verdict: CpVerdict
    raw: AffineChannel
    method: int
    notes: list = field(default_factory=list)


# ---------------------------------------------------------------- complete


def reconstruct_complete(pairs, max_cond=1e8):
    """Exact affine map through four test pairs (no CP enforcement)."""
    pairs = list(pairs)
    if len(pairs) != 4:
        raise InputError(f"complete reconstruction needs 4 pairs, got {len(pairs)}")
    m_in = np.vstack([np.ones(4), np.column_stack([p.input.r for p in pairs])])
    m_out = np.vstack([np.ones(4), np.column_stack([p.output.r for p in pairs])])
    cond = np.linalg.cond(m_in)
    if not np.isfinite(cond) or cond >= max_cond:
        _, _, vt = np.linalg.svd(m_in)
        dep = vt[-1] / np.max(np.abs(vt[-1]))
        raise InputError(
            "test inputs are linearly dependent: "
            + " + ".join(f"{c:.6g}*rho_{j + 1}" for j, c in enumerate(dep))
            + " = 0"
        )
    m = m_out @ np.linalg.inv(m_in)
    m[0] = (1.0, 0.0, 0.0, 0.0)
    resid = np.max(np.abs(m @ m_in - m_out))
    if resid > 1e-10 * max(1.0, np.max(np.abs(m))):
        raise InputError(f"complete reconstruction residual {resid:.3g} too large")
    return AffineChannel(m)


# --------------------------------------------------------------- zero-fill


@dataclass(frozen=True, eq=False)
class ZeroFill:
    """Zero-filled estimate plus the family of data-consistent completions.

    Completions are parametrized by a translation (when the data leave it
    free) and by diagonal entries on the frame axes outside the span of the
    inputs; the columns on the span are adjusted so every pair is still
    reproduced exactly.  ``mask`` marks, in frame coordinates, the entries
    fixed by the data (given the translation).
    """

    raw: AffineChannel
    frame: OperatorFrame
    mask: np.ndarray
    translation_free: bool
    free_axes: tuple
    t0: np.ndarray
    Y: np.ndarray
    P: np.ndarray

    def completion(self, t=None, diag=()):
        if self.n_free == 0 and self.raw is not None:
            return self.raw
        t = self.t0 if t is None or not self.translation_free else np.asarray(t, dtype=float)
        T = (self.Y - np.outer(t, np.ones(self.Y.shape[1]))) @ self.P if self.Y.size else np.zeros((3, 3))
        for axis, d in zip(self.free_axes, diag):
            f = self.frame.axes[axis]
            T = T + d * np.outer(f, f)
        return channel_from_blocks(T, t)

    @property
    def n_free(self):
        return (3 if self.translation_free else 0) + len(self.free_axes)


def _mask(translation_free, free_axes):
    mask = np.ones((4, 4), dtype=bool)
    mask[1:, 0] = not translation_free
    for axis in free_axes:
        mask[1:, 1 + axis] = False
    return mask


def zero_fill(pairs, tol=1e-10):
    pairs = list(pairs)
    n = len(pairs)
    if n > 4:
        raise InputError(f"at most 4 test pairs are supported, got {n}")
    for i in range(n):
        for j in range(i):
            if np.linalg.norm(pairs[i].input.r - pairs[j].input.r) < tol:
                raise InputError(f"test inputs {j + 1} and {i + 1} coincide")

    if n == 0:
        free = (0, 1, 2)
        return ZeroFill(
            average_channel(), OperatorFrame.standard(), _mask(True, free), True, free,
            np.zeros(3), np.zeros((3, 0)), np.zeros((0, 3)),
        )
    if n == 4:
        E = reconstruct_complete(pairs)
        return ZeroFill(
            E, OperatorFrame.standard(), _mask(False, ()), False, (),
            E.t.copy(), np.zeros((3, 0)), np.zeros((0, 3)),
        )

    X = np.column_stack([p.input.r for p in pairs])
    Y = np.column_stack([p.output.r for p in pairs])
    if n == 3 and np.linalg.matrix_rank(X[:, 1:] - X[:, :1], tol=tol) < 2:
        raise InputError("the three test inputs are not affinely independent")

    # barycentric weights of the origin; exact solution means it lies in the hull
    A = np.vstack([X, np.ones(n)])
    at_center = [j for j in range(n) if not np.any(X[:, j])]
    if at_center:
        # keep t exactly equal to the measured image of the total mixture
        alpha = np.eye(n)[at_center[0]]
    else:
        alpha, *_ = np.linalg.lstsq(A, np.r_[np.zeros(3), 1.0], rcond=None)
    origin_in_hull = np.linalg.norm(A @ alpha - np.r_[np.zeros(3), 1.0]) < tol
    t0 = Y @ alpha if origin_in_hull else np.zeros(3)

    if n == 1 and np.linalg.norm(X[:, 0]) < tol:
        frame = OperatorFrame(np.eye(3), origin_in_span=True)
    else:
        frame = adapted_frame_from_states([p.input for p in pairs])
    P = np.linalg.pinv(X, rcond=tol)
    proj = X @ P
    weights = [float(f @ proj @ f) for f in frame.axes]
    free_axes = tuple(i for i, w in enumerate(weights) if w < 0.5)
    if any(0.0 + 1e-8 < w < 1.0 - 1e-8 for w in weights):
        raise InputError("adapted frame is not aligned with the span of the inputs")

    zf = ZeroFill(
        raw=None, frame=frame, mask=_mask(not origin_in_hull, free_axes),
        translation_free=not origin_in_hull, free_axes=free_axes,
        t0=t0, Y=Y, P=P,
    )
    object.__setattr__(zf, "raw", zf.completion())
    return zf


def reconstruct_zero_fill(pairs):
    return zero_fill(pairs).raw


# ------------------------------------------------------ free-entry search


def _choi_pencil(build, m):
    def choi(E):
        return np.einsum("kl,klij->ij", E.M, CHOI_BASIS)

    c0 = choi(build(np.zeros(m)))
    cs = [choi(build(np.eye(m)[i])) - c0 for i in range(m)]
    return c0, cs


def _min_eig(c0, cs, x):
    return float(np.linalg.eigvalsh(c0 + sum(xi * ci for xi, ci in zip(x, cs)))[0])


def _search_1d(c0, c1, tol):
    xs = np.round(np.arange(-FREE_ENTRY_BOUND, FREE_ENTRY_BOUND + GRID_STEP / 2, GRID_STEP), 12)
    mins = np.linalg.eigvalsh(c0[None] + xs[:, None, None] * c1[None])[:, 0]
    feasible = np.flatnonzero(mins >= -tol)
    if feasible.size == 0:
        return None
    # closest to zero, then the positive side
    best = min(feasible, key=lambda i: (abs(xs[i]), -xs[i]))
    outer = float(xs[best])
    inner = outer - np.sign(outer) * GRID_STEP
    if _min_eig(c0, [c1], [outer]) < -REFINE_TOL:
        return np.array([outer])
    for _ in range(60):
        mid = 0.5 * (inner + outer)
        if _min_eig(c0, [c1], [mid]) >= -REFINE_TOL:
            outer = mid
        else:
            inner = mid
    return np.array([outer])


def _solve(prob):
    # solver output is re-checked with an eigensolver, so accuracy warnings are noise
    import cvxpy as cp

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        try:
            prob.solve(solver=cp.CLARABEL)
        except cp.SolverError:
            pass


def _search_sdp(c0, cs, tol):
    import cvxpy as cp

    m = len(cs)
    e0 = real_embedding(c0)
    es = [real_embedding(c) for c in cs]
    x = cp.Variable(m)
    pencil = e0 + sum(x[i] * es[i] for i in range(m))
    bound = [cp.norm(x, "inf") <= FREE_ENTRY_BOUND]

    s = cp.Variable()
    center_prob = cp.Problem(cp.Maximize(s), [pencil >> s * np.eye(8)] + bound)
    _solve(center_prob)
    if x.value is None or s.value is None or s.value < -tol:
        return None
    center = np.array(x.value)
    if _min_eig(c0, cs, center) < -tol:
        return None

    norm_prob = cp.Problem(cp.Minimize(cp.norm(x, 2)), [pencil >> 0] + bound)
    _solve(norm_prob)
    if x.value is None:
        return center
    best = np.array(x.value)
    if _min_eig(c0, cs, best) >= -REFINE_TOL:
        return best
    # pull the solver's point toward the most interior point
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _min_eig(c0, cs, (1 - mid) * best + mid * center) >= -REFINE_TOL:
            hi = mid
        else:
            lo = mid
    return (1 - hi) * best + hi * center


def _search(build, m, tol):
    if m == 0:
        return np.zeros(0) if is_completely_positive(build(np.zeros(0)), tol).is_cp else None
    c0, cs = _choi_pencil(build, m)
    if _min_eig(c0, cs, np.zeros(m)) >= -tol:
        return np.zeros(m)
    if m == 1:
        return _search_1d(c0, cs[0], tol)
    return _search_sdp(c0, cs, tol)


def repair_free_parameters(zf, tol=DEFAULT_TOL, unital_only=False):
    """Look for a CP map among the data-consistent completions of ``zf``.

    Completions keeping the zero-fill translation are tried first; only if
    none is CP (and ``unital_only`` is false) is the translation released.
    Within a stage the free-entry vector of smallest Euclidean norm wins.
    Returns the channel, or ``None`` when no completion is CP.
    """
    k = len(zf.free_axes)

    x = _search(lambda v: zf.completion(diag=v), k, tol)
    if x is None and zf.translation_free and not unital_only:
        x = _search(lambda v: zf.completion(t=v[:3], diag=v[3:]), 3 + k, tol)
        if x is not None:
            E = zf.completion(t=x[:3], diag=x[3:])
            return E if is_completely_positive(E, tol).is_cp else None
    if x is None:
        return None
    E = zf.completion(diag=x)
    return E if is_completely_positive(E, tol).is_cp else None


# ----------------------------------------------------- two-pair condition


def trace_distance(r1, c1, r2, c2):
    """``||c1 rho(r1) - c2 rho(r2)||_1 / 2`` for scaled Bloch operators."""
    v = c1 * np.asarray(r1, dtype=float) - c2 * np.asarray(r2, dtype=float)
    return 0.5 * max(abs(c1 - c2), float(np.linalg.norm(v)))


def _contraction_gap(p1, p2, t):
    return trace_distance(p1.input.r, 1.0, p2.input.r, t) - trace_distance(p1.output.r, 1.0, p2.output.r, t)


def _contraction_gaps(p1, p2, ts):
    def dist(r1, r2):
        v = r1[None, :] - ts[:, None] * r2[None, :]
        return 0.5 * np.maximum(np.abs(1.0 - ts), np.linalg.norm(v, axis=1))

    return dist(p1.input.r, p2.input.r) - dist(p1.output.r, p2.output.r)


def two_state_compatibility(p1, p2, t_samples=1000, tol=1e-9):
    """Check ``D(rho1, t rho2) >= D(rho1', t rho2')`` for all ``t > 0``.

    Scans ``t`` on a log grid over ``[1e-3, 1e3]`` and refines around the
    worst grid point.  Returns ``(True, None)`` or ``(False, t_witness)``.
    """
    if t_samples < 100:
        raise InputError("two_state_compatibility needs at least 100 samples")
    log_t = np.linspace(-3.0, 3.0, int(t_samples))
    gaps = _contraction_gaps(p1, p2, 10.0**log_t)
    i = int(np.argmin(gaps))
    best_s, best_gap = log_t[i], gaps[i]
    lo, hi = log_t[max(i - 1, 0)], log_t[min(i + 1, len(log_t) - 1)]
    if hi > lo:
        res = minimize_scalar(
            lambda s: _contraction_gap(p1, p2, 10.0**s), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < best_gap:
            best_s, best_gap = float(res.x), float(res.fun)
    if best_gap < -tol:
        return False, float(10.0**best_s)
    return True, None


# -------------------------------------------------------------- strategies


def _prepare(pairs):
    pairs = [p if isinstance(p, TestPair) else TestPair(*p) for p in pairs]
    notes = []
    fixed = []
    for j, p in enumerate(pairs):
        out, k = regularize_state(p.output)
        if k < 1.0:
            notes.append({"kind": "output-state-regularized", "pair": j, "k": k})
        fixed.append(TestPair(p.input, out))
    n = len(fixed)
    if n == 2:
        ok, witness = two_state_compatibility(*fixed)
        notes.append({"kind": "two-state-compatibility", "compatible": ok, "witness_t": witness})
    return fixed, notes


def _zero_fill_notes(zf, n):
    notes = []
    if zf.frame.origin_in_span and 0 < n < 4:
        notes.append({"kind": "origin-in-span"})
    if zf.translation_free and 0 < n < 4:
        notes.append({"kind": "unitality-undetermined"})
    return notes


def _report(E, raw, n, strategy, k, zf, method, notes, tol):
    return ReconstructionReport(
        channel=E, n_pairs=n, strategy=strategy, k=float(k), frame=zf.frame,
        cp_verdict=is_completely_positive(E, tol), raw=raw, method=method, notes=notes,
    )


def _plain_strategy(n):
    return Strategy.COMPLETE if n == 4 else Strategy.ZERO_FILL


def reconstruct_strategy1(pairs, tol=DEFAULT_TOL):
    """Zero-fill, search free entries for a CP completion, else add output noise.

    The output-noise search reconstructs with the translation held at its
    zero-fill value, so the noise level is set by the data on the span.
    """
    pairs, notes = _prepare(pairs)
    n = len(pairs)
    zf = zero_fill(pairs)
    notes += _zero_fill_notes(zf, n)
    if is_completely_positive(zf.raw, tol).is_cp:
        return _report(zf.raw, zf.raw, n, _plain_strategy(n), 1.0, zf, 1, notes, tol)

    repaired = repair_free_parameters(zf, tol)
    if repaired is not None:
        notes.append({"kind": "free-parameter-repair", "found": True})
        return _report(repaired, zf.raw, n, Strategy.ZERO_FILL, 1.0, zf, 1, notes, tol)
    notes.append({"kind": "free-parameter-repair", "found": False})

    def reconstructor(ps):
        return repair_free_parameters(zero_fill(ps), tol, unital_only=True)

    result, _ = regularize_outputs(pairs, reconstructor, tol)
    strategy = Strategy.OUTPUT_NOISE if result.mode is Mode.OUTPUT_NOISE else _plain_strategy(n)
    return _report(result.channel, zf.raw, n, strategy, result.k, zf, 1, notes, tol)


def reconstruct_strategy2(pairs, tol=DEFAULT_TOL):
    """Zero-fill, then mix with the average channel if the result is not CP."""
    pairs, notes = _prepare(pairs)
    n = len(pairs)
    zf = zero_fill(pairs)
    notes += _zero_fill_notes(zf, n)
    result = regularize_map(zf.raw, tol)
    strategy = Strategy.MAP_MIX if result.mode is Mode.MAP_MIX else _plain_strategy(n)
    return _report(result.channel, zf.raw, n, strategy, result.k, zf, 2, notes, tol)


def reconstruct(pairs, strategy=1, tol=DEFAULT_TOL):
    if strategy == 1:
        return reconstruct_strategy1(pairs, tol)
    if strategy == 2:
        return reconstruct_strategy2(pairs, tol)
    raise InputError(f"unknown strategy {strategy!r}; expected 1 or 2")
