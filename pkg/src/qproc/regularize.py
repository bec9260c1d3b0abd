"""Regularization of channel estimates by admixing the average channel.

The average channel ``A`` contracts the Bloch ball to its center.  Since
``choi(A) = I/4`` and the Choi map is affine, the spectrum of
``k E + (1 - k) A`` is ``k mu_i + (1 - k) / 4``; the largest ``k`` keeping
it positive follows in closed form from the smallest eigenvalue of ``E``.
"""
import enum
from dataclasses import dataclass

import numpy as np

from .bloch import QubitState
from .channel import AffineChannel, channel_from_blocks
from .cp import DEFAULT_TOL, is_completely_positive, min_choi_eigenvalue
from .errors import InputError, ReconstructionError

BISECTION_TOL = 1e-9


class Mode(str, enum.Enum):
    MAP_MIX = "map-mix"
    OUTPUT_NOISE = "output-noise"
    NONE_NEEDED = "none-needed"


@dataclass(frozen=True)
class RegularizationResult:
    channel: AffineChannel
    k: float
    mode: Mode


def average_channel():
    return channel_from_blocks(np.zeros((3, 3)), np.zeros(3))


def mix_with_average(E, k):
    if not 0.0 <= k <= 1.0:
        raise InputError(f"mixing weight k={k} outside [0, 1]")
    return channel_from_blocks(k * E.T, k * E.t)


def critical_k(E):
    """Largest ``k`` in ``[0, 1]`` with ``mix_with_average(E, k)`` CP."""
    mu = min_choi_eigenvalue(E)
    if mu >= 0.0:
        return 1.0
    return 1.0 / (1.0 - 4.0 * mu)


def regularize_map(E, tol=DEFAULT_TOL):
    if is_completely_positive(E, tol).is_cp:
        return RegularizationResult(E, 1.0, Mode.NONE_NEEDED)
    k = critical_k(E)
    return RegularizationResult(mix_with_average(E, k), k, Mode.MAP_MIX)


def _scale_outputs(pairs, k):
    # imported lazily: reconstruct depends on this module
    from .reconstruct import TestPair

    return [TestPair(p.input, QubitState(k * p.output.r)) for p in pairs]


def regularize_outputs(pairs, reconstructor, tol=DEFAULT_TOL, k_tol=BISECTION_TOL):
    """Shrink every output toward the total mixture by a shared ``k``.

    ``reconstructor`` maps a list of pairs to an :class:`AffineChannel`, or
    to ``None`` when it cannot produce one.  The largest ``k`` for which the
    result is CP is found by bisection; feasibility is monotone in ``k``
    because mixing a fitting map with ``A`` fits the shrunk data.

    Returns ``(RegularizationResult, scaled_pairs)``.
    """
    pairs = list(pairs)
    if not pairs:
        raise InputError("regularize_outputs needs at least one pair")

    def attempt(k):
        scaled = _scale_outputs(pairs, k)
        E = reconstructor(scaled)
        if E is not None and is_completely_positive(E, tol).is_cp:
            return E, scaled
        return None

    found = attempt(1.0)
    if found is not None:
        return RegularizationResult(found[0], 1.0, Mode.NONE_NEEDED), found[1]
    found = attempt(0.0)
    if found is None:
        raise ReconstructionError("no output noise level gives a completely positive map")

    lo, hi = 0.0, 1.0
    while hi - lo > k_tol:
        mid = 0.5 * (lo + hi)
        trial = attempt(mid)
        if trial is None:
            hi = mid
        else:
            lo, found = mid, trial
    return RegularizationResult(found[0], lo, Mode.OUTPUT_NOISE), found[1]
