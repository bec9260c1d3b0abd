"""Synthetic Pauli measurement data from a ground-truth channel.

Random streams come from the Philox-4x64 counter-based generator.  The
stream measuring axis ``a`` (0, 1, 2 for x, y, z) of input ``j`` uses the
128-bit key ``seed + 2**64 * (3 * j + a)`` and counter 0; each shot draws
one double ``u`` (53 high bits of a 64-bit output) and records ``+1`` when
``u < p``.
"""
from dataclasses import dataclass

import numpy as np

from .bloch import PAULIS, MeasurementRecord, QubitState
from .channel import AffineChannel, apply
from .errors import InputError

_CHUNK = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    channel: AffineChannel
    inputs: tuple
    shots_per_axis: int
    seed: int = 0

    def __post_init__(self):
        inputs = tuple(s if isinstance(s, QubitState) else QubitState(s) for s in self.inputs)
        for s in inputs:
            if not s.is_physical():
                raise InputError(f"simulation input {s.r.tolist()} is not physical")
        if int(self.shots_per_axis) < 1:
            raise InputError("shots_per_axis must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "shots_per_axis", int(self.shots_per_axis))
        object.__setattr__(self, "seed", int(self.seed))


def stream(seed, input_index, axis_index):
    key = int(seed) + (3 * int(input_index) + int(axis_index)) * 2**64
    return np.random.Generator(np.random.Philox(key=key))


def plus_probability(r_out, axis_index):
    return min(1.0, max(0.0, 0.5 * (1.0 + float(r_out[axis_index]))))


def _count_plus(rng, p, shots):
    plus = 0
    left = shots
    while left:
        n = min(left, _CHUNK)
        plus += int(np.count_nonzero(rng.random(n) < p))
        left -= n
    return plus


def simulate(cfg):
    """Finite-shot records, one per input, in input order."""
    out = []
    for j, s in enumerate(cfg.inputs):
        r_out = apply(cfg.channel, s).r
        counts = []
        for a in range(3):
            plus = _count_plus(stream(cfg.seed, j, a), plus_probability(r_out, a), cfg.shots_per_axis)
            counts.append((plus, cfg.shots_per_axis - plus))
        out.append((s, MeasurementRecord.from_counts(counts)))
    return out


def exact_records(channel, inputs):
    """Infinite-statistics records: the exact output Bloch vectors."""
    out = []
    for s in inputs:
        s = s if isinstance(s, QubitState) else QubitState(s)
        out.append((s, MeasurementRecord.from_expectations(tuple(apply(channel, s).r))))
    return out


CANONICAL_INPUTS = (
    QubitState([1.0, 0.0, 0.0]),
    QubitState([0.0, 1.0, 0.0]),
    QubitState([0.0, 0.0, 1.0]),
    QubitState([0.0, 0.0, 0.0]),
)


def channel_from_kraus(kraus):
    """Affine matrix ``M_kl = Tr(s_k E[s_l]) / 2`` of ``E[X] = sum K X K^dag``."""
    m = np.empty((4, 4))
    for l, sl in enumerate(PAULIS):
        image = sum(K @ sl @ K.conj().T for K in kraus)
        for k, sk in enumerate(PAULIS):
            m[k, l] = 0.5 * np.trace(sk @ image).real
    m[0] = (1.0, 0.0, 0.0, 0.0)
    return AffineChannel(m)


def random_cp_channel(rng, rank=4):
    """Channel from a Haar-ish random Stinespring isometry."""
    g = rng.normal(size=(2 * rank, 2)) + 1j * rng.normal(size=(2 * rank, 2))
    q, _ = np.linalg.qr(g)
    return channel_from_kraus([q[2 * i:2 * i + 2] for i in range(rank)])
