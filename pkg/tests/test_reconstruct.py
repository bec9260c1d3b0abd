import numpy as np
import pytest

from qproc.bloch import QubitState
from qproc.channel import apply, channel_from_blocks, diagonal_form, identity_channel, rotation_channel, universal_not
from qproc.cp import is_completely_positive
from qproc.errors import InputError
from qproc.reconstruct import (
    Strategy,
    TestPair,
    reconstruct,
    reconstruct_complete,
    reconstruct_zero_fill,
    repair_free_parameters,
    trace_distance,
    two_state_compatibility,
    zero_fill,
)
from qproc.sim import random_cp_channel

from conftest import RHO_0, RHO_X, RHO_Y, RHO_Z, identity_pairs, random_pure, random_rotation, unot_pairs


def pairs_from(E, states):
    return [TestPair(s, apply(E, s)) for s in states]


def test_complete_examples(rng):
    assert np.allclose(reconstruct_complete(identity_pairs(4)).M, np.eye(4), atol=1e-15)
    assert np.allclose(reconstruct_complete(unot_pairs(4)).M, np.diag([1.0, -1, -1, -1]), atol=1e-15)
    for _ in range(100):
        E = random_cp_channel(rng)
        got = reconstruct_complete(pairs_from(E, [RHO_X, RHO_Y, RHO_Z, RHO_0]))
        assert np.linalg.norm(got.M - E.M) < 1e-10


def test_complete_dependent_inputs():
    states = [RHO_X, RHO_Y, QubitState([0.5, 0.5, 0]), RHO_0]
    with pytest.raises(InputError, match="linearly dependent"):
        reconstruct_complete(pairs_from(identity_channel(), states))


def test_zero_fill_examples():
    assert np.array_equal(reconstruct_zero_fill([]).M, np.diag([1.0, 0, 0, 0]))
    assert np.allclose(reconstruct_zero_fill(identity_pairs(1)).M, np.diag([1.0, 0, 0, 1]), atol=1e-15)
    assert np.allclose(reconstruct_zero_fill(identity_pairs(2)).M, np.diag([1.0, 0, 1, 1]), atol=1e-15)
    E = reconstruct_zero_fill(unot_pairs(2))
    assert np.allclose(E.M, np.diag([1.0, 0, -1, -1]), atol=1e-15)
    s = QubitState([0.3, -0.2, 0.4])
    assert np.allclose(apply(E, s).r, [0, 0.2, -0.4], atol=1e-15)


def test_zero_fill_mixed_single_state():
    E = reconstruct_zero_fill([TestPair([0, 0, 0.5], [0, 0, 0.5])])
    assert np.allclose(E.M, np.diag([1.0, 0, 0, 1]), atol=1e-15)


def test_zero_fill_data_fidelity(rng):
    for _ in range(300):
        n = int(rng.integers(1, 5))
        inputs = [QubitState(random_pure(rng) * rng.uniform(0.2, 1.0)) for _ in range(n)]
        outputs = [QubitState(rng.uniform(-1, 1, 3)) for _ in range(n)]
        pairs = [TestPair(a, b) for a, b in zip(inputs, outputs)]
        try:
            E = reconstruct_zero_fill(pairs)
        except InputError:
            continue
        for p in pairs:
            assert np.allclose(apply(E, p.input).r, p.output.r, atol=1e-10)


def test_repair_examples():
    zf = zero_fill(identity_pairs(2))
    assert zf.n_free == 4
    E = repair_free_parameters(zf)
    assert np.allclose(E.M, np.eye(4), atol=1e-9)

    zf = zero_fill(identity_pairs(3))
    assert zf.translation_free
    E = repair_free_parameters(zf)
    assert np.allclose(E.M, np.eye(4), atol=1e-9)

    assert repair_free_parameters(zero_fill(unot_pairs(2))) is not None
    assert repair_free_parameters(zero_fill(unot_pairs(3)), unital_only=True) is None
    assert repair_free_parameters(zero_fill(unot_pairs(4))) is None


def test_repair_with_translation_released():
    # u-NOT data on x, y, z admit a CP completion once t is free, but only
    # up to the output scale (3 - sqrt 3) / 2
    zf = zero_fill(unot_pairs(3))
    edge = (3 - np.sqrt(3)) / 2
    for scale, expect in ((edge - 1e-3, True), (edge + 1e-3, False)):
        ps = [TestPair(p.input, QubitState(scale * p.output.r)) for p in unot_pairs(3)]
        E = repair_free_parameters(zero_fill(ps))
        assert (E is not None) is expect
        if E is not None:
            assert is_completely_positive(E).is_cp
            for p in ps:
                assert np.allclose(apply(E, p.input).r, p.output.r, atol=1e-10)
    assert zf.translation_free


def _diag(E):
    return np.diag(E.M)


@pytest.mark.parametrize(
    "n, diag1, diag2, k2",
    [
        (0, [1, 0, 0, 0], [1, 0, 0, 0], 1.0),
        (1, [1, 0, 0, -1], [1, 0, 0, -1], 1.0),
        (2, [1, 1, -1, -1], [1, 0, -0.5, -0.5], 0.5),
        (3, [1, -1 / 3, -1 / 3, -1 / 3], [1, -1 / 3, -1 / 3, -1 / 3], 1 / 3),
        (4, [1, -1 / 3, -1 / 3, -1 / 3], [1, -1 / 3, -1 / 3, -1 / 3], 1 / 3),
    ],
)
def test_unot_strategies(n, diag1, diag2, k2):
    r1 = reconstruct(unot_pairs(n), strategy=1)
    r2 = reconstruct(unot_pairs(n), strategy=2)
    for r, d in ((r1, diag1), (r2, diag2)):
        assert r.cp_verdict.is_cp
        assert np.allclose(r.channel.M, np.diag(d), atol=1e-8)
    assert r2.k == pytest.approx(k2, abs=1e-9)
    if n >= 3:
        assert r1.strategy is Strategy.OUTPUT_NOISE
        assert r1.k == pytest.approx(1 / 3, abs=1e-8)


def test_unot_n2_strategy1_is_sigma_x():
    r = reconstruct(unot_pairs(2), strategy=1)
    assert np.allclose(r.channel.M, rotation_channel(np.diag([1.0, -1, -1])).M, atol=1e-9)
    assert any(note["kind"] == "two-state-compatibility" and note["compatible"] for note in r.notes)


@pytest.mark.parametrize("n, diag", [(0, [1, 0, 0, 0]), (1, [1, 0, 0, 1]), (2, [1] * 4), (3, [1] * 4), (4, [1] * 4)])
def test_identity_hierarchy(n, diag):
    r = reconstruct(identity_pairs(n), strategy=1)
    assert np.allclose(r.channel.M, np.diag(diag), atol=1e-9)
    assert r.k == 1.0


def test_unitary_identification(rng):
    for _ in range(50):
        R = random_rotation(rng)
        states = [QubitState(random_pure(rng)) for _ in range(3)]
        r = reconstruct(pairs_from(rotation_channel(R), states), strategy=1)
        assert np.allclose(r.channel.M, rotation_channel(R).M, atol=1e-8)


def test_strategies_agree_when_raw_is_cp(rng):
    checked = 0
    for _ in range(100):
        E = random_cp_channel(rng)
        n = int(rng.integers(0, 5))
        states = [QubitState(random_pure(rng) * rng.uniform(0.3, 1.0)) for _ in range(n)]
        pairs = pairs_from(E, states)
        try:
            raw = reconstruct_zero_fill(pairs)
        except InputError:
            continue
        if not is_completely_positive(raw).is_cp:
            continue
        r1, r2 = reconstruct(pairs, 1), reconstruct(pairs, 2)
        assert r1.k == r2.k == 1.0
        assert np.array_equal(r1.channel.M, r2.channel.M)
        checked += 1
    assert checked > 20


def test_frame_covariance(rng):
    for _ in range(100):
        R = random_rotation(rng)
        n = int(rng.integers(1, 5))
        pairs = [TestPair(random_pure(rng) * rng.uniform(0.3, 1), rng.uniform(-0.6, 0.6, 3)) for _ in range(n)]
        rotated = [TestPair(R @ p.input.r, R @ p.output.r) for p in pairs]
        try:
            a = reconstruct(pairs, strategy=2).channel
        except InputError:
            continue
        b = reconstruct(rotated, strategy=2).channel
        assert np.allclose(b.T, R @ a.T @ R.T, atol=1e-8)
        assert np.allclose(b.t, R @ a.t, atol=1e-8)


def test_strategy1_output_always_cp(rng):
    for _ in range(40):
        n = int(rng.integers(1, 5))
        pairs = [TestPair(random_pure(rng), rng.uniform(-1, 1, 3)) for _ in range(n)]
        try:
            r = reconstruct(pairs, strategy=1)
        except InputError:
            continue
        assert r.cp_verdict.is_cp and 0.0 <= r.k <= 1.0


def test_unphysical_output_is_noted():
    r = reconstruct([TestPair(RHO_Z, [0, 0, 1.5])], strategy=2)
    kinds = [n["kind"] for n in r.notes]
    assert "output-state-regularized" in kinds
    assert np.allclose(r.channel.M, np.diag([1.0, 0, 0, 1]))


def test_bad_strategy():
    with pytest.raises(InputError):
        reconstruct([], strategy=3)


# -------------------------------------------------------- two-state condition


def _trace_norm_distance(r1, c1, r2, c2):
    from qproc.bloch import PAULIS

    def op(r, c):
        return 0.5 * c * (PAULIS[0] + sum(x * p for x, p in zip(r, PAULIS[1:])))

    return 0.5 * np.sum(np.abs(np.linalg.eigvalsh(op(r1, c1) - op(r2, c2))))


def test_trace_distance_vs_eigenvalues(rng):
    for _ in range(500):
        r1, r2 = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        c1, c2 = rng.uniform(0, 3, 2)
        assert trace_distance(r1, c1, r2, c2) == pytest.approx(_trace_norm_distance(r1, c1, r2, c2), abs=1e-12)


def test_compatibility_examples():
    assert two_state_compatibility(*identity_pairs(2)) == (True, None)
    assert two_state_compatibility(*unot_pairs(2)) == (True, None)
    with pytest.raises(InputError):
        two_state_compatibility(*unot_pairs(2), t_samples=10)


def test_compatible_for_cp_channels(rng):
    for _ in range(1000):
        E = random_cp_channel(rng)
        s1 = QubitState(random_pure(rng) * rng.uniform(0, 1))
        s2 = QubitState(random_pure(rng) * rng.uniform(0, 1))
        ok, witness = two_state_compatibility(*pairs_from(E, [s1, s2]))
        assert ok and witness is None


def find_violating_pair(rng):
    """Random search for pure pairs whose trace distance grows under the map."""
    while True:
        a, b = random_pure(rng), random_pure(rng)
        a2, b2 = random_pure(rng), random_pure(rng)
        if _trace_norm_distance(a2, 1, b2, 1) > _trace_norm_distance(a, 1, b, 1) + 0.1:
            return TestPair(a, a2), TestPair(b, b2)


def test_incompatible_pair_has_witness(rng):
    for _ in range(50):
        p1, p2 = find_violating_pair(rng)
        ok, t = two_state_compatibility(p1, p2)
        assert not ok and t > 0
        before = _trace_norm_distance(p1.input.r, 1, p2.input.r, t)
        after = _trace_norm_distance(p1.output.r, 1, p2.output.r, t)
        assert after > before
