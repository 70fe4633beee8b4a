"""Hierarchical code construction, encoder and decoder unit tests."""

from __future__ import annotations

import numpy as np
import pytest

from hierpolar import (
    FadingTrace,
    MessageBundle,
    RandomBundle,
    ScenarioTag,
    SoftObservation,
    UnsupportedScenarioError,
    WiretapParams,
    bit_reversal_permutation,
    bob_decode,
    bsc,
    build_code,
    build_partition,
    bundle_shapes,
    designed_rate,
    encode,
    eve_genie_decode,
    reliability_profile,
    sample_fading,
    select_good_set,
    target_fractions,
    total_message_bits,
    total_random_bits,
)

SIM_A = WiretapParams(p1=0.02, p2=0.05, p1s=0.11, p2s=0.15, q1=0.5)
SIM_B = WiretapParams(p1=0.02, p2=0.11, p1s=0.05, p2s=0.15, q1=0.5)
IND_STRONG = WiretapParams(
    p1=0.02, p2=0.05, p1s=0.11, p2s=0.15, q1=0.5, q1s=0.4, coupling="independent"
)
IND_WEAK = WiretapParams(
    p1=0.02, p2=0.11, p1s=0.05, p2s=0.15, q1=0.6, q1s=0.4, coupling="independent"
)
ALL_SCENARIOS = (SIM_A, SIM_B, IND_STRONG, IND_WEAK)

N_CLASSES = (
    "block_random",
    "crossblock_secret",
    "perblock_message",
    "crossblock_message",
    "crossblock_random",
    "frozen",
)


def dense_generator(n: int) -> np.ndarray:
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.array([[1]], dtype=np.uint8)
    while g.shape[0] < n:
        g = np.kron(g, f)
    return g[bit_reversal_permutation(n)]


def noiseless_obs(frame) -> list[SoftObservation]:
    return [SoftObservation.certain(row) for row in frame.bits]


def test_partition_is_a_partition_for_every_scenario():
    for params in ALL_SCENARIOS:
        part = build_partition(params, 64, 16)
        pieces = [getattr(part, c) for c in N_CLASSES]
        merged = np.concatenate(pieces)
        assert merged.size == 64
        assert np.array_equal(np.sort(merged), np.arange(64))
        for arr in pieces:
            assert np.array_equal(arr, np.sort(arr))
        for bec_set in (part.bec_info_main, part.bec_info_eve):
            assert bec_set.size == 0 or (0 <= bec_set[0] and bec_set[-1] < 16)
        sizes = part.sizes()
        assert sum(sizes[c] for c in N_CLASSES) == 64


def test_partition_classes_follow_good_set_chain():
    # strong layout: cumulative unions reproduce the four nested good sets
    part = build_partition(SIM_A, 256, 32, delta=0.25)
    t = 0.25 / (2 * 256)
    good = {
        p: set(select_good_set(reliability_profile(bsc(p), 256), t).tolist())
        for p in (0.02, 0.05, 0.11, 0.15)
    }
    acc = set(part.block_random.tolist())
    assert acc == good[0.15]
    acc |= set(part.crossblock_secret.tolist())
    assert acc == good[0.11]
    acc |= set(part.perblock_message.tolist())
    assert acc == good[0.05]
    acc |= set(part.crossblock_message.tolist())
    assert acc == good[0.02]
    assert part.crossblock_random.size == 0


def test_partition_weak_layout_has_no_per_block_class():
    for params in (SIM_B, IND_WEAK):
        part = build_partition(params, 64, 16)
        assert part.perblock_message.size == 0


def test_partition_collapses_when_states_coincide():
    # p1 == p2 leaves no cross-block message freedom
    flat_main = WiretapParams(p1=0.05, p2=0.05, p1s=0.11, p2s=0.15, q1=0.5)
    assert build_partition(flat_main, 64, 16).crossblock_message.size == 0
    # p1s == p2s leaves no cross-block secret rows
    flat_eve = WiretapParams(p1=0.02, p2=0.05, p1s=0.15, p2s=0.15, q1=0.5)
    assert build_partition(flat_eve, 64, 16).crossblock_secret.size == 0


def test_partition_validation():
    with pytest.raises(ValueError):
        build_partition(SIM_A, 64, 16, delta=0.0)
    with pytest.raises(ValueError):
        build_partition(SIM_A, 64, 16, delta=1.0)
    with pytest.raises(ValueError):
        build_partition(SIM_A, 63, 16)
    with pytest.raises(ValueError):
        build_partition(SIM_A, 64, 16, construction="dense-evolution")
    unsupported = WiretapParams(
        p1=0.02, p2=0.2, p1s=0.1, p2s=0.3, q1=0.3, q1s=0.6, coupling="independent"
    )
    with pytest.raises(UnsupportedScenarioError):
        build_partition(unsupported, 64, 16)


def test_code_selects_secret_info_set_by_coupling():
    sim = build_code(SIM_B, 64, 16)
    assert np.array_equal(sim.secret_info, sim.partition.bec_info_main)
    assert sim.weak_extra_positions.size == 0
    ind = build_code(IND_WEAK, 64, 16)
    assert np.array_equal(ind.secret_info, ind.partition.bec_info_eve)
    extra = set(ind.partition.bec_info_main) - set(ind.partition.bec_info_eve)
    assert set(ind.weak_extra_positions.tolist()) == extra
    # eavesdropper info set nests inside the main one for the weak ordering
    assert set(ind.partition.bec_info_eve) <= set(ind.partition.bec_info_main)


def test_genie_mc_construction_keeps_nesting():
    rng = np.random.default_rng(61)
    part = build_partition(SIM_A, 64, 16, construction="genie-mc", construction_trials=512, rng=rng)
    pieces = [getattr(part, c) for c in N_CLASSES]
    assert np.array_equal(np.sort(np.concatenate(pieces)), np.arange(64))


def test_bundle_flat_roundtrip_and_counts():
    rng = np.random.default_rng(67)
    for params in ALL_SCENARIOS:
        code = build_code(params, 64, 16)
        msg = MessageBundle.random(code, rng)
        rnd = RandomBundle.random(code, rng)
        assert msg.total_bits() == total_message_bits(code)
        assert rnd.total_bits() == total_random_bits(code)
        assert MessageBundle.from_flat(code, msg.to_flat()).same_bits(msg)
        assert RandomBundle.from_flat(code, rnd.to_flat()).same_bits(rnd)
        msg_shapes, rnd_shapes = bundle_shapes(code)
        assert list(msg_shapes) == list(MessageBundle._fields)
        assert list(rnd_shapes) == list(RandomBundle._fields)


def test_designed_rate_is_message_bits_per_use():
    for params in ALL_SCENARIOS:
        code = build_code(params, 256, 32)
        assert designed_rate(code) == total_message_bits(code) / (256 * 32)


def test_designed_rate_zero_without_message_classes():
    flat = WiretapParams(p1=0.11, p2=0.11, p1s=0.11, p2s=0.11, q1=0.5)
    code = build_code(flat, 64, 16)
    assert total_message_bits(code) == 0
    assert designed_rate(code) == 0.0


def test_encode_zero_in_zero_out():
    for params in ALL_SCENARIOS:
        code = build_code(params, 64, 16)
        frame = encode(code, MessageBundle.zeros(code), RandomBundle.zeros(code))
        assert frame.bits.shape == (16, 64)
        assert not frame.bits.any()


def test_encode_rejects_wrong_shapes():
    code = build_code(SIM_A, 64, 16)
    other = build_code(SIM_A, 64, 32)
    rng = np.random.default_rng(71)
    with pytest.raises(ValueError):
        encode(code, MessageBundle.random(other, rng), RandomBundle.zeros(code))


def dense_two_phase(code, msg: MessageBundle, rnd: RandomBundle) -> np.ndarray:
    # independent encoder oracle: explicit generator matrices, no butterflies
    P = code.partition
    g_rows = dense_generator(code.b)
    g_block = dense_generator(code.n)

    def row_encode(width: int, fill: dict) -> np.ndarray:
        u = np.zeros((width, code.b), dtype=np.uint8)
        if width == 0:
            return u
        for cols, bits in fill.items():
            if cols:
                u[:, list(cols)] = bits
        return (u @ g_rows) % 2

    secret = row_encode(
        P.crossblock_secret.size,
        {
            tuple(code.secret_info): rnd.crossblock_secret,
            tuple(code.secret_msg_positions): msg.crossblock_secret,
        },
    )
    message = row_encode(
        P.crossblock_message.size, {tuple(P.bec_info_main): msg.crossblock_message}
    )
    if code.scenario is ScenarioTag.IND_WEAK:
        random_rows = row_encode(
            P.crossblock_random.size,
            {
                tuple(P.bec_info_eve): rnd.crossblock_random,
                tuple(code.weak_extra_positions): msg.crossblock_random_extra,
            },
        )
    else:
        random_rows = row_encode(
            P.crossblock_random.size, {tuple(P.bec_info_main): rnd.crossblock_random}
        )

    pre = np.zeros((code.b, code.n), dtype=np.uint8)
    pre[:, P.block_random] = rnd.block_random
    pre[:, P.crossblock_secret] = secret.T
    pre[:, P.perblock_message] = msg.per_block
    pre[:, P.crossblock_message] = message.T
    pre[:, P.crossblock_random] = random_rows.T
    return (pre @ g_block) % 2


def test_encoder_matches_dense_two_phase_oracle():
    rng = np.random.default_rng(73)
    for params in ALL_SCENARIOS:
        code = build_code(params, 64, 16)
        for _ in range(5):
            msg = MessageBundle.random(code, rng)
            rnd = RandomBundle.random(code, rng)
            assert np.array_equal(encode(code, msg, rnd).bits, dense_two_phase(code, msg, rnd))


def roundtrip_once(code, rng: np.random.Generator) -> None:
    msg = MessageBundle.random(code, rng)
    rnd = RandomBundle.random(code, rng)
    frame = encode(code, msg, rnd)
    trace = sample_fading(code.params, code.b, rng)
    obs = noiseless_obs(frame)
    msg_hat, rnd_hat, status = bob_decode(code, obs, trace)
    assert status.ok
    assert msg_hat.same_bits(msg)
    assert rnd_hat.same_bits(rnd)
    rnd_eve, eve_status = eve_genie_decode(code, obs, trace, msg)
    assert eve_status.ok
    assert rnd_eve.same_bits(rnd)


def test_noiseless_roundtrip_all_scenarios_small():
    rng = np.random.default_rng(79)
    for params in ALL_SCENARIOS:
        code = build_code(params, 64, 16)
        for _ in range(25):
            roundtrip_once(code, rng)


def test_all_superior_trace_recovers_without_erasure_decoding():
    rng = np.random.default_rng(83)
    code = build_code(SIM_A, 64, 16)
    msg = MessageBundle.random(code, rng)
    rnd = RandomBundle.random(code, rng)
    frame = encode(code, msg, rnd)
    trace = FadingTrace(np.ones(16, dtype=bool), np.ones(16, dtype=bool))
    msg_hat, rnd_hat, status = bob_decode(code, noiseless_obs(frame), trace)
    assert status.ok and msg_hat.same_bits(msg) and rnd_hat.same_bits(rnd)


def test_all_degraded_trace_reports_frame_failure():
    # every cross-block row arrives fully erased; with information on the
    # rows this must surface as a phase-2 failure, not silent corruption
    rng = np.random.default_rng(89)
    code = build_code(SIM_A, 256, 32)
    assert code.partition.crossblock_message.size > 0
    assert code.partition.bec_info_main.size > 0
    msg = MessageBundle.random(code, rng)
    rnd = RandomBundle.random(code, rng)
    frame = encode(code, msg, rnd)
    trace = FadingTrace(np.zeros(32, dtype=bool), np.zeros(32, dtype=bool))
    _, _, status = bob_decode(code, noiseless_obs(frame), trace)
    assert not status.ok
    assert status.failed_phase == "phase2"


def test_eve_empty_randomness_degenerate():
    params = WiretapParams(p1=0.1, p2=0.1, p1s=0.5, p2s=0.5, q1=0.5)
    code = build_code(params, 64, 16)
    rng = np.random.default_rng(97)
    msg = MessageBundle.random(code, rng)
    rnd = RandomBundle.random(code, rng)
    assert rnd.total_bits() == 0
    frame = encode(code, msg, rnd)
    trace = sample_fading(params, 16, rng)
    rnd_hat, status = eve_genie_decode(code, noiseless_obs(frame), trace, msg)
    assert status.ok
    assert rnd_hat.total_bits() == 0


def test_decode_input_validation():
    code = build_code(SIM_A, 64, 16)
    rng = np.random.default_rng(101)
    frame = encode(code, MessageBundle.zeros(code), RandomBundle.zeros(code))
    short_trace = FadingTrace(np.ones(8, dtype=bool), np.ones(8, dtype=bool))
    with pytest.raises(ValueError):
        bob_decode(code, noiseless_obs(frame), short_trace)
    trace = sample_fading(SIM_A, 16, rng)
    with pytest.raises(ValueError):
        bob_decode(code, noiseless_obs(frame)[:-1], trace)


def test_target_fractions_sum_to_one_over_block_classes():
    for params in ALL_SCENARIOS:
        tgt = target_fractions(params)
        assert sum(tgt[c] for c in N_CLASSES) == pytest.approx(1.0, abs=1e-12)
        assert tgt["bec_info_main"] == params.q1
        assert tgt["bec_info_eve"] == params.q1s
        assert all(v >= -1e-15 for v in tgt.values())
    unsupported = WiretapParams(
        p1=0.02, p2=0.2, p1s=0.1, p2s=0.3, q1=0.3, q1s=0.6, coupling="independent"
    )
    with pytest.raises(UnsupportedScenarioError):
        target_fractions(unsupported)
