"""Transform, reliability profile and successive-cancellation unit tests."""

from __future__ import annotations

import numpy as np
import pytest

from hierpolar import (
    DecodeFailure,
    PolarCodeSpec,
    ReliabilityProfile,
    SoftObservation,
    bec,
    bit_reversal_permutation,
    bsc,
    polar_transform,
    polar_transform_inverse,
    reliability_profile,
    sc_decode,
    sc_decode_batch,
    select_good_set,
)


def dense_generator(n: int) -> np.ndarray:
    # independent oracle: B_n F^k as an explicit matrix over GF(2)
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.array([[1]], dtype=np.uint8)
    while g.shape[0] < n:
        g = np.kron(g, f)
    return g[bit_reversal_permutation(n)]


def test_bit_reversal_small_tables():
    assert bit_reversal_permutation(1).tolist() == [0]
    assert bit_reversal_permutation(2).tolist() == [0, 1]
    assert bit_reversal_permutation(4).tolist() == [0, 2, 1, 3]
    assert bit_reversal_permutation(8).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


def test_bit_reversal_is_an_involution_permutation():
    for k in range(11):
        perm = bit_reversal_permutation(1 << k)
        assert sorted(perm.tolist()) == list(range(1 << k))
        assert np.array_equal(perm[perm], np.arange(1 << k))


def test_bit_reversal_rejects_bad_lengths():
    for n in (0, 3, 5, 6, -4):
        with pytest.raises(ValueError):
            bit_reversal_permutation(n)


def test_transform_kernel_cases():
    assert polar_transform([1, 0]).tolist() == [1, 0]
    assert polar_transform([1, 1]).tolist() == [0, 1]
    assert polar_transform([0, 1, 0, 0]).tolist() == [1, 0, 1, 0]


def test_transform_zero_input_stays_zero():
    for k in range(8):
        n = 1 << k
        assert not polar_transform(np.zeros(n, dtype=np.uint8)).any()


def test_transform_rejects_bad_lengths_and_values():
    with pytest.raises(ValueError):
        polar_transform([0, 1, 1])
    with pytest.raises(ValueError):
        polar_transform([0, 2])


def test_inverse_examples():
    assert polar_transform_inverse([1, 0]).tolist() == [1, 0]
    assert polar_transform_inverse([1, 0, 1, 0]).tolist() == [0, 1, 0, 0]


def test_transform_is_an_involution():
    rng = np.random.default_rng(7)
    for k in range(1, 13):
        n = 1 << k
        u = rng.integers(0, 2, size=(40, n), dtype=np.uint8)
        assert np.array_equal(polar_transform_inverse(polar_transform(u)), u)


def test_involution_on_many_length_256_vectors():
    rng = np.random.default_rng(11)
    u = rng.integers(0, 2, size=(1000, 256), dtype=np.uint8)
    assert np.array_equal(polar_transform_inverse(polar_transform(u)), u)


def test_transform_matches_dense_matrix_up_to_64():
    rng = np.random.default_rng(3)
    for n in (2, 4, 8, 16, 32, 64):
        g = dense_generator(n)
        u = rng.integers(0, 2, size=(64, n), dtype=np.uint8)
        assert np.array_equal(polar_transform(u), (u @ g) % 2)


def test_transform_linearity():
    rng = np.random.default_rng(5)
    for _ in range(50):
        u = rng.integers(0, 2, size=128, dtype=np.uint8)
        v = rng.integers(0, 2, size=128, dtype=np.uint8)
        assert np.array_equal(polar_transform(u ^ v), polar_transform(u) ^ polar_transform(v))


def test_bec_profile_exact_small():
    assert reliability_profile(bec(0.5), 2, "exact-bec").z.tolist() == [0.75, 0.25]
    assert reliability_profile(bec(0.5), 4, "exact-bec").z.tolist() == [
        0.9375,
        0.5625,
        0.4375,
        0.0625,
    ]


def test_bec_profile_values_sum_is_preserved():
    # each recursion step conserves the total: (2z - z^2) + z^2 = 2z
    for q in (0.1, 0.3, 0.625):
        z = reliability_profile(bec(q), 256, "exact-bec").z
        assert z.sum() == pytest.approx(256 * q, rel=1e-12)


def test_bound_profile_fixed_points():
    assert not reliability_profile(bsc(0.0), 64).z.any()
    assert (reliability_profile(bsc(0.5), 64).z == 1.0).all()


def test_bound_profile_starts_from_bhattacharyya():
    p = 0.11
    z0 = 2.0 * np.sqrt(p * (1 - p))
    z = reliability_profile(bsc(p), 2).z
    assert z[0] == pytest.approx(2 * z0 - z0 * z0, abs=1e-15)
    assert z[1] == pytest.approx(z0 * z0, abs=1e-15)


def test_bound_profile_on_erasure_law_is_exact():
    a = reliability_profile(bec(0.3), 128, "bhattacharyya-bound").z
    b = reliability_profile(bec(0.3), 128, "exact-bec").z
    assert np.array_equal(a, b)


def test_exact_bec_rejects_flip_law():
    with pytest.raises(ValueError):
        reliability_profile(bsc(0.1), 8, "exact-bec")


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        reliability_profile(bsc(0.1), 8, "monte-zirconia")


def test_profile_validation():
    with pytest.raises(ValueError):
        ReliabilityProfile(n=4, z=np.array([0.1, 0.2, 0.3]), method="exact-bec", law=bec(0.5))
    with pytest.raises(ValueError):
        ReliabilityProfile(n=2, z=np.array([0.1, 1.2]), method="exact-bec", law=bec(0.5))


def test_select_good_set_small_bec():
    prof = reliability_profile(bec(0.5), 4, "exact-bec")
    assert select_good_set(prof, 0.5).tolist() == [2, 3]
    assert select_good_set(prof, 1.0).tolist() == [0, 1, 2, 3]
    assert select_good_set(prof, 0.01).tolist() == []
    with pytest.raises(ValueError):
        select_good_set(prof, 0.0)
    with pytest.raises(ValueError):
        select_good_set(prof, 1.5)


def test_bound_profile_nesting_under_degradation():
    # smaller z0 dominates index by index, so good sets nest
    rng = np.random.default_rng(23)
    for _ in range(25):
        p_lo = rng.uniform(0.01, 0.2)
        p_hi = rng.uniform(p_lo, 0.45)
        z_lo = reliability_profile(bsc(p_lo), 256).z
        z_hi = reliability_profile(bsc(p_hi), 256).z
        assert (z_lo <= z_hi + 1e-15).all()
        for t in (1e-2, 1e-4, 1e-8):
            good_hi = set(select_good_set(reliability_profile(bsc(p_hi), 256), t).tolist())
            good_lo = set(select_good_set(reliability_profile(bsc(p_lo), 256), t).tolist())
            assert good_hi <= good_lo


def test_genie_profile_matches_exact_bec_at_n8():
    rng = np.random.default_rng(17)
    trials = 20_000
    exact = reliability_profile(bec(0.4), 8, "exact-bec").z
    est = reliability_profile(bec(0.4), 8, "genie-mc", trials=trials, rng=rng).z
    se = np.sqrt(exact * (1 - exact) / trials)
    assert (np.abs(est - exact) <= 4 * se + 1e-12).all()


def test_genie_profile_on_noiseless_law_is_zero():
    rng = np.random.default_rng(29)
    z = reliability_profile(bsc(0.0), 16, "genie-mc", trials=200, rng=rng).z
    assert not z.any()


def test_genie_profile_rejects_bad_trials():
    with pytest.raises(ValueError):
        reliability_profile(bsc(0.1), 8, "genie-mc", trials=0)


def noiseless_roundtrip(n: int, rng: np.random.Generator) -> None:
    k = int(rng.integers(0, n + 1))
    unfrozen = np.sort(rng.choice(n, size=k, replace=False))
    frozen = sorted(set(range(n)) - set(unfrozen.tolist()))
    frozen_values = {int(i): int(rng.integers(0, 2)) for i in frozen}
    spec = PolarCodeSpec(n=n, unfrozen=unfrozen, frozen_values=frozen_values)
    u = spec.frozen_vector()
    u[unfrozen] = rng.integers(0, 2, size=k, dtype=np.uint8)
    obs = SoftObservation.certain(polar_transform(u))
    assert np.array_equal(sc_decode(obs, spec, bsc(0.0)), u)


def test_sc_noiseless_roundtrip_many_specs():
    rng = np.random.default_rng(41)
    for n in (2, 8, 64, 256):
        for _ in range(20):
            noiseless_roundtrip(n, rng)


def test_sc_all_frozen_returns_frozen_values():
    rng = np.random.default_rng(43)
    n = 16
    llr = rng.normal(size=n)
    spec = PolarCodeSpec(n=n, unfrozen=np.array([], dtype=np.int64))
    out = sc_decode(SoftObservation(llr=llr), spec, bsc(0.2))
    assert not out.any()
    vals = {i: int(rng.integers(0, 2)) for i in range(n)}
    spec2 = PolarCodeSpec(n=n, unfrozen=np.array([], dtype=np.int64), frozen_values=vals)
    out2 = sc_decode(SoftObservation(llr=llr), spec2, bsc(0.2))
    assert out2.tolist() == [vals[i] for i in range(n)]


def test_sc_tie_decodes_to_one_under_flip_law():
    spec = PolarCodeSpec(n=2, unfrozen=np.array([0, 1]))
    out = sc_decode(SoftObservation(llr=np.zeros(2)), spec, bsc(0.5))
    assert out.tolist() == [1, 1]


def test_sc_erasure_ambiguity_raises():
    spec = PolarCodeSpec(n=4, unfrozen=np.array([2, 3]))
    obs = SoftObservation.with_erasures([0, 0, 0, 0], [True, True, True, True])
    with pytest.raises(DecodeFailure):
        sc_decode(obs, spec, bec(0.5))


def test_sc_single_info_bit_bec_with_three_erasures():
    # one unfrozen position; the only surviving observation pins it
    rng = np.random.default_rng(47)
    spec = PolarCodeSpec(n=4, unfrozen=np.array([3]))
    erased = np.array([True, True, True, False])
    for _ in range(100):
        u = np.zeros(4, dtype=np.uint8)
        u[3] = rng.integers(0, 2)
        x = polar_transform(u)
        hat = sc_decode(SoftObservation.with_erasures(x, erased), spec, bec(0.75))
        assert np.array_equal(hat, u)
        assert polar_transform(hat)[3] == x[3]


def test_sc_length_mismatch_rejected():
    spec = PolarCodeSpec(n=4, unfrozen=np.array([3]))
    with pytest.raises(ValueError):
        sc_decode(SoftObservation(llr=np.zeros(8)), spec, bsc(0.1))


def test_sc_batch_agrees_with_single_block():
    rng = np.random.default_rng(53)
    n = 32
    unfrozen = np.sort(rng.choice(n, size=12, replace=False))
    frozen = sorted(set(range(n)) - set(unfrozen.tolist()))
    frozen_values = {int(i): int(rng.integers(0, 2)) for i in frozen}
    spec = PolarCodeSpec(n=n, unfrozen=unfrozen, frozen_values=frozen_values)
    llr = rng.normal(scale=3.0, size=(25, n))
    got, ambiguous = sc_decode_batch(llr, spec.frozen_mask(), spec.frozen_vector(), False)
    assert not ambiguous.any()
    for row in range(25):
        single = sc_decode(SoftObservation(llr=llr[row]), spec, bsc(0.2))
        assert np.array_equal(got[row], single)


def test_sc_batch_per_row_frozen_values():
    rng = np.random.default_rng(59)
    n = 8
    mask = np.ones(n, dtype=bool)
    vals = rng.integers(0, 2, size=(6, n), dtype=np.uint8)
    out, ambiguous = sc_decode_batch(np.zeros((6, n)), mask, vals, False)
    assert np.array_equal(out, vals)
    assert not ambiguous.any()


def test_sc_batch_flags_only_ambiguous_rows():
    # row 0 fully known, row 1 fully erased; only row 1 is ambiguous
    spec = PolarCodeSpec(n=4, unfrozen=np.array([3]))
    u = np.array([0, 0, 0, 1], dtype=np.uint8)
    x = polar_transform(u)
    llr = np.stack([(1.0 - 2.0 * x) * np.inf, np.zeros(4)])
    out, ambiguous = sc_decode_batch(llr, spec.frozen_mask(), spec.frozen_vector(), True)
    assert ambiguous.tolist() == [False, True]
    assert np.array_equal(out[0], u)


def test_soft_observation_constructors():
    obs = SoftObservation.certain([0, 1, 1, 0])
    assert obs.llr.tolist() == [np.inf, -np.inf, -np.inf, np.inf]
    assert not obs.erased.any()
    obs2 = SoftObservation.with_erasures([0, 1, 1, 0], [False, True, False, True])
    assert obs2.llr.tolist() == [np.inf, 0.0, -np.inf, 0.0]
    assert obs2.erased.tolist() == [False, True, False, True]
    with pytest.raises(ValueError):
        SoftObservation(llr=np.ones(4), erased=np.array([True, False, False, False]))


def test_code_spec_validation():
    with pytest.raises(ValueError):
        PolarCodeSpec(n=4, unfrozen=np.array([4]))
    with pytest.raises(ValueError):
        PolarCodeSpec(n=4, unfrozen=np.array([0]), frozen_values={1: 0, 2: 1})
    with pytest.raises(ValueError):
        PolarCodeSpec(n=4, unfrozen=np.array([0]), frozen_values={1: 0, 2: 1, 3: 2})
    spec = PolarCodeSpec(n=4, unfrozen=np.array([3, 1]))
    assert spec.unfrozen.tolist() == [1, 3]
    assert spec.frozen_mask().tolist() == [True, False, True, False]
