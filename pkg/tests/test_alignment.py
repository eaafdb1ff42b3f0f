"""Tests for GCC-PHAT lag estimation and the framewise fine-lag vote."""

import numpy as np
import pytest

from livevox import (
    InputFormatError,
    MonoSignal,
    coarse_align,
    framewise_fine_lag,
    gcc_phat,
    gcc_phat_naive,
    scale,
    shift,
)
from livevox.alignment import (
    LagEstimate,
    _peak_lag,
    frame_length_and_hop,
    frame_view,
)


def noise(n, seed=0, rate=8000, amp=0.3):
    rng = np.random.default_rng(seed)
    return MonoSignal(samples=rng.standard_normal(n) * amp, sample_rate=rate)


def brute_force_lag(x, y, max_lag):
    """Time-domain argmax of normalized cross-correlation, an oracle that
    shares no code with the transform-based implementations."""
    best = None
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            a, b = x.samples[lag:], y.samples
        else:
            a, b = x.samples, y.samples[-lag:]
        m = min(a.size, b.size)
        if m == 0:
            continue
        a, b = a[:m], b[:m]
        denom = np.linalg.norm(a) * np.linalg.norm(b)
        if denom == 0:
            continue
        value = float(np.dot(a, b) / denom)
        if best is None or value > best[0]:
            best = (value, lag)
    return best[1]


# ---------------------------------------------------------------------------
# gcc_phat


def test_self_alignment_is_zero():
    s = noise(2048, seed=1)
    est = gcc_phat(s, s, 1000)
    assert est.lag == 0
    assert est.max_lag == 1000


def test_recovers_known_positive_shift():
    s = noise(4000, seed=2)
    est = gcc_phat(shift(s, 441), s, 2000)
    assert est.lag == 441


def test_recovers_known_negative_shift():
    s = noise(4000, seed=3)
    est = gcc_phat(s, shift(s, 441), 2000)
    assert est.lag == -441


def test_agrees_with_time_domain_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(10):
        n = int(rng.integers(200, 600))
        d = int(rng.integers(-40, 41))
        base = MonoSignal(samples=rng.standard_normal(n) * 0.3, sample_rate=8000)
        if d >= 0:
            x, y = shift(base, d), base
        else:
            x, y = base, shift(base, -d)
        est = gcc_phat(x, y, 64)
        assert est.lag == d
        assert brute_force_lag(x, y, 64) == d


def test_amplitude_invariance():
    s = noise(2048, seed=5)
    x = shift(s, 100)
    reference = gcc_phat(x, s, 256).lag
    for a, b in [(0.01, 7.0), (100.0, 0.003), (2.5, 2.5)]:
        assert gcc_phat(scale(x, a), scale(s, b), 256).lag == reference


def test_antisymmetry():
    rng = np.random.default_rng(6)
    for seed in range(5):
        s = noise(1500, seed=seed + 10)
        d = int(rng.integers(1, 80))
        x = shift(s, d)
        assert gcc_phat(x, s, 128).lag == -gcc_phat(s, x, 128).lag == d


def test_exact_recovery_across_delay_range():
    s = noise(3000, seed=7)
    for d in (0, 1, 7, 250, 1023):
        assert gcc_phat(shift(s, d), s, 1024).lag == d


def test_silent_inputs_give_zero_lag_zero_peak():
    # every whitened bin falls below the epsilon floor, the correlation
    # is identically zero, and the tie-break picks lag 0
    z = MonoSignal(samples=np.zeros(512), sample_rate=8000)
    est = gcc_phat(z, z, 100)
    assert est.lag == 0
    assert est.peak_value == 0.0
    est_naive = gcc_phat_naive(z, z, 20)
    assert est_naive.lag == 0
    assert est_naive.peak_value == 0.0


def test_peak_tiebreak_smallest_magnitude_then_negative():
    lags = np.arange(-3, 4)
    values = np.array([0.5, 0.9, 0.2, 0.1, 0.2, 0.9, 0.5])
    assert _peak_lag(values, lags) == (-2, 0.9)  # |-2| = |+2|, negative wins
    values2 = np.array([0.1, 0.9, 0.2, 0.9, 0.2, 0.9, 0.1])
    assert _peak_lag(values2, lags) == (0, 0.9)  # 0 beats both 2s
    values3 = np.array([0.1, 0.2, 0.3, 0.8, 0.3, 0.2, 0.1])
    assert _peak_lag(values3, lags) == (0, 0.8)


def test_rejects_empty_input():
    z = MonoSignal(samples=np.zeros(0), sample_rate=8000)
    s = noise(64, seed=8)
    with pytest.raises(ValueError, match="non-empty"):
        gcc_phat(z, s, 10)


def test_rejects_bad_max_lag():
    s = noise(64, seed=9)
    for bad in (0, -5, 1 << 20):
        with pytest.raises(ValueError, match="max_lag"):
            gcc_phat(s, s, bad)


def test_rejects_rate_mismatch():
    a = noise(64, seed=10, rate=8000)
    b = noise(64, seed=11, rate=16000)
    with pytest.raises(InputFormatError, match="sample-rate"):
        gcc_phat(a, b, 10)


def test_lag_estimate_validates_bounds():
    with pytest.raises(ValueError):
        LagEstimate(lag=50, peak_value=1.0, max_lag=10)
    with pytest.raises(ValueError):
        LagEstimate(lag=0, peak_value=float("nan"), max_lag=10)


# ---------------------------------------------------------------------------
# gcc_phat_naive (the oracle itself, sanity-checked on hand-sized cases)


def test_naive_self_alignment():
    s = noise(64, seed=12)
    assert gcc_phat_naive(s, s, 10).lag == 0


def test_naive_hand_checkable_shift():
    s = noise(16, seed=13)
    assert gcc_phat_naive(shift(s, 3), s, 10).lag == 3


def test_naive_agrees_with_fft_path():
    rng = np.random.default_rng(14)
    for _ in range(40):
        n = int(rng.integers(16, 400))
        max_lag = int(rng.integers(1, min(n, 96)))
        x = MonoSignal(samples=rng.standard_normal(n) * 0.4, sample_rate=8000)
        y = MonoSignal(
            samples=rng.standard_normal(int(rng.integers(16, 400))) * 0.4,
            sample_rate=8000,
        )
        fast = gcc_phat(x, y, max_lag)
        slow = gcc_phat_naive(x, y, max_lag)
        assert fast.lag == slow.lag
        assert fast.peak_value == pytest.approx(slow.peak_value, abs=1e-9)


def test_naive_agrees_on_correlated_pairs():
    rng = np.random.default_rng(15)
    for _ in range(20):
        n = int(rng.integers(64, 512))
        d = int(rng.integers(-30, 31))
        base = MonoSignal(samples=rng.standard_normal(n) * 0.4, sample_rate=8000)
        x, y = (shift(base, d), base) if d >= 0 else (base, shift(base, -d))
        fast = gcc_phat(x, y, 32)
        slow = gcc_phat_naive(x, y, 32)
        assert fast.lag == slow.lag == d
        assert fast.peak_value == pytest.approx(slow.peak_value, abs=1e-9)


def test_naive_refuses_large_transforms():
    s = noise(40000, seed=16)
    with pytest.raises(ValueError, match="too large"):
        gcc_phat_naive(s, s, 10)


# ---------------------------------------------------------------------------
# coarse_align


def test_coarse_align_identical_inputs():
    s = noise(8000, seed=17)
    assert coarse_align(s, s, 0.5).lag == 0


def test_coarse_align_recovers_playback_delay():
    acc = noise(3 * 8000, seed=18)
    live = shift(acc, 1600)  # studio material arrives 0.2 s late in the live feed
    est = coarse_align(live, acc, 0.5)
    assert est.lag == 1600


def test_coarse_align_default_bound_is_20_seconds():
    s = noise(4000, seed=19, rate=100)
    est = coarse_align(shift(s, 30), s)
    assert est.lag == 30


def test_coarse_align_clamps_bound_for_short_inputs():
    # a 1 s clip cannot host a 20 s lag; the bound shrinks to what the
    # correlation can represent instead of erroring out
    s = noise(8000, seed=20)
    est = coarse_align(s, s, 20.0)
    assert est.lag == 0
    assert est.max_lag < 8000 * 20


# ---------------------------------------------------------------------------
# framing helpers


def test_frame_defaults_at_44100():
    assert frame_length_and_hop(44100, 1.0, 0.5) == (44100, 22050)


def test_frame_validation():
    with pytest.raises(ValueError):
        frame_length_and_hop(8000, 0.0, 0.5)
    with pytest.raises(ValueError):
        frame_length_and_hop(8000, 1.0, 1.5)
    with pytest.raises(ValueError):
        frame_length_and_hop(8000, 1.0, 0.0)


def test_frame_view_discards_partial_tail():
    x = np.arange(10, dtype=np.float64)
    frames = frame_view(x, 4, 2)
    assert frames.shape == (4, 4)
    assert np.array_equal(frames[0], [0, 1, 2, 3])
    assert np.array_equal(frames[3], [6, 7, 8, 9])


def test_frame_view_too_short_input_gives_no_frames():
    assert frame_view(np.zeros(3), 4, 2).shape == (0, 4)


# ---------------------------------------------------------------------------
# framewise_fine_lag


def _fine_pair(n, d, seed, rate=1000):
    """live and rec of equal length n where rec lags live by d samples."""
    rng = np.random.default_rng(seed)
    base = rng.standard_normal(n + abs(d)) * 0.3
    live = base[d: d + n] if d >= 0 else base[: n]
    rec = base[: n] if d >= 0 else base[-d: -d + n]
    return (
        MonoSignal(samples=live, sample_rate=rate),
        MonoSignal(samples=rec, sample_rate=rate),
    )


def test_fine_lag_aligned_stems_vote_zero():
    live, rec = _fine_pair(4000, 0, seed=21)
    lag, votes = framewise_fine_lag(live, rec, 0.256, 0.128, 0.05)
    assert lag == 0
    assert votes
    assert all(v.included and v.lag == 0 for v in votes)


def test_fine_lag_recovers_global_offset():
    # rec runs 50 samples behind live; the corrective shift is -50
    live, rec = _fine_pair(4000, 50, seed=22)
    lag, votes = framewise_fine_lag(live, rec, 0.256, 0.128, 0.1)
    assert lag == -50
    included = [v for v in votes if v.included]
    assert included
    assert all(v.lag == -50 for v in included)


def test_fine_lag_matches_per_frame_oracle():
    live, rec = _fine_pair(1024, 7, seed=23)
    _, votes = framewise_fine_lag(live, rec, 0.256, 0.256, 0.02)
    frame_len = 256
    for v in votes:
        if not v.included:
            continue
        a = MonoSignal(
            samples=live.samples[v.frame_index * frame_len:(v.frame_index + 1) * frame_len],
            sample_rate=1000,
        )
        b = MonoSignal(
            samples=rec.samples[v.frame_index * frame_len:(v.frame_index + 1) * frame_len],
            sample_rate=1000,
        )
        assert gcc_phat_naive(a, b, 20).lag == v.lag


def test_fine_lag_silence_gate_excludes_quiet_frames():
    live, rec = _fine_pair(4000, 0, seed=24)
    # silence the second half of both signals
    muted_live = np.array(live.samples)
    muted_rec = np.array(rec.samples)
    muted_live[2000:] = 0.0
    muted_rec[2000:] = 0.0
    lag, votes = framewise_fine_lag(
        MonoSignal(samples=muted_live, sample_rate=1000),
        MonoSignal(samples=muted_rec, sample_rate=1000),
        0.25, 0.25, 0.05,
    )
    assert lag == 0
    flags = [v.included for v in votes]
    assert flags[0] and flags[1]
    assert not flags[-1]


def test_fine_lag_one_sided_silence_also_excluded():
    live, rec = _fine_pair(2000, 0, seed=25)
    muted_rec = np.array(rec.samples)
    muted_rec[:500] = 0.0  # first frame only, and only on the rec side
    _, votes = framewise_fine_lag(
        live,
        MonoSignal(samples=muted_rec, sample_rate=1000),
        0.5, 0.5, 0.1,
    )
    assert not votes[0].included
    assert votes[1].included


def test_fine_lag_invariant_to_trailing_silence():
    live, rec = _fine_pair(3000, 12, seed=26)
    lag_plain, _ = framewise_fine_lag(live, rec, 0.25, 0.125, 0.05)
    live_padded = MonoSignal(
        samples=np.concatenate([live.samples, np.zeros(1500)]), sample_rate=1000
    )
    rec_padded = MonoSignal(
        samples=np.concatenate([rec.samples, np.zeros(1500)]), sample_rate=1000
    )
    lag_padded, _ = framewise_fine_lag(live_padded, rec_padded, 0.25, 0.125, 0.05)
    assert lag_plain == lag_padded == -12


def test_fine_lag_no_usable_frames_returns_zero():
    quiet = MonoSignal(samples=np.full(2000, 1e-5), sample_rate=1000)
    lag, votes = framewise_fine_lag(quiet, quiet, 0.5, 0.5, 0.1, -60.0)
    assert lag == 0
    assert votes and not any(v.included for v in votes)


def test_fine_lag_rejects_mismatched_inputs():
    a = noise(2000, seed=27, rate=1000)
    b = noise(1999, seed=28, rate=1000)
    with pytest.raises(InputFormatError, match="length"):
        framewise_fine_lag(a, b, 0.5, 0.5, 0.1)
    c = noise(2000, seed=29, rate=2000)
    with pytest.raises(InputFormatError, match="sample-rate"):
        framewise_fine_lag(a, c, 0.5, 0.5, 0.1)


def test_fine_lag_mode_breaks_ties_toward_small_magnitude():
    # two frames vote +30, two vote -30: dead heat, negative wins;
    # build it by gluing two offset segments together
    rng = np.random.default_rng(30)
    seg_a = rng.standard_normal(1030) * 0.3
    seg_b = rng.standard_normal(1030) * 0.3
    live = np.concatenate([seg_a[30:1030], seg_b[0:1000]])
    rec = np.concatenate([seg_a[0:1000], seg_b[30:1030]])
    lag, votes = framewise_fine_lag(
        MonoSignal(samples=live, sample_rate=1000),
        MonoSignal(samples=rec, sample_rate=1000),
        0.5, 0.5, 0.06,
    )
    included = [v.lag for v in votes if v.included]
    assert sorted(included) == [-30, -30, 30, 30]
    assert lag == -30
