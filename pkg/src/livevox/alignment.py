"""Time-delay estimation between two recordings of the same material.

The workhorse is phase-transform cross-correlation (GCC-PHAT): the
cross-spectrum of the two signals is whitened to unit magnitude per bin,
so only phase survives, which sharpens the correlation peak to a near
delta and makes the estimate invariant to the amplitude of either input.
Transforms are zero-padded to the next power of two at or above
len(x) + len(y) - 1, so the correlation is linear, never circular --
wraparound would corrupt large-lag estimates.

Sign convention, used consistently across this package: a positive lag
from ``gcc_phat(x, y, ...)`` means x is delayed relative to y by that
many samples, so ``shift(y, +lag)`` aligns y to x. Ties are broken by
the smallest absolute lag, then negative before positive.

``gcc_phat_naive`` recomputes the identical quantity by direct-summation
DFT in O(N^2); it exists purely as an independent cross-check for the
FFT path and is only usable at test scale.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .audio import MonoSignal, seconds_to_samples
from .errors import InputFormatError

PHAT_EPSILON = 1e-12

# defaults shared with the gain-matching stage: 1.0 s frames, 0.5 s hop
DEFAULT_FRAME_SECONDS = 1.0
DEFAULT_HOP_SECONDS = 0.5
DEFAULT_FINE_MAX_SHIFT_SECONDS = 0.25
DEFAULT_COARSE_MAX_LAG_SECONDS = 20.0
DEFAULT_SILENCE_FLOOR_DBFS = -60.0

_NAIVE_MAX_TRANSFORM = 1 << 15  # direct summation beyond this is pointless


@dataclass(frozen=True)
class LagEstimate:
    """An estimated lag in samples, with the peak correlation value and
    the search bound that produced it."""

    lag: int
    peak_value: float
    max_lag: int

    def __post_init__(self):
        if abs(self.lag) > self.max_lag:
            raise ValueError(f"lag {self.lag} exceeds search bound {self.max_lag}")
        if not np.isfinite(self.peak_value):
            raise ValueError(f"peak value must be finite, got {self.peak_value!r}")


@dataclass(frozen=True)
class FrameLagVote:
    """One analysis frame's lag vote; excluded frames carry lag 0."""

    frame_index: int
    lag: int
    included: bool


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def _check_pair(x: MonoSignal, y: MonoSignal, max_lag: int) -> int:
    if x.sample_rate != y.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch: {x.sample_rate} vs {y.sample_rate}"
        )
    if len(x) == 0 or len(y) == 0:
        raise ValueError("gcc_phat requires non-empty signals")
    n = _next_pow2(len(x) + len(y) - 1)
    if not 0 < max_lag < n:
        raise ValueError(
            f"max_lag must be in (0, {n}) for these lengths, got {max_lag}"
        )
    return n


def gcc_phat(x: MonoSignal, y: MonoSignal, max_lag: int) -> LagEstimate:
    """Estimate the lag between x and y by phase-transform correlation.

    Computes the length-N transforms of both signals (N = next power of
    two at or above len(x)+len(y)-1), forms the cross-spectrum
    X * conj(Y), normalizes each bin to unit magnitude (bins whose
    magnitude falls below PHAT_EPSILON are zeroed instead of divided, so
    silent spectra cannot produce NaN), inverse-transforms, and returns
    the lag in [-max_lag, +max_lag] maximizing the real part.

    Positive lag: x is delayed relative to y; shift(y, +lag) aligns y
    to x.
    """
    n = _check_pair(x, y, max_lag)
    return _gcc_phat_arrays(x.samples, y.samples, max_lag, n)


def _gcc_phat_arrays(x: np.ndarray, y: np.ndarray, max_lag: int, n: int) -> LagEstimate:
    fx = np.fft.rfft(x, n)
    fy = np.fft.rfft(y, n)
    cross = fx * np.conj(fy)
    mag = np.abs(cross)
    live_bins = mag >= PHAT_EPSILON
    whitened = np.zeros_like(cross)
    whitened[live_bins] = cross[live_bins] / mag[live_bins]
    cc = np.fft.irfft(whitened, n)

    lags = np.arange(-max_lag, max_lag + 1)
    window = cc[lags % n]
    lag, peak = _peak_lag(window, lags)
    return LagEstimate(lag=lag, peak_value=peak, max_lag=int(max_lag))


def _peak_lag(values: np.ndarray, lags: np.ndarray) -> tuple[int, float]:
    """Pick the lag maximizing the correlation value. Exact ties go to
    the smallest |lag|, and between -k and +k to the negative one."""
    peak = values.max()
    candidates = lags[values == peak]
    lag = min(candidates, key=lambda l: (abs(l), l))
    return int(lag), float(peak)


def gcc_phat_naive(x: MonoSignal, y: MonoSignal, max_lag: int) -> LagEstimate:
    """Direct-summation oracle for gcc_phat: same padded length, same
    whitening rule, same sign convention and tie-breaking, but every
    transform evaluated as an explicit O(N^2) sum with no FFT anywhere.

    Only intended for small inputs; refuses transforms beyond
    2^15 points.
    """
    n = _check_pair(x, y, max_lag)
    if n > _NAIVE_MAX_TRANSFORM:
        raise ValueError(
            f"naive transform of {n} points is too large (cap {_NAIVE_MAX_TRANSFORM})"
        )
    fx = _dft_direct(x.samples, n)
    fy = _dft_direct(y.samples, n)
    cross = fx * np.conj(fy)
    mag = np.abs(cross)
    live_bins = mag >= PHAT_EPSILON
    whitened = np.zeros_like(cross)
    whitened[live_bins] = cross[live_bins] / mag[live_bins]

    roots = np.exp(-2j * np.pi * np.arange(n) / n)
    best_lag = None
    best_key = None
    peak = None
    for lag in range(-max_lag, max_lag + 1):
        # inverse DFT evaluated at this lag only: conj(roots) powers
        phases = np.conj(roots[(np.arange(n) * lag) % n])
        value = float(np.real(np.dot(whitened, phases)) / n)
        key = (-value, abs(lag), lag)
        if best_key is None or key < best_key:
            best_key = key
            best_lag = lag
            peak = value
    return LagEstimate(lag=int(best_lag), peak_value=float(peak), max_lag=int(max_lag))


def _dft_direct(x: np.ndarray, n: int, chunk: int = 256) -> np.ndarray:
    """Full-spectrum DFT by direct summation, in chunks of bins to bound
    the size of the twiddle lookup."""
    roots = np.exp(-2j * np.pi * np.arange(n) / n)
    padded = np.zeros(n)
    padded[: x.size] = x
    sample_idx = np.arange(n, dtype=np.int64)
    out = np.empty(n, dtype=np.complex128)
    for start in range(0, n, chunk):
        bins = np.arange(start, min(start + chunk, n), dtype=np.int64)
        out[start : start + bins.size] = roots[(bins[:, None] * sample_idx) % n] @ padded
    return out


def coarse_align(
    live_acc: MonoSignal,
    rec_acc: MonoSignal,
    max_lag_seconds: float = DEFAULT_COARSE_MAX_LAG_SECONDS,
) -> LagEstimate:
    """Whole-song alignment from the accompaniment stems, which should be
    nearly identical material in both recordings.

    The returned lag is the amount to shift the studio stems so they
    line up with the live recording. When the inputs are shorter than
    the requested search span, the span is clamped to the largest lag
    the correlation can represent (no representable lag is skipped;
    without the clamp, short clips could never use the default bound).
    """
    max_lag = seconds_to_samples(max_lag_seconds, live_acc.sample_rate)
    if len(live_acc) > 0 and len(rec_acc) > 0:
        representable = _next_pow2(len(live_acc) + len(rec_acc) - 1) - 1
        max_lag = min(max_lag, representable)
    return gcc_phat(live_acc, rec_acc, max_lag)


# ---------------------------------------------------------------------------
# Framing (shared with the gain-matching stage)


def frame_length_and_hop(sample_rate: int, frame_seconds: float, hop_seconds: float) -> tuple[int, int]:
    if frame_seconds <= 0:
        raise ValueError(f"frame_seconds must be positive, got {frame_seconds}")
    if not 0 < hop_seconds <= frame_seconds:
        raise ValueError(
            f"hop_seconds must be in (0, frame_seconds], got {hop_seconds}"
        )
    frame_len = seconds_to_samples(frame_seconds, sample_rate)
    hop_len = seconds_to_samples(hop_seconds, sample_rate)
    if frame_len < 1 or hop_len < 1:
        raise ValueError("frame and hop must both span at least one sample")
    return frame_len, hop_len


def frame_view(x: np.ndarray, frame_len: int, hop_len: int) -> np.ndarray:
    """Read-only (num_frames, frame_len) view of x; the last partial
    frame is discarded."""
    num = max(0, 1 + (x.size - frame_len) // hop_len)
    return np.lib.stride_tricks.as_strided(
        x,
        shape=(num, frame_len),
        strides=(hop_len * x.strides[0], x.strides[0]),
        writeable=False,
    )


def _frame_rms_dbfs(frames: np.ndarray) -> np.ndarray:
    mean_sq = np.mean(np.square(frames), axis=1)
    out = np.full(mean_sq.shape, -np.inf)
    loud = mean_sq > 0
    out[loud] = 10.0 * np.log10(mean_sq[loud])
    return out


def framewise_fine_lag(
    live_voc: MonoSignal,
    rec_voc_scaled: MonoSignal,
    frame_seconds: float = DEFAULT_FRAME_SECONDS,
    hop_seconds: float = DEFAULT_HOP_SECONDS,
    max_shift_seconds: float = DEFAULT_FINE_MAX_SHIFT_SECONDS,
    silence_floor_dbfs: float = DEFAULT_SILENCE_FLOOR_DBFS,
) -> tuple[int, list[FrameLagVote]]:
    """Residual lag between two already-coarsely-aligned stems.

    Both signals are cut into aligned frames; frames where either side's
    RMS level falls below the silence floor are excluded (their vote is
    recorded with included=False), since near-silent frames produce
    meaningless lags that would pollute the vote. Each included frame
    votes via gcc_phat with the per-frame bound, and the winner is the
    most frequent exact lag value, ties broken by smallest |lag| then
    negative first. With no included frames the lag is 0 and the caller
    can see the empty vote set in the returned list.
    """
    if live_voc.sample_rate != rec_voc_scaled.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch: {live_voc.sample_rate} vs {rec_voc_scaled.sample_rate}"
        )
    if len(live_voc) != len(rec_voc_scaled):
        raise InputFormatError(
            f"length mismatch: {len(live_voc)} vs {len(rec_voc_scaled)} samples"
        )
    rate = live_voc.sample_rate
    frame_len, hop_len = frame_length_and_hop(rate, frame_seconds, hop_seconds)
    max_lag = seconds_to_samples(max_shift_seconds, rate)
    if max_lag < 1:
        raise ValueError(f"max_shift_seconds {max_shift_seconds} spans no samples")
    # a lag can never exceed the frame itself; clamping also keeps the
    # search window inside the unambiguous part of the correlation
    max_lag = min(max_lag, frame_len - 1) if frame_len > 1 else 1

    live_frames = frame_view(live_voc.samples, frame_len, hop_len)
    rec_frames = frame_view(rec_voc_scaled.samples, frame_len, hop_len)
    live_levels = _frame_rms_dbfs(live_frames)
    rec_levels = _frame_rms_dbfs(rec_frames)

    n = _next_pow2(2 * frame_len - 1)
    votes = []
    for i in range(live_frames.shape[0]):
        if live_levels[i] < silence_floor_dbfs or rec_levels[i] < silence_floor_dbfs:
            votes.append(FrameLagVote(frame_index=i, lag=0, included=False))
            continue
        est = _gcc_phat_arrays(live_frames[i], rec_frames[i], max_lag, n)
        votes.append(FrameLagVote(frame_index=i, lag=est.lag, included=True))

    included = [v.lag for v in votes if v.included]
    if not included:
        return 0, votes
    counts = Counter(included)
    top = max(counts.values())
    lag = min((l for l, c in counts.items() if c == top), key=lambda l: (abs(l), l))
    return int(lag), votes
