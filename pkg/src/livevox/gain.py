"""Amplitude matching between the two vocal stems.

Frame selection and scale estimation are deliberately split: frames are
compared by Pearson correlation after a periodic Hann taper (the taper
suppresses edge effects; Pearson is scale-invariant, so the choice of
frame does not depend on how loud either recording is), while the scale
factor itself is the closed-form least-squares projection computed on
the raw, unwindowed samples of the winning frame. The factor is
subsequently applied to the whole unwindowed stem, so it must be fit on
unwindowed data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .alignment import (
    DEFAULT_FRAME_SECONDS,
    DEFAULT_HOP_SECONDS,
    frame_length_and_hop,
    frame_view,
)
from .audio import MonoSignal
from .errors import DegenerateSignalError, InputFormatError


@dataclass(frozen=True)
class FrameCorrelation:
    """Pearson correlation of one aligned frame pair.

    ``pearson_r`` is None (and ``usable`` False) when either windowed
    frame has zero variance: silence is absence of evidence, not
    evidence of no correlation.
    """

    frame_index: int
    start_sample: int
    pearson_r: Optional[float]
    usable: bool

    def __post_init__(self):
        if self.usable:
            if self.pearson_r is None or not (-1.0 <= self.pearson_r <= 1.0):
                raise ValueError(
                    f"usable frame must carry r in [-1, 1], got {self.pearson_r!r}"
                )


@dataclass(frozen=True)
class ScaleEstimate:
    """The least-squares scale factor and the frame that produced it."""

    alpha: float
    frame_index: int
    pearson_r: float
    frame_count: int

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        if not 0 <= self.frame_index < self.frame_count:
            raise ValueError(
                f"frame_index {self.frame_index} out of range for "
                f"{self.frame_count} frames"
            )


def periodic_hann(n: int) -> np.ndarray:
    """Hann window with denominator n (periodic), not n-1 (symmetric).

    The audible difference is nil, but fixing one definition keeps
    outputs bit-reproducible.
    """
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def framewise_pearson(
    live_voc: MonoSignal,
    rec_voc: MonoSignal,
    frame_seconds: float = DEFAULT_FRAME_SECONDS,
    hop_seconds: float = DEFAULT_HOP_SECONDS,
) -> list[FrameCorrelation]:
    """Pearson correlation per aligned frame pair, after tapering each
    frame with a periodic Hann window."""
    if live_voc.sample_rate != rec_voc.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch: {live_voc.sample_rate} vs {rec_voc.sample_rate}"
        )
    if len(live_voc) != len(rec_voc):
        raise InputFormatError(
            f"length mismatch: {len(live_voc)} vs {len(rec_voc)} samples"
        )
    frame_len, hop_len = frame_length_and_hop(
        live_voc.sample_rate, frame_seconds, hop_seconds
    )
    if len(live_voc) < frame_len:
        raise DegenerateSignalError(
            f"signals of {len(live_voc)} samples are shorter than one "
            f"{frame_len}-sample frame"
        )

    window = periodic_hann(frame_len)
    a = frame_view(live_voc.samples, frame_len, hop_len) * window
    b = frame_view(rec_voc.samples, frame_len, hop_len) * window
    a -= a.mean(axis=1, keepdims=True)
    b -= b.mean(axis=1, keepdims=True)
    num = np.sum(a * b, axis=1)
    den_sq = np.sum(a * a, axis=1) * np.sum(b * b, axis=1)

    out = []
    for i in range(a.shape[0]):
        if den_sq[i] > 0.0:
            r = float(np.clip(num[i] / np.sqrt(den_sq[i]), -1.0, 1.0))
            out.append(
                FrameCorrelation(
                    frame_index=i, start_sample=i * hop_len, pearson_r=r, usable=True
                )
            )
        else:
            out.append(
                FrameCorrelation(
                    frame_index=i, start_sample=i * hop_len, pearson_r=None, usable=False
                )
            )
    return out


def best_frame(correlations: list[FrameCorrelation]) -> FrameCorrelation:
    """The usable frame with the highest correlation; ties go to the
    earliest frame."""
    if not correlations:
        raise ValueError("empty correlation list")
    best = None
    for c in correlations:
        if c.usable and (best is None or c.pearson_r > best.pearson_r):
            best = c
    if best is None:
        raise DegenerateSignalError(
            "no usable frames: both stems are silent or constant everywhere"
        )
    return best


def least_squares_scale(rec_frame: MonoSignal, live_frame: MonoSignal) -> float:
    """Closed-form minimizer of ||alpha * rec - live||^2 over alpha:
    the projection (rec . live) / ||rec||^2, on raw (unwindowed) samples."""
    if len(rec_frame) != len(live_frame):
        raise InputFormatError(
            f"length mismatch: {len(rec_frame)} vs {len(live_frame)} samples"
        )
    if len(rec_frame) == 0:
        raise ValueError("cannot fit a scale factor on empty frames")
    return _alpha_arrays(rec_frame.samples, live_frame.samples)


def _alpha_arrays(rec: np.ndarray, live: np.ndarray) -> float:
    energy = float(np.dot(rec, rec))
    if energy == 0.0:
        raise DegenerateSignalError("reference frame has zero energy")
    return float(np.dot(rec, live) / energy)


def estimate_scale(
    live_voc: MonoSignal,
    rec_voc: MonoSignal,
    frame_seconds: float = DEFAULT_FRAME_SECONDS,
    hop_seconds: float = DEFAULT_HOP_SECONDS,
) -> ScaleEstimate:
    """Select the best-correlated frame and fit the scale factor on it."""
    estimate, _ = estimate_scale_with_frames(
        live_voc, rec_voc, frame_seconds, hop_seconds
    )
    return estimate


def estimate_scale_with_frames(
    live_voc: MonoSignal,
    rec_voc: MonoSignal,
    frame_seconds: float = DEFAULT_FRAME_SECONDS,
    hop_seconds: float = DEFAULT_HOP_SECONDS,
) -> tuple[ScaleEstimate, list[FrameCorrelation]]:
    """As estimate_scale, but also return the per-frame correlations so
    callers can report them."""
    correlations = framewise_pearson(live_voc, rec_voc, frame_seconds, hop_seconds)
    chosen = best_frame(correlations)
    frame_len, hop_len = frame_length_and_hop(
        live_voc.sample_rate, frame_seconds, hop_seconds
    )
    start = chosen.frame_index * hop_len
    alpha = _alpha_arrays(
        rec_voc.samples[start : start + frame_len],
        live_voc.samples[start : start + frame_len],
    )
    estimate = ScaleEstimate(
        alpha=alpha,
        frame_index=chosen.frame_index,
        pearson_r=chosen.pearson_r,
        frame_count=len(correlations),
    )
    return estimate, correlations
