"""End-to-end extraction: separate, align, scale, refine, subtract.

The stages run in a fixed order. Coarse alignment works on the
accompaniment stems (nearly identical material in both recordings),
then every later stage works on the vocal stems alone: the studio vocal
stem is shifted by the coarse lag, gain-matched against the live vocal
stem, nudged by the framewise fine lag, and finally subtracted from the
live vocal stem. What remains, the residual, is the extracted live
vocal. Signals are re-padded to equal length after every shift.

Every intermediate decision lands in an ExtractionReport so a run can
be audited afterwards: both lag estimates with their peak values, every
frame's correlation and lag vote, the scale factor, and any warnings.
The report deliberately includes the dispersion of the fine-lag votes;
when the two recordings differ in tempo the per-frame lags drift apart
instead of agreeing, and a high dispersion is the tell (correcting it
would need time-stretching, which this package does not do).
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .alignment import (
    DEFAULT_COARSE_MAX_LAG_SECONDS,
    DEFAULT_FINE_MAX_SHIFT_SECONDS,
    DEFAULT_FRAME_SECONDS,
    DEFAULT_HOP_SECONDS,
    DEFAULT_SILENCE_FLOOR_DBFS,
    FrameLagVote,
    LagEstimate,
    coarse_align,
    framewise_fine_lag,
)
from .audio import MonoSignal, match_lengths, rms_dbfs, scale, seconds_to_samples, shift, subtract
from .errors import InputFormatError, LivevoxError
from .gain import FrameCorrelation, ScaleEstimate, estimate_scale_with_frames
from .separation import SeparatorSpec, separate

LAG_DISPERSION_WARN_SAMPLES = 220.0  # 5 ms at 44.1 kHz

ENCODINGS = ("float32", "pcm16")


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable parameters of one extraction run, plus the separator to
    use for each input."""

    live_separator: SeparatorSpec
    studio_separator: SeparatorSpec
    coarse_max_lag_seconds: float = DEFAULT_COARSE_MAX_LAG_SECONDS
    fine_max_shift_seconds: float = DEFAULT_FINE_MAX_SHIFT_SECONDS
    frame_seconds: float = DEFAULT_FRAME_SECONDS
    hop_seconds: float = DEFAULT_HOP_SECONDS
    silence_floor_dbfs: float = DEFAULT_SILENCE_FLOOR_DBFS
    output_encoding: str = "float32"

    def __post_init__(self):
        for name in ("coarse_max_lag_seconds", "fine_max_shift_seconds",
                     "frame_seconds", "hop_seconds"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.hop_seconds > self.frame_seconds:
            raise ValueError(
                f"hop ({self.hop_seconds}s) must not exceed frame ({self.frame_seconds}s)"
            )
        if self.output_encoding not in ENCODINGS:
            raise ValueError(
                f"output_encoding must be one of {ENCODINGS}, got {self.output_encoding!r}"
            )


@dataclass(frozen=True)
class ExtractionReport:
    """Every intermediate decision of one pipeline run."""

    coarse_lag: LagEstimate
    fine_lag: int
    fine_votes: list[FrameLagVote]
    scale: ScaleEstimate
    frame_correlations: list[FrameCorrelation]
    lag_dispersion: float
    residual_rms_dbfs: float
    warnings: list[str]
    config_echo: PipelineConfig
    resolved: dict  # parameter values resolved to whole sample counts
    durations: dict  # per-stage wall-clock seconds

    def equals_ignoring_durations(self, other: "ExtractionReport") -> bool:
        a = report_to_dict(self)
        b = report_to_dict(other)
        a.pop("durations")
        b.pop("durations")
        return a == b


@contextmanager
def _stage(name: str, durations: dict):
    start = time.perf_counter()
    try:
        yield
    except (LivevoxError, ValueError) as exc:
        raise type(exc)(f"{name}: {exc}") from exc
    finally:
        durations[name] = time.perf_counter() - start


def extract_live_vocals(
    live_path, studio_path, config: PipelineConfig
) -> tuple[MonoSignal, ExtractionReport]:
    """Run the full extraction and return the residual plus its report.

    Stage errors propagate with the stage name attached. Input files are
    never modified. Two runs with identical inputs and config produce
    bit-identical residuals and identical reports except for durations.
    """
    durations: dict = {}
    warnings: list[str] = []
    total_start = time.perf_counter()

    with _stage("separate_live", durations):
        live = separate(config.live_separator, live_path)
    with _stage("separate_studio", durations):
        studio = separate(config.studio_separator, studio_path)

    if live.vocals.sample_rate != studio.vocals.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch between inputs: live {live.vocals.sample_rate} Hz, "
            f"studio {studio.vocals.sample_rate} Hz"
        )
    rate = live.vocals.sample_rate

    with _stage("coarse_align", durations):
        coarse = coarse_align(
            live.accompaniment, studio.accompaniment, config.coarse_max_lag_seconds
        )

    with _stage("gain_match", durations):
        rec_voc = shift(studio.vocals, coarse.lag)
        live_voc, rec_voc = match_lengths(live.vocals, rec_voc)
        scale_est, frame_correlations = estimate_scale_with_frames(
            live_voc, rec_voc, config.frame_seconds, config.hop_seconds
        )
        rec_scaled = scale(rec_voc, scale_est.alpha)

    with _stage("fine_align", durations):
        fine_lag, votes = framewise_fine_lag(
            live_voc,
            rec_scaled,
            config.frame_seconds,
            config.hop_seconds,
            config.fine_max_shift_seconds,
            config.silence_floor_dbfs,
        )

    with _stage("subtract", durations):
        rec_final = shift(rec_scaled, fine_lag)
        live_final, rec_final = match_lengths(live_voc, rec_final)
        residual = subtract(live_final, rec_final)

    included = [v.lag for v in votes if v.included]
    dispersion = float(np.std(included)) if included else 0.0
    if not included:
        warnings.append(
            "fine alignment found no frames above the silence floor; assuming lag 0"
        )
    if dispersion > LAG_DISPERSION_WARN_SAMPLES:
        warnings.append(
            f"fine-lag votes disperse widely (std {dispersion:.1f} samples > "
            f"{LAG_DISPERSION_WARN_SAMPLES:g}): likely tempo mismatch between the "
            "recordings; cancellation will be poor and time-stretch correction is "
            "not available here"
        )
    if scale_est.alpha <= 0:
        warnings.append(
            f"non-positive scale factor ({scale_est.alpha:.6g}) suggests polarity "
            "inversion or unrelated vocal stems"
        )

    durations["total"] = time.perf_counter() - total_start
    report = ExtractionReport(
        coarse_lag=coarse,
        fine_lag=int(fine_lag),
        fine_votes=votes,
        scale=scale_est,
        frame_correlations=frame_correlations,
        lag_dispersion=dispersion,
        residual_rms_dbfs=rms_dbfs(residual),
        warnings=warnings,
        config_echo=config,
        resolved={
            "sample_rate": rate,
            "frame_samples": seconds_to_samples(config.frame_seconds, rate),
            "hop_samples": seconds_to_samples(config.hop_seconds, rate),
            "fine_max_shift_samples": seconds_to_samples(
                config.fine_max_shift_seconds, rate
            ),
            "coarse_max_lag_samples": seconds_to_samples(
                config.coarse_max_lag_seconds, rate
            ),
        },
        durations=durations,
    )
    return residual, report


# ---------------------------------------------------------------------------
# Report serialization: a stable-order key/value tree, written as JSON.


def _separator_to_dict(spec: SeparatorSpec) -> dict:
    return {
        "mode": spec.mode,
        "command_template": spec.command_template,
        # callers may pass a Path; serialize it as text
        "stems_dir": None if spec.stems_dir is None else str(spec.stems_dir),
        "timeout": spec.timeout,
    }


def _config_to_dict(config: PipelineConfig) -> dict:
    return {
        "coarse_max_lag_seconds": config.coarse_max_lag_seconds,
        "fine_max_shift_seconds": config.fine_max_shift_seconds,
        "frame_seconds": config.frame_seconds,
        "hop_seconds": config.hop_seconds,
        "silence_floor_dbfs": config.silence_floor_dbfs,
        "output_encoding": config.output_encoding,
        "live_separator": _separator_to_dict(config.live_separator),
        "studio_separator": _separator_to_dict(config.studio_separator),
    }


def report_to_dict(report: ExtractionReport) -> dict:
    return {
        "coarse_lag": {
            "lag": report.coarse_lag.lag,
            "peak_value": report.coarse_lag.peak_value,
            "max_lag": report.coarse_lag.max_lag,
        },
        "fine_lag": report.fine_lag,
        "fine_votes": [
            {"frame_index": v.frame_index, "lag": v.lag, "included": v.included}
            for v in report.fine_votes
        ],
        "scale": {
            "alpha": report.scale.alpha,
            "frame_index": report.scale.frame_index,
            "pearson_r": report.scale.pearson_r,
            "frame_count": report.scale.frame_count,
        },
        "frame_correlations": [
            {
                "frame_index": c.frame_index,
                "start_sample": c.start_sample,
                "pearson_r": c.pearson_r,
                "usable": c.usable,
            }
            for c in report.frame_correlations
        ],
        "lag_dispersion": report.lag_dispersion,
        "residual_rms_dbfs": report.residual_rms_dbfs,
        "warnings": list(report.warnings),
        "config_echo": _config_to_dict(report.config_echo),
        "resolved": dict(report.resolved),
        "durations": dict(report.durations),
    }


def report_from_dict(data: dict) -> ExtractionReport:
    config = data["config_echo"]
    return ExtractionReport(
        coarse_lag=LagEstimate(**data["coarse_lag"]),
        fine_lag=data["fine_lag"],
        fine_votes=[FrameLagVote(**v) for v in data["fine_votes"]],
        scale=ScaleEstimate(**data["scale"]),
        frame_correlations=[FrameCorrelation(**c) for c in data["frame_correlations"]],
        lag_dispersion=data["lag_dispersion"],
        residual_rms_dbfs=data["residual_rms_dbfs"],
        warnings=list(data["warnings"]),
        config_echo=PipelineConfig(
            live_separator=SeparatorSpec(**config["live_separator"]),
            studio_separator=SeparatorSpec(**config["studio_separator"]),
            coarse_max_lag_seconds=config["coarse_max_lag_seconds"],
            fine_max_shift_seconds=config["fine_max_shift_seconds"],
            frame_seconds=config["frame_seconds"],
            hop_seconds=config["hop_seconds"],
            silence_floor_dbfs=config["silence_floor_dbfs"],
            output_encoding=config["output_encoding"],
        ),
        resolved=dict(data["resolved"]),
        durations=dict(data["durations"]),
    )


def write_report(report: ExtractionReport, path) -> None:
    """Serialize the report as an indented JSON document with stable
    field order. Infinities (e.g. the RMS of an exactly-zero residual)
    use the JSON extension literals Python's json module round-trips."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")


def read_report(path) -> ExtractionReport:
    with open(path, "r", encoding="utf-8") as fh:
        return report_from_dict(json.load(fh))
