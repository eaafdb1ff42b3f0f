"""Synthetic ground-truth fixtures and quantitative cancellation metrics.

Real paired recordings (a studio track and a live performance of it)
cannot ship with a test suite, and even if they could there would be no
ground truth to score against: nobody has the isolated live vocal. This
module sidesteps both problems by synthesizing the whole scenario from
a seed. The studio side is a deterministic pseudo-random mix of an
accompaniment bed and a vocal line; the live side is that mix delayed,
gain-scaled, optionally tempo-warped, with an independent "sung" vocal
and crowd-like noise added on top. Because every component is known
exactly, extraction quality becomes a number instead of a listening
impression.

Fixture layout on disk (one directory per fixture):

    studio_mix.wav          the released track
    live_mix.wav            what a camera microphone would have caught
    stems_studio/           exact stems for pre-separated pipeline mode
        vocals.wav
        accompaniment.wav
    stems_live/
        vocals.wav          playback vocal + injected live vocal
        accompaniment.wav   playback accompaniment + noise
    truth_live_vocal.wav    the injected vocal, on the live timeline
                            (all zeros when the fixture has none)
    fixture_spec.txt        key=value echo of the generating spec

The truth file is written on the live-mix timeline, so scoring needs
only truncation to a common length, never realignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .audio import MonoSignal, load_mono, seconds_to_samples, write_wav
from .errors import DegenerateSignalError, InputFormatError
from .separation import ACCOMPANIMENT_FILENAME, VOCALS_FILENAME

STUDIO_MIX_FILENAME = "studio_mix.wav"
LIVE_MIX_FILENAME = "live_mix.wav"
STUDIO_STEMS_DIRNAME = "stems_studio"
LIVE_STEMS_DIRNAME = "stems_live"
TRUTH_FILENAME = "truth_live_vocal.wav"
SPEC_FILENAME = "fixture_spec.txt"

# Source material levels. The injected live vocal level is caller-chosen
# (it is the thing under test); the bed levels just need headroom.
_ACCOMP_RMS_DBFS = -18.0
_VOCAL_RMS_DBFS = -18.0
_ACCOMP_TONE_COUNT = 12
_ACCOMP_NOISE_MIX = 0.25  # noise bed amplitude relative to the tone bed

# The injected vocal switches hard on and off so that some analysis
# frames contain playback only. Those frames correlate essentially
# perfectly with the studio stem, which is what lets the scale estimate
# ignore the live vocal.
_LIVE_VOCAL_ON_SECONDS = 2.0
_LIVE_VOCAL_OFF_SECONDS = 2.0


@dataclass(frozen=True)
class FixtureSpec:
    """Everything that determines a fixture, hence its ground truth.

    ``live_vocal_gain_dbfs`` and ``noise_floor_dbfs`` default to None,
    meaning the corresponding component is absent entirely (a lip-sync
    performance in an ideally quiet venue). ``tempo_ratio`` is the
    playback speed of the live rendition relative to the studio master;
    1.0 means sample-exact playback.
    """

    delay_samples: int = 0
    playback_gain: float = 1.0
    live_vocal_gain_dbfs: Optional[float] = None
    noise_floor_dbfs: Optional[float] = None
    tempo_ratio: float = 1.0
    seed: int = 0
    duration_seconds: float = 30.0
    sample_rate: int = 44100

    def __post_init__(self):
        if not (isinstance(self.delay_samples, (int, np.integer)) and self.delay_samples >= 0):
            raise ValueError(f"delay_samples must be a non-negative integer, got {self.delay_samples!r}")
        if self.playback_gain <= 0:
            raise ValueError(f"playback_gain must be positive, got {self.playback_gain}")
        if not 0.9 < self.tempo_ratio < 1.1:
            raise ValueError(
                f"tempo_ratio must lie in (0.9, 1.1), got {self.tempo_ratio}"
            )
        if self.duration_seconds <= 0:
            raise ValueError(f"duration_seconds must be positive, got {self.duration_seconds}")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        if not isinstance(self.seed, (int, np.integer)):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True)
class FixtureBundle:
    """Paths to one generated fixture plus the spec that produced it."""

    studio_mix: Path
    live_mix: Path
    studio_stems_dir: Path
    live_stems_dir: Path
    truth_live_vocal: Path
    spec_echo: FixtureSpec

    def __post_init__(self):
        for name in ("studio_mix", "live_mix", "truth_live_vocal"):
            object.__setattr__(self, name, Path(getattr(self, name)))
        for name in ("studio_stems_dir", "live_stems_dir"):
            object.__setattr__(self, name, Path(getattr(self, name)))
        missing = [
            str(p)
            for p in (
                self.studio_mix,
                self.live_mix,
                self.truth_live_vocal,
                self.studio_stems_dir / VOCALS_FILENAME,
                self.studio_stems_dir / ACCOMPANIMENT_FILENAME,
                self.live_stems_dir / VOCALS_FILENAME,
                self.live_stems_dir / ACCOMPANIMENT_FILENAME,
            )
            if not p.exists()
        ]
        if missing:
            raise InputFormatError(
                "fixture bundle is missing files: " + ", ".join(missing)
            )


@dataclass(frozen=True)
class Scorecard:
    """Quantitative extraction quality for one residual against one fixture.

    cancellation_db compares what is left of the playback component after
    subtraction against how loud it was before: the known injected vocal
    is removed from both sides first, so the number isolates how well the
    playback itself was cancelled. 0 dB means the pipeline achieved
    nothing; strongly negative is good. live_vocal_snr_db measures how
    faithfully the residual reproduces the injected vocal and is None for
    fixtures that have none.
    """

    cancellation_db: float
    live_vocal_snr_db: Optional[float]


# ---------------------------------------------------------------------------
# Source material synthesis


def _normalize_rms(x: np.ndarray, target_dbfs: float) -> np.ndarray:
    r = float(np.sqrt(np.mean(np.square(x))))
    if r == 0.0:
        raise DegenerateSignalError("cannot normalize an all-zero signal")
    return x * (10.0 ** (target_dbfs / 20.0) / r)


def _tone_bed(rng, n: int, rate: int) -> np.ndarray:
    """Sum of detuned sinusoids spread log-uniformly across the band."""
    t = np.arange(n) / rate
    upper = min(8000.0, 0.45 * rate)
    freqs = np.geomspace(60.0, upper, _ACCOMP_TONE_COUNT)
    freqs = freqs * rng.uniform(0.95, 1.05, _ACCOMP_TONE_COUNT)
    amps = rng.uniform(0.5, 1.0, _ACCOMP_TONE_COUNT)
    phases = rng.uniform(0.0, 2.0 * np.pi, _ACCOMP_TONE_COUNT)
    out = np.zeros(n)
    for f, a, p in zip(freqs, amps, phases):
        out += a * np.sin(2.0 * np.pi * f * t + p)
    return out


def _noise_bed(rng, n: int) -> np.ndarray:
    # one-pole lowpass over white noise; enough spectral tilt to read as
    # a crowd rumble rather than hiss
    white = rng.standard_normal(n)
    return lfilter([0.05], [1.0, -0.95], white)


def _accompaniment(rng, n: int, rate: int) -> np.ndarray:
    tones = _tone_bed(rng, n, rate)
    noise = _noise_bed(rng, n)
    bed = _normalize_rms(tones, 0.0) + _ACCOMP_NOISE_MIX * _normalize_rms(noise, 0.0)
    return _normalize_rms(bed, _ACCOMP_RMS_DBFS)


def _modulated_tone(rng, n: int, rate: int, carrier_low: float, carrier_high: float) -> np.ndarray:
    """A vibrato-and-tremolo tone: narrowband, voice-like enough."""
    t = np.arange(n) / rate
    carrier = rng.uniform(carrier_low, carrier_high)
    vibrato_hz = rng.uniform(4.5, 6.5)
    vibrato_depth = rng.uniform(4.0, 8.0)
    tremolo_hz = rng.uniform(1.0, 2.0)
    phase0 = rng.uniform(0.0, 2.0 * np.pi)
    phase1 = rng.uniform(0.0, 2.0 * np.pi)
    x = np.sin(
        2.0 * np.pi * carrier * t + vibrato_depth * np.sin(2.0 * np.pi * vibrato_hz * t) + phase0
    )
    return x * (0.7 + 0.3 * np.sin(2.0 * np.pi * tremolo_hz * t + phase1))


def _onoff_gate(n: int, rate: int) -> np.ndarray:
    """Hard 1/0 envelope: on for a stretch, silent for a stretch, repeat."""
    period = _LIVE_VOCAL_ON_SECONDS + _LIVE_VOCAL_OFF_SECONDS
    t = np.arange(n) / rate
    return (np.mod(t, period) < _LIVE_VOCAL_ON_SECONDS).astype(np.float64)


def _linear_resample(x: np.ndarray, ratio: float) -> np.ndarray:
    """Play x back at `ratio` times its original speed (linear interp)."""
    if ratio == 1.0:
        return x
    positions = np.arange(int(np.floor((len(x) - 1) / ratio)) + 1) * ratio
    return np.interp(positions, np.arange(len(x)), x)


# ---------------------------------------------------------------------------
# Fixture generation


def generate_fixture(spec: FixtureSpec, out_dir) -> FixtureBundle:
    """Synthesize one fixture into out_dir and return its bundle.

    Generation is a pure function of the spec: the same spec writes
    byte-identical files every time. The live mix is built stem-first so
    the stem directories are exact by construction, not re-separated.
    """
    out = Path(out_dir)
    studio_stems = out / STUDIO_STEMS_DIRNAME
    live_stems = out / LIVE_STEMS_DIRNAME
    try:
        studio_stems.mkdir(parents=True, exist_ok=True)
        live_stems.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputFormatError(f"cannot create fixture directory {out}: {exc}") from exc

    rate = spec.sample_rate
    n = seconds_to_samples(spec.duration_seconds, rate)
    streams = np.random.SeedSequence(spec.seed).spawn(4)
    rng_accomp = np.random.default_rng(streams[0])
    rng_vocal = np.random.default_rng(streams[1])
    rng_live = np.random.default_rng(streams[2])
    rng_noise = np.random.default_rng(streams[3])

    accomp = _accompaniment(rng_accomp, n, rate)
    vocal = _normalize_rms(
        _modulated_tone(rng_vocal, n, rate, 400.0, 700.0), _VOCAL_RMS_DBFS
    )

    # The playback component: the studio stems as the venue PA replays
    # them. Delay first, then the optional tempo warp over the whole
    # thing, then the gain.
    playback_vocal = np.concatenate([np.zeros(spec.delay_samples), vocal])
    playback_accomp = np.concatenate([np.zeros(spec.delay_samples), accomp])
    playback_vocal = spec.playback_gain * _linear_resample(playback_vocal, spec.tempo_ratio)
    playback_accomp = spec.playback_gain * _linear_resample(playback_accomp, spec.tempo_ratio)
    n_live = playback_vocal.size

    truth = np.zeros(n_live)
    if spec.live_vocal_gain_dbfs is not None:
        sung = _modulated_tone(rng_live, n_live, rate, 800.0, 1200.0)
        truth = _normalize_rms(
            _onoff_gate(n_live, rate) * sung, spec.live_vocal_gain_dbfs
        )
    noise = np.zeros(n_live)
    if spec.noise_floor_dbfs is not None:
        noise = _normalize_rms(_noise_bed(rng_noise, n_live), spec.noise_floor_dbfs)

    live_vocal_stem = playback_vocal + truth
    live_accomp_stem = playback_accomp + noise

    def _write(arr, path):
        write_wav(MonoSignal(samples=arr, sample_rate=rate), path, encoding="float32")

    _write(vocal + accomp, out / STUDIO_MIX_FILENAME)
    _write(live_vocal_stem + live_accomp_stem, out / LIVE_MIX_FILENAME)
    _write(vocal, studio_stems / VOCALS_FILENAME)
    _write(accomp, studio_stems / ACCOMPANIMENT_FILENAME)
    _write(live_vocal_stem, live_stems / VOCALS_FILENAME)
    _write(live_accomp_stem, live_stems / ACCOMPANIMENT_FILENAME)
    _write(truth, out / TRUTH_FILENAME)
    write_spec_file(spec, out / SPEC_FILENAME)

    return FixtureBundle(
        studio_mix=out / STUDIO_MIX_FILENAME,
        live_mix=out / LIVE_MIX_FILENAME,
        studio_stems_dir=studio_stems,
        live_stems_dir=live_stems,
        truth_live_vocal=out / TRUTH_FILENAME,
        spec_echo=spec,
    )


def load_bundle(bundle_dir) -> FixtureBundle:
    """Reconstruct a FixtureBundle from a previously generated directory."""
    out = Path(bundle_dir)
    spec_path = out / SPEC_FILENAME
    if not spec_path.exists():
        raise InputFormatError(f"{out}: no {SPEC_FILENAME} found; not a fixture bundle")
    return FixtureBundle(
        studio_mix=out / STUDIO_MIX_FILENAME,
        live_mix=out / LIVE_MIX_FILENAME,
        studio_stems_dir=out / STUDIO_STEMS_DIRNAME,
        live_stems_dir=out / LIVE_STEMS_DIRNAME,
        truth_live_vocal=out / TRUTH_FILENAME,
        spec_echo=parse_spec_file(spec_path),
    )


# ---------------------------------------------------------------------------
# Spec files: flat key=value, one field per line, optionals omitted


_INT_FIELDS = ("delay_samples", "seed", "sample_rate")
_FLOAT_FIELDS = (
    "playback_gain",
    "live_vocal_gain_dbfs",
    "noise_floor_dbfs",
    "tempo_ratio",
    "duration_seconds",
)


def write_spec_file(spec: FixtureSpec, path) -> None:
    lines = [
        f"delay_samples={spec.delay_samples}",
        f"playback_gain={spec.playback_gain!r}",
    ]
    if spec.live_vocal_gain_dbfs is not None:
        lines.append(f"live_vocal_gain_dbfs={spec.live_vocal_gain_dbfs!r}")
    if spec.noise_floor_dbfs is not None:
        lines.append(f"noise_floor_dbfs={spec.noise_floor_dbfs!r}")
    lines += [
        f"tempo_ratio={spec.tempo_ratio!r}",
        f"seed={spec.seed}",
        f"duration_seconds={spec.duration_seconds!r}",
        f"sample_rate={spec.sample_rate}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_spec_file(path) -> FixtureSpec:
    """Parse a key=value fixture spec. Blank lines and # comments allowed."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc

    kwargs = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputFormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in kwargs:
            raise InputFormatError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            if key in _INT_FIELDS:
                kwargs[key] = int(value)
            elif key in _FLOAT_FIELDS:
                kwargs[key] = float(value)
            else:
                raise InputFormatError(f"{path}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise InputFormatError(
                f"{path}:{lineno}: bad value for {key}: {value!r}"
            ) from exc
    try:
        return FixtureSpec(**kwargs)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Metrics


def snr_db(reference: MonoSignal, estimate: MonoSignal) -> float:
    """Signal-to-noise ratio of an estimate against its reference, in dB.

    10*log10 of reference energy over error energy. An exact match
    returns +inf; an all-zero estimate scores 0 dB by construction
    (its error is the reference itself).
    """
    if reference.sample_rate != estimate.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch: {reference.sample_rate} vs {estimate.sample_rate}"
        )
    if len(reference) != len(estimate):
        raise InputFormatError(
            f"length mismatch: {len(reference)} vs {len(estimate)} samples"
        )
    ref_energy = float(np.sum(np.square(reference.samples)))
    if ref_energy == 0.0:
        raise DegenerateSignalError("snr_db is undefined for an all-zero reference")
    err_energy = float(np.sum(np.square(reference.samples - estimate.samples)))
    if err_energy == 0.0:
        return float("inf")
    return 10.0 * float(np.log10(ref_energy / err_energy))


def score_extraction(bundle: FixtureBundle, residual: MonoSignal) -> Scorecard:
    """Score a residual against a fixture's ground truth.

    All signals are truncated to their common length first. The truth
    vocal already sits on the live timeline (see module docstring), so
    no realignment happens here; the fixture's known geometry is baked
    into the truth file itself.
    """
    live_stem = load_mono(bundle.live_stems_dir / VOCALS_FILENAME)
    truth = load_mono(bundle.truth_live_vocal)
    if live_stem.sample_rate != residual.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch: fixture {live_stem.sample_rate} Hz, "
            f"residual {residual.sample_rate} Hz"
        )
    n = min(len(residual), len(live_stem), len(truth))
    if n == 0:
        raise DegenerateSignalError("no overlapping samples to score")
    res = residual.samples[:n]
    stem = live_stem.samples[:n]
    injected = truth.samples[:n]

    leftover = float(np.sqrt(np.mean(np.square(res - injected))))
    before = float(np.sqrt(np.mean(np.square(stem - injected))))
    if before == 0.0:
        raise DegenerateSignalError(
            "live vocal stem contains no playback component; nothing to cancel"
        )
    cancellation = float("-inf") if leftover == 0.0 else 20.0 * float(np.log10(leftover / before))

    vocal_snr = None
    if bundle.spec_echo.live_vocal_gain_dbfs is not None:
        vocal_snr = snr_db(
            MonoSignal(samples=injected, sample_rate=residual.sample_rate),
            MonoSignal(samples=res, sample_rate=residual.sample_rate),
        )
    return Scorecard(cancellation_db=cancellation, live_vocal_snr_db=vocal_snr)
