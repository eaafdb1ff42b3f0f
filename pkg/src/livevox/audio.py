"""Sample-exact audio containers and primitive waveform operations.

All audio is held as 64-bit floats regardless of the file encoding it
came from: cancellation depth is measured in tens of dB and must not be
limited by processing precision. Containers are immutable after
construction; every operation returns a new object and is deterministic.

WAV support is deliberately narrow: RIFF/WAVE little-endian, PCM 16-bit,
PCM 24-bit, or IEEE float32 for reading; float32 or PCM 16-bit for
writing. Nothing here resamples; operations that combine two signals
require equal sample rates and refuse to run otherwise, because silent
resampling would corrupt sample-exact lag arithmetic downstream.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateSignalError, InputFormatError

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE

_FORMAT_NAMES = {
    0x0002: "ADPCM",
    0x0006: "A-law",
    0x0007: "mu-law",
    0x0050: "MPEG",
    0x0055: "MP3",
}

_PCM16_FULL_SCALE = 32768.0
_PCM24_FULL_SCALE = 8388608.0


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AudioClip:
    """Uniformly sampled audio: one row of samples per channel."""

    samples: np.ndarray  # shape (channels, n), float64
    sample_rate: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[np.newaxis, :]
        if arr.ndim != 2:
            raise ValueError(f"clip samples must be 1-D or 2-D, got ndim={arr.ndim}")
        if arr.shape[0] < 1:
            raise ValueError("clip must have at least one channel")
        if not np.isfinite(arr).all():
            raise ValueError("clip contains non-finite samples")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", _freeze(arr))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    def __eq__(self, other):
        if not isinstance(other, AudioClip):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )


@dataclass(frozen=True)
class MonoSignal:
    """A single channel of uniformly sampled audio."""

    samples: np.ndarray  # shape (n,), float64
    sample_rate: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"mono samples must be 1-D, got ndim={arr.ndim}")
        if arr.size and not np.isfinite(arr).all():
            raise ValueError("signal contains non-finite samples")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", _freeze(arr))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, MonoSignal):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )


def seconds_to_samples(seconds: float, sample_rate: int) -> int:
    """Convert a duration to a whole sample count (round to nearest)."""
    return int(round(seconds * sample_rate))


# ---------------------------------------------------------------------------
# WAV file I/O


def load_wav(path) -> AudioClip:
    """Load a RIFF/WAVE file into an AudioClip.

    Supported encodings are PCM 16-bit, PCM 24-bit, and IEEE float32
    (plus the WAVE_FORMAT_EXTENSIBLE wrappers around them). Integer
    samples are scaled to [-1, 1] by the full-scale magnitude: 16-bit
    codes divide by 32768, 24-bit codes by 8388608. Float samples pass
    through verbatim.

    Raises
    ------
    InputFormatError
        If the file is unreadable, is not a RIFF/WAVE file, declares an
        unsupported encoding, or has a malformed or truncated header.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc

    if len(raw) < 12 or raw[0:4] != b"RIFF":
        raise InputFormatError(
            f"{path}: not a RIFF file (leading bytes {raw[:4]!r})"
        )
    if raw[8:12] != b"WAVE":
        raise InputFormatError(
            f"{path}: not a WAVE file (form type {raw[8:12]!r})"
        )

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        cid = raw[pos : pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body_start = pos + 8
        if body_start + size > len(raw):
            raise InputFormatError(
                f"{path}: truncated {cid!r} chunk (declares {size} bytes, "
                f"{len(raw) - body_start} available)"
            )
        if cid == b"fmt ":
            fmt = raw[body_start : body_start + size]
        elif cid == b"data":
            if fmt is None:
                raise InputFormatError(f"{path}: data chunk precedes fmt chunk")
            data = raw[body_start : body_start + size]
            break
        pos = body_start + size + (size & 1)

    if fmt is None:
        raise InputFormatError(f"{path}: no fmt chunk found")
    if data is None:
        raise InputFormatError(f"{path}: no data chunk found")
    if len(fmt) < 16:
        raise InputFormatError(f"{path}: fmt chunk too short ({len(fmt)} bytes)")

    tag, channels, rate, _byte_rate, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if tag == _WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise InputFormatError(
                f"{path}: extensible fmt chunk too short ({len(fmt)} bytes)"
            )
        # effective format code is the first two bytes of the SubFormat GUID
        (tag,) = struct.unpack_from("<H", fmt, 24)

    if channels < 1:
        raise InputFormatError(f"{path}: header declares {channels} channels")
    if rate < 1:
        raise InputFormatError(f"{path}: header declares sample rate {rate}")

    if (tag, bits) == (_WAVE_FORMAT_PCM, 16):
        decode = _decode_pcm16
    elif (tag, bits) == (_WAVE_FORMAT_PCM, 24):
        decode = _decode_pcm24
    elif (tag, bits) == (_WAVE_FORMAT_IEEE_FLOAT, 32):
        decode = _decode_float32
    else:
        name = _FORMAT_NAMES.get(tag, f"tag {tag}")
        raise InputFormatError(
            f"{path}: unsupported WAV encoding ({name}, {bits} bits/sample); "
            "supported: PCM 16-bit, PCM 24-bit, IEEE float 32-bit"
        )

    frame_size = channels * (bits // 8)
    if block_align not in (0, frame_size):
        raise InputFormatError(
            f"{path}: block align {block_align} inconsistent with "
            f"{channels} channels x {bits} bits"
        )
    if len(data) % frame_size != 0:
        raise InputFormatError(
            f"{path}: data chunk of {len(data)} bytes is not a whole number "
            f"of {frame_size}-byte frames"
        )
    if len(data) == 0:
        raise InputFormatError(f"{path}: data chunk contains no samples")

    flat = decode(data)
    if not np.isfinite(flat).all():
        raise InputFormatError(f"{path}: file contains non-finite float samples")
    samples = flat.reshape(-1, channels).T
    return AudioClip(samples=samples, sample_rate=int(rate))


def _decode_pcm16(data: bytes) -> np.ndarray:
    return np.frombuffer(data, dtype="<i2").astype(np.float64) / _PCM16_FULL_SCALE


def _decode_pcm24(data: bytes) -> np.ndarray:
    b = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3).astype(np.int64)
    codes = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
    codes -= (codes >= 1 << 23) * (1 << 24)  # sign extension
    return codes.astype(np.float64) / _PCM24_FULL_SCALE


def _decode_float32(data: bytes) -> np.ndarray:
    return np.frombuffer(data, dtype="<f4").astype(np.float64)


def write_wav(clip, path, encoding: str = "float32") -> None:
    """Write audio to a RIFF/WAVE file.

    Accepts an AudioClip or a MonoSignal. ``float32`` writes the samples
    verbatim (no scaling or clipping, so an out-of-range residual
    survives intact). ``pcm16`` clamps to [-1, 1] and quantizes by
    rounding to the nearest 16-bit code.
    """
    if isinstance(clip, MonoSignal):
        clip = AudioClip(samples=clip.samples[np.newaxis, :], sample_rate=clip.sample_rate)
    interleaved = np.ascontiguousarray(clip.samples.T).reshape(-1)
    n_frames = clip.n_samples
    channels = clip.channels
    rate = clip.sample_rate

    if encoding == "float32":
        payload = interleaved.astype("<f4").tobytes()
        tag, bits = _WAVE_FORMAT_IEEE_FLOAT, 32
    elif encoding == "pcm16":
        codes = np.round(np.clip(interleaved, -1.0, 1.0) * _PCM16_FULL_SCALE)
        codes = np.clip(codes, -32768, 32767).astype("<i2")
        payload = codes.tobytes()
        tag, bits = _WAVE_FORMAT_PCM, 16
    else:
        raise ValueError(f"unknown encoding {encoding!r} (use 'float32' or 'pcm16')")

    block_align = channels * bits // 8
    fmt = struct.pack(
        "<HHIIHH", tag, channels, rate, rate * block_align, block_align, bits
    )
    chunks = [(b"fmt ", fmt)]
    if tag != _WAVE_FORMAT_PCM:
        chunks.append((b"fact", struct.pack("<I", n_frames)))
    chunks.append((b"data", payload))

    body = bytearray()
    for cid, chunk in chunks:
        body += cid + struct.pack("<I", len(chunk)) + chunk
        if len(chunk) & 1:
            body += b"\x00"

    try:
        with open(path, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE")
            fh.write(body)
    except OSError as exc:
        raise InputFormatError(f"cannot write {path}: {exc}") from exc


def load_mono(path) -> MonoSignal:
    """Load a WAV file and mix it down to mono."""
    return to_mono(load_wav(path))


# ---------------------------------------------------------------------------
# Primitive waveform operations


def to_mono(clip: AudioClip) -> MonoSignal:
    """Mix down to one channel by the unweighted per-sample channel mean."""
    return MonoSignal(samples=clip.samples.mean(axis=0), sample_rate=clip.sample_rate)


def shift(s: MonoSignal, lag: int) -> MonoSignal:
    """Shift a signal in time by a whole number of samples.

    Positive lag prepends that many zeros (delays the signal); negative
    lag drops the first ``|lag|`` samples. The length changes
    accordingly. A negative lag that would consume the entire signal
    raises DegenerateSignalError: it always indicates an upstream
    alignment bug rather than a meaningful request.
    """
    lag = int(lag)
    if lag == 0:
        return s
    if lag > 0:
        out = np.concatenate([np.zeros(lag), s.samples])
    else:
        if -lag >= len(s):
            raise DegenerateSignalError(
                f"shift by {lag} would empty a {len(s)}-sample signal"
            )
        out = s.samples[-lag:]
    return MonoSignal(samples=out, sample_rate=s.sample_rate)


def match_lengths(a: MonoSignal, b: MonoSignal) -> tuple[MonoSignal, MonoSignal]:
    """Zero-pad the shorter signal so both have the same length."""
    if a.sample_rate != b.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch: {a.sample_rate} vs {b.sample_rate}"
        )
    n = max(len(a), len(b))
    return _pad_to(a, n), _pad_to(b, n)


def _pad_to(s: MonoSignal, n: int) -> MonoSignal:
    if len(s) == n:
        return s
    out = np.concatenate([s.samples, np.zeros(n - len(s))])
    return MonoSignal(samples=out, sample_rate=s.sample_rate)


def scale(s: MonoSignal, alpha: float) -> MonoSignal:
    """Multiply every sample by alpha."""
    if not np.isfinite(alpha):
        raise ValueError(f"scale factor must be finite, got {alpha!r}")
    return MonoSignal(samples=s.samples * alpha, sample_rate=s.sample_rate)


def subtract(live: MonoSignal, rec: MonoSignal) -> MonoSignal:
    """Per-sample difference live - rec. Lengths and rates must match."""
    if live.sample_rate != rec.sample_rate:
        raise InputFormatError(
            f"sample-rate mismatch: {live.sample_rate} vs {rec.sample_rate}"
        )
    if len(live) != len(rec):
        raise InputFormatError(
            f"length mismatch: {len(live)} vs {len(rec)} samples "
            "(use match_lengths first)"
        )
    return MonoSignal(samples=live.samples - rec.samples, sample_rate=live.sample_rate)


def rms_dbfs(s: MonoSignal) -> float:
    """RMS level in dB relative to full scale; -inf for an all-zero signal."""
    if len(s) == 0:
        raise ValueError("rms_dbfs of an empty signal is undefined")
    mean_sq = float(np.mean(np.square(s.samples)))
    if mean_sq == 0.0:
        return float("-inf")
    return 10.0 * np.log10(mean_sq)
