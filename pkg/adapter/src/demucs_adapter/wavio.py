"""Minimal WAV reading and writing for the adapter.

Supports the two encodings that actually occur on this boundary:
16-bit integer PCM and 32-bit float. Arrays are float32 with shape
(channels, samples) throughout.
"""

import struct

import numpy as np


class WavFormatError(Exception):
    """The file is not a WAV this adapter can process."""


_PCM = 1
_FLOAT = 3
_EXTENSIBLE = 0xFFFE


def read_wav(path):
    """Return (samples, rate) where samples is float32 (channels, n)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise WavFormatError(f"{path}: truncated {chunk_id!r} chunk")
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)

    if fmt is None or payload is None:
        raise WavFormatError(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise WavFormatError(f"{path}: fmt chunk too short")
    tag, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if tag == _EXTENSIBLE and len(fmt) >= 26:
        (tag,) = struct.unpack_from("<H", fmt, 24)
    if channels < 1:
        raise WavFormatError(f"{path}: no channels")

    if tag == _PCM and bits == 16:
        flat = np.frombuffer(payload, dtype="<i2").astype(np.float32) / 32768.0
    elif tag == _FLOAT and bits == 32:
        flat = np.frombuffer(payload, dtype="<f4").astype(np.float32)
    else:
        raise WavFormatError(
            f"{path}: unsupported encoding (format tag {tag}, {bits} bits); "
            "expected 16-bit PCM or 32-bit float"
        )
    frames = len(flat) // channels
    if frames == 0:
        raise WavFormatError(f"{path}: no samples")
    samples = flat[: frames * channels].reshape(frames, channels).T
    return np.ascontiguousarray(samples), int(rate)


def write_wav(path, samples, rate):
    """Write float32 (channels, n) samples as a 32-bit float WAV."""
    samples = np.asarray(samples, dtype=np.float32)
    if samples.ndim == 1:
        samples = samples[np.newaxis, :]
    channels, frames = samples.shape
    payload = np.ascontiguousarray(samples.T).reshape(-1).tobytes()
    block = channels * 4
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 4 + 8 + 16 + 8 + 4 + 8 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack("<IHHIIHH", 16, _FLOAT, channels, rate, rate * block, block, 32),
            b"fact",
            struct.pack("<II", 4, frames),
            b"data",
            struct.pack("<I", len(payload)),
        ]
    )
    with open(path, "wb") as fh:
        fh.write(header + payload)
