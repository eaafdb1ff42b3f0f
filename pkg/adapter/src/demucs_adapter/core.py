"""Run a pretrained Demucs model behind the separator file contract.

The contract: given an input recording and an output directory, leave
exactly two files behind, vocals.wav and accompaniment.wav, at the
input's sample rate, and exit 0. Any failure exits nonzero with a
message on stderr and writes nothing.

The model import happens late, after the input has been validated, so
a bad invocation fails fast with a useful message even on machines
without the model stack installed.

Exit codes: 0 success, 2 unusable input or output location, 3 model
unavailable or model failure.
"""

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .wavio import WavFormatError, read_wav, write_wav

VOCALS_FILENAME = "vocals.wav"
ACCOMPANIMENT_FILENAME = "accompaniment.wav"

DEFAULT_MODEL_NAME = "htdemucs"
DEVICES = ("cpu", "cuda")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODEL = 3


@dataclass(frozen=True)
class AdapterConfig:
    """Which model to run and how.

    two_stem follows the model's own vocals/rest split; four-stem mode
    (two_stem=False) sums every non-vocal stem instead, for model
    variants without a two-stem head. For the standard four-source
    models both routes produce the same accompaniment.
    """

    model_name: str = DEFAULT_MODEL_NAME
    device: str = "cpu"
    two_stem: bool = True

    def __post_init__(self):
        if not isinstance(self.model_name, str) or not self.model_name.strip():
            raise ValueError(f"model_name must be non-empty, got {self.model_name!r}")
        if self.device not in DEVICES:
            raise ValueError(f"device must be one of {DEVICES}, got {self.device!r}")


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def run_adapter(input_path, outdir, config: AdapterConfig) -> int:
    """Separate one recording into the two contract files. Returns an
    exit status rather than raising: this is a subprocess boundary."""
    input_path = Path(input_path)
    outdir = Path(outdir)

    if not input_path.is_file():
        return _fail(f"input does not exist: {input_path}", EXIT_INPUT)
    try:
        audio, rate = read_wav(input_path)
    except WavFormatError as exc:
        return _fail(str(exc), EXIT_INPUT)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return _fail(f"cannot create output directory {outdir}: {exc}", EXIT_INPUT)

    try:
        import torch
        from demucs.apply import apply_model
        from demucs.audio import convert_audio
        from demucs.pretrained import get_model
    except ImportError as exc:
        return _fail(
            f"the separation model stack is not installed ({exc}); "
            "install the 'model' extra (pip install 'demucs-adapter[model]')",
            EXIT_MODEL,
        )

    try:
        model = get_model(config.model_name)
    except Exception as exc:
        return _fail(f"cannot load model {config.model_name!r}: {exc}", EXIT_MODEL)
    if "vocals" not in model.sources:
        return _fail(
            f"model {config.model_name!r} has no vocals stem "
            f"(sources: {model.sources})",
            EXIT_MODEL,
        )

    # the run is only reproducible if the model's own defaults are known
    print(
        f"model {config.model_name}: sources={list(model.sources)}, "
        f"samplerate={model.samplerate}, audio_channels={model.audio_channels}, "
        f"device={config.device}, "
        f"mode={'two-stem' if config.two_stem else 'four-stem sum'}",
        file=sys.stderr,
    )

    try:
        model.to(config.device)
        model.eval()
        wav = convert_audio(
            torch.from_numpy(np.ascontiguousarray(audio)),
            rate,
            model.samplerate,
            model.audio_channels,
        )
        ref = wav.mean(0)
        normalized = (wav - ref.mean()) / (ref.std() + 1e-8)
        with torch.no_grad():
            sources = apply_model(
                model, normalized[None], device=config.device, progress=False
            )[0]
        sources = sources * (ref.std() + 1e-8) + ref.mean()

        vocals_index = model.sources.index("vocals")
        vocals = sources[vocals_index]
        rest = [s for i, s in enumerate(sources) if i != vocals_index]
        # two-stem: the model's complement of the vocals; four-stem
        # mode sums explicitly. For four-source models these coincide.
        accompaniment = sum(rest)

        out_channels = audio.shape[0]
        vocals = convert_audio(vocals, model.samplerate, rate, out_channels)
        accompaniment = convert_audio(accompaniment, model.samplerate, rate, out_channels)
    except Exception as exc:
        return _fail(f"separation failed: {exc}", EXIT_MODEL)

    write_wav(outdir / VOCALS_FILENAME, vocals.cpu().numpy(), rate)
    write_wav(outdir / ACCOMPANIMENT_FILENAME, accompaniment.cpu().numpy(), rate)
    return EXIT_OK
