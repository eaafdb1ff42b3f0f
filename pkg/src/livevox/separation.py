"""Separator contract and its two built-in implementations.

A separator turns one input recording into a vocal stem and an
accompaniment stem. The neural model that actually does this lives
behind a subprocess boundary: any command that, given an input file and
an output directory, writes ``vocals.wav`` and ``accompaniment.wav`` at
the input's sample rate and exits 0 satisfies the contract. Fixing the
two filenames keeps the core model-agnostic: a four-stem model's
adapter is responsible for collapsing its non-vocal stems into one
accompaniment file.

The second implementation loads pre-separated stems straight from a
directory, so the whole processing chain (and its test suite) runs with
no ML dependencies at all.
"""

from __future__ import annotations

import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .audio import MonoSignal, load_wav, match_lengths, to_mono
from .errors import InputFormatError, SeparatorError

VOCALS_FILENAME = "vocals.wav"
ACCOMPANIMENT_FILENAME = "accompaniment.wav"

DEFAULT_TIMEOUT_SECONDS = 600.0

EXTERNAL_COMMAND = "external_command"
PRE_SEPARATED = "pre_separated"


@dataclass(frozen=True)
class StemPair:
    """Vocal and accompaniment stems from one source recording."""

    vocals: MonoSignal
    accompaniment: MonoSignal
    source_label: str

    def __post_init__(self):
        if self.vocals.sample_rate != self.accompaniment.sample_rate:
            raise SeparatorError(
                f"stem sample-rate mismatch: vocals {self.vocals.sample_rate} Hz, "
                f"accompaniment {self.accompaniment.sample_rate} Hz"
            )
        if len(self.vocals) == 0 or len(self.accompaniment) == 0:
            raise SeparatorError("stems must be non-empty")


@dataclass(frozen=True)
class SeparatorSpec:
    """How to obtain stems for one input.

    ``external_command`` mode runs ``command_template`` with the
    ``{input}`` and ``{outdir}`` placeholders substituted;
    ``pre_separated`` mode reads vocals.wav and accompaniment.wav from
    ``stems_dir`` without running anything.
    """

    mode: str
    command_template: Optional[str] = None
    stems_dir: Optional[str] = None
    timeout: float = DEFAULT_TIMEOUT_SECONDS

    def __post_init__(self):
        if self.mode not in (EXTERNAL_COMMAND, PRE_SEPARATED):
            raise ValueError(f"unknown separator mode {self.mode!r}")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")
        if self.mode == EXTERNAL_COMMAND:
            if not self.command_template:
                raise ValueError("external_command mode requires command_template")
            for placeholder in ("{input}", "{outdir}"):
                count = self.command_template.count(placeholder)
                if count != 1:
                    raise ValueError(
                        f"command template must contain {placeholder} exactly once, "
                        f"found {count} in {self.command_template!r}"
                    )
        else:
            if not self.stems_dir:
                raise ValueError("pre_separated mode requires stems_dir")


def separate(spec: SeparatorSpec, input_path) -> StemPair:
    """Produce the stem pair for one input according to the spec.

    Both stems are converted to mono and zero-padded to equal length.
    The input file itself is never modified; in pre_separated mode it is
    not even read, only recorded as the pair's source label.
    """
    input_path = Path(input_path)
    if spec.mode == PRE_SEPARATED:
        stems_dir = Path(spec.stems_dir)
        vocals, accompaniment = _load_stem_files(stems_dir)
    else:
        vocals, accompaniment = _run_external(spec, input_path)
    vocals, accompaniment = match_lengths(vocals, accompaniment)
    return StemPair(
        vocals=vocals, accompaniment=accompaniment, source_label=str(input_path)
    )


def _load_stem_files(stems_dir: Path) -> tuple[MonoSignal, MonoSignal]:
    stems = []
    for name in (VOCALS_FILENAME, ACCOMPANIMENT_FILENAME):
        path = stems_dir / name
        if not path.is_file():
            raise SeparatorError(f"expected stem file missing: {path}")
        try:
            stems.append(to_mono(load_wav(path)))
        except InputFormatError as exc:
            raise SeparatorError(f"unreadable stem file {path}: {exc}") from exc
    vocals, accompaniment = stems
    if vocals.sample_rate != accompaniment.sample_rate:
        raise SeparatorError(
            f"stem sample-rate mismatch in {stems_dir}: vocals "
            f"{vocals.sample_rate} Hz, accompaniment {accompaniment.sample_rate} Hz"
        )
    return vocals, accompaniment


def _run_external(spec: SeparatorSpec, input_path: Path) -> tuple[MonoSignal, MonoSignal]:
    if not input_path.is_file():
        raise InputFormatError(f"separator input does not exist: {input_path}")
    outdir = Path(tempfile.mkdtemp(prefix="livevox-sep-"))
    argv = [
        token.replace("{input}", str(input_path)).replace("{outdir}", str(outdir))
        for token in shlex.split(spec.command_template)
    ]
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=spec.timeout
        )
    except subprocess.TimeoutExpired as exc:
        raise SeparatorError(
            f"separator timed out after {spec.timeout:g}s: {argv} "
            f"(partial output retained in {outdir})"
        ) from exc
    except OSError as exc:
        shutil.rmtree(outdir, ignore_errors=True)
        raise SeparatorError(f"separator could not be launched: {exc}") from exc

    if proc.returncode != 0:
        # keep outdir for debugging
        raise SeparatorError(
            f"separator exited {proc.returncode}: {argv}\n"
            f"stderr: {proc.stderr.strip()}\n"
            f"(output directory retained: {outdir})"
        )
    try:
        vocals, accompaniment = _load_stem_files(outdir)
    except SeparatorError as exc:
        raise SeparatorError(
            f"{exc}\nseparator stdout: {proc.stdout.strip()}\n"
            f"stderr: {proc.stderr.strip()}"
        ) from exc
    shutil.rmtree(outdir, ignore_errors=True)
    return vocals, accompaniment
