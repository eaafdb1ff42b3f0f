"""Contract tests for the adapter: file layout, exit codes, flags.

Everything except the final conformance test runs without the model
stack installed; conformance skips itself when demucs is unavailable.
"""

import importlib.util
import subprocess
import sys

import numpy as np
import pytest

from demucs_adapter import (
    ACCOMPANIMENT_FILENAME,
    EXIT_INPUT,
    EXIT_MODEL,
    VOCALS_FILENAME,
    AdapterConfig,
    read_wav,
    run_adapter,
    write_wav,
)
from demucs_adapter.cli import build_parser, config_from_args, main

DEMUCS_AVAILABLE = importlib.util.find_spec("demucs") is not None


def two_tone_mix(tmp_path, rate=44100, seconds=3):
    """A stereo mix of two tones; cheap stand-in for a real song."""
    t = np.arange(int(seconds * rate)) / rate
    left = 0.4 * np.sin(2 * np.pi * 220.0 * t) + 0.2 * np.sin(2 * np.pi * 880.0 * t)
    right = 0.4 * np.sin(2 * np.pi * 220.0 * t) + 0.2 * np.sin(2 * np.pi * 659.0 * t)
    path = tmp_path / "mix.wav"
    write_wav(path, np.stack([left, right]).astype(np.float32), rate)
    return path


# ---------------------------------------------------------------------------
# config


def test_config_defaults():
    config = AdapterConfig()
    assert config.model_name == "htdemucs"
    assert config.device == "cpu"
    assert config.two_stem is True


def test_config_rejects_empty_model_name():
    with pytest.raises(ValueError, match="model_name"):
        AdapterConfig(model_name="")
    with pytest.raises(ValueError, match="model_name"):
        AdapterConfig(model_name="   ")


def test_config_rejects_unknown_device():
    with pytest.raises(ValueError, match="device"):
        AdapterConfig(device="tpu")


# ---------------------------------------------------------------------------
# failure contract (model not needed)


def test_missing_input_exits_nonzero_and_writes_nothing(tmp_path, capsys):
    outdir = tmp_path / "out"
    code = run_adapter(tmp_path / "ghost.wav", outdir, AdapterConfig())
    assert code == EXIT_INPUT
    assert "does not exist" in capsys.readouterr().err
    assert not outdir.exists() or list(outdir.iterdir()) == []


def test_unreadable_input_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"this is not audio")
    code = run_adapter(bad, tmp_path / "out", AdapterConfig())
    assert code == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_outdir_collision_with_file_exits_nonzero(tmp_path, capsys):
    mix = two_tone_mix(tmp_path)
    blocker = tmp_path / "blocker"
    blocker.write_text("occupied")
    code = run_adapter(mix, blocker, AdapterConfig())
    assert code == EXIT_INPUT
    assert "cannot create" in capsys.readouterr().err


def test_failed_run_leaves_no_stray_files(tmp_path):
    before = set(tmp_path.iterdir())
    run_adapter(tmp_path / "ghost.wav", tmp_path / "out", AdapterConfig())
    after = set(tmp_path.iterdir()) - {tmp_path / "out"}
    assert after == before


@pytest.mark.skipif(DEMUCS_AVAILABLE, reason="model stack is installed")
def test_without_model_stack_valid_input_exits_3(tmp_path, capsys):
    mix = two_tone_mix(tmp_path)
    code = run_adapter(mix, tmp_path / "out", AdapterConfig())
    assert code == EXIT_MODEL
    err = capsys.readouterr().err
    assert "not installed" in err
    assert list((tmp_path / "out").iterdir()) == []


# ---------------------------------------------------------------------------
# CLI surface


def test_cli_flags_map_to_config():
    args = build_parser().parse_args(
        ["in.wav", "out", "--model", "htdemucs_ft", "--device", "cpu", "--four-stem"]
    )
    config = config_from_args(args)
    assert config.model_name == "htdemucs_ft"
    assert config.two_stem is False


def test_cli_default_is_two_stem():
    args = build_parser().parse_args(["in.wav", "out"])
    assert config_from_args(args).two_stem is True


def test_cli_missing_input_exit_code(tmp_path, capsys):
    assert main([str(tmp_path / "nope.wav"), str(tmp_path / "out")]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_cli_rejects_blank_model_name(tmp_path, capsys):
    code = main([str(tmp_path / "x.wav"), str(tmp_path / "out"), "--model", " "])
    assert code == 2
    assert "model_name" in capsys.readouterr().err


def test_console_script_help_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "demucs_adapter.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "vocals.wav" in proc.stdout


# ---------------------------------------------------------------------------
# conformance (needs the model)


@pytest.mark.skipif(not DEMUCS_AVAILABLE, reason="demucs not installed")
def test_separated_stems_reconstruct_the_mix(tmp_path, capsys):
    mix_path = two_tone_mix(tmp_path, rate=44100, seconds=3)
    outdir = tmp_path / "stems"
    code = run_adapter(mix_path, outdir, AdapterConfig())
    assert code == 0
    names = sorted(p.name for p in outdir.iterdir())
    assert names == [ACCOMPANIMENT_FILENAME, VOCALS_FILENAME]

    mix, mix_rate = read_wav(mix_path)
    vocals, v_rate = read_wav(outdir / VOCALS_FILENAME)
    accomp, a_rate = read_wav(outdir / ACCOMPANIMENT_FILENAME)
    assert v_rate == mix_rate
    assert a_rate == mix_rate

    mono_mix = mix.mean(axis=0)
    n = min(mono_mix.shape[0], vocals.shape[1], accomp.shape[1])
    mono_sum = (vocals.mean(axis=0) + accomp.mean(axis=0))[:n]
    corr = np.corrcoef(mono_mix[:n], mono_sum)[0, 1]
    assert corr > 0.95

    # the model's defaults must be on record
    assert "samplerate" in capsys.readouterr().err
