"""Command-line front ends.

Two console scripts are installed:

``livevox extract``
    runs the full extraction pipeline on a live/studio pair and writes
    the residual WAV, optionally with a JSON report of every
    intermediate decision.

``livevox-harness``
    generates synthetic ground-truth fixtures and scores extraction
    results against them.

Exit codes are part of the contract so scripts can branch on failure
class: 0 success, 2 input or format problem, 3 separator subprocess
failure, 4 degenerate signal (e.g. silence where audio was required).
"""

from __future__ import annotations

import argparse
import sys

from .audio import load_mono, write_wav
from .errors import DegenerateSignalError, InputFormatError, SeparatorError
from .harness import (
    generate_fixture,
    load_bundle,
    parse_spec_file,
    score_extraction,
)
from .pipeline import PipelineConfig, extract_live_vocals, write_report
from .separation import EXTERNAL_COMMAND, PRE_SEPARATED, SeparatorSpec

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SEPARATOR = 3
EXIT_DEGENERATE = 4


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _separator_for(stems_dir, command, which: str) -> SeparatorSpec:
    # a stems directory wins over a command template for that input
    if stems_dir:
        return SeparatorSpec(mode=PRE_SEPARATED, stems_dir=str(stems_dir))
    if command:
        return SeparatorSpec(mode=EXTERNAL_COMMAND, command_template=command)
    raise InputFormatError(
        f"no separator configured for the {which} input: "
        f"pass --{which}-stems or --separator-cmd"
    )


def _build_extract_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="livevox",
        description="Extract the live vocal from a performance recording "
        "by cancelling the studio playback out of it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    ex = sub.add_parser("extract", help="run the extraction pipeline")
    ex.add_argument("--live", required=True, help="live performance recording (WAV)")
    ex.add_argument("--studio", required=True, help="studio track (WAV)")
    ex.add_argument("--out", required=True, help="residual output path (WAV)")
    ex.add_argument("--report", help="also write a JSON report here")
    ex.add_argument(
        "--separator-cmd",
        help="separator command template with {input} and {outdir} placeholders",
    )
    ex.add_argument("--live-stems", help="pre-separated stems dir for the live input")
    ex.add_argument("--studio-stems", help="pre-separated stems dir for the studio input")
    ex.add_argument("--coarse-max-lag", type=float, default=20.0, metavar="SECONDS")
    ex.add_argument("--fine-max-shift", type=float, default=0.25, metavar="SECONDS")
    ex.add_argument("--frame", type=float, default=1.0, metavar="SECONDS")
    ex.add_argument("--hop", type=float, default=0.5, metavar="SECONDS")
    ex.add_argument("--silence-floor", type=float, default=-60.0, metavar="DBFS")
    ex.add_argument("--encoding", choices=("float32", "pcm16"), default="float32")
    return parser


def _run_extract(args) -> int:
    config = PipelineConfig(
        live_separator=_separator_for(args.live_stems, args.separator_cmd, "live"),
        studio_separator=_separator_for(args.studio_stems, args.separator_cmd, "studio"),
        coarse_max_lag_seconds=args.coarse_max_lag,
        fine_max_shift_seconds=args.fine_max_shift,
        frame_seconds=args.frame,
        hop_seconds=args.hop,
        silence_floor_dbfs=args.silence_floor,
        output_encoding=args.encoding,
    )
    residual, report = extract_live_vocals(args.live, args.studio, config)
    write_wav(residual, args.out, encoding=config.output_encoding)
    if args.report:
        write_report(report, args.report)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"coarse lag {report.coarse_lag.lag} samples, "
        f"scale {report.scale.alpha:.6f}, "
        f"fine lag {report.fine_lag} samples, "
        f"residual {report.residual_rms_dbfs:.1f} dBFS -> {args.out}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_extract_parser().parse_args(argv)
    try:
        if args.command == "extract":
            return _run_extract(args)
        raise InputFormatError(f"unknown command {args.command!r}")
    except InputFormatError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except SeparatorError as exc:
        return _fail(str(exc), EXIT_SEPARATOR)
    except DegenerateSignalError as exc:
        return _fail(str(exc), EXIT_DEGENERATE)
    except (ValueError, OSError) as exc:
        return _fail(str(exc), EXIT_INPUT)


def _build_harness_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="livevox-harness",
        description="Generate synthetic ground-truth fixtures and score "
        "extraction results against them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("generate", help="synthesize a fixture bundle")
    gen.add_argument("--spec", required=True, help="key=value fixture spec file")
    gen.add_argument("--out", required=True, help="directory to write the bundle into")
    sc = sub.add_parser("score", help="score a residual against a bundle")
    sc.add_argument("--bundle", required=True, help="fixture bundle directory")
    sc.add_argument("--residual", required=True, help="extracted residual (WAV)")
    sc.add_argument("--report", required=True, help="write the scorecard here")
    return parser


def _run_generate(args) -> int:
    spec = parse_spec_file(args.spec)
    bundle = generate_fixture(spec, args.out)
    print(f"fixture written to {bundle.studio_mix.parent}")
    return EXIT_OK


def _run_score(args) -> int:
    bundle = load_bundle(args.bundle)
    residual = load_mono(args.residual)
    card = score_extraction(bundle, residual)
    lines = [f"cancellation_db={card.cancellation_db!r}"]
    if card.live_vocal_snr_db is not None:
        lines.append(f"live_vocal_snr_db={card.live_vocal_snr_db!r}")
    text = "\n".join(lines) + "\n"
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(text, end="")
    return EXIT_OK


def harness_main(argv=None) -> int:
    args = _build_harness_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return _run_generate(args)
        if args.command == "score":
            return _run_score(args)
        raise InputFormatError(f"unknown command {args.command!r}")
    except InputFormatError as exc:
        return _fail(str(exc), EXIT_INPUT)
    except SeparatorError as exc:
        return _fail(str(exc), EXIT_SEPARATOR)
    except DegenerateSignalError as exc:
        return _fail(str(exc), EXIT_DEGENERATE)
    except (ValueError, OSError) as exc:
        return _fail(str(exc), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
