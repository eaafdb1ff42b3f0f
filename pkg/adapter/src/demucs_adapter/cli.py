"""Console entry point: demucs-adapter INPUT OUTDIR [flags]."""

import argparse
import sys

from .core import DEFAULT_MODEL_NAME, DEVICES, AdapterConfig, run_adapter


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demucs-adapter",
        description="Separate a recording into vocals.wav and "
        "accompaniment.wav using a pretrained Demucs model.",
    )
    parser.add_argument("input", help="recording to separate (WAV)")
    parser.add_argument("outdir", help="directory that receives the two stem files")
    parser.add_argument(
        "--model", default=DEFAULT_MODEL_NAME, help="pretrained model name"
    )
    parser.add_argument("--device", default="cpu", choices=DEVICES)
    parser.add_argument(
        "--four-stem",
        action="store_true",
        help="sum all non-vocal stems instead of using the two-stem split",
    )
    return parser


def config_from_args(args) -> AdapterConfig:
    return AdapterConfig(
        model_name=args.model, device=args.device, two_stem=not args.four_stem
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run_adapter(args.input, args.outdir, config)


if __name__ == "__main__":
    sys.exit(main())
