"""Live-vocal extraction by playback cancellation.

Given a studio track and a recording of a live performance that played
that track underneath the singer, this package aligns the two, matches
their levels, and subtracts the playback, leaving the performer's
actual voice. The building blocks (GCC-PHAT lag estimation, framewise
Pearson gain matching, sample-exact WAV handling) are usable on their
own; ``extract_live_vocals`` chains them end to end.
"""

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
    gcc_phat,
    gcc_phat_naive,
)
from .audio import (
    AudioClip,
    MonoSignal,
    load_mono,
    load_wav,
    match_lengths,
    rms_dbfs,
    scale,
    seconds_to_samples,
    shift,
    subtract,
    to_mono,
    write_wav,
)
from .errors import (
    DegenerateSignalError,
    InputFormatError,
    LivevoxError,
    SeparatorError,
)
from .gain import (
    FrameCorrelation,
    ScaleEstimate,
    best_frame,
    estimate_scale,
    estimate_scale_with_frames,
    framewise_pearson,
    least_squares_scale,
    periodic_hann,
)
from .harness import (
    LIVE_MIX_FILENAME,
    LIVE_STEMS_DIRNAME,
    SPEC_FILENAME,
    STUDIO_MIX_FILENAME,
    STUDIO_STEMS_DIRNAME,
    TRUTH_FILENAME,
    FixtureBundle,
    FixtureSpec,
    Scorecard,
    generate_fixture,
    load_bundle,
    parse_spec_file,
    score_extraction,
    snr_db,
    write_spec_file,
)
from .pipeline import (
    LAG_DISPERSION_WARN_SAMPLES,
    ExtractionReport,
    PipelineConfig,
    extract_live_vocals,
    read_report,
    report_from_dict,
    report_to_dict,
    write_report,
)
from .separation import (
    ACCOMPANIMENT_FILENAME,
    EXTERNAL_COMMAND,
    PRE_SEPARATED,
    VOCALS_FILENAME,
    SeparatorSpec,
    StemPair,
    separate,
)

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "MonoSignal",
    "load_wav",
    "load_mono",
    "write_wav",
    "to_mono",
    "shift",
    "match_lengths",
    "scale",
    "subtract",
    "rms_dbfs",
    "seconds_to_samples",
    "LagEstimate",
    "FrameLagVote",
    "gcc_phat",
    "gcc_phat_naive",
    "coarse_align",
    "framewise_fine_lag",
    "DEFAULT_FRAME_SECONDS",
    "DEFAULT_HOP_SECONDS",
    "DEFAULT_FINE_MAX_SHIFT_SECONDS",
    "DEFAULT_COARSE_MAX_LAG_SECONDS",
    "DEFAULT_SILENCE_FLOOR_DBFS",
    "FrameCorrelation",
    "ScaleEstimate",
    "periodic_hann",
    "framewise_pearson",
    "best_frame",
    "least_squares_scale",
    "estimate_scale",
    "estimate_scale_with_frames",
    "StemPair",
    "SeparatorSpec",
    "separate",
    "EXTERNAL_COMMAND",
    "PRE_SEPARATED",
    "VOCALS_FILENAME",
    "ACCOMPANIMENT_FILENAME",
    "PipelineConfig",
    "ExtractionReport",
    "extract_live_vocals",
    "write_report",
    "read_report",
    "report_to_dict",
    "report_from_dict",
    "LAG_DISPERSION_WARN_SAMPLES",
    "FixtureSpec",
    "FixtureBundle",
    "Scorecard",
    "generate_fixture",
    "load_bundle",
    "snr_db",
    "score_extraction",
    "parse_spec_file",
    "write_spec_file",
    "STUDIO_MIX_FILENAME",
    "LIVE_MIX_FILENAME",
    "STUDIO_STEMS_DIRNAME",
    "LIVE_STEMS_DIRNAME",
    "TRUTH_FILENAME",
    "SPEC_FILENAME",
    "LivevoxError",
    "InputFormatError",
    "SeparatorError",
    "DegenerateSignalError",
]
