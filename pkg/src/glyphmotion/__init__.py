"""glyphmotion: stroke-to-motion engine and identification-experiment harness.

Pipeline: timed letter trajectories are conditioned (resampled, smoothed,
resized, re-paced), compiled into step/pen/dwell programs for a simulated
2-axis stage with a solenoid stylus, and presented to either a synthetic
DTW classifier or a live participant over HTTP, with confusion-matrix and
significance statistics over the results.
"""

from .compiler import (
    Command,
    CommandProgram,
    DeviceConfig,
    LimitReport,
    check_limits,
    compile_glyph,
    parse_program,
    program_duration,
    serialize_program,
)
from .errors import GlyphMotionError
from .experiment import (
    ConfusionMatrix,
    InteractiveParticipant,
    SessionConfig,
    SyntheticParticipant,
    TrialRecord,
    accuracy,
    build_session,
    confusion_from_csv,
    confusion_matrix,
    confusion_to_csv,
    most_confused_pairs,
    per_letter_accuracy,
    records_from_ndjson,
    records_to_ndjson,
    run_session,
)
from .fixture_font import fixture_font
from .preprocess import (
    PresentationCondition,
    SmoothingSpec,
    VelocityProfile,
    prepare_presentation,
    resample_uniform,
    scale_font_to_mean_height,
    scale_temporal,
    smooth_fir,
    velocity_profile,
)
from .recognizer import NoiseSpec, TemplateSet, add_noise, classify, dtw_distance
from .simulator import SimulatedTrace, TrackingError, execute, pen_transition_times, tracking_error
from .stats import (
    AnovaTable,
    StatsReport,
    f_cdf,
    joint_angular_velocity,
    letters_per_minute,
    paired_t_test,
    t_cdf,
    two_way_anova,
)
from .trajectory import (
    LETTERS,
    PEN_DOWN,
    PEN_UP,
    BoundingBox,
    Diagnostic,
    GlyphTrajectory,
    StrokeFont,
    TimedSample,
    bounding_box,
    font_mean_height,
    glyph_height,
    parse_font,
    parse_glyph,
    pen_down_path_length,
    serialize_font,
    serialize_glyph,
    validate_font,
    validate_glyph,
)

__version__ = "0.1.0"
