"""Fast kinematic simulation of magnetic domain-wall devices.

The wall is treated as a classical object: a polynomial current-induced
drive, velocity-proportional damping, optional static-friction-like
pinning, and track-end bounces. The package bundles the device dynamics,
an electrical DW-MTJ layer, the calibration pipeline that fits model
constants from micromagnetic or experimental trajectory tables, per-corner
lookup tables, and baseline models plus error metrics and a benchmark
harness for accuracy/speed comparisons.
"""

__version__ = "0.1.0"

from .constants import (
    DEFAULT_GEOMETRY,
    ModelConstants,
    TrackGeometry,
    d1_from_drift,
    derive_k,
)
from .dynamics import (
    DwState,
    accel_current,
    accel_damping,
    accel_pinning,
    apply_bounce,
    is_pinned,
    step_euler,
    step_exact,
    terminal_velocity,
    total_accel,
)
from .waveform import (
    DEFAULT_SAMPLE_DT_NS,
    CurrentWaveform,
    Trajectory,
    WaveformError,
    drift_distance,
    max_velocity,
    simulate,
    simulate_batch,
)
from .electrical import (
    DriveWaveform,
    ElectricalParams,
    ElectricalTrace,
    NodeSolution,
    TerminalDrive,
    b_anis_from_ku,
    current_density,
    mtj_resistance_fractional,
    mtj_resistance_windowed,
    rap_voltage_scaled,
    simulate_driven,
    solve_node,
    track_split,
)
from .fitting import (
    ExtractionError,
    FitDiagnostics,
    FitError,
    FittedCorner,
    MagTable,
    TrialFeatures,
    TrialMeta,
    analyze_table,
    extract_features,
    extract_position,
    extract_velocity,
    fit_corner,
    gaussian_smooth,
    parse_filename_tokens,
    trial_meta_from_filename,
)
from .tables import (
    CONSTANT_NAMES,
    ConstantTable,
    ConstantTableSet,
    CornerKey,
    CornerNotFoundError,
    GridError,
    LookupResult,
    TableFormatError,
    lookup_constants,
    read_tbl,
    write_tbl,
)
from .baselines import (
    BenchReport,
    BenchResult,
    CC1DModel,
    ErrorReport,
    InertialModel,
    KinematicModel,
    LinearModel,
    MetricError,
    bench,
    cc1d_variants,
    error_report,
    simulate_baseline,
)
