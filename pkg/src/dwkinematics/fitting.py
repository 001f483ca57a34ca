"""Calibration pipeline: trajectory tables in, fitted model constants out.

The pipeline mirrors the analysis applied to the reference micromagnetic
runs: extract the wall position from per-time magnetization profiles,
differentiate and smooth to get velocities, reduce each trial to a feature
triple (max velocity, rise time constant, post-drive drift distance), then
fit the terminal-velocity cubic and the damping rates per parameter corner.

Fits operate in (nm, ns, m/s) units, so the fitted drift constant carries
nm per (m/s), numerically ns.
"""

from __future__ import annotations

import dataclasses
import math
import os
import re
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from .constants import d1_from_drift, derive_k, ModelConstants
from .electrical import b_anis_from_ku
from .tables import CornerKey

DEFAULT_SPACING_M = 1e-9
DEFAULT_DIFF_LAG = 2
DEFAULT_SMOOTH_WINDOW = 150
DEFAULT_J_CAP = 4e10


class ExtractionError(ValueError):
    """Malformed trajectory table or degenerate profile."""


class FitError(RuntimeError):
    """Per-corner fit cannot proceed."""


@dataclasses.dataclass(frozen=True)
class MagTable:
    """Per-time normalized out-of-plane magnetization at uniformly spaced
    positions, plus the optional simulation-window shift column (m)."""

    times: np.ndarray
    mag: np.ndarray
    spacing: float = DEFAULT_SPACING_M
    shift: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.mag.ndim != 2 or len(self.times) != self.mag.shape[0]:
            raise ExtractionError("mag must be (n_times, n_cells)")
        if self.mag.shape[1] < 2:
            raise ExtractionError("need at least 2 position samples per row")
        if not self.spacing > 0:
            raise ExtractionError(f"spacing must be positive, got {self.spacing}")
        if np.max(np.abs(self.mag)) > 1.0 + 1e-6:
            raise ExtractionError("magnetization values must lie within [-1, 1]")
        if self.shift is not None and len(self.shift) != len(self.times):
            raise ExtractionError("shift column length mismatch")

    @classmethod
    def from_table_txt(
        cls,
        source,
        spacing: float = DEFAULT_SPACING_M,
        trailing_shift_speed: bool = True,
    ) -> "MagTable":
        """Parse a mumax-style table: header line, then numeric rows with
        column 1 the time (s), columns 2-4 ignored, then the magnetization
        columns. With ``trailing_shift_speed`` the last two columns are the
        window shift (m) and window speed and are split off accordingly.
        """
        if isinstance(source, (str, os.PathLike)):
            with open(source) as fh:
                text = fh.read()
            label = str(source)
        else:
            text = source.read()
            label = "<stream>"
        rows = []
        width = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            cells = re.split(r"[,\s]+", stripped)
            try:
                row = [float(c) for c in cells]
            except ValueError:
                if not rows and width is None:
                    continue  # non-numeric header line
                raise ExtractionError(f"{label}:{lineno}: non-numeric row") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ExtractionError(
                    f"{label}:{lineno}: expected {width} columns, got {len(row)}"
                )
            rows.append(row)
        if not rows:
            raise ExtractionError(f"{label}: no data rows")
        data = np.array(rows)
        n_meta = 4
        n_trailing = 2 if trailing_shift_speed else 0
        if data.shape[1] < n_meta + 2 + n_trailing:
            raise ExtractionError(f"{label}: too few columns ({data.shape[1]})")
        mag = data[:, n_meta : data.shape[1] - n_trailing]
        shift = data[:, -2] if trailing_shift_speed else None
        return cls(times=data[:, 0], mag=mag, spacing=spacing, shift=shift)


@dataclasses.dataclass(frozen=True)
class TrialMeta:
    """Stimulus parameters parsed from the trial filename tokens."""

    j: float
    run_time: float
    corner: CornerKey | None = None

    def __post_init__(self) -> None:
        if not self.j > 0:
            raise ValueError(f"J must be positive, got {self.j}")
        if not self.run_time > 0:
            raise ValueError(f"run time must be positive, got {self.run_time}")


@dataclasses.dataclass(frozen=True)
class TrialFeatures:
    """Per-trial reduction: drive density, max |velocity| during the pulse,
    velocity rise time constant, and post-pulse drift distance (SI units)."""

    j: float
    max_vel: float
    time_constant: float
    drift_dist: float

    def __post_init__(self) -> None:
        for name in ("j", "max_vel", "time_constant", "drift_dist"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclasses.dataclass(frozen=True)
class FitDiagnostics:
    n_trials: int
    n_used: int
    dropped_above_cap: int
    truncated_at: int | None
    cubic_residual_rms: float
    drift_residual_rms: float
    d2_residual_rms: float
    d2_clamped: bool


@dataclasses.dataclass(frozen=True)
class FittedCorner:
    """Fitted constants for one parameter corner."""

    corner: CornerKey | None
    c0: float
    c1: float
    c2: float
    c3: float
    drift_const: float
    d2: float
    diagnostics: FitDiagnostics

    def __post_init__(self) -> None:
        if not self.drift_const > 0:
            raise ValueError(f"drift_const must be positive, got {self.drift_const}")
        if self.d2 < 0:
            raise ValueError(f"d2 must be nonnegative, got {self.d2}")

    @property
    def d1(self) -> float:
        return d1_from_drift(self.drift_const)

    @property
    def k(self) -> tuple[float, float, float, float, float]:
        return derive_k(self.c0, self.c1, self.c2, self.c3, self.d1, self.d2)

    def to_model_constants(
        self, p1: float = 0.0, p2: float = 0.0, c_r: float = 0.25
    ) -> ModelConstants:
        return ModelConstants(
            self.c0, self.c1, self.c2, self.c3, self.d1, self.d2, p1=p1, p2=p2, c_r=c_r
        )


# ---------------------------------------------------------------------------
# Filename token convention


_TOKEN_RE = re.compile(r"(?:^|_)([A-Za-z0-9]+)=([^_]+)")


def parse_filename_tokens(name: str) -> dict[str, str]:
    """Underscore-separated key=value tokens, order-free."""
    stem = Path(name).name
    for suffix in (".out", ".mx3", ".txt", ".csv", ".mat"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    return {k: v for k, v in _TOKEN_RE.findall(stem)}


def trial_meta_from_filename(name: str) -> TrialMeta:
    """Build TrialMeta from the J=/RT= tokens; the corner key is filled in
    when the Aex/Ku/A/Msat/W tokens are all present (width token in m)."""
    tokens = parse_filename_tokens(name)
    try:
        j = float(tokens["J"])
        rt = float(tokens["RT"])
    except KeyError as missing:
        raise ValueError(f"{name}: missing filename token {missing}") from None
    corner = None
    if all(t in tokens for t in ("Aex", "Ku", "A", "Msat", "W")):
        msat = float(tokens["Msat"])
        corner = CornerKey(
            aex=float(tokens["Aex"]) * 1e12,
            b_anis=b_anis_from_ku(float(tokens["Ku"]), msat),
            alpha=float(tokens["A"]),
            msat=msat,
            width=float(tokens["W"]) * 1e9,
        )
    return TrialMeta(j=j, run_time=rt, corner=corner)


# ---------------------------------------------------------------------------
# Motion extraction


def extract_position(table: MagTable, rezero: bool = True) -> np.ndarray:
    """Wall position (m) per time step.

    The discrete spatial derivative of each profile (one-cell backward
    difference, with a saturated +1 boundary cell on the left) localizes the
    wall; its centroid, indexed at cell midpoints, gives the position. The
    window shift column is added when present. With ``rezero`` the first
    raw centroid is subtracted, making the output a displacement record.
    """
    left = np.concatenate([np.ones((table.mag.shape[0], 1)), table.mag[:, :-1]], axis=1)
    d_diff = left - table.mag
    sums = d_diff.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums) < 1e-9)
    if bad.size:
        raise ExtractionError(f"row {bad[0]}: profile has no wall (flat derivative)")
    idx = np.arange(table.mag.shape[1]) - 0.5  # derivative lives between cells
    centroid = (d_diff * idx).sum(axis=1) / sums * table.spacing
    pos = centroid.copy()
    if table.shift is not None:
        pos += table.shift
    if rezero:
        pos -= centroid[0]
    return pos


def gaussian_smooth(values: np.ndarray, window: int) -> np.ndarray:
    """Gaussian-kernel moving average over ``window`` samples (sigma =
    window/5), renormalized at the edges; NaN entries are ignored."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window == 1:
        return np.asarray(values, dtype=float).copy()
    half = window // 2
    kk = np.arange(-half, half + 1)
    kernel = np.exp(-0.5 * (kk / (window / 5.0)) ** 2)
    valid = np.isfinite(values)
    filled = np.where(valid, values, 0.0)
    num = np.convolve(filled, kernel, mode="same")
    den = np.convolve(valid.astype(float), kernel, mode="same")
    with np.errstate(invalid="ignore"):
        return num / den


def extract_velocity(
    positions: np.ndarray,
    times: np.ndarray,
    diff_lag: int = DEFAULT_DIFF_LAG,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
) -> np.ndarray:
    """Smoothed wall velocity (m/s) from positions (m) and times (s).

    Lagged finite difference (x_i - x_{i-lag}) / (t_i - t_{i-lag}); the
    first ``diff_lag`` samples are invalid and enter the smoother as gaps.
    """
    if diff_lag < 1:
        raise ValueError(f"diff_lag must be >= 1, got {diff_lag}")
    if len(positions) <= diff_lag:
        raise ExtractionError(
            f"need more than {diff_lag} samples, got {len(positions)}"
        )
    v = np.full(len(positions), np.nan)
    v[diff_lag:] = (positions[diff_lag:] - positions[:-diff_lag]) / (
        times[diff_lag:] - times[:-diff_lag]
    )
    return gaussian_smooth(v, smooth_window)


def extract_features(
    positions: np.ndarray,
    velocities: np.ndarray,
    times: np.ndarray,
    meta: TrialMeta,
) -> TrialFeatures:
    """Reduce one trial to (max_vel, time_constant, drift_dist).

    ``current_end`` is the first sample past the stimulus; max velocity is
    taken over the pulse, the time constant is the first time the velocity
    comes within max_vel/e of its end-of-pulse value, and the drift distance
    is the travel between current_end and the trajectory end.
    """
    tau = meta.run_time
    if times[-1] <= tau:
        raise ExtractionError("trajectory ends during the stimulus")
    current_end = int(np.argmax(times > tau))
    if current_end < 1:
        raise ExtractionError("no samples within the stimulus window")
    pulse_v = velocities[:current_end]
    max_vel = float(np.nanmax(np.abs(pulse_v)))
    if max_vel == 0.0:
        raise ExtractionError("no motion during stimulus; cannot extract features")
    v_end_pulse = velocities[current_end - 1]
    with np.errstate(invalid="ignore"):
        hits = np.flatnonzero(np.abs(velocities - v_end_pulse) < max_vel / math.e)
    if hits.size == 0:
        raise ExtractionError("no sample satisfies the time-constant criterion")
    time_constant = float(times[hits[0]])
    drift_dist = float(abs(positions[-1] - positions[current_end]))
    if abs(velocities[-1]) > 0.01 * max_vel:
        warnings.warn("wall not stopped by the end of the trace", stacklevel=2)
    return TrialFeatures(meta.j, max_vel, time_constant, drift_dist)


def analyze_table(
    table: MagTable,
    meta: TrialMeta,
    diff_lag: int = DEFAULT_DIFF_LAG,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
) -> tuple[np.ndarray, np.ndarray, TrialFeatures]:
    """Full per-trial extraction: positions, smoothed velocities, features."""
    pos = extract_position(table)
    vel = extract_velocity(pos, table.times, diff_lag, smooth_window)
    feats = extract_features(pos, vel, table.times, meta)
    return pos, vel, feats


# ---------------------------------------------------------------------------
# Per-corner fit


def fit_corner(
    features: Sequence[TrialFeatures],
    corner: CornerKey | None = None,
    j_cap: float = DEFAULT_J_CAP,
) -> FittedCorner:
    """Fit (c0..c3, drift_const, d2) to one corner's trial features.

    Trials at or above ``j_cap`` are dropped, and if the largest max
    velocity occurs at an interior trial everything past it is truncated.
    The cubic is a weighted least squares on J normalized to the smallest
    kept J (weights max_vel^-2); the drift constant is a weighted
    no-intercept line of drift (nm) on max_vel (weights drift^-1); d2 is an
    ordinary no-intercept fit of (1/time_constant - d1) on J, clamped at 0.
    """
    feats = sorted(features, key=lambda f: f.j)
    n_input = len(feats)
    kept = [f for f in feats if f.j < j_cap]
    dropped = n_input - len(kept)

    j = np.array([f.j for f in kept])
    max_vel = np.array([f.max_vel for f in kept])
    tc_ns = np.array([f.time_constant for f in kept]) * 1e9
    drift_nm = np.array([f.drift_dist for f in kept]) * 1e9

    truncated_at = None
    if len(kept) and np.argmax(max_vel) != len(kept) - 1:
        truncated_at = int(np.argmax(max_vel))
        keep = truncated_at + 1
        j, max_vel, tc_ns, drift_nm = j[:keep], max_vel[:keep], tc_ns[:keep], drift_nm[:keep]

    if len(j) < 4:
        raise FitError(f"need at least 4 usable trials, have {len(j)}")
    if len(np.unique(j)) < 4:
        raise FitError("need at least 4 distinct J values")
    if np.any(max_vel <= 0) or np.any(drift_nm <= 0) or np.any(tc_ns <= 0):
        raise FitError("features must be positive for the weighted fits")

    # weighted cubic of max_vel on normalized J; weights favor low-J points
    j_norm = j / j[0]
    design = np.vstack([j_norm**3, j_norm**2, j_norm, np.ones_like(j_norm)]).T
    sqrt_w = 1.0 / max_vel
    coef, residuals, rank, _ = np.linalg.lstsq(
        design * sqrt_w[:, None], max_vel * sqrt_w, rcond=None
    )
    if rank < 4:
        raise FitError("singular cubic design matrix")
    c3 = coef[0] / j[0] ** 3
    c2 = coef[1] / j[0] ** 2
    c1 = coef[2] / j[0]
    c0 = coef[3]
    cubic_rms = float(np.sqrt(np.mean((design @ coef - max_vel) ** 2)))

    # drift(nm) = drift_const * max_vel, no intercept, weights drift^-1
    w = 1.0 / drift_nm
    denom = np.sum(w * max_vel * max_vel)
    if denom <= 0:
        raise FitError("degenerate drift fit")
    drift_const = float(np.sum(w * max_vel * drift_nm) / denom)
    if drift_const <= 0:
        raise FitError(f"non-positive drift constant {drift_const}")
    d1 = 1.0 / drift_const
    drift_rms = float(np.sqrt(np.mean((drift_const * max_vel - drift_nm) ** 2)))

    # d2 from 1/tc = d1 + d2*J
    y = 1.0 / tc_ns - d1
    d2 = float(np.sum(j * y) / np.sum(j * j))
    clamped = d2 < 0
    if clamped:
        d2 = 0.0
    d2_rms = float(np.sqrt(np.mean((d1 + d2 * j - 1.0 / tc_ns) ** 2)))

    diag = FitDiagnostics(
        n_trials=n_input,
        n_used=len(j),
        dropped_above_cap=dropped,
        truncated_at=truncated_at,
        cubic_residual_rms=cubic_rms,
        drift_residual_rms=drift_rms,
        d2_residual_rms=d2_rms,
        d2_clamped=clamped,
    )
    return FittedCorner(corner, float(c0), float(c1), float(c2), float(c3), drift_const, d2, diag)
