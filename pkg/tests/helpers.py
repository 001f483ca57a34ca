"""Shared fixtures: reference constants, synthetic magnetization tables,
and analytic closed forms used as independent oracles."""

from __future__ import annotations

import math

import numpy as np

from dwkinematics import CurrentWaveform, MagTable, ModelConstants, TrackGeometry

# Ground-truth constants used across the calibration tests; velocities span
# roughly 7..455 m/s over J in [1e9, 1e11] A/m^2.
C_TRUE = (5.0, 2e-9, 1.5e-20, 1e-31)
D1_TRUE = 0.08
D2_TRUE = 2.5e-12


def reference_constants(**kwargs) -> ModelConstants:
    return ModelConstants(*C_TRUE, D1_TRUE, D2_TRUE, **kwargs)


def long_track() -> TrackGeometry:
    """Track long enough that calibration pulses never reach the ends."""
    return TrackGeometry(length=200e-6, width=100e-9, thickness=1.2e-9)


def short_track() -> TrackGeometry:
    return TrackGeometry(length=500e-9, width=100e-9, thickness=1.2e-9)


def random_constants(rng: np.random.Generator, **kwargs) -> ModelConstants:
    """Valid constants with positive cubic over the working J range."""
    return ModelConstants(
        c0=float(rng.uniform(0.0, 10.0)),
        c1=float(rng.uniform(1e-11, 1e-9)),
        c2=float(rng.uniform(0.0, 2e-20)),
        c3=float(rng.uniform(0.0, 2e-31)),
        d1=float(rng.uniform(0.02, 0.5)),
        d2=float(rng.uniform(0.0, 2e-13)),
        **kwargs,
    )


def analytic_pulse_state(
    mc: ModelConstants, j: float, t_on: float, t_off: float
) -> tuple[float, float]:
    """Closed-form (displacement_nm, velocity) after a pulse of t_on ns and
    t_off ns of decay, starting from rest. Independent composition used as
    an oracle against simulate()."""
    r = mc.d1 + mc.d2 * abs(j)
    sign = math.copysign(1.0, j) if j else 0.0
    a = sign * sum(
        k * abs(j) ** n for n, k in enumerate((mc.k0, mc.k1, mc.k2, mc.k3, mc.k4))
    )
    v_inf = a / r
    v_on = v_inf * (1.0 - math.exp(-r * t_on))
    x_on = v_inf * t_on - v_inf * (1.0 - math.exp(-r * t_on)) / r
    v_end = v_on * math.exp(-mc.d1 * t_off)
    x_end = x_on + v_on * (1.0 - math.exp(-mc.d1 * t_off)) / mc.d1
    return x_end, v_end


def tanh_mag_table(
    times_s: np.ndarray,
    positions_m: np.ndarray,
    n_cells: int = 120,
    spacing: float = 1e-9,
    wall_width: float = 5e-9,
    window_centered: bool = True,
) -> MagTable:
    """Synthetic magnetization window with a tanh wall.

    With ``window_centered`` the wall sits at the window center and the
    shift column carries the absolute motion (the centerWall convention);
    otherwise the wall moves within a fixed window and there is no shift.
    """
    cells = (np.arange(n_cells) + 0.5) * spacing
    if window_centered:
        center = 0.5 * n_cells * spacing
        profile = np.tanh((center - cells) / wall_width)
        mag = np.tile(profile, (len(times_s), 1))
        shift = positions_m - center
        return MagTable(times=times_s, mag=mag, spacing=spacing, shift=shift)
    mag = np.tanh((positions_m[:, None] - cells[None, :]) / wall_width)
    return MagTable(times=times_s, mag=mag, spacing=spacing, shift=None)


def table_txt_text(
    table: MagTable, speed: np.ndarray | None = None, delimiter: str = "\t"
) -> str:
    """Render a MagTable in the on-disk trajectory-table format (header
    line, time column, three unused columns, magnetization columns, then
    shift and speed columns)."""
    lines = ["# t (s)\tunused\tunused\tunused\t" + "mag...\tshift\tspeed"]
    speed = np.zeros(len(table.times)) if speed is None else speed
    for i, t in enumerate(table.times):
        cells = [repr(float(t)), "0", "0", "0"]
        cells += [repr(float(v)) for v in table.mag[i]]
        cells.append(repr(float(table.shift[i] if table.shift is not None else 0.0)))
        cells.append(repr(float(speed[i])))
        lines.append(delimiter.join(cells))
    return "\n".join(lines) + "\n"


def multi_pulse_workload(duration_ns: float, j_scale: float, n_pulses: int = 10) -> CurrentWaveform:
    """Alternating-sign pulses of varying width and amplitude."""
    widths = np.linspace(0.6, 1.4, n_pulses)
    widths *= duration_ns / (2.0 * widths.sum())
    segments = []
    for i, w in enumerate(widths):
        sign = 1 if i % 2 == 0 else -1
        level = j_scale * (0.4 + 0.6 * (i + 1) / n_pulses)
        segments.append((sign * level, float(w)))
        segments.append((0.0, float(w)))
    return CurrentWaveform.from_segments(segments)
