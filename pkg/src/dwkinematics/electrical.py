"""Three-terminal electrical view of the wall device.

The track runs between ports P (left) and Q (right); the MTJ stack is read
out at port RA. The track splits into two resistors around a middle node,
and the MTJ resistance between the middle node and RA depends on the wall
position under the junction window [pdw_low, pdw_high]: low positions read
the parallel resistance, high positions the antiparallel one.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .constants import ModelConstants, TrackGeometry
from .dynamics import DwState, step_exact
from .waveform import Trajectory

# Special-cased anisotropy corners (J/m^3) -> effective anisotropy field (mT)
_B_ANIS_SENTINELS = {1.11e6: 350.0, 5.36e5: 350.0, 9.17e5: 20.0, 4.05e5: 20.0, 7.01e5: 150.0}

MU0 = 4e-7 * math.pi


def b_anis_from_ku(ku: float, msat: float) -> float:
    """Effective anisotropy field (mT) from Ku (J/m^3) and Msat (A/m).

    A handful of catalogued Ku corners map to fixed values (exact float
    comparison, matching the reference device model); anything else uses
    the demagnetization-corrected formula.
    """
    if ku in _B_ANIS_SENTINELS:
        return _B_ANIS_SENTINELS[ku]
    if not msat > 0:
        raise ValueError(f"msat must be positive, got {msat}")
    return (ku / (0.5 * msat) - MU0 * msat) * 1000.0


@dataclasses.dataclass(frozen=True)
class ElectricalParams:
    """Resistances, junction window, and current-conversion parameters.

    Defaults mirror the reference device model: 1 kOhm / 1 MOhm junction,
    3.9 kOhm track, 20..40 nm window, spin-Hall efficiency 0.05, and a
    1 nA motion threshold.
    """

    rp: float = 1e3
    rap: float = 1e6
    rtotal: float = 3.9e3
    pdw_low: float = 20e-9
    pdw_high: float = 40e-9
    theta_sh: float = 0.05
    area: float = 1.2e-9 * 100e-9
    i_th: float = 1e-9

    def __post_init__(self) -> None:
        if not 0 < self.rp <= self.rap:
            raise ValueError(f"need 0 < rp <= rap, got rp={self.rp}, rap={self.rap}")
        if not self.rtotal > 0:
            raise ValueError(f"rtotal must be positive, got {self.rtotal}")
        if not 0 <= self.pdw_low < self.pdw_high:
            raise ValueError(
                f"need 0 <= pdw_low < pdw_high, got {self.pdw_low}, {self.pdw_high}"
            )
        if not self.area > 0:
            raise ValueError(f"area must be positive, got {self.area}")
        if self.i_th < 0:
            raise ValueError(f"i_th must be nonnegative, got {self.i_th}")

    @classmethod
    def for_geometry(cls, geom: TrackGeometry, **kwargs) -> "ElectricalParams":
        return cls(area=geom.cross_section, **kwargs)


@dataclasses.dataclass(frozen=True)
class TerminalDrive:
    """Node voltages in V; None marks a high-impedance (floating) terminal."""

    v_p: float | None
    v_q: float | None
    v_ra: float | None = None

    def __post_init__(self) -> None:
        driven = [v for v in (self.v_p, self.v_q, self.v_ra) if v is not None]
        if len(driven) < 2:
            raise ValueError("at least two terminals must be driven")
        if any(not math.isfinite(v) for v in driven):
            raise ValueError("terminal voltages must be finite")


class NodeSolution(NamedTuple):
    i_pq: float
    i_mtj: float
    v_middle: float


def mtj_resistance_fractional(x_norm: float, rp: float, rap: float) -> float:
    """Junction resistance (Ohm) for a normalized wall position in [0, 1].

    Parallel combination of rp/x and rap/(1-x); x = 1 reads rp, x = 0 reads
    rap (endpoints returned exactly).
    """
    if not 0.0 <= x_norm <= 1.0:
        raise ValueError(f"x_norm must be within [0, 1], got {x_norm}")
    if x_norm == 0.0:
        return rap
    if x_norm == 1.0:
        return rp
    return rp * rap / (x_norm * rap + (1.0 - x_norm) * rp)


def mtj_resistance_windowed(
    x: float, ep: ElectricalParams, geom: TrackGeometry, rap_eq: float | None = None
) -> float:
    """Junction resistance (Ohm) for an absolute wall position x (m).

    Plateaus at rp below the window and rap above it, with the parallel
    interpolation in between (low position reads rp). ``rap_eq`` substitutes
    a voltage-scaled antiparallel resistance.
    """
    if not 0.0 <= x <= geom.length:
        raise ValueError(f"x={x} outside track [0, {geom.length}]")
    rap = ep.rap if rap_eq is None else rap_eq
    if x <= ep.pdw_low:
        return ep.rp
    if x >= ep.pdw_high:
        return rap
    span = ep.pdw_high - ep.pdw_low
    return (span * ep.rp * rap) / (ep.rp * (x - ep.pdw_low) + rap * (ep.pdw_high - x))


def rap_voltage_scaled(
    rap: float, v_mtj: float, factor: float = 1.0, min_fraction: float = 0.4
) -> float:
    """Optional linear voltage dependence of the antiparallel resistance,
    clamped below at ``min_fraction * rap``. Off by default in all drivers."""
    scaled = (1.0 - v_mtj * factor) * rap
    return max(scaled, min_fraction * rap)


def current_density(i_track: float, ep: ElectricalParams) -> float:
    """Track current (A) to effective drive current density (A/m^2);
    currents below the motion threshold produce no drive."""
    if abs(i_track) < ep.i_th:
        return 0.0
    return ep.theta_sh * (i_track / ep.area)


def track_split(
    ep: ElectricalParams,
    geom: TrackGeometry,
    x: float,
    split: Literal["verilog", "position"] = "verilog",
) -> tuple[float, float]:
    """Partition rtotal into (RL, RR) around the middle node.

    The default reproduces the reference model's fixed split, including its
    hard-coded 10 nm term; "position" divides the track proportionally to
    the wall position instead.
    """
    if split == "verilog":
        rr = (geom.length - ep.pdw_low - 10e-9) / geom.length * ep.rtotal
    elif split == "position":
        rr = (geom.length - x) / geom.length * ep.rtotal
    else:
        raise ValueError(f"unknown split {split!r}")
    rl = ep.rtotal - rr
    if rl <= 0 or rr <= 0:
        raise ValueError(f"degenerate track split rl={rl}, rr={rr}")
    return rl, rr


def solve_node(
    drive: TerminalDrive,
    x: float,
    ep: ElectricalParams,
    geom: TrackGeometry,
    split: Literal["verilog", "position"] = "verilog",
    rap_eq: float | None = None,
) -> NodeSolution:
    """Solve the static three-resistor star for the middle node.

    Returns the track current (the P-side branch while the wall sits left
    of the window center, the Q-side branch otherwise, both positive in the
    P->Q direction), the junction branch current (middle -> RA), and the
    middle-node voltage. Floating terminals carry no current.
    """
    rl, rr = track_split(ep, geom, x, split)
    req = mtj_resistance_windowed(x, ep, geom, rap_eq=rap_eq)
    if req <= 0:
        raise ValueError(f"degenerate junction resistance {req}")

    num = 0.0
    den = 0.0
    for v, res in ((drive.v_p, rl), (drive.v_q, rr), (drive.v_ra, req)):
        if v is not None:
            num += v / res
            den += 1.0 / res
    v_middle = num / den

    i_p = (drive.v_p - v_middle) / rl if drive.v_p is not None else 0.0
    i_q = (v_middle - drive.v_q) / rr if drive.v_q is not None else 0.0
    i_mtj = (v_middle - drive.v_ra) / req if drive.v_ra is not None else 0.0

    i_pq = i_p if x < 0.5 * (ep.pdw_low + ep.pdw_high) else i_q
    return NodeSolution(i_pq, i_mtj, v_middle)


@dataclasses.dataclass(frozen=True)
class DriveWaveform:
    """Piecewise-constant terminal drives: (t_start_ns, TerminalDrive)
    breakpoints plus a duration, mirroring CurrentWaveform's contract."""

    breakpoints: tuple[tuple[float, TerminalDrive], ...]
    duration: float

    def __post_init__(self) -> None:
        if not self.breakpoints:
            raise ValueError("drive waveform needs at least one breakpoint")
        times = [t for t, _ in self.breakpoints]
        if times[0] != 0.0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("breakpoint times must start at 0 and increase")
        if self.duration < times[-1] or self.duration <= 0:
            raise ValueError("bad duration")

    def segments(self):
        times = [t for t, _ in self.breakpoints] + [self.duration]
        for (t0, d), t1 in zip(self.breakpoints, times[1:]):
            if t1 > t0:
                yield t0, t1, d


@dataclasses.dataclass(frozen=True)
class ElectricalTrace:
    """Motion plus per-sample electrical observables of a driven device."""

    trajectory: Trajectory
    track_current: np.ndarray
    current_density: np.ndarray
    mtj_resistance: np.ndarray


def simulate_driven(
    drive: DriveWaveform,
    mc: ModelConstants,
    ep: ElectricalParams,
    geom: TrackGeometry,
    *,
    initial: DwState | None = None,
    dt: float = 0.01,
    split: Literal["verilog", "position"] = "verilog",
) -> ElectricalTrace:
    """Drive the device from its terminals: each dt ns step solves the node
    network at the current wall position, converts the track current to a
    drive density, and advances the wall with the exact integrator."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    state = DwState.at_rest(geom) if initial is None else initial
    times = [0.0]
    states = [state]
    currents = [0.0]
    densities = [0.0]
    resistances = [mtj_resistance_windowed(state.x, ep, geom)]

    for t0, t1, d in drive.segments():
        n = max(1, round((t1 - t0) / dt))
        h = (t1 - t0) / n
        for k in range(n):
            sol = solve_node(d, state.x, ep, geom, split=split)
            j = current_density(sol.i_pq, ep)
            state = step_exact(state, j, h, mc, geom)
            times.append(t0 + (k + 1) * h)
            states.append(state)
            currents.append(sol.i_pq)
            densities.append(j)
            resistances.append(mtj_resistance_windowed(state.x, ep, geom))

    times_arr = np.array(times)
    offsets = np.array([s.x for s in states]) - 0.5 * geom.length
    vels = np.array([s.v for s in states])
    traj = Trajectory(times_arr, offsets, vels, np.array(densities), geom.length)
    return ElectricalTrace(traj, np.array(currents), np.array(densities), np.array(resistances))
