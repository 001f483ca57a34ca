"""Reference wall-motion models, accuracy metrics, and the benchmark harness.

Three baseline families share the kinematic model's waveform/trajectory
contract so all models are interchangeable in comparisons:

* linear     v = mobility * J, no transient;
* inertial   first-order lag toward mobility * J with time constant tau;
* cc1d       two coupled ODEs in wall position and internal tilt angle with
             a sin(2*phi) internal torque, integrated with fixed-step RK4
             (fixed or tilt-dependent wall width, optional fitted drive and
             damping scale factors).

Baselines are calibrated against a kinematic constant set by matching its
terminal velocity at one reference drive, since that is the only like-for-
like anchor available.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import platform
import statistics
import sys
import time
from typing import Protocol, Sequence

import numpy as np

from .constants import ModelConstants, TrackGeometry
from .dynamics import terminal_velocity
from .waveform import (
    DEFAULT_SAMPLE_DT_NS,
    CurrentWaveform,
    Trajectory,
    simulate,
)


class MetricError(ValueError):
    """Error metrics cannot be computed for these inputs."""


class SimModel(Protocol):
    name: str

    def simulate(
        self, wf: CurrentWaveform, sample_dt: float, geom: TrackGeometry
    ) -> Trajectory: ...


@dataclasses.dataclass(frozen=True)
class KinematicModel:
    """Adapter giving the kinematic model the common baseline interface."""

    mc: ModelConstants
    integrator: str = "exact"
    name: str = "kinematic"

    def simulate(self, wf, sample_dt, geom):
        return simulate(wf, self.mc, geom, sample_dt=sample_dt, integrator=self.integrator)


@dataclasses.dataclass(frozen=True)
class LinearModel:
    """Velocity responds instantaneously: v = mobility * J."""

    mobility: float  # (m/s) per (A/m^2)
    name: str = "linear"

    def __post_init__(self) -> None:
        if not self.mobility > 0:
            raise ValueError(f"mobility must be positive, got {self.mobility}")

    @classmethod
    def from_kinematic(cls, mc: ModelConstants, j_ref: float) -> "LinearModel":
        v = terminal_velocity(j_ref, mc)
        if v is None or v == 0:
            raise ValueError("reference drive is pinned or produces no motion")
        return cls(mobility=v / j_ref)

    def simulate(self, wf, sample_dt, geom):
        times = _grid(wf.duration, sample_dt)
        vels = np.empty(len(times))
        offs = np.empty(len(times))
        u = 0.0  # nm from track center
        half_nm = geom.length * 1e9 * 0.5
        offs[0] = u
        vels[0] = 0.0
        filled = 1
        for t0, t1, j in wf.segments():
            v = self.mobility * j
            hi = int(np.searchsorted(times, t1, side="right"))
            rel = times[filled:hi] - t0
            offs[filled:hi] = u + v * rel
            vels[filled:hi] = v
            u = u + v * (t1 - t0)
            filled = hi
        offs = np.clip(offs, -half_nm, half_nm)
        currents = _currents(wf, times)
        return Trajectory(times, offs * 1e-9, vels, currents, geom.length)


@dataclasses.dataclass(frozen=True)
class InertialModel:
    """First-order lag: v' = (mobility*J - v) / tau."""

    mobility: float  # (m/s) per (A/m^2)
    tau: float  # ns
    name: str = "inertial"

    def __post_init__(self) -> None:
        if not (self.mobility > 0 and self.tau > 0):
            raise ValueError("mobility and tau must be positive")

    @classmethod
    def from_kinematic(cls, mc: ModelConstants, j_ref: float) -> "InertialModel":
        v = terminal_velocity(j_ref, mc)
        if v is None or v == 0:
            raise ValueError("reference drive is pinned or produces no motion")
        return cls(mobility=v / j_ref, tau=1.0 / (mc.d1 + mc.d2 * abs(j_ref)))

    def simulate(self, wf, sample_dt, geom):
        times = _grid(wf.duration, sample_dt)
        vels = np.empty(len(times))
        offs = np.empty(len(times))
        u, v = 0.0, 0.0
        half_nm = geom.length * 1e9 * 0.5
        r = 1.0 / self.tau
        offs[0] = u
        vels[0] = v
        filled = 1
        for t0, t1, j in wf.segments():
            v_inf = self.mobility * j
            hi = int(np.searchsorted(times, t1, side="right"))
            rel = times[filled:hi] - t0
            decay = np.exp(-r * rel)
            vels[filled:hi] = v_inf + (v - v_inf) * decay
            offs[filled:hi] = u + v_inf * rel + (v - v_inf) * (1.0 - decay) / r
            span = t1 - t0
            end = math.exp(-r * span)
            u = u + v_inf * span + (v - v_inf) * (1.0 - end) / r
            v = v_inf + (v - v_inf) * end
            filled = hi
        offs = np.clip(offs, -half_nm, half_nm)
        currents = _currents(wf, times)
        return Trajectory(times, offs * 1e-9, vels, currents, geom.length)


@dataclasses.dataclass(frozen=True)
class CC1DModel:
    """Collective-coordinate wall model in (position q, tilt phi).

        dphi/dt = [s_drive*eff*J - s_damp*alpha*hk_rate*sin(2 phi)] / (1+a^2)
        dq/dt   = delta(phi) * [hk_rate*sin(2 phi) + s_damp*alpha*s_drive*eff*J] / (1+a^2)

    with a = s_damp*alpha and delta(phi) = delta / sqrt(1 + kappa*sin^2 phi)
    when variable_width is on. Steady tilt below the Walker threshold gives
    v = delta * eff * J * s_drive / (s_damp*alpha); above it phi precesses
    and the velocity oscillates. Integrated with RK4 at the sample step.
    """

    delta: float  # wall width, nm
    alpha: float  # Gilbert damping
    hk_rate: float  # hard-axis anisotropy torque scale, 1/ns
    drive_eff: float  # (rad/ns) per (A/m^2)
    variable_width: bool = False
    kappa: float = 0.5
    s_drive: float = 1.0
    s_damp: float = 1.0
    name: str = "cc1d_fixed_width"

    def __post_init__(self) -> None:
        if not (self.delta > 0 and self.alpha > 0 and self.hk_rate > 0):
            raise ValueError("delta, alpha, hk_rate must be positive")
        if self.kappa < 0 or self.s_drive <= 0 or self.s_damp <= 0:
            raise ValueError("kappa must be >= 0 and scale factors positive")

    @classmethod
    def from_kinematic(
        cls,
        mc: ModelConstants,
        j_ref: float,
        j_max: float | None = None,
        delta: float = 10.0,
        alpha: float = 0.02,
        **kwargs,
    ) -> "CC1DModel":
        """Match the kinematic terminal velocity at j_ref; the Walker
        threshold is placed at twice j_max (default j_ref)."""
        v = terminal_velocity(j_ref, mc)
        if v is None or v == 0:
            raise ValueError("reference drive is pinned or produces no motion")
        mobility = abs(v / j_ref)  # nm/ns per (A/m^2)
        drive_eff = alpha * mobility / delta
        walker_j = 2.0 * abs(j_max if j_max is not None else j_ref)
        hk_rate = drive_eff * walker_j / alpha
        return cls(delta=delta, alpha=alpha, hk_rate=hk_rate, drive_eff=drive_eff, **kwargs)

    @property
    def walker_threshold(self) -> float:
        """Drive density at which steady tilt stops existing."""
        return self.s_damp * self.alpha * self.hk_rate / (self.s_drive * self.drive_eff)

    @property
    def trig_calls_per_step(self) -> int:
        """sin(2 phi) per stage, plus sin(phi) for the variable width."""
        return 4 * (2 if self.variable_width else 1)

    def _rhs(self, phi: float, j: float) -> tuple[float, float]:
        a = self.s_damp * self.alpha
        denom = 1.0 + a * a
        drive = self.s_drive * self.drive_eff * j
        s2 = math.sin(2.0 * phi)
        width = self.delta
        if self.variable_width:
            s = math.sin(phi)
            width = self.delta / math.sqrt(1.0 + self.kappa * s * s)
        dphi = (drive - a * self.hk_rate * s2) / denom
        dq = width * (self.hk_rate * s2 + a * drive) / denom
        return dq, dphi

    def simulate(self, wf, sample_dt, geom):
        times = _grid(wf.duration, sample_dt)
        n = len(times)
        offs = np.empty(n)
        vels = np.empty(n)
        q, phi = 0.0, 0.0
        half_nm = geom.length * 1e9 * 0.5
        dq0, _ = self._rhs(phi, wf.breakpoints[0][1])
        offs[0] = q
        vels[0] = dq0
        filled = 1
        for t0, t1, j in wf.segments():
            hi = int(np.searchsorted(times, t1, side="right"))
            prev_t = t0
            for i in range(filled, hi):
                q, phi = self._rk4(q, phi, j, times[i] - prev_t)
                prev_t = times[i]
                offs[i] = q
                vels[i] = self._rhs(phi, j)[0]
            if prev_t < t1:
                q, phi = self._rk4(q, phi, j, t1 - prev_t)
            filled = hi
        offs = np.clip(offs, -half_nm, half_nm)
        currents = _currents(wf, times)
        return Trajectory(times, offs * 1e-9, vels, currents, geom.length)

    def _rk4(self, q: float, phi: float, j: float, h: float) -> tuple[float, float]:
        k1q, k1p = self._rhs(phi, j)
        k2q, k2p = self._rhs(phi + 0.5 * h * k1p, j)
        k3q, k3p = self._rhs(phi + 0.5 * h * k2p, j)
        k4q, k4p = self._rhs(phi + h * k3p, j)
        q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
        phi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        return q, phi


def cc1d_variants(mc: ModelConstants, j_ref: float, **kwargs) -> list[CC1DModel]:
    """The three cc1d configurations used in comparisons."""
    base = CC1DModel.from_kinematic(mc, j_ref, **kwargs)
    return [
        base,
        dataclasses.replace(base, variable_width=True, name="cc1d_variable_width"),
        dataclasses.replace(base, s_drive=1.05, s_damp=0.95, name="cc1d_fitted"),
    ]


def simulate_baseline(
    model: SimModel, wf: CurrentWaveform, sample_dt: float, geom: TrackGeometry
) -> Trajectory:
    """Run any model against the common trajectory contract."""
    return model.simulate(wf, sample_dt, geom)


def _grid(duration: float, sample_dt: float) -> np.ndarray:
    n = int(math.floor(duration / sample_dt + 1e-9))
    times = np.arange(n + 1) * sample_dt
    if times[-1] < duration * (1.0 - 1e-12):
        times = np.append(times, duration)
    else:
        times[-1] = duration
    return times


def _currents(wf: CurrentWaveform, times: np.ndarray) -> np.ndarray:
    idx = np.clip(np.searchsorted(wf.start_times, times, side="right") - 1, 0, None)
    values = np.array([j for _, j in wf.breakpoints])
    return values[idx]


# ---------------------------------------------------------------------------
# Error metrics


@dataclasses.dataclass(frozen=True)
class ErrorReport:
    """Four-way accuracy summary of a candidate against a reference."""

    final_displacement_err: float
    max_velocity_err: float
    rms_rise: float
    rms_stop: float

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


def error_report(
    candidate: Trajectory, reference: Trajectory, pulse_end: float
) -> ErrorReport:
    """Relative final-displacement and max-velocity errors plus RMS position
    errors over the two transients: the rise (start to the reference's time
    of max velocity) and the stop (pulse end to the reference's settle time,
    where |v| first falls below 1% of its maximum)."""
    if len(candidate.times) != len(reference.times) or not np.allclose(
        candidate.times, reference.times
    ):
        candidate = candidate.resample(reference.times)
    t = reference.times
    if not t[0] <= pulse_end <= t[-1]:
        raise MetricError(f"pulse_end={pulse_end} outside trajectory span")

    x_c = candidate.positions
    x_r = reference.positions
    disp_r = float(x_r[-1] - x_r[0])
    if disp_r == 0.0:
        raise MetricError("reference trajectory has zero displacement")
    disp_c = float(x_c[-1] - x_c[0])
    final_err = abs(disp_c - disp_r) / abs(disp_r)

    pulse = t <= pulse_end
    vmax_r = float(np.max(np.abs(reference.velocities[pulse])))
    vmax_c = float(np.max(np.abs(candidate.velocities[pulse])))
    if vmax_r == 0.0:
        raise MetricError("reference reaches zero max velocity during the pulse")
    vmax_err = abs(vmax_c - vmax_r) / vmax_r

    t_vmax = t[pulse][int(np.argmax(np.abs(reference.velocities[pulse])))]
    rise = t <= t_vmax
    rms_rise = float(np.sqrt(np.mean((x_c[rise] - x_r[rise]) ** 2)))

    after = t >= pulse_end
    settled = after & (np.abs(reference.velocities) < 0.01 * vmax_r)
    t_settle = t[settled][0] if settled.any() else t[-1]
    stop = after & (t <= t_settle)
    rms_stop = float(np.sqrt(np.mean((x_c[stop] - x_r[stop]) ** 2)))

    return ErrorReport(final_err, vmax_err, rms_rise, rms_stop)


# ---------------------------------------------------------------------------
# Benchmark harness


@dataclasses.dataclass(frozen=True)
class BenchResult:
    model: str
    median_s: float
    min_s: float
    max_s: float
    seconds_per_sim_ns: float
    speedup: float
    deterministic: bool


@dataclasses.dataclass(frozen=True)
class BenchReport:
    results: tuple[BenchResult, ...]
    reference_model: str
    workload_hash: str
    simulated_ns: float
    sample_dt: float
    repetitions: int
    machine: dict

    def to_json(self, indent: int = 2) -> str:
        payload = {
            "results": [dataclasses.asdict(r) for r in self.results],
            "reference_model": self.reference_model,
            "workload_hash": self.workload_hash,
            "simulated_ns": self.simulated_ns,
            "sample_dt_ns": self.sample_dt,
            "repetitions": self.repetitions,
            "machine": self.machine,
            "note": "wall-clock ratios are machine-dependent; only relative "
            "ordering on this host is meaningful",
        }
        return json.dumps(payload, indent=indent)


def workload_hash(workload: Sequence[CurrentWaveform], sample_dt: float) -> str:
    h = hashlib.sha256()
    h.update(repr(sample_dt).encode())
    for wf in workload:
        h.update(repr((wf.breakpoints, wf.duration)).encode())
    return h.hexdigest()[:16]


def machine_metadata() -> dict:
    return {
        "cpu": platform.processor() or platform.machine(),
        "platform": platform.platform(),
        "python": sys.version.split()[0],
        "timer_resolution_s": time.get_clock_info("perf_counter").resolution,
    }


def bench(
    models: Sequence[SimModel],
    workload: Sequence[CurrentWaveform],
    geom: TrackGeometry,
    sample_dt: float = DEFAULT_SAMPLE_DT_NS,
    repetitions: int = 5,
    warmup: int = 1,
) -> BenchReport:
    """Time every model on the same workload, single-threaded, sequentially.

    Speedups are quoted against the slowest model in the set; trajectories
    must be bit-identical across repetitions (flagged per model).
    """
    if not workload:
        raise ValueError("empty workload")
    if not models:
        raise ValueError("no models to benchmark")
    total_ns = sum(wf.duration for wf in workload)

    timings: dict[str, list[float]] = {}
    deterministic: dict[str, bool] = {}
    for model in models:
        for _ in range(warmup):
            ref_trajs = [model.simulate(wf, sample_dt, geom) for wf in workload]
        times = []
        det = True
        for _ in range(repetitions):
            t0 = time.perf_counter()
            trajs = [model.simulate(wf, sample_dt, geom) for wf in workload]
            times.append(time.perf_counter() - t0)
            det = det and all(
                np.array_equal(a.offsets, b.offsets)
                and np.array_equal(a.velocities, b.velocities)
                for a, b in zip(trajs, ref_trajs)
            )
        timings[model.name] = times
        deterministic[model.name] = det

    medians = {name: statistics.median(ts) for name, ts in timings.items()}
    reference = max(medians, key=medians.get)
    results = tuple(
        BenchResult(
            model=name,
            median_s=medians[name],
            min_s=min(ts),
            max_s=max(ts),
            seconds_per_sim_ns=medians[name] / total_ns,
            speedup=medians[reference] / medians[name],
            deterministic=deterministic[name],
        )
        for name, ts in timings.items()
    )
    return BenchReport(
        results=results,
        reference_model=reference,
        workload_hash=workload_hash(workload, sample_dt),
        simulated_ns=total_ns,
        sample_dt=sample_dt,
        repetitions=repetitions,
        machine=machine_metadata(),
    )
