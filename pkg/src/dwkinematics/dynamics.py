"""Kinematic force model for a domain wall treated as a classical object.

The wall carries a single positional degree of freedom on a finite track.
Acceleration decomposes into a current-induced drive (odd quartic polynomial
of current density), viscous damping proportional to velocity, and an
optional static-friction-like pinning term. All accelerations are in
nm/ns^2; velocities in m/s (== nm/ns); positions in m; time steps in ns.
"""

from __future__ import annotations

import dataclasses
import math

from .constants import ModelConstants, TrackGeometry


@dataclasses.dataclass(frozen=True)
class DwState:
    """Instantaneous wall state: position x (m) and velocity v (m/s)."""

    x: float
    v: float

    @classmethod
    def at_rest(cls, geom: TrackGeometry, position: float | None = None) -> "DwState":
        """Wall at rest, by default at the track center."""
        x = 0.5 * geom.length if position is None else position
        if not 0.0 <= x <= geom.length:
            raise ValueError(f"position {x} outside track [0, {geom.length}]")
        return cls(x, 0.0)


def accel_current(j: float, mc: ModelConstants) -> float:
    """Current-induced acceleration (nm/ns^2).

    Odd in J: sign(J) times the quartic polynomial of |J|. The constant
    term k0 only applies under nonzero drive, so accel_current(0) == 0.
    """
    if j == 0.0:
        return 0.0
    a = abs(j)
    poly = mc.k0 + a * (mc.k1 + a * (mc.k2 + a * (mc.k3 + a * mc.k4)))
    return poly if j > 0 else -poly


def accel_damping(v: float, j: float, mc: ModelConstants) -> float:
    """Damping acceleration -v*(d1 + d2*|J|), opposing motion (nm/ns^2)."""
    return -v * (mc.d1 + mc.d2 * abs(j))


def is_pinned(j: float, v: float, mc: ModelConstants) -> bool:
    """Pinning engages when both drive and velocity sit below threshold."""
    return abs(j) < mc.p1 and abs(v) < mc.p2


def accel_pinning(j: float, v: float, a_j: float, mc: ModelConstants) -> float:
    """Pinning acceleration: cancels the drive term in the pinned regime.

    ``a_j`` must be the value accel_current returns for this J.
    """
    return -a_j if is_pinned(j, v, mc) else 0.0


def total_accel(j: float, v: float, mc: ModelConstants) -> float:
    """Sum of drive, damping, and pinning accelerations (nm/ns^2)."""
    a_j = accel_current(j, mc)
    return a_j + accel_damping(v, j, mc) + accel_pinning(j, v, a_j, mc)


def terminal_velocity(j: float, mc: ModelConstants) -> float | None:
    """Steady velocity under constant J where drive and damping cancel.

    Returns None in the pinned regime (|J| < p1), where the wall never
    starts moving. Algebraically equal to sign(J) times the c-cubic.
    """
    if abs(j) < mc.p1:
        return None
    return accel_current(j, mc) / (mc.d1 + mc.d2 * abs(j))


def apply_bounce(state: DwState, geom: TrackGeometry, c_r: float) -> DwState:
    """Clamp the wall to the track and reverse velocity scaled by c_r."""
    if state.x < 0.0:
        return DwState(0.0, -c_r * state.v)
    if state.x > geom.length:
        return DwState(geom.length, -c_r * state.v)
    return state


def step_exact(
    state: DwState, j: float, dt: float, mc: ModelConstants, geom: TrackGeometry
) -> DwState:
    """Advance one step of dt ns under constant J using the closed-form
    solution of the linear velocity equation.

    With r = d1 + d2*|J| and v_inf = a_J/r the update is

        v' = v_inf + (v - v_inf) * exp(-r*dt)
        x' = x + [v_inf*dt + (v - v_inf)*(1 - exp(-r*dt))/r] * 1e-9

    followed by the track-end bounce. A pinned state is returned unchanged.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if is_pinned(j, state.v, mc):
        return state
    r = mc.d1 + mc.d2 * abs(j)
    v_inf = accel_current(j, mc) / r
    decay = math.exp(-r * dt)
    v = v_inf + (state.v - v_inf) * decay
    x = state.x + (v_inf * dt + (state.v - v_inf) * (1.0 - decay) / r) * 1e-9
    return apply_bounce(DwState(x, v), geom, mc.c_r)


def step_euler(
    state: DwState, j: float, dt: float, mc: ModelConstants, geom: TrackGeometry
) -> DwState:
    """Advance one explicit-Euler step of dt ns.

    Update order matches the behavioral reference model: acceleration from
    the current state, velocity update, then position from the updated
    velocity, then bounce. A pinned state is returned unchanged.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if is_pinned(j, state.v, mc):
        return state
    a = total_accel(j, state.v, mc)
    v = state.v + a * dt
    x = state.x + v * dt * 1e-9
    return apply_bounce(DwState(x, v), geom, mc.c_r)
