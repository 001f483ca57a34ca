"""Model constants and track geometry for the kinematic domain-wall model.

Unit conventions used throughout the package:

* position            meters (m)
* velocity            m/s, numerically identical to nm/ns
* time / durations    nanoseconds (ns)
* acceleration        nm/ns^2
* current density J   A/m^2
* c0..c3              terminal-velocity cubic coefficients, m/s per (A/m^2)^n
* d1                  velocity damping rate, 1/ns
* d2                  current-dependent damping rate, (1/ns) per (A/m^2)
* k0..k4              drive polynomial coefficients, nm/ns^2 per (A/m^2)^n
"""

from __future__ import annotations

import dataclasses
import math


def derive_k(
    c0: float, c1: float, c2: float, c3: float, d1: float, d2: float
) -> tuple[float, float, float, float, float]:
    """Derive the drive polynomial coefficients k0..k4 from the
    terminal-velocity cubic (c0..c3) and the damping rates (d1, d2).

    The drive polynomial is the cubic multiplied through by the
    current-dependent damping rate d1 + d2*|J|, expanded in powers of |J|.
    """
    if not d1 > 0:
        raise ValueError(f"d1 must be positive, got {d1}")
    return (
        d1 * c0,
        d1 * c1 + d2 * c0,
        d1 * c2 + d2 * c1,
        d1 * c3 + d2 * c2,
        d2 * c3,
    )


def d1_from_drift(drift_const: float) -> float:
    """Damping rate (1/ns) from the fitted drift constant (ns).

    drift_const is the post-drive coasting distance in nm per m/s of
    velocity at drive removal.
    """
    if not drift_const > 0:
        raise ValueError(f"drift_const must be positive, got {drift_const}")
    return 1.0 / drift_const


@dataclasses.dataclass(frozen=True)
class ModelConstants:
    """Fitted per-corner coefficients driving the wall equation of motion.

    k0..k4 are always derived from (c0..c3, d1, d2) on construction, so the
    derivation identity holds exactly by construction.

    p1 (A/m^2) and p2 (m/s) are the pinning thresholds; both default to 0,
    which disables pinning. c_r is the coefficient of restitution for
    track-end bounces.
    """

    c0: float
    c1: float
    c2: float
    c3: float
    d1: float
    d2: float
    p1: float = 0.0
    p2: float = 0.0
    c_r: float = 0.25

    k0: float = dataclasses.field(init=False)
    k1: float = dataclasses.field(init=False)
    k2: float = dataclasses.field(init=False)
    k3: float = dataclasses.field(init=False)
    k4: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        for name in ("c0", "c1", "c2", "c3", "d1", "d2", "p1", "p2", "c_r"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.d1 > 0:
            raise ValueError(f"d1 must be positive, got {self.d1}")
        if self.d2 < 0:
            raise ValueError(f"d2 must be nonnegative, got {self.d2}")
        if not 0.0 <= self.c_r <= 1.0:
            raise ValueError(f"c_r must be within [0, 1], got {self.c_r}")
        if self.p1 < 0:
            raise ValueError(f"p1 must be nonnegative, got {self.p1}")
        if self.p2 < 0:
            raise ValueError(f"p2 must be nonnegative, got {self.p2}")
        k = derive_k(self.c0, self.c1, self.c2, self.c3, self.d1, self.d2)
        for name, value in zip(("k0", "k1", "k2", "k3", "k4"), k):
            object.__setattr__(self, name, value)

    @classmethod
    def from_drift(
        cls,
        c0: float,
        c1: float,
        c2: float,
        c3: float,
        drift_const: float,
        d2: float,
        **kwargs: float,
    ) -> "ModelConstants":
        """Build from the fitted drift constant instead of d1."""
        return cls(c0, c1, c2, c3, d1_from_drift(drift_const), d2, **kwargs)

    def cubic_velocity(self, j_abs: float) -> float:
        """Terminal-velocity cubic evaluated at |J| (m/s)."""
        return self.c0 + j_abs * (self.c1 + j_abs * (self.c2 + j_abs * self.c3))


@dataclasses.dataclass(frozen=True)
class TrackGeometry:
    """Physical track dimensions in meters."""

    length: float
    width: float
    thickness: float

    def __post_init__(self) -> None:
        for name in ("length", "width", "thickness"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    @property
    def cross_section(self) -> float:
        """Heavy-metal cross-section area (m^2) carrying the track current."""
        return self.width * self.thickness


# Track dimensions used by the reference micromagnetic runs (500 nm x 100 nm
# x 1.2 nm); convenient default for examples and the CLI.
DEFAULT_GEOMETRY = TrackGeometry(length=500e-9, width=100e-9, thickness=1.2e-9)
