import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dwkinematics import (
    DwState,
    ModelConstants,
    TrackGeometry,
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
from helpers import random_constants, short_track


def poly_oracle(j, mc):
    """Independent drive-polynomial evaluation (term sum, not Horner)."""
    if j == 0:
        return 0.0
    terms = [k * abs(j) ** n for n, k in enumerate((mc.k0, mc.k1, mc.k2, mc.k3, mc.k4))]
    return math.copysign(math.fsum(terms), j)


class TestAccelCurrent:
    def test_zero_drive_gives_zero(self):
        mc = ModelConstants(c0=5.0, c1=1e-9, c2=0, c3=0, d1=0.1, d2=0)
        assert mc.k0 != 0  # the constant term exists but is sign-gated
        assert accel_current(0.0, mc) == 0.0

    def test_odd_in_j(self):
        mc = ModelConstants(c0=1.3, c1=2e-9, c2=3e-20, c3=1e-31, d1=0.13, d2=5e-13)
        j = 1e10
        assert accel_current(-j, mc) == -accel_current(j, mc)

    def test_linear_case_hand_value(self):
        # c = (0, 2e-8, 0, 0) m/s per (A/m^2), d1 = 0.1/ns, d2 = 0
        # => a_J(1e10) = d1*c1*J = 20 nm/ns^2
        mc = ModelConstants(c0=0.0, c1=2e-8, c2=0.0, c3=0.0, d1=0.1, d2=0.0)
        assert accel_current(1e10, mc) == pytest.approx(20.0, rel=1e-12)

    def test_matches_polynomial_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            mc = random_constants(rng)
            j = float(rng.uniform(-8e11, 8e11))
            assert accel_current(j, mc) == pytest.approx(poly_oracle(j, mc), rel=1e-12)


class TestAccelDamping:
    def test_zero_velocity(self):
        mc = ModelConstants(1, 1e-9, 0, 0, 0.05, 1e-13)
        assert accel_damping(0.0, 3e10, mc) == 0.0

    def test_hand_value(self):
        mc = ModelConstants(0, 1e-9, 0, 0, 0.05, 0.0)
        assert accel_damping(100.0, 0.0, mc) == pytest.approx(-5.0)

    @given(v=st.floats(1e-3, 1e3), j=st.floats(-1e11, 1e11))
    def test_opposes_motion(self, v, j):
        mc = ModelConstants(1, 1e-9, 0, 0, 0.1, 1e-13)
        assert accel_damping(v, j, mc) < 0
        assert accel_damping(-v, j, mc) > 0


class TestPinning:
    mc = ModelConstants(2, 1e-9, 0, 0, 0.1, 0.0, p1=1e10, p2=5.0)

    def test_strong_drive_not_pinned(self):
        a_j = accel_current(2e10, self.mc)
        assert accel_pinning(2e10, 0.0, a_j, self.mc) == 0.0

    def test_pinned_cancels_drive_exactly(self):
        j = 5e9  # below p1
        a_j = accel_current(j, self.mc)
        assert accel_pinning(j, 1.0, a_j, self.mc) == -a_j
        assert a_j + accel_pinning(j, 1.0, a_j, self.mc) == 0.0

    def test_disabled_thresholds_never_pin(self):
        mc = ModelConstants(2, 1e-9, 0, 0, 0.1, 0.0)  # p1 = p2 = 0
        assert not is_pinned(0.0, 0.0, mc)
        assert accel_pinning(0.0, 0.0, 0.0, mc) == 0.0

    def test_fast_wall_escapes_pinning(self):
        assert not is_pinned(5e9, 10.0, self.mc)  # |v| >= p2


class TestTotalAccel:
    def test_vanishes_at_terminal_velocity(self):
        mc = ModelConstants(1.0, 3e-9, 0, 0, 0.2, 1e-13)
        j = 3e10
        v_inf = terminal_velocity(j, mc)
        assert total_accel(j, v_inf, mc) == pytest.approx(0.0, abs=1e-12)

    def test_rest_no_drive(self):
        mc = ModelConstants(1.0, 3e-9, 0, 0, 0.2, 1e-13)
        assert total_accel(0.0, 0.0, mc) == 0.0

    def test_linear_case(self):
        mc = ModelConstants(c0=0.0, c1=2e-8, c2=0.0, c3=0.0, d1=0.1, d2=0.0)
        assert total_accel(1e10, 0.0, mc) == pytest.approx(20.0, rel=1e-12)


class TestTerminalVelocity:
    def test_equals_cubic_to_machine_precision(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            mc = random_constants(rng)
            j = float(rng.uniform(1e9, 8e11)) * (1 if rng.random() < 0.5 else -1)
            v = terminal_velocity(j, mc)
            cubic = math.copysign(mc.cubic_velocity(abs(j)), j)
            assert v == pytest.approx(cubic, rel=1e-12)

    def test_odd(self):
        mc = ModelConstants(1.0, 2e-9, 3e-20, 4e-31, 0.1, 1e-13)
        assert terminal_velocity(-2e10, mc) == -terminal_velocity(2e10, mc)

    def test_pinned_regime_returns_none(self):
        mc = ModelConstants(1.0, 2e-9, 0, 0, 0.1, 0.0, p1=1e10, p2=1.0)
        assert terminal_velocity(5e9, mc) is None
        assert terminal_velocity(2e10, mc) is not None


class TestBounce:
    geom = short_track()

    def test_left_overshoot_reflects(self):
        out = apply_bounce(DwState(-1e-9, -50.0), self.geom, 0.25)
        assert out.x == 0.0
        assert out.v == pytest.approx(12.5)

    def test_right_overshoot_reflects(self):
        out = apply_bounce(DwState(self.geom.length + 1e-9, 70.0), self.geom, 0.5)
        assert out.x == self.geom.length
        assert out.v == pytest.approx(-35.0)

    def test_interior_untouched(self):
        st0 = DwState(250e-9, 33.0)
        assert apply_bounce(st0, self.geom, 0.25) is st0

    def test_sticky_wall(self):
        out = apply_bounce(DwState(-1e-12, -5.0), self.geom, 0.0)
        assert out.x == 0.0 and out.v == 0.0

    def test_elastic_preserves_speed(self):
        out = apply_bounce(DwState(-1e-12, -5.0), self.geom, 1.0)
        assert abs(out.v) == 5.0


class TestStepExact:
    mc = ModelConstants(1.0, 2e-9, 1e-20, 0, 0.1, 1e-13)
    geom = TrackGeometry(100e-6, 100e-9, 1.2e-9)

    def test_terminal_velocity_is_fixed_point(self):
        j = 2e10
        v_inf = terminal_velocity(j, self.mc)
        s0 = DwState(10e-6, v_inf)
        s1 = step_exact(s0, j, 5.0, self.mc, self.geom)
        assert s1.v == pytest.approx(v_inf, rel=1e-12)
        assert s1.x == pytest.approx(s0.x + v_inf * 5.0 * 1e-9, rel=1e-12)

    def test_free_decay_drift(self):
        # J=0: v decays as exp(-d1 t); total drift v0/d1 nm
        v0 = 120.0
        s0 = DwState(50e-6, v0)
        s1 = step_exact(s0, 0.0, 400.0, self.mc, self.geom)  # >> 1/d1
        assert s1.v == pytest.approx(v0 * math.exp(-0.1 * 400.0), rel=1e-9)
        assert (s1.x - s0.x) * 1e9 == pytest.approx(v0 / 0.1, rel=1e-6)

    def test_decay_against_fine_euler_oracle(self):
        s = DwState(50e-6, 80.0)
        stepped = step_exact(s, 0.0, 7.0, self.mc, self.geom)
        x, v = s.x, s.v
        for _ in range(70000):
            a = -0.1 * v
            v += a * 1e-4
            x += v * 1e-4 * 1e-9
        assert stepped.v == pytest.approx(v, rel=1e-4)
        # the oracle carries its own O(dt) error, so compare displacements
        assert stepped.x - s.x == pytest.approx(x - s.x, rel=1e-4)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            step_exact(DwState(0, 0), 0.0, 0.0, self.mc, self.geom)
        with pytest.raises(ValueError):
            step_exact(DwState(0, 0), 0.0, -1.0, self.mc, self.geom)

    def test_pinned_state_frozen(self):
        mc = ModelConstants(1.0, 2e-9, 0, 0, 0.1, 0.0, p1=1e10, p2=5.0)
        s0 = DwState(10e-6, 1.0)
        assert step_exact(s0, 5e9, 1.0, mc, self.geom) is s0


class TestStepEuler:
    mc = ModelConstants(1.0, 2e-9, 1e-20, 0, 0.1, 1e-13)
    geom = TrackGeometry(100e-6, 100e-9, 1.2e-9)

    def test_single_step_from_rest(self):
        j, dt = 1e10, 1e-3
        a = total_accel(j, 0.0, self.mc)
        s1 = step_euler(DwState(1e-6, 0.0), j, dt, self.mc, self.geom)
        assert s1.v == a * dt
        assert s1.x == 1e-6 + s1.v * dt * 1e-9

    def test_pinned_state_frozen(self):
        mc = ModelConstants(1.0, 2e-9, 0, 0, 0.1, 0.0, p1=1e10, p2=5.0)
        s0 = DwState(10e-6, -2.0)
        assert step_euler(s0, -5e9, 1e-3, mc, self.geom) is s0

    def test_first_order_convergence_to_exact(self):
        """Halving dt should roughly halve the error (order within [0.9, 1.1])."""
        j = 3e10
        horizon = 2.0
        target = step_exact(DwState(10e-6, 0.0), j, horizon, self.mc, self.geom)
        errors = []
        for dt in (2e-3, 1e-3, 5e-4, 2.5e-4):
            s = DwState(10e-6, 0.0)
            for _ in range(int(round(horizon / dt))):
                s = step_euler(s, j, dt, self.mc, self.geom)
            errors.append(abs(s.v - target.v))
        rates = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
        assert all(0.9 <= r <= 1.1 for r in rates), rates


class TestInvariantProperties:
    @settings(max_examples=200, deadline=None)
    @given(
        seed=st.integers(0, 2**32 - 1),
        j=st.floats(-8e11, 8e11),
        dt=st.floats(1e-3, 50.0),
    )
    def test_position_stays_on_track(self, seed, j, dt):
        rng = np.random.default_rng(seed)
        mc = random_constants(rng, c_r=float(rng.uniform(0, 1)))
        geom = short_track()
        s = DwState(float(rng.uniform(0, geom.length)), float(rng.uniform(-500, 500)))
        for _ in range(5):
            s = step_exact(s, j, dt, mc, geom)
            assert 0.0 <= s.x <= geom.length

    def test_monotone_convergence_from_rest(self):
        """From rest under constant J > 0, v never decreases and stays
        below terminal velocity."""
        rng = np.random.default_rng(7)
        for _ in range(20):
            mc = random_constants(rng)
            j = float(rng.uniform(1e9, 1e11))
            v_inf = terminal_velocity(j, mc)
            geom = TrackGeometry(1.0, 1e-7, 1e-9)  # effectively unbounded
            s = DwState(0.5, 0.0)
            last = 0.0
            r = mc.d1 + mc.d2 * j
            for _ in range(40):
                s = step_exact(s, j, 0.25 / r, mc, geom)
                assert s.v >= last - 1e-12
                assert s.v <= v_inf * (1 + 1e-12)
                last = s.v

    def test_exponential_convergence_bound(self):
        """|v(t) - v_inf| <= |v_inf| e^{-rt}; after t = 10/r the relative
        gap is below 1e-4."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            mc = random_constants(rng)
            j = float(rng.uniform(1e9, 5e11))
            r = mc.d1 + mc.d2 * j
            v_inf = terminal_velocity(j, mc)
            geom = TrackGeometry(1.0, 1e-7, 1e-9)
            s = step_exact(DwState(0.5, 0.0), j, 10.0 / r, mc, geom)
            assert abs(s.v - v_inf) <= abs(v_inf) * math.exp(-10.0) * (1 + 1e-9)
            assert abs(s.v - v_inf) / abs(v_inf) < 1e-4
