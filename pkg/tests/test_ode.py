import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swirlmodel import ode
from swirlmodel.errors import BadParams, BlowupAtPole


def complex_solution(u0, v0, t):
    # independent oracle: w' = i w^2 with w = u + i v
    w0 = complex(u0, v0)
    w = w0 / (1 - 1j * w0 * t)
    return w.real, w.imag


class TestExact:
    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 0.04))
    def test_matches_complex_form(self, u0, v0, t):
        if u0 == 0 and v0 < 0 and t >= -1 / v0:
            return
        s = ode.ode_exact(u0, v0, t)
        u, v = complex_solution(u0, v0, t)
        assert s.u == pytest.approx(u, rel=1e-12, abs=1e-12)
        assert s.v == pytest.approx(v, rel=1e-12, abs=1e-12)

    def test_pole_on_the_axis(self):
        with pytest.raises(BlowupAtPole) as exc:
            ode.ode_exact(0.0, -2.0, 0.6)
        assert exc.value.t_star == pytest.approx(0.5)

    def test_satisfies_ode(self):
        u0, v0, t, h = 0.3, -1.2, 0.4, 1e-6
        a, b = ode.ode_exact(u0, v0, t - h), ode.ode_exact(u0, v0, t + h)
        s = ode.ode_exact(u0, v0, t)
        du, dv = ode.ode_rhs(s, ode.OdeParams(2.0))
        assert (b.u - a.u) / (2 * h) == pytest.approx(du, rel=1e-7)
        assert (b.v - a.v) / (2 * h) == pytest.approx(dv, rel=1e-7)


class TestIntegrate:
    @pytest.mark.parametrize("u0,v0", [(1.0, 1.0), (0.5, -1.0), (-2.0, 0.3)])
    def test_against_closed_form(self, u0, v0):
        traj = ode.integrate_ode(ode.OdeState(u0, v0), ode.OdeParams(2.0), 2.0, 0.1)
        assert len(traj) == 21
        for i in range(len(traj)):
            ex = ode.ode_exact(u0, v0, traj.t[i])
            assert traj.u[i] == pytest.approx(ex.u, rel=1e-9, abs=1e-12)
            assert traj.v[i] == pytest.approx(ex.v, rel=1e-9, abs=1e-12)

    def test_fixed_step_is_fourth_order(self):
        s0, p = ode.OdeState(1.0, 0.5), ode.OdeParams(1.5)
        ref = ode.integrate_ode(s0, p, 1.0, 1.0)
        errs = []
        for dt in (0.02, 0.01):
            tr = ode.integrate_ode(s0, p, 1.0, dt, adaptive=False)
            errs.append(abs(tr.u[-1] - ref.u[-1]))
        assert 12 < errs[0] / errs[1] < 20

    def test_blowup_on_axis(self):
        with pytest.raises(ode.OdeBlowup) as exc:
            ode.integrate_ode(ode.OdeState(0.0, -1.0), ode.OdeParams(1.0), 2.0, 0.01)
        assert exc.value.t_star <= 1.0
        assert exc.value.t_star > 0.98
        assert exc.value.trajectory.t[-1] <= exc.value.t_star

    def test_rejects_bad_dt(self):
        with pytest.raises(BadParams):
            ode.integrate_ode(ode.OdeState(1, 1), ode.OdeParams(), 1.0, 0.0)

    def test_rejects_negative_d(self):
        with pytest.raises(BadParams):
            ode.OdeParams(-1.0)


class TestPolar:
    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_round_trip(self, u, v):
        back = ode.from_polar(ode.to_polar(u, v))
        assert back == pytest.approx((u, v), abs=1e-12)

    @given(st.floats(0.1, 3), st.floats(-3, 3), st.floats(0, 4))
    def test_polar_rhs_is_the_chain_rule(self, r, theta, d):
        p = ode.OdeParams(d)
        u, v = ode.from_polar(ode.PolarState(r, theta))
        du, dv = ode.ode_rhs(ode.OdeState(u, v), p)
        dr, dth = ode.polar_rhs(ode.PolarState(r, theta), p)
        assert dr == pytest.approx((u * du + v * dv) / r, abs=1e-10 * max(1, r * r))
        assert dth == pytest.approx((v * du - u * dv) / r**2, abs=1e-10 * max(1, r))

    def test_envelope_equals_r_at_zero(self):
        assert ode.r_envelope_bound(2.0, 0.3, 0.0) == 2.0


class TestClassify:
    @pytest.mark.parametrize("d", [0.0, 0.25, 0.5, 0.75, 0.99])
    def test_small_d_blows_up(self, d):
        c = ode.classify_trajectory(ode.OdeState(1e-3, -1e3), ode.OdeParams(d), 1.0)
        assert c.kind is ode.TrajectoryClass.BLOWUP
        assert math.isfinite(c.t_star)
        assert 0 < c.t_star < 0.0011

    @pytest.mark.parametrize("d", [1.0, 1.5, 2.0, 3.0])
    def test_large_d_decays(self, d):
        c = ode.classify_trajectory(ode.OdeState(1e-3, -1e3), ode.OdeParams(d), 100.0)
        assert c.kind is ode.TrajectoryClass.DECAY
        assert str(c) == "Decay"

    def test_axis_start(self):
        c = ode.classify_trajectory(ode.OdeState(0.0, -4.0), ode.OdeParams(2.0), 1.0)
        assert c.kind is ode.TrajectoryClass.BLOWUP
        assert c.t_star == pytest.approx(0.25)
        assert str(c).startswith("Blowup(")

    def test_origin(self):
        c = ode.classify_trajectory(ode.OdeState(0.0, 0.0), ode.OdeParams(2.0), 1.0)
        assert c.kind is ode.TrajectoryClass.DECAY

    def test_d2_off_axis_decays_like_closed_form(self):
        # closed-form d = 2 solutions with u0 != 0 decay like 1/t
        s0 = ode.OdeState(0.1, -5.0)
        c = ode.classify_trajectory(s0, ode.OdeParams(2.0), 1e5)
        assert c.kind is ode.TrajectoryClass.DECAY
        ex = ode.ode_exact(s0.u, s0.v, 1e5)
        assert c.log_r_final == pytest.approx(math.log(math.hypot(ex.u, ex.v)), abs=1e-6)

    def test_short_horizon_is_undetermined(self):
        c = ode.classify_trajectory(ode.OdeState(0.1, -5.0), ode.OdeParams(2.0), 0.05)
        assert c.kind is ode.TrajectoryClass.UNDETERMINED

    def test_equilibria(self):
        assert ode.equilibrium_angles(2.0) == [0.0, math.pi, -math.pi]
        a = ode.equilibrium_angles(0.0)[3]
        assert a == pytest.approx(math.pi / 4)
