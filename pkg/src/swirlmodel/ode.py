"""The reaction-only ODE model and its coefficient-d generalisation.

    u' = -d v u,    v' = u^2 - v^2

For d = 2 the system is w' = i w^2 in the complex variable w = u + i v and
has the closed form w(t) = w0 / (1 - i w0 t).  For other d we integrate with
classical RK4, optionally under step-doubling error control.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BadParams, Blowup, BlowupAtPole

BLOWUP_MAGNITUDE = 1e12
COMPONENT_FLOOR = 1e-6


@dataclass(frozen=True)
class OdeState:
    u: float
    v: float
    t: float = 0.0


@dataclass(frozen=True)
class OdeParams:
    d: float = 2.0

    def __post_init__(self):
        if not math.isfinite(self.d) or self.d < 0:
            raise BadParams(f"d must be finite and >= 0, got {self.d}")


@dataclass(frozen=True)
class PolarState:
    """(u, v) = (r sin(theta), r cos(theta))."""

    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise BadParams(f"r must be >= 0, got {self.r}")


@dataclass
class OdeTrajectory:
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __len__(self):
        return len(self.t)

    def state(self, i):
        return OdeState(float(self.u[i]), float(self.v[i]), float(self.t[i]))


class OdeBlowup(Blowup):
    """Integration left the finite regime; carries the trajectory computed so far."""

    def __init__(self, t_star, cause, trajectory):
        super().__init__(t_star, cause)
        self.trajectory = trajectory


def ode_exact(u0, v0, t):
    """Closed-form solution of the d = 2 model at time ``t``."""
    a = 1.0 + v0 * t
    b = u0 * t
    den = a * a + b * b
    if den == 0.0 or (u0 == 0.0 and v0 < 0.0 and t >= -1.0 / v0):
        raise BlowupAtPole(-1.0 / v0)
    u = (u0 * a - u0 * v0 * t) / den
    v = (v0 * a + u0 * u0 * t) / den
    return OdeState(u, v, t)


def ode_rhs(s, p):
    return -p.d * s.v * s.u, s.u * s.u - s.v * s.v


def _rk4(u, v, h, d):
    k1u = -d * v * u
    k1v = u * u - v * v
    u2 = u + 0.5 * h * k1u
    v2 = v + 0.5 * h * k1v
    k2u = -d * v2 * u2
    k2v = u2 * u2 - v2 * v2
    u3 = u + 0.5 * h * k2u
    v3 = v + 0.5 * h * k2v
    k3u = -d * v3 * u3
    k3v = u3 * u3 - v3 * v3
    u4 = u + h * k3u
    v4 = v + h * k3v
    k4u = -d * v4 * u4
    k4v = u4 * u4 - v4 * v4
    return (u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v))


def _blown(u, v):
    m = abs(u) + abs(v)
    return not m <= BLOWUP_MAGNITUDE  # also catches NaN


def integrate_ode(s0, p, t_end, dt, adaptive=True, rtol=1e-12):
    """Integrate from ``s0`` to ``t_end``, sampling every ``dt``.

    With ``adaptive`` each sample interval is covered by RK4 substeps whose
    size is set by step doubling (Richardson-extrapolated, so the accepted
    update is fifth order) and the error of each component is measured
    relative to that component.  Without it, one plain RK4 step per sample.

    Raises:
        OdeBlowup: when |u| + |v| exceeds 1e12 or turns non-finite, or the
            substep underflows the time resolution.  ``t_star`` is the last
            time with an accepted finite state.
    """
    if dt <= 0:
        raise BadParams(f"dt must be positive, got {dt}")
    d = float(p.d)
    n_samples = int(math.floor((t_end - s0.t) / dt * (1 + 1e-12))) + 1
    ts = [s0.t]
    us = [float(s0.u)]
    vs = [float(s0.v)]
    u, v, t = float(s0.u), float(s0.v), float(s0.t)
    h = dt

    def fail(t_last, cause):
        traj = OdeTrajectory(np.array(ts), np.array(us), np.array(vs))
        raise OdeBlowup(t_last, cause, traj)

    for i in range(1, n_samples):
        t_target = s0.t + i * dt
        if not adaptive:
            u, v = _rk4(u, v, dt, d)
            if _blown(u, v):
                fail(t, "NonFinite" if not math.isfinite(u + v) else "Magnitude")
            t = t_target
        else:
            while t < t_target:
                step = min(h, t_target - t)
                if t + step == t:
                    fail(t, "StepCollapse")
                uf, vf = _rk4(u, v, step, d)
                uh, vh = _rk4(u, v, 0.5 * step, d)
                uh, vh = _rk4(uh, vh, 0.5 * step, d)
                if _blown(uf, vf) or _blown(uh, vh):
                    if step <= 1e-300:
                        fail(t, "Magnitude")
                    h = 0.25 * step
                    continue
                # per-component relative error, floored so a component crossing zero
                # is held to the size of the whole state
                floor = COMPONENT_FLOOR * (abs(uh) + abs(vh))
                err = max(abs(uh - uf) / max(abs(uh), floor),
                          abs(vh - vf) / max(abs(vh), floor)) / 15.0
                if err <= rtol:
                    u = uh + (uh - uf) / 15.0
                    v = vh + (vh - vf) / 15.0
                    t = t_target if step == t_target - t else t + step
                    if _blown(u, v):
                        fail(t, "Magnitude")
                    factor = 4.0 if err == 0 else min(4.0, max(0.2, 0.9 * (rtol / err) ** 0.2))
                    if step == h or factor < 1:
                        h = step * factor
                else:
                    h = step * max(0.1, 0.9 * (rtol / err) ** 0.2)
            t = t_target
        ts.append(t)
        us.append(u)
        vs.append(v)
    return OdeTrajectory(np.array(ts), np.array(us), np.array(vs))


def to_polar(u, v):
    return PolarState(math.hypot(u, v), math.atan2(u, v))


def from_polar(s):
    return s.r * math.sin(s.theta), s.r * math.cos(s.theta)


def polar_rhs(s, p):
    c = math.cos(s.theta)
    sn = math.sin(s.theta)
    dm1 = p.d - 1.0
    dr = -s.r * s.r * c * (c * c + dm1 * sn * sn)
    dtheta = -s.r * sn * (dm1 * c * c + sn * sn)
    return dr, dtheta


def r_envelope_bound(r0, theta0, t):
    """Upper envelope r0 / (1 + r0 cos^3(theta0) t) for first-quadrant starts, d >= 1."""
    return r0 / (1.0 + r0 * math.cos(theta0) ** 3 * t)


class TrajectoryClass(Enum):
    DECAY = "Decay"
    BLOWUP = "Blowup"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Classification:
    kind: TrajectoryClass
    t_star: float = math.nan
    log_r_final: float = math.nan
    log_r_peak: float = math.nan

    def __str__(self):
        if self.kind is TrajectoryClass.BLOWUP:
            return f"Blowup({self.t_star:.6g})"
        return self.kind.value


DECAY_FRACTION = 1e-6
# growth of log r beyond which the remaining time to the singularity is < e^-LOG_GROWTH_BLOWUP
LOG_GROWTH_BLOWUP = 60.0
_EXP_LIMIT = 700.0


def _angle_field(theta, d):
    """d(theta)/d(tau) and d(log r)/d(tau) in the rescaled time d(tau) = r dt."""
    c = math.cos(theta)
    s = math.sin(theta)
    return -s * ((d - 1.0) * c * c + s * s), -c * (c * c + (d - 1.0) * s * s)


def _rescaled_rhs(y, d):
    theta, log_r, _ = y
    g, h = _angle_field(theta, d)
    return g, h, math.exp(min(-log_r, 700.0))


def _rk4_tuple(y, h, d):
    k1 = _rescaled_rhs(y, d)
    k2 = _rescaled_rhs(tuple(a + 0.5 * h * b for a, b in zip(y, k1)), d)
    k3 = _rescaled_rhs(tuple(a + 0.5 * h * b for a, b in zip(y, k2)), d)
    k4 = _rescaled_rhs(tuple(a + h * b for a, b in zip(y, k3)), d)
    return tuple(a + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def equilibrium_angles(d):
    """Rays theta on which the angular motion stops (d(theta)/d(tau) = 0)."""
    angles = [0.0, math.pi, -math.pi]
    if d < 1.0:
        a = math.atan(math.sqrt(1.0 - d))
        angles += [a, -a, math.pi - a, -(math.pi - a)]
    return angles


def _attracting_blowup_ray(theta, d, tol=1e-3):
    """True if ``theta`` sits near a ray that attracts the angle and carries r to infinity."""
    for eq in equilibrium_angles(d):
        if abs(theta - eq) > tol:
            continue
        eps = 1e-7
        slope = (_angle_field(eq + eps, d)[0] - _angle_field(eq - eps, d)[0]) / (2 * eps)
        if slope < 0 and _angle_field(eq, d)[1] > 0:
            return True
    return False


def classify_trajectory(s0, p, t_end, rtol=1e-10, max_steps=1_000_000):
    """Label the trajectory from ``s0`` as Decay, Blowup(t*) or Undetermined by ``t_end``.

    The model is homogeneous of degree two, so in polar form (r, theta) with
    rescaled time d(tau) = r dt the angle evolves on its own and log r grows
    or shrinks at a rate set by the angle.  Integrating (theta, log r, t) in
    tau never overflows, which lets trajectories with astronomically large
    but finite transients (d close to 1 from u0 small, v0 very negative) be
    followed to their decay.

    Blowup: log r has grown by more than ``LOG_GROWTH_BLOWUP`` while the
    angle sits on a ray that attracts it and on which r increases; the time
    still to elapse is then below e^-60 / rate, so t* is the current t.
    Decay: at ``t_end`` the radius is below ``DECAY_FRACTION`` of its peak
    and v > 0 (both reaction terms damping).
    """
    d = float(p.d)
    if s0.u == 0.0 and s0.v == 0.0:
        return Classification(TrajectoryClass.DECAY, math.nan, -math.inf, -math.inf)
    if s0.u == 0.0:
        # u stays zero and v' = -v^2 decouples
        if s0.v < 0 and s0.t - 1.0 / s0.v <= t_end:
            return Classification(TrajectoryClass.BLOWUP, s0.t - 1.0 / s0.v, math.inf, math.inf)
        v_end = s0.v / (1.0 + s0.v * (t_end - s0.t))
        log_peak = math.log(abs(s0.v)) if s0.v > 0 else math.log(abs(v_end))
        kind = (TrajectoryClass.DECAY if s0.v > 0 and v_end <= DECAY_FRACTION * s0.v
                else TrajectoryClass.UNDETERMINED)
        return Classification(kind, math.nan, math.log(abs(v_end)), log_peak)
    polar = to_polar(s0.u, s0.v)
    y = (polar.theta, math.log(polar.r), float(s0.t))
    log_r0 = y[1]
    log_r_peak = y[1]
    h = 1e-3 / polar.r
    steps = 0
    while y[2] < t_end:
        steps += 1
        if steps > max_steps:
            return Classification(TrajectoryClass.UNDETERMINED, math.nan, y[1], log_r_peak)
        if y[1] - log_r0 > LOG_GROWTH_BLOWUP and _attracting_blowup_ray(y[0], d):
            return Classification(TrajectoryClass.BLOWUP, y[2], math.inf, math.inf)
        # log r may only move by O(1) per step where exp(-log r) still feeds t
        rate = abs(_angle_field(y[0], d)[1])
        if rate > 0:
            h = min(h, max(1.0, 0.5 * abs(y[1] - _EXP_LIMIT)) / rate)
        full = _rk4_tuple(y, h, d)
        half = _rk4_tuple(_rk4_tuple(y, 0.5 * h, d), 0.5 * h, d)
        dt_scale = abs(half[2] - y[2]) + 1e-300
        err = max(abs(full[0] - half[0]),
                  abs(full[1] - half[1]) / max(1.0, abs(half[1])),
                  abs(full[2] - half[2]) / dt_scale) / 15.0
        if not math.isfinite(err) or err > rtol:
            h *= 0.25 if not math.isfinite(err) else max(0.1, 0.9 * (rtol / err) ** 0.2)
            continue
        new = tuple(b + (b - a) / 15.0 for a, b in zip(full, half))
        if new[2] > t_end * (1 + 1e-12):
            h *= max(1e-3, 0.99 * (t_end - y[2]) / (new[2] - y[2]))
            continue
        y = new
        log_r_peak = max(log_r_peak, y[1])
        h *= 4.0 if err == 0 else min(4.0, max(0.2, 0.9 * (rtol / err) ** 0.2))
    theta, log_r, _ = y
    decayed = log_r <= math.log(DECAY_FRACTION) + log_r_peak and math.cos(theta) > 0
    kind = TrajectoryClass.DECAY if decayed else TrajectoryClass.UNDETERMINED
    return Classification(kind, math.nan, log_r, log_r_peak)
