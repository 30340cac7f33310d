"""Inviscid 1D model in Lagrangian coordinates.

Along the flow map z(alpha, t) with Jacobian J = z_alpha the Eulerian model
becomes a system of ODEs in the label alpha::

    J_t = -2 sign J v
    u_t = -2 u v
    v_t = u^2 - v^2 + (1 + 2 sign) int v^2 J dalpha - int u^2 J dalpha
    z_t = 2 sign psi(z(alpha, t), t)

The integrals use the rectangle rule over the alpha nodes.  Positions are
stored as the periodic displacement ``zeta = z - alpha`` so they can be
differentiated spectrally; ``z_alpha = J`` is then a monitored consistency
check rather than an assumption.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import diagnostics, spectral
from .errors import BadParams, Blowup, ParticleCrossing
from .model1d import StepController, adapt_dt, gaussian_v


@dataclass
class LagrangianState:
    """Fields over the particle labels alpha_j = j/N.

    ``zeta`` is the particle displacement, ``z = alpha + zeta``.
    ``log_j_ref`` accumulates -2 sign int_0^t v ds with the same scheme as
    the other fields, to cross-check ``log J``.
    """

    J: np.ndarray
    u: np.ndarray
    v: np.ndarray
    zeta: np.ndarray
    t: float = 0.0
    sign: int = 1
    log_j_ref: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.log_j_ref is None:
            self.log_j_ref = np.log(self.J)

    @property
    def grid(self):
        return spectral.grid_for(len(self.J))

    @property
    def alpha(self):
        return self.grid.nodes

    @property
    def z(self):
        return self.alpha + self.zeta

    def copy(self):
        return LagrangianState(self.J.copy(), self.u.copy(), self.v.copy(),
                               self.zeta.copy(), self.t, self.sign, self.log_j_ref.copy())


@dataclass(frozen=True)
class IdentityLedger:
    """Reference data for the identity sqrt(u_a^2 + v_a^2) = g0 J^sign.

    Both sides obey d/dt log(.) = -2 v, which follows from differentiating
    the u and v equations in alpha (c does not depend on alpha).
    """

    g0: np.ndarray

    @classmethod
    def from_state(cls, s):
        ua = spectral.derivative(s.u)
        va = spectral.derivative(s.v)
        g = np.sqrt(ua * ua + va * va)
        return cls(g / s.J if s.sign > 0 else g * s.J)


def lagrangian_c(s):
    """Constant in the v equation that keeps int v J dalpha fixed."""
    n = len(s.J)
    vj = s.v * s.J
    return ((1.0 + 2.0 * s.sign) * float(np.dot(s.v, vj)) - float(np.dot(s.u * s.u, s.J))) / n


def particle_stream(s):
    """psi(z(alpha), t) at the particles, normalized to zero mean in z.

    d psi / d alpha = psi_z J = -v J, so psi is the stream function of
    ``v J`` over alpha, shifted so that int psi dz = int psi J dalpha = 0.
    """
    g = s.grid
    vj_hat = g.fft(s.v * s.J)
    psi = g.ifft(spectral.stream_hat(g, vj_hat))
    return psi - float(np.dot(psi, s.J)) / len(psi)


def lag_rhs(s):
    """Time derivatives (dJ, du, dv, dzeta) of a Lagrangian state."""
    c = lagrangian_c(s)
    dJ = -2.0 * s.sign * s.J * s.v
    du = -2.0 * s.u * s.v
    dv = s.u * s.u - s.v * s.v + c
    dzeta = 2.0 * s.sign * particle_stream(s)
    return dJ, du, dv, dzeta


def _constrain(v, J):
    """Shift v by a constant so that sum(v J) = 0 exactly.

    The shift is the discrete counterpart of c(t): it is the unique
    constant forcing term that keeps the constraint on the new stage.
    """
    return v - float(np.dot(v, J)) / float(np.sum(J))


def _advance(s, rates, dt, t):
    dJ, du, dv, dz = rates
    J = s.J + dt * dJ
    return LagrangianState(J, s.u + dt * du, _constrain(s.v + dt * dv, J), s.zeta + dt * dz, t,
                           s.sign, s.log_j_ref - (2.0 * s.sign * dt) * s.v)


def lag_step(s, ctrl, dt=None, t_stop=None):
    """One Heun step; dt from the reaction rule unless given.

    Raises:
        Blowup: ``NonPositiveJacobian`` if J leaves (0, inf), ``NonFinite``
            on NaN/Inf, or ``StepCollapse`` from the step rule.
    """
    if dt is None:
        dt = adapt_dt(s.u, s.v, ctrl, t=s.t)
    if t_stop is not None and s.t + dt > t_stop:
        dt = t_stop - s.t
    k1 = lag_rhs(s)
    mid = _advance(s, k1, dt, s.t + dt)
    k2 = lag_rhs(mid)
    h = 0.5 * dt
    J = s.J + h * (k1[0] + k2[0])
    out = LagrangianState(
        J,
        s.u + h * (k1[1] + k2[1]),
        _constrain(s.v + h * (k1[2] + k2[2]), J),
        s.zeta + h * (k1[3] + k2[3]),
        s.t + dt, s.sign,
        s.log_j_ref - (s.sign * dt) * (s.v + mid.v),
    )
    for arr in (out.J, out.u, out.v, out.zeta):
        if not np.all(np.isfinite(arr)):
            raise Blowup(s.t, "NonFinite", "non-finite values after Lagrangian step", state=s)
    if not np.all(out.J > 0):
        raise Blowup(s.t, "NonPositiveJacobian", "J <= 0 after step", state=s)
    return out


@dataclass
class LagrangianRecord:
    """Invariants of a Lagrangian state plus the Eulerian-equivalent extrema.

    ``m_inf`` is |u_z^2 + v_z^2|_inf evaluated at the particles, using
    d/dz = (1/J) d/dalpha.
    """

    t: float
    int_J: float
    int_vJ: float
    identity_residual: float
    log_j_residual: float
    map_residual: float
    max_u: float
    min_u: float
    max_v: float
    min_v: float
    min_J: float
    max_J: float
    m_inf: float
    c: float
    l2_u: float
    l2_v: float
    max_abs_psi: float
    dt: float = math.nan

    def to_diagnostics(self):
        return diagnostics.DiagnosticsRecord(
            t=self.t, dt=self.dt,
            max_u=self.max_u, min_u=self.min_u, max_v=self.max_v, min_v=self.min_v,
            mean_v=self.int_vJ, m_inf=self.m_inf, c=self.c, l2_u=self.l2_u, l2_v=self.l2_v,
            max_abs_psi=self.max_abs_psi, int_J=self.int_J, int_vJ=self.int_vJ,
            identity_residual=self.identity_residual,
        )


def lag_invariants(s, ledger, dt=math.nan):
    """Conserved quantities and identity residuals of a state."""
    g = s.grid
    hat = g.fft(np.stack([s.u, s.v, s.zeta]))
    ua, va, zeta_a = g.ifft(g.ik * hat)
    grad = np.sqrt(ua * ua + va * va)
    target = ledger.g0 * (s.J if s.sign > 0 else 1.0 / s.J)
    scale = float(np.max(np.abs(target)))
    ident = float(np.max(np.abs(grad - target)))
    n = len(s.J)
    return LagrangianRecord(
        t=s.t,
        int_J=float(np.mean(s.J)),
        int_vJ=float(np.dot(s.v, s.J)) / n,
        identity_residual=ident / scale if scale > 0 else ident,
        log_j_residual=float(np.max(np.abs(np.log(s.J) - s.log_j_ref))),
        map_residual=float(np.max(np.abs(1.0 + zeta_a - s.J))),
        max_u=float(s.u.max()), min_u=float(s.u.min()),
        max_v=float(s.v.max()), min_v=float(s.v.min()),
        min_J=float(s.J.min()), max_J=float(s.J.max()),
        m_inf=float(np.max((grad / s.J) ** 2)),
        c=lagrangian_c(s),
        l2_u=math.sqrt(float(np.dot(s.u * s.u, s.J)) / n),
        l2_v=math.sqrt(float(np.dot(s.v * s.v, s.J)) / n),
        max_abs_psi=float(np.max(np.abs(particle_stream(s)))),
        dt=dt,
    )


def make_lagrangian_gaussian(n, eps=1e-4, sign=1):
    """u = 1, J = 1, z = alpha and the Gaussian v, projected so int v J = 0."""
    if not eps > 0:
        raise BadParams(f"eps must be positive, got {eps}")
    g = spectral.grid_for(n)
    v = spectral.project_mean_zero(gaussian_v(g.nodes, eps))
    return LagrangianState(np.ones(n), np.ones(n), v, np.zeros(n), 0.0, sign)


def _monotone_z(s):
    z = s.z
    if not np.all(np.diff(z) > 0) or not z[-1] < z[0] + 1.0:
        raise ParticleCrossing(s.t, s)
    return z


def lag_to_euler(s, target=None, method="pchip"):
    """Eulerian profiles (u(z), v(z)) on the nodes of ``target``.

    ``method="pchip"`` uses periodic monotone cubic interpolation of the
    point clouds (z(alpha), u(alpha)); ``method="spectral"`` inverts the
    map z(alpha) by Newton iteration on the trigonometric interpolants.

    Raises:
        ParticleCrossing: if z(alpha) is not strictly increasing.
    """
    z = _monotone_z(s)
    if target is None:
        target = s.grid
    if isinstance(target, (int, np.integer)):
        target = spectral.grid_for(target)
    zt = target.nodes
    if method == "pchip":
        pad = 4
        zz = np.concatenate([z[-pad:] - 1.0, z, z[:pad] + 1.0])
        out = []
        for f in (s.u, s.v):
            ff = np.concatenate([f[-pad:], f, f[:pad]])
            out.append(PchipInterpolator(zz, ff)(zt))
        return out[0], out[1]
    if method == "spectral":
        alpha = _invert_map(s, zt)
        return spectral.interpolate(s.u, alpha), spectral.interpolate(s.v, alpha)
    raise BadParams(f"unknown method {method!r}")


def _invert_map(s, zt, tol=1e-14, max_iter=50):
    """Labels alpha with alpha + zeta(alpha) = zt, by safeguarded Newton."""
    z = s.z
    # Start from the linear interpolant of the inverse map.
    zz = np.concatenate([z - 1.0, z, z + 1.0])
    aa = np.concatenate([s.alpha - 1.0, s.alpha, s.alpha + 1.0])
    alpha = np.interp(zt, zz, aa)
    J = s.J
    for _ in range(max_iter):
        resid = alpha + spectral.interpolate(s.zeta, alpha) - zt
        step = resid / spectral.interpolate(J, alpha)
        alpha = alpha - step
        if float(np.max(np.abs(step))) < tol:
            break
    return alpha


@dataclass
class LagrangianRun:
    state: LagrangianState
    records: list
    series: diagnostics.Series
    snapshots: list
    ledger: IdentityLedger
    status: str = "Completed"
    t_star: float = math.nan
    cause: str = ""
    steps: int = 0

    @property
    def blew_up(self):
        return self.status == "Blowup"

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


def run_lagrangian(init, ctrl, t_end, record_every=1, snapshot_times=(), max_steps=None,
                   on_record=None):
    """Advance to ``t_end`` with Heun steps, landing exactly on snapshot times.

    Every record is screened with :func:`diagnostics.detect_blowup`; a
    blowup ends the run with ``status == "Blowup"``.
    """
    s = init
    ledger = IdentityLedger.from_state(s)
    records = []
    series = diagnostics.Series()
    snapshots = [s.copy()] if s.t in snapshot_times else []
    stops = sorted(t for t in snapshot_times if s.t < t <= t_end)
    run = LagrangianRun(s, records, series, snapshots, ledger)

    def record(state, dt):
        rec = lag_invariants(state, ledger, dt)
        records.append(rec)
        series.append(rec.to_diagnostics())
        if on_record:
            on_record(rec)
        return rec

    record(s, math.nan)
    n = 0
    i = 0
    try:
        while s.t < t_end:
            while i < len(stops) and stops[i] <= s.t:
                i += 1
            t_stop = stops[i] if i < len(stops) else t_end
            prev = s
            s = lag_step(s, ctrl, t_stop=t_stop)
            if t_stop - s.t <= 1e-15 * max(1.0, abs(t_stop)):
                s.t = t_stop
            n += 1
            hit = i < len(stops) and s.t == stops[i]
            if n % record_every == 0 or s.t >= t_end or hit:
                rec = record(s, s.t - prev.t)
                event = diagnostics.detect_blowup(rec.to_diagnostics(), 0.0, prev.t)
                if event is not None:
                    raise Blowup(event.t_star, event.cause, state=prev)
            if hit:
                snapshots.append(s)
            if max_steps is not None and n >= max_steps:
                break
    except Blowup as exc:
        run.status = "Blowup"
        run.t_star = exc.t_star
        run.cause = exc.cause
        if exc.state is not None:
            s = exc.state
    run.state = s
    run.steps = n
    return run


__all__ = [
    "IdentityLedger", "LagrangianRecord", "LagrangianRun", "LagrangianState", "StepController",
    "lag_invariants", "lag_rhs", "lag_step", "lag_to_euler", "lagrangian_c",
    "make_lagrangian_gaussian", "particle_stream", "run_lagrangian",
]
