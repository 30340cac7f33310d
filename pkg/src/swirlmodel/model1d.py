"""Reaction-diffusion and Eulerian 1D models on the unit-periodic interval.

Eulerian model (sign = +1 is the physical one)::

    u_t + sign * 2 psi u_z = nu u_zz - 2 v u
    v_t + sign * 2 psi v_z = nu v_zz + u^2 - v^2 + c(t),     v = -psi_z

c(t) keeps mean(v) = 0.  The reaction-diffusion model drops the convection
terms and c(t).  Time stepping is forward Euler on the explicit terms with
backward-Euler diffusion (``imex``), or Heun's method for inviscid runs
(``rk2``).  Both work on the stacked Fourier coefficients of (u, v).
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import diagnostics, spectral
from .errors import BadParams, Blowup

RD = "rd"
EULER1D = "euler1d"
IMEX = "imex"
RK2 = "rk2"
RK3 = "rk3"


@dataclass(frozen=True)
class ModelConfig:
    """Physical and numerical settings of a 1D run.

    ``sign = -1`` flips the convection velocity to -2 psi (the unphysical
    focusing variant).  ``cfl`` bounds dt * N * max|2 psi| for the explicit
    convection.
    """

    nu: float = 1.0
    sign: int = 1
    dealias: bool = True
    scheme: str = IMEX
    cfl: float = 0.25

    def __post_init__(self):
        if not (self.nu >= 0 and math.isfinite(self.nu)):
            raise BadParams(f"nu must be >= 0, got {self.nu}")
        if self.sign not in (1, -1):
            raise BadParams(f"sign must be +1 or -1, got {self.sign}")
        if self.scheme not in (IMEX, RK2, RK3):
            raise BadParams(f"unknown scheme {self.scheme!r}")
        if self.scheme in (RK2, RK3) and self.nu != 0:
            raise BadParams(f"the {self.scheme} scheme is for inviscid runs (nu = 0)")
        if not self.cfl > 0:
            raise BadParams(f"cfl must be positive, got {self.cfl}")


@dataclass
class StepController:
    """Adaptive step rule dt * (|max u| + |min u| + |max v| + |min v|) <= cap."""

    dt0: float
    cap: float = 0.01
    dt_min: float = 1e-13
    dt: float = math.nan

    def __post_init__(self):
        if not (self.dt0 > 0 and self.cap > 0 and self.dt_min > 0):
            raise BadParams("dt0, cap and dt_min must be positive")


@dataclass
class RdState:
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0
    spec: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    phys: Optional[tuple] = field(default=None, repr=False, compare=False)

    kind = RD

    def copy(self):
        return RdState(self.u.copy(), self.v.copy(), self.t)


@dataclass
class EulerState:
    """(u, v) of the Eulerian model; ``psi`` and ``c`` are derived on demand.

    Build with :meth:`from_fields` to get v projected to zero mean.
    """

    u: np.ndarray
    v: np.ndarray
    t: float = 0.0
    sign: int = 1
    spec: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    phys: Optional[tuple] = field(default=None, repr=False, compare=False)

    kind = EULER1D

    @classmethod
    def from_fields(cls, u, v, t=0.0, sign=1):
        u = np.asarray(u, dtype=float).copy()
        v = spectral.project_mean_zero(np.asarray(v, dtype=float))
        return cls(u, v, t, sign)

    @cached_property
    def psi(self):
        return spectral.invert_stream(self.v)

    @cached_property
    def c(self):
        return compute_c(self.u, self.v, self.sign)

    def copy(self):
        return EulerState(self.u.copy(), self.v.copy(), self.t, self.sign)


def compute_c(u, v, sign=1):
    """Integration constant that keeps mean(v) fixed.

    For the physical sign this is 3 int v^2 - int u^2; in general the
    convection term contributes 2 * sign * int v^2.
    """
    n = len(u)
    return ((1.0 + 2.0 * sign) * float(np.dot(v, v)) - float(np.dot(u, u))) / n


def rd_rhs(u, v, dealias_on=False):
    """Reaction terms (-2 v u, u^2 - v^2)."""
    du = -2.0 * v * u
    dv = u * u - v * v
    if dealias_on:
        du = spectral.dealias(du)
        dv = spectral.dealias(dv)
    return du, dv


def euler1d_rhs(s, cfg):
    """Explicit right-hand side of the Eulerian model (diffusion excluded)."""
    g = spectral.grid_for(len(s.u))
    hat = _spec(s, g)
    nl_hat = _explicit_hat((s.u, s.v), hat, g, cfg, EULER1D, _phys(s, g))
    du, dv = g.ifft(nl_hat)
    return du, dv


def _spec(s, g):
    if s.spec is None:
        s.spec = g.fft(np.stack([s.u, s.v]))
    return s.spec


def _derivs(hat, g):
    """(u_z, v_z, psi) on the nodes from the stacked coefficients of (u, v)."""
    rows = np.empty((3, hat.shape[-1]), dtype=complex)
    np.multiply(g.ik, hat, out=rows[:2])
    rows[2] = spectral.stream_hat(g, hat[1])
    return g.ifft(rows)


def _fields(hat, g):
    """(u, v) and (u_z, v_z, psi) from one batched inverse transform."""
    rows = np.empty((5, hat.shape[-1]), dtype=complex)
    rows[:2] = hat
    np.multiply(g.ik, hat, out=rows[2:4])
    rows[4] = spectral.stream_hat(g, hat[1])
    out = g.ifft(rows)
    return out[:2], (out[2], out[3], out[4])


def _phys(s, g):
    if s.phys is None:
        s.phys = _derivs(_spec(s, g), g)
    return s.phys


def _explicit_hat(U, hat, g, cfg, kind, phys=None):
    """Fourier coefficients of the explicit terms for stacked fields U = (u, v)."""
    u, v = U
    if kind == RD:
        nl = np.stack([-2.0 * v * u, u * u - v * v])
        nl_hat = g.fft(nl)
        if cfg.dealias:
            nl_hat *= g.dealias_mask
        return nl_hat
    uz, vz, psi = _derivs(hat, g) if phys is None else phys
    w = (-2.0 * cfg.sign) * psi
    nl = np.empty((2, g.n))
    nl[0] = w * uz - 2.0 * v * u
    nl[1] = w * vz + u * u - v * v
    nl_hat = g.fft(nl)
    if cfg.dealias:
        nl_hat *= g.dealias_mask
    nl_hat[1, 0] += compute_c(u, v, cfg.sign) * g.n
    return nl_hat


def reaction_speed(u, v):
    return abs(u.max()) + abs(u.min()) + abs(v.max()) + abs(v.min())


def adapt_dt(u, v, ctrl, psi=None, cfl=None, t=math.nan):
    """Step size from the reaction rule, capped by dt0 and optionally by a CFL bound.

    Raises:
        Blowup: (cause ``StepCollapse``) if the rule asks for dt < dt_min.
    """
    s = reaction_speed(u, v)
    if not math.isfinite(s):
        raise Blowup(t, "NonFinite", "non-finite field while choosing dt")
    dt = ctrl.dt0 if s == 0 else min(ctrl.dt0, ctrl.cap / s)
    if psi is not None and cfl is not None:
        speed = 2.0 * float(np.max(np.abs(psi)))
        if speed > 0:
            dt = min(dt, cfl / (len(u) * speed))
    if dt < ctrl.dt_min:
        raise Blowup(t, "StepCollapse", f"dt={dt:.3g} below dt_min={ctrl.dt_min:.3g}")
    ctrl.dt = dt
    return dt


def _choose_dt(s, cfg, ctrl, g, dt, t_stop):
    if dt is None:
        psi = _phys(s, g)[2] if s.kind == EULER1D else None
        dt = adapt_dt(s.u, s.v, ctrl, psi, cfg.cfl, s.t)
    if t_stop is not None and s.t + dt > t_stop:
        dt = t_stop - s.t
    return dt


def _finish(s, new_hat, t_new, g):
    if s.kind == EULER1D:
        new_hat[1, 0] = 0.0
        (u, v), phys = _fields(new_hat, g)
        out = EulerState(u, v, t_new, s.sign, spec=new_hat, phys=phys)
    else:
        u, v = g.ifft(new_hat)
        out = RdState(u, v, t_new, spec=new_hat)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise Blowup(s.t, "NonFinite", "non-finite values after step", state=s)
    return out


def step_imex(s, cfg, ctrl, dt=None, t_stop=None):
    """One forward-Euler (explicit terms) / backward-Euler (diffusion) step."""
    g = spectral.grid_for(len(s.u))
    dt = _choose_dt(s, cfg, ctrl, g, dt, t_stop)
    hat = _spec(s, g)
    phys = _phys(s, g) if s.kind == EULER1D else None
    nl_hat = _explicit_hat((s.u, s.v), hat, g, cfg, s.kind, phys)
    new_hat = (hat + dt * nl_hat) / (1.0 + cfg.nu * dt * g.k2)
    return _finish(s, new_hat, s.t + dt, g)


def step_rk2(s, cfg, ctrl, dt=None, t_stop=None):
    """One Heun (explicit trapezoidal) step; inviscid only."""
    if cfg.nu != 0:
        raise BadParams("step_rk2 requires nu = 0")
    g = spectral.grid_for(len(s.u))
    dt = _choose_dt(s, cfg, ctrl, g, dt, t_stop)
    hat = _spec(s, g)
    phys = _phys(s, g) if s.kind == EULER1D else None
    k1 = _explicit_hat((s.u, s.v), hat, g, cfg, s.kind, phys)
    mid_hat = hat + dt * k1
    if s.kind == EULER1D:
        mid_hat[1, 0] = 0.0
    if s.kind == EULER1D:
        mid, mid_phys = _fields(mid_hat, g)
    else:
        mid, mid_phys = g.ifft(mid_hat), None
    k2 = _explicit_hat(mid, mid_hat, g, cfg, s.kind, mid_phys)
    new_hat = hat + 0.5 * dt * (k1 + k2)
    return _finish(s, new_hat, s.t + dt, g)


def _stage(s, hat, g, cfg):
    """Explicit rates at an intermediate stage given by its coefficients."""
    if s.kind == EULER1D:
        hat[1, 0] = 0.0
        fields_, phys = _fields(hat, g)
    else:
        fields_, phys = g.ifft(hat), None
    return _explicit_hat(fields_, hat, g, cfg, s.kind, phys)


def step_rk3(s, cfg, ctrl, dt=None, t_stop=None):
    """One strong-stability-preserving third-order Runge-Kutta step; inviscid only.

    Unlike Heun's method its stability region contains a segment of the
    imaginary axis, so pure convection is not amplified at high wavenumbers.
    """
    if cfg.nu != 0:
        raise BadParams("step_rk3 requires nu = 0")
    g = spectral.grid_for(len(s.u))
    dt = _choose_dt(s, cfg, ctrl, g, dt, t_stop)
    hat = _spec(s, g)
    phys = _phys(s, g) if s.kind == EULER1D else None
    h1 = hat + dt * _explicit_hat((s.u, s.v), hat, g, cfg, s.kind, phys)
    h2 = 0.75 * hat + 0.25 * (h1 + dt * _stage(s, h1, g, cfg))
    new_hat = hat / 3.0 + (2.0 / 3.0) * (h2 + dt * _stage(s, h2, g, cfg))
    return _finish(s, new_hat, s.t + dt, g)


def step(s, cfg, ctrl, dt=None, t_stop=None):
    if cfg.scheme == RK3:
        return step_rk3(s, cfg, ctrl, dt, t_stop)
    if cfg.scheme == RK2:
        return step_rk2(s, cfg, ctrl, dt, t_stop)
    return step_imex(s, cfg, ctrl, dt, t_stop)


# --- initial data -----------------------------------------------------------

def sin_profile(y):
    return np.sin(2.0 * np.pi * y)


PROFILES = {"sin": sin_profile}


def gaussian_v(z, eps):
    """1 - exp(-(z - 1/2)^2 / eps) / sqrt(pi eps), a sharp negative well of unit mass."""
    delta = math.sqrt(eps * math.pi)
    return 1.0 - np.exp(-((z - 0.5) ** 2) / eps) / delta


def _profile(p):
    if callable(p):
        return p
    try:
        return PROFILES[p]
    except KeyError:
        raise BadParams(f"unknown profile {p!r}; choose from {sorted(PROFILES)}") from None


def make_initial_data(kind, grid, eps=None, A=1.0, M=1, profile_u="sin", profile_psi="sin",
                      sign=1):
    """Initial state for the named experiment.

    kind:
        ``"rd"``: u = eps (2 + sin 2 pi z), v = -1/eps - sin 2 pi z
            (default eps = 1e-3); returns :class:`RdState`.
        ``"gaussian"``: u = 1, v = :func:`gaussian_v` (default eps = 1e-4),
            projected to zero mean; returns :class:`EulerState`.
        ``"scaled"``: psi1 = (A/M^2) Psi(zM), u1 = (A/M) U(zM),
            v = -psi1_z; returns :class:`EulerState`.
    """
    if isinstance(grid, (int, np.integer)):
        grid = spectral.grid_for(grid)
    z = grid.nodes
    if kind == "rd":
        eps = 1e-3 if eps is None else eps
        if not eps > 0:
            raise BadParams(f"eps must be positive, got {eps}")
        s = np.sin(2.0 * np.pi * z)
        return RdState(eps * (2.0 + s), -1.0 / eps - s)
    if kind == "gaussian":
        eps = 1e-4 if eps is None else eps
        if not eps > 0:
            raise BadParams(f"eps must be positive, got {eps}")
        return EulerState.from_fields(np.ones_like(z), gaussian_v(z, eps), sign=sign)
    if kind == "scaled":
        if not (A > 0 and math.isfinite(A)):
            raise BadParams(f"A must be positive, got {A}")
        if int(M) != M or M < 1:
            raise BadParams(f"M must be a positive integer, got {M}")
        M = int(M)
        if M >= grid.n // 8:
            raise BadParams(f"M={M} is under-resolved on N={grid.n}")
        y = (z * M) % 1.0
        psi1 = A / M**2 * _profile(profile_psi)(y)
        u1 = A / M * _profile(profile_u)(y)
        v = -spectral.derivative(psi1)
        return EulerState.from_fields(u1, v, sign=sign)
    raise BadParams(f"unknown initial-data kind {kind!r}")


def scaled_family_c0(profile_u="sin", profile_psi="sin", n=4096):
    """C0 = max_y sqrt(U'(y)^2 + W(y)^2) with W = -Psi'', derivatives spectral."""
    y = spectral.grid_for(n).nodes
    U = _profile(profile_u)(y)
    Psi = _profile(profile_psi)(y)
    Uy = spectral.derivative(U)
    W = -spectral.second_derivative(Psi)
    return float(np.sqrt(np.max(Uy * Uy + W * W)))


# --- driver -----------------------------------------------------------------

@dataclass
class RunResult:
    state: object
    series: diagnostics.Series
    snapshots: list
    status: str = "Completed"
    t_star: float = math.nan
    cause: str = ""
    steps: int = 0

    @property
    def blew_up(self):
        return self.status == "Blowup"


def _state_diagnostics(s, cfg):
    """Record fields plus the energy data needed by the next step's budget."""
    g = spectral.grid_for(len(s.u))
    uz, vz, psi = _phys(s, g)
    u, v = s.u, s.v
    grad2 = uz * uz + vz * vz
    rec = diagnostics.DiagnosticsRecord(
        t=s.t,
        max_u=float(u.max()), min_u=float(u.min()),
        max_v=float(v.max()), min_v=float(v.min()),
        mean_v=float(np.mean(v)),
        m_inf=float(grad2.max()),
        l2_u=spectral.l2(u), l2_v=spectral.l2(v),
        max_abs_uz=float(np.max(np.abs(uz))),
    )
    if s.kind == EULER1D:
        rec.c = s.c
        rec.max_abs_psi = float(np.max(np.abs(psi)))
    energies = (0.5 * rec.l2_u**2, 0.5 * rec.l2_v**2)
    rates = diagnostics.energy_rates_from(u, v, uz, vz, cfg.nu, s.kind, cfg.sign)
    return rec, energies, rates


def run_model(init, cfg, ctrl, t_end, record_every=1, snapshot_times=(),
              snapshot_every=None, on_record: Optional[Callable] = None, max_steps=None):
    """Advance ``init`` to ``t_end`` (or blowup) and collect diagnostics.

    Steps are shortened to land exactly on ``snapshot_times`` and ``t_end``.
    A blowup ends the run with ``status == "Blowup"``; it is not re-raised.
    ``record_every`` sets the stride (in steps) of the scalar records;
    ``snapshot_every`` additionally snapshots every that many steps.
    """
    s = init
    if s.kind == EULER1D and s.sign != cfg.sign:
        s = EulerState(s.u, s.v, s.t, cfg.sign)
    series = diagnostics.Series()
    snapshots = []
    stops = sorted(t for t in snapshot_times if s.t < t <= t_end)
    if s.t in snapshot_times:
        snapshots.append(s.copy())
    bkm = 0.0
    rec, energies, rates = _state_diagnostics(s, cfg)
    rec.bkm_integral = bkm
    series.append(rec)
    if on_record:
        on_record(rec)
    last_recorded = s
    gradient_limit = math.inf if s.kind == RD else diagnostics.BLOWUP_MAGNITUDE
    n = 0
    stop_i = 0
    result = RunResult(s, series, snapshots)
    try:
        while s.t < t_end:
            while stop_i < len(stops) and stops[stop_i] <= s.t:
                stop_i += 1
            t_stop = stops[stop_i] if stop_i < len(stops) else t_end
            prev = s
            s = step(s, cfg, ctrl, t_stop=t_stop)
            if t_stop - s.t <= 1e-15 * max(1.0, abs(t_stop)):
                s.t = t_stop
            n += 1
            dt = s.t - prev.t
            bkm += dt * float(np.max(np.abs(s.v)))
            magnitude = max(float(np.max(np.abs(s.u))), float(np.max(np.abs(s.v))))
            if magnitude > diagnostics.BLOWUP_MAGNITUDE:
                raise Blowup(prev.t, "Magnitude", state=prev)
            at_stop = stop_i < len(stops) and s.t == stops[stop_i]
            if n % record_every == 0 or s.t >= t_end or at_stop:
                new_rec, new_energies, new_rates = _state_diagnostics(s, cfg)
                new_rec.dt = dt
                new_rec.bkm_integral = bkm
                if last_recorded is prev:
                    new_rec.energy_residual_u, new_rec.energy_residual_v = (
                        diagnostics.budget_residuals(energies, new_energies, rates, dt))
                rec, energies, rates = new_rec, new_energies, new_rates
                series.append(rec)
                # step collapse is raised by adapt_dt; a step shortened to hit a stop is legitimate
                event = diagnostics.detect_blowup(rec, 0.0, prev.t, gradient_limit)
                if event is not None:
                    raise Blowup(event.t_star, event.cause, state=prev)
                if on_record:
                    on_record(rec)
                last_recorded = s
            if at_stop or (snapshot_every and n % snapshot_every == 0):
                snapshots.append(s)
            if max_steps is not None and n >= max_steps:
                break
    except Blowup as exc:
        result.status = "Blowup"
        result.t_star = exc.t_star if math.isfinite(exc.t_star) else s.t
        result.cause = exc.cause
        if exc.state is not None:
            s = exc.state
    result.state = s
    result.steps = n
    return result
