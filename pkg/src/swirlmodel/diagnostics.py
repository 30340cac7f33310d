"""Per-step diagnostics and offline verdicts on the invariants of the 1D models.

Everything that judges a run (maximum principle, sup bounds, scaled-family
bounds, blowup) is a pure function of a :class:`Series`, so verdicts can be
recomputed from a stored ``series.csv`` without re-running anything.
"""

import math
from array import array
from dataclasses import dataclass, fields

import numpy as np

from . import spectral
from .errors import Blowup

BLOWUP_MAGNITUDE = 1e12
MAX_PRINCIPLE_TOL = 1e-3
SUP_BOUND_SLACK = 0.01

nan = math.nan


@dataclass
class DiagnosticsRecord:
    t: float
    dt: float = nan
    max_u: float = nan
    min_u: float = nan
    max_v: float = nan
    min_v: float = nan
    mean_v: float = nan
    m_inf: float = nan
    c: float = nan
    l2_u: float = nan
    l2_v: float = nan
    max_abs_psi: float = nan
    max_abs_uz: float = nan
    energy_residual_u: float = nan
    energy_residual_v: float = nan
    bkm_integral: float = nan
    int_J: float = nan
    int_vJ: float = nan
    identity_residual: float = nan


FIELDS = tuple(f.name for f in fields(DiagnosticsRecord))


class Series:
    """Column store of diagnostics records (cheap to append millions of rows)."""

    def __init__(self):
        self._cols = {name: array("d") for name in FIELDS}

    def append(self, record):
        if isinstance(record, DiagnosticsRecord):
            for name in FIELDS:
                self._cols[name].append(getattr(record, name))
        else:
            for name in FIELDS:
                self._cols[name].append(float(record.get(name, nan)))

    def __len__(self):
        return len(self._cols["t"])

    def __getitem__(self, name):
        return np.frombuffer(self._cols[name], dtype=float) if len(self) else np.empty(0)

    def record(self, i):
        return DiagnosticsRecord(**{name: self._cols[name][i] for name in FIELDS})

    def __iter__(self):
        for i in range(len(self)):
            yield self.record(i)

    @classmethod
    def from_columns(cls, columns):
        s = cls()
        n = len(next(iter(columns.values()))) if columns else 0
        for name in FIELDS:
            col = columns.get(name)
            s._cols[name] = array("d", col if col is not None else [nan] * n)
        return s


def field_record(u, v, t, dt=nan, c=nan, psi=None):
    """Fill the Eulerian part of a record from node values of u and v."""
    g = spectral.grid_for(len(u))
    hat = g.fft(np.stack([u, v]))
    uz, vz = g.ifft(g.ik * hat)
    rec = DiagnosticsRecord(
        t=t, dt=dt,
        max_u=float(u.max()), min_u=float(u.min()),
        max_v=float(v.max()), min_v=float(v.min()),
        mean_v=float(np.mean(v)),
        m_inf=float(np.max(uz * uz + vz * vz)),
        c=c,
        l2_u=spectral.l2(u), l2_v=spectral.l2(v),
        max_abs_uz=float(np.max(np.abs(uz))),
    )
    if psi is not None:
        rec.max_abs_psi = float(np.max(np.abs(psi)))
    return rec


def gradient_sup(u, v):
    """max_z (u_z^2 + v_z^2), the quantity of the maximum principle."""
    uz = spectral.derivative(u)
    vz = spectral.derivative(v)
    return float(np.max(uz * uz + vz * vz))


def amplification_constant(u, v):
    """C0 = max_z sqrt(u_z^2 + v_z^2) of the given fields."""
    return math.sqrt(gradient_sup(u, v))


# --- energy budget --------------------------------------------------------

def energy_rates(u, v, nu, model="euler1d", sign=1):
    """Exact time derivatives of int u^2/2 and int v^2/2 implied by the PDE.

    For the Eulerian model the convection term contributes -sign*int(v u^2)
    to the u budget and -sign*int(v^3) to the v budget (integrate by parts
    with psi_z = -v); c(t) drops out because v has zero mean.
    """
    return energy_rates_from(u, v, spectral.derivative(u), spectral.derivative(v),
                             nu, model, sign)


def energy_rates_from(u, v, uz, vz, nu, model="euler1d", sign=1):
    n = len(u)
    uu = u * u
    u2v = float(np.dot(uu, v)) / n
    v3 = float(np.dot(v * v, v)) / n
    diss_u = nu * float(np.dot(uz, uz)) / n
    diss_v = nu * float(np.dot(vz, vz)) / n
    if model == "rd":
        return -2.0 * u2v - diss_u, u2v - v3 - diss_v
    return -(2.0 + sign) * u2v - diss_u, u2v - (1.0 + sign) * v3 - diss_v


def budget_residuals(energies0, energies1, rates0, dt):
    """|E1 - E0 - dt * rate(E0)| / max(E0, 1e-30) for each energy."""
    return tuple(abs(e1 - e0 - dt * r) / max(e0, 1e-30)
                 for e0, e1, r in zip(energies0, energies1, rates0))


def energy_budget(prev, nxt, cfg, model="euler1d"):
    """First-order residuals of the two energy identities across one step.

    Returns ``|dE - dt * rate(prev)| / max(E_prev, 1e-30)`` for the u and v
    energies, where ``dt = nxt.t - prev.t``.
    """
    rates = energy_rates(prev.u, prev.v, cfg.nu, model, cfg.sign)
    e0 = (0.5 * float(np.mean(prev.u ** 2)), 0.5 * float(np.mean(prev.v ** 2)))
    e1 = (0.5 * float(np.mean(nxt.u ** 2)), 0.5 * float(np.mean(nxt.v ** 2)))
    return budget_residuals(e0, e1, rates, nxt.t - prev.t)


# --- verdicts ---------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    passed: bool
    detail: str = ""
    first_violation_t: float = nan
    worst_ratio: float = nan

    def __bool__(self):
        return self.passed

    def __str__(self):
        return ("Pass" if self.passed else "Fail") + (f" ({self.detail})" if self.detail else "")


def max_principle_monitor(series, tol=MAX_PRINCIPLE_TOL):
    """Check m_inf(t) <= m_inf(0) * (1 + tol) along the whole series."""
    m = series["m_inf"]
    t = series["t"]
    if len(m) == 0:
        return Verdict(True, "empty series")
    m0 = m[0]
    limit = m0 * (1.0 + tol)
    bad = np.nonzero(m > limit)[0]
    ratio = float(np.max(m) / m0) if m0 > 0 else (0.0 if np.max(m) == 0 else math.inf)
    if bad.size == 0:
        return Verdict(True, f"max m_inf/m_inf(0) = {ratio:.9g}", worst_ratio=ratio)
    i = int(bad[0])
    return Verdict(False, f"m_inf grew to {m[i]:.6g} > {limit:.6g} at t={t[i]:.9g}",
                   float(t[i]), ratio)


def sup_bounds_check(series, u0, v0, slack=SUP_BOUND_SLACK):
    """Check |v| <= C0 and |u| <= |u0|_inf exp(2 C0 t), with C0 from the initial fields."""
    c0 = amplification_constant(u0, v0)
    u0_inf = float(np.max(np.abs(u0)))
    return sup_bounds_from_constants(series, c0, u0_inf, slack)


def sup_bounds_from_constants(series, c0, u0_inf, slack=SUP_BOUND_SLACK):
    t = series["t"]
    v_sup = np.maximum(np.abs(series["max_v"]), np.abs(series["min_v"]))
    u_sup = np.maximum(np.abs(series["max_u"]), np.abs(series["min_u"]))
    v_bad = v_sup > (1.0 + slack) * c0
    u_bad = u_sup > (1.0 + slack) * u0_inf * np.exp(2.0 * c0 * t)
    bad = np.nonzero(v_bad | u_bad)[0]
    worst = float(np.max(v_sup) / c0) if c0 > 0 and len(v_sup) else 0.0
    if bad.size == 0:
        return Verdict(True, f"C0={c0:.9g}, max|v|/C0={worst:.6g}", worst_ratio=worst)
    i = int(bad[0])
    which = "|v|" if v_bad[i] else "|u|"
    return Verdict(False, f"{which} bound violated at t={t[i]:.9g}", float(t[i]), worst)


def scaled_family_bounds(snapshots, A, M, c0, slack=SUP_BOUND_SLACK):
    """Check the five a priori bounds of the scaled initial-data family.

    ``snapshots`` is an iterable of (t, u, v) with u = u1bar and v = -psi1bar_z.
    """
    limits = {
        "psi": c0 * A / M**2,
        "u": c0 * A / M,
        "psi_z": c0 * A / M,
        "omega": c0 * A,
        "u_z": c0 * A,
    }
    worst = {k: 0.0 for k in limits}
    for t, u, v in snapshots:
        psi = spectral.invert_stream(spectral.project_mean_zero(v))
        values = {
            "psi": np.max(np.abs(psi)),
            "u": np.max(np.abs(u)),
            "psi_z": np.max(np.abs(v)),
            "omega": np.max(np.abs(spectral.derivative(v))),
            "u_z": np.max(np.abs(spectral.derivative(u))),
        }
        for k, val in values.items():
            ratio = float(val / limits[k])
            worst[k] = max(worst[k], ratio)
            if ratio > 1.0 + slack:
                return Verdict(False, f"{k} bound violated at t={t:.9g} (ratio {ratio:.6g})",
                               float(t), ratio)
    detail = ", ".join(f"{k}:{r:.4g}" for k, r in worst.items())
    return Verdict(True, f"worst ratios {detail}", worst_ratio=max(worst.values()))


@dataclass(frozen=True)
class BlowupEvent:
    t_star: float
    cause: str


def detect_blowup(record, dt_min=0.0, last_finite_t=None, gradient_limit=BLOWUP_MAGNITUDE):
    """Inspect one record; return a :class:`BlowupEvent` or None.

    Fires on non-finite values, on an extremum of u or v beyond 1e12, on
    m_inf = |u_z^2 + v_z^2|_inf beyond ``gradient_limit``, or on a step
    below ``dt_min``.  A missing (NaN) m_inf is ignored.  Pass
    ``gradient_limit=math.inf`` for models whose fronts steepen without
    singular behaviour (the reaction-diffusion model).
    """
    extrema = (record.max_u, record.min_u, record.max_v, record.min_v)
    t_star = record.t if last_finite_t is None else last_finite_t
    if not all(math.isfinite(x) for x in extrema) or (
            math.isinf(record.m_inf) and gradient_limit < math.inf):
        return BlowupEvent(t_star, "NonFinite")
    if max(abs(x) for x in extrema) > BLOWUP_MAGNITUDE or record.m_inf > gradient_limit:
        return BlowupEvent(t_star, "Magnitude")
    if math.isfinite(record.dt) and record.dt < dt_min:
        return BlowupEvent(t_star, "StepCollapse")
    return None


def detect_blowup_series(series, dt_min=0.0, gradient_limit=BLOWUP_MAGNITUDE):
    """First blowup event in a stored series, or None."""
    last = None
    for rec in series:
        ev = detect_blowup(rec, dt_min, last, gradient_limit)
        if ev is not None:
            return ev
        last = rec.t
    return None


def raise_if_blowup(record, dt_min, last_finite_t, state=None):
    ev = detect_blowup(record, dt_min, last_finite_t)
    if ev is not None:
        raise Blowup(ev.t_star, ev.cause, state=state)
