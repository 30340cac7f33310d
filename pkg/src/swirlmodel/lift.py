"""Lift a 1D Eulerian state to exact axisymmetric 3D fields and check them.

A solution (u1, omega1, psi1)(z, t) of the 1D model gives the 3D fields

    u = r u1,   omega = r omega1,   psi = r psi1,
    v^r = -psi_z = r v,   v^z = (1/r) (r psi)_r = 2 psi1,

which solve the axisymmetric Navier-Stokes system in (u, omega, psi) form:

    u_t + v^r u_r + v^z u_z = nu (lap - 1/r^2) u - v^r u / r
    omega_t + v^r omega_r + v^z omega_z = nu (lap - 1/r^2) omega + (u^2)_z / r + v^r omega / r
    -(lap - 1/r^2) psi = omega,          lap = d_rr + d_r / r + d_zz.

Every field here has the form r^p f(z), so r-derivatives are exact and
z-derivatives are spectral.  The residuals are assembled term by term from
those pieces; nothing assumes the identity (lap - 1/r^2)(r f) = r f''.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import model1d, spectral
from .errors import InconsistentInput

DEFAULT_R_SAMPLES = (0.01, 0.1, 1.0, 10.0)
CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class Radial:
    """The field r^p f(z), with f given by its node values."""

    p: int
    f: np.ndarray

    def at(self, r):
        return np.multiply.outer(np.asarray(r, dtype=float) ** self.p, self.f)

    def dr(self, r):
        if self.p == 0:
            return np.zeros(np.shape(r) + self.f.shape)
        return self.p * np.multiply.outer(np.asarray(r, dtype=float) ** (self.p - 1), self.f)

    def drr(self, r):
        if self.p in (0, 1):
            return np.zeros(np.shape(r) + self.f.shape)
        return self.p * (self.p - 1) * np.multiply.outer(
            np.asarray(r, dtype=float) ** (self.p - 2), self.f)

    def dz(self, r):
        return Radial(self.p, spectral.derivative(self.f)).at(r)

    def dzz(self, r):
        return Radial(self.p, spectral.second_derivative(self.f)).at(r)

    def laplacian_swirl(self, r):
        """(d_rr + d_r / r + d_zz - 1/r^2) applied to the field."""
        rr = np.asarray(r, dtype=float)[:, None]
        return self.drr(r) + self.dr(r) / rr + self.dzz(r) - self.at(r) / rr**2


@dataclass(frozen=True)
class LiftedSample:
    r: float
    z: float
    u: float
    omega: float
    psi: float
    vr: float
    vz: float


@dataclass(frozen=True)
class Lift:
    """Lifted fields on the tensor grid r_samples x z nodes (arrays of shape (R, N))."""

    r: np.ndarray
    z: np.ndarray
    u: np.ndarray
    omega: np.ndarray
    psi: np.ndarray
    vr: np.ndarray
    vz: np.ndarray

    def samples(self):
        for i, r in enumerate(self.r):
            for j, z in enumerate(self.z):
                yield LiftedSample(float(r), float(z), self.u[i, j], self.omega[i, j],
                                   self.psi[i, j], self.vr[i, j], self.vz[i, j])


def _check_consistent(omega1, psi1, tol=CONSISTENCY_TOL):
    err = float(np.max(np.abs(omega1 + spectral.second_derivative(psi1))))
    scale = max(1.0, float(np.max(np.abs(omega1))))
    if err > tol * scale:
        raise InconsistentInput(f"omega1 != -psi1_zz (max deviation {err:.3g})")


def _meridional(psi1, power=1):
    """v^r = -psi_z and v^z = (1/r)(r psi)_r for psi = r^power psi1."""
    psi = Radial(power, psi1)

    def vr(r):
        return -psi.dz(r)

    def vz(r):
        rr = np.asarray(r, dtype=float)[:, None]
        # (r psi)_r / r = psi / r + psi_r
        return psi.at(r) / rr + psi.dr(r)

    return vr, vz


def lift(u1, omega1, psi1, r_samples=DEFAULT_R_SAMPLES, power=1, check=True):
    """Evaluate the lifted 3D fields at the given radii.

    ``power`` other than 1 builds a deliberately wrong lift r^power f(z),
    used to exercise the detectors.

    Raises:
        InconsistentInput: if omega1 != -psi1_zz within 1e-8 (relative to
            max(1, |omega1|_inf)).
    """
    u1, omega1, psi1 = (np.asarray(a, dtype=float) for a in (u1, omega1, psi1))
    if check:
        _check_consistent(omega1, psi1)
    r = np.asarray(r_samples, dtype=float)
    vr, vz = _meridional(psi1, power)
    return Lift(
        r=r, z=spectral.grid_for(len(u1)).nodes,
        u=Radial(power, u1).at(r), omega=Radial(power, omega1).at(r),
        psi=Radial(power, psi1).at(r), vr=vr(r), vz=vz(r),
    )


def lift_state(state, r_samples=DEFAULT_R_SAMPLES, power=1):
    """Lift an EulerState: u1 = u, psi1 = psi, omega1 = v_z."""
    return lift(state.u, spectral.derivative(state.v), state.psi, r_samples, power)


@dataclass(frozen=True)
class ResidualReport:
    """Normalized infinity-norm residuals of the three 3D equations.

    ``raw`` holds the unnormalized residual arrays (shape (R, N)), and
    ``scale`` the largest constituent term of each equation.
    """

    u: float
    omega: float
    psi: float
    raw: dict
    scale: dict
    r_samples: tuple

    def max(self):
        return max(self.u, self.omega, self.psi)

    def passed(self, tol=1e-8):
        return self.max() <= tol


def _time_derivatives(state, cfg):
    """(u1_t, omega1_t) from the model right-hand side, diffusion included."""
    du, dv = model1d.euler1d_rhs(state, cfg)
    if cfg.nu:
        du = du + cfg.nu * spectral.second_derivative(state.u)
        dv = dv + cfg.nu * spectral.second_derivative(state.v)
    return du, spectral.derivative(dv)


def _assemble(u1, omega1, psi1, u1_t, omega1_t, nu, r_samples):
    r = np.asarray(r_samples, dtype=float)
    rr = r[:, None]
    u = Radial(1, u1)
    om = Radial(1, omega1)
    psi = Radial(1, psi1)
    vr_f, vz_f = _meridional(psi1)
    vr, vz = vr_f(r), vz_f(r)
    uu = u.at(r)

    terms_u = {
        "u_t": Radial(1, u1_t).at(r),
        "vr_u_r": vr * u.dr(r),
        "vz_u_z": vz * u.dz(r),
        "diffusion": -nu * u.laplacian_swirl(r),
        "stretch": vr * uu / rr,
    }
    u2_z = Radial(2, u1 * u1).dz(r)
    terms_w = {
        "omega_t": Radial(1, omega1_t).at(r),
        "vr_omega_r": vr * om.dr(r),
        "vz_omega_z": vz * om.dz(r),
        "diffusion": -nu * om.laplacian_swirl(r),
        "u2_z": -u2_z / rr,
        "stretch": -vr * om.at(r) / rr,
    }
    terms_p = {
        "laplacian": -psi.laplacian_swirl(r),
        "omega": -om.at(r),
    }
    out = {}
    raw = {}
    scale = {}
    for name, terms in (("u", terms_u), ("omega", terms_w), ("psi", terms_p)):
        res = sum(terms.values())
        big = max(float(np.max(np.abs(t))) for t in terms.values())
        raw[name] = res
        scale[name] = big
        norm = float(np.max(np.abs(res)))
        out[name] = norm / big if big > 0 else norm
    return ResidualReport(out["u"], out["omega"], out["psi"], raw, scale, tuple(r))


def residual_axisym(state, cfg, r_samples=DEFAULT_R_SAMPLES, omega1=None):
    """Residuals of the 3D system for the lift of ``state``.

    Time derivatives come from the model right-hand side, so the check is
    purely spatial.  ``omega1`` overrides the vorticity profile (default
    v_z) without touching the time derivatives; a corrupted override shows
    up in the stream-function and vorticity residuals.
    """
    u1 = state.u
    psi1 = state.psi
    omega1 = spectral.derivative(state.v) if omega1 is None else np.asarray(omega1, float)
    u1_t, omega1_t = _time_derivatives(state, cfg)
    return _assemble(u1, omega1, psi1, u1_t, omega1_t, cfg.nu, r_samples)


def residual_axisym_fd(state0, state1, cfg, r_samples=DEFAULT_R_SAMPLES):
    """Residuals with time derivatives from two snapshots (first order in dt).

    The spatial terms are evaluated at ``state0``; the error is O(dt).
    """
    dt = state1.t - state0.t
    if not dt > 0:
        raise ValueError("snapshots must be ordered in time")
    u1_t = (state1.u - state0.u) / dt
    omega1_t = spectral.derivative((state1.v - state0.v) / dt)
    return _assemble(state0.u, spectral.derivative(state0.v), state0.psi, u1_t, omega1_t,
                     cfg.nu, r_samples)


def incompressibility_residual(lifted_psi1, r_samples=DEFAULT_R_SAMPLES, power=1):
    """max |(r v^r)_r + (r v^z)_z| over the samples, with exact r-derivatives.

    For psi = r^p f: r v^r = -r^(p+1) f' and r v^z = (p + 1) r^p f.
    """
    r = np.asarray(r_samples, dtype=float)
    f = np.asarray(lifted_psi1, dtype=float)
    fz = spectral.derivative(f)
    r_vr = Radial(power + 1, -fz)
    r_vz = Radial(power, (power + 1) * f)
    return float(np.max(np.abs(r_vr.dr(r) + r_vz.dz(r))))


@dataclass(frozen=True)
class CompatibilityReport:
    axis_max: float
    oddness_max: float

    @property
    def vanishes_on_axis(self):
        return self.axis_max == 0.0

    @property
    def odd_in_r(self):
        return self.oddness_max <= 1e-14

    @property
    def passed(self):
        return self.vanishes_on_axis and self.odd_in_r


def compatibility_check(state, r_samples=DEFAULT_R_SAMPLES, power=1):
    """Check u = omega = psi = 0 on the axis and oddness in r of the lift."""
    fields = (state.u, spectral.derivative(state.v), state.psi)
    axis = 0.0
    odd = 0.0
    r = np.asarray(r_samples, dtype=float)
    for f in fields:
        F = Radial(power, np.asarray(f, dtype=float))
        axis = max(axis, float(np.max(np.abs(F.at(np.zeros(1))))))
        scale = max(float(np.max(np.abs(F.at(r)))), math.ulp(1.0))
        odd = max(odd, float(np.max(np.abs(F.at(-r) + F.at(r)))) / scale)
    return CompatibilityReport(axis, odd)
