"""Decay or blowup in the reaction-only ODE, as the coefficient d varies.

Starting from u0 = 1e-3, v0 = -1e3 the d = 2 system follows its closed form
through a large transient and then decays like 1/t.  Lowering d below 1 turns
the same start into a finite-time blowup on an attracting ray.

    python3 demos/ode_phase_portrait.py
"""

from swirlmodel import ode

if __name__ == "__main__":
    s0 = ode.OdeState(1e-3, -1e3)

    # closed form against the integrator at d = 2
    t = 0.01
    exact = ode.ode_exact(s0.u, s0.v, t)
    traj = ode.integrate_ode(s0, ode.OdeParams(2.0), t, t)
    print(f"d = 2, t = {t}: exact u = {exact.u:.6e}, integrated u = {traj.u[-1]:.6e}")

    for d in (0.0, 0.5, 0.99, 1.0, 1.5, 2.0, 3.0):
        c = ode.classify_trajectory(s0, ode.OdeParams(d), 100.0)
        print(f"d = {d:4}: {c}  (peak log r = {c.log_r_peak:.1f})")
