"""The reaction-diffusion run: u spikes to ~1e8 near t = 0.001, then v turns positive and u dies.

The default N = 4096 takes about a minute; pass ``--full`` for the
N = 32768 run of the acceptance suite (several minutes).

    python3 demos/reaction_diffusion.py [--full]
"""

import sys

import numpy as np

from swirlmodel import model1d

if __name__ == "__main__":
    n = 32768 if "--full" in sys.argv else 4096
    eps = 1e-3
    s0 = model1d.make_initial_data("rd", n, eps=eps)
    ctrl = model1d.StepController(dt0=0.01 * eps, cap=0.01)
    res = model1d.run_model(s0, model1d.ModelConfig(nu=1.0), ctrl, 0.2007, record_every=20,
                            snapshot_times=(0.0011, 0.2007))
    t, max_u, min_v = res.series["t"], res.series["max_u"], res.series["min_v"]
    i = int(np.argmax(max_u))
    print(f"N = {n}: {res.steps} steps, status {res.status}")
    print(f"peak max u = {max_u[i]:.3e} at t = {t[i]:.7f}; lowest min v = {min_v.min():.3e}")
    first = t[np.argmax(min_v > 0)]
    print(f"first time with v > 0 everywhere: {first:.7f}")
    end = res.snapshots[-1]
    print(f"t = {end.t}: max|u| = {np.max(np.abs(end.u)):.2e}, mean v = {end.v.mean():.5f}")
