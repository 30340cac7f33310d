"""Same Gaussian data, two convection signs: one run stays smooth, the other blows up.

With the physical sign the Lagrangian run reaches t = 0.05 while its
invariants (int J = 1, int vJ = 0) hold to round-off.  Flipping the sign makes
the gradients explode; the detector stops the run at a finite t*.

    python3 demos/sign_contrast.py
"""

import numpy as np

from swirlmodel import lagrangian
from swirlmodel.model1d import StepController

if __name__ == "__main__":
    for sign in (1, -1):
        s0 = lagrangian.make_lagrangian_gaussian(4096, 1e-4, sign=sign)
        run = lagrangian.run_lagrangian(s0, StepController(dt0=1e-4, cap=0.01), 0.05)
        dj = np.max(np.abs(run.column("int_J") - 1))
        dvj = np.max(np.abs(run.column("int_vJ")))
        print(f"sign {sign:+d}: {run.status} t = {run.state.t:.5f} t* = {run.t_star:.5f} "
              f"({run.cause or '-'}), max J = {run.column('max_J').max():.1f}, "
              f"|int J - 1| <= {dj:.1e}, |int vJ| <= {dvj:.1e}")
