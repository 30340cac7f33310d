"""Simulators for a 1D model of axisymmetric Navier-Stokes flow with swirl.

Modules:
    spectral    periodic pseudo-spectral operators
    ode         the reaction-only ODE model
    model1d     reaction-diffusion and Eulerian 1D models
    lagrangian  the inviscid model along particle paths
    lift        exact 3D lift of 1D solutions and its residual checks
    diagnostics per-step records and invariant verdicts
    config, output, cli   configuration, file formats and the command line
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BadParams,
    Blowup,
    BlowupAtPole,
    InconsistentInput,
    NonZeroMeanError,
    ParticleCrossing,
    SwirlModelError,
)

__all__ = [
    "BadParams", "Blowup", "BlowupAtPole", "InconsistentInput", "NonZeroMeanError",
    "ParticleCrossing", "SwirlModelError", "__version__",
]
