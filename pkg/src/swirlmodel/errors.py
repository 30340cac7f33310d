"""Exception types shared across the package."""


class SwirlModelError(Exception):
    """Base class for every error raised by this package."""


class NonZeroMeanError(SwirlModelError, ValueError):
    """A field that must have zero mean (so it has a periodic antiderivative) does not."""


class BadParams(SwirlModelError, ValueError):
    """Invalid physical or numerical parameters."""


class InconsistentInput(SwirlModelError, ValueError):
    """Input fields violate a relation they are required to satisfy."""


class Blowup(SwirlModelError):
    """A computation lost regularity (or resolution) in finite time.

    Blowup is a result, not a crash: callers are expected to catch it and
    record ``t_star`` and ``cause``.

    Attributes:
        t_star: last time at which the solution was finite and accepted.
        cause: short tag, one of ``NonFinite``, ``Magnitude``, ``StepCollapse``,
            ``Pole``, ``ParticleCrossing``, ``NonPositiveJacobian``.
        state: last accepted state (model specific), if available.
    """

    def __init__(self, t_star, cause, message="", state=None):
        self.t_star = float(t_star)
        self.cause = cause
        self.state = state
        text = f"blowup at t*={self.t_star:.17g} ({cause})"
        if message:
            text += f": {message}"
        super().__init__(text)


class BlowupAtPole(Blowup):
    """The closed-form ODE solution hits its pole (u0 = 0, v0 < 0)."""

    def __init__(self, t_pole):
        super().__init__(t_pole, "Pole", "closed-form solution is singular")


class ParticleCrossing(Blowup):
    """Lagrangian particle positions are no longer strictly increasing."""

    def __init__(self, t_star, state=None):
        super().__init__(t_star, "ParticleCrossing", "flow map is not monotone", state)

