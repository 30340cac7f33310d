"""Pseudo-spectral operators on the unit-periodic interval.

Fields are plain 1D float arrays holding node values f(z_j), z_j = j/N.
Every operator infers N from the array length and looks up a cached
:class:`PeriodicGrid`, so callers never have to thread the grid through.

Wavenumbers follow the real-FFT layout: ``2*pi*k`` for k = 0..N/2.  The
Nyquist mode k = N/2 is dropped by odd-order operators (its derivative is
not a real signal) but kept by even-order ones.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from .errors import Blowup, NonZeroMeanError

MEAN_TOL = 1e-12


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform mesh of ``n`` nodes on [0, 1) with its spectral metadata."""

    n: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)
    ik: np.ndarray = field(init=False, repr=False, compare=False)
    k2: np.ndarray = field(init=False, repr=False, compare=False)
    dealias_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ValueError(f"n_nodes must be a power of two >= 8, got {n!r}")
        modes = np.arange(n // 2 + 1)
        k = 2.0 * np.pi * modes
        ik = 1j * k
        ik[-1] = 0.0
        set_ = object.__setattr__
        set_(self, "nodes", np.arange(n) / n)
        set_(self, "k", k)
        set_(self, "ik", ik)
        set_(self, "k2", k * k)
        set_(self, "dealias_mask", modes <= n // 3)
        for name in ("nodes", "k", "ik", "k2", "dealias_mask"):
            getattr(self, name).flags.writeable = False

    @property
    def h(self):
        return 1.0 / self.n

    def integrate(self, f):
        """Rectangle rule over one period; exact for modes below N."""
        return float(np.mean(f, axis=-1))

    def fft(self, f):
        return sfft.rfft(f, axis=-1)

    def ifft(self, f_hat):
        return sfft.irfft(f_hat, n=self.n, axis=-1)


@lru_cache(maxsize=32)
def grid_for(n):
    return PeriodicGrid(int(n))


def _grid(f):
    return grid_for(np.shape(f)[-1])


def check_finite(f, t=float("nan"), what="field"):
    """Raise :class:`Blowup` with cause ``NonFinite`` if ``f`` has NaN/Inf."""
    if not np.all(np.isfinite(f)):
        raise Blowup(t, "NonFinite", f"{what} contains NaN or Inf")
    return f


def derivative(f):
    """Spectral d/dz of a 1-periodic field."""
    g = _grid(f)
    return g.ifft(g.ik * g.fft(f))


def second_derivative(f):
    g = _grid(f)
    return g.ifft(-g.k2 * g.fft(f))


def invert_stream(v):
    """Return psi with d(psi)/dz = -v and mean(psi) = 0.

    Raises :class:`NonZeroMeanError` if ``v`` has no periodic antiderivative.
    """
    g = _grid(v)
    v_hat = g.fft(v)
    mean = v_hat[..., 0].real / g.n
    if np.any(np.abs(mean) > MEAN_TOL * np.max(np.abs(v), axis=-1)):
        raise NonZeroMeanError(f"mean(v) = {mean} is not zero")
    return g.ifft(stream_hat(g, v_hat))


def stream_hat(g, v_hat):
    """Fourier coefficients of the mean-zero stream function of ``v``.

    The k = 0 mode of ``v_hat`` is ignored, which is what the time steppers
    want after they have projected the mean away.
    """
    psi_hat = np.zeros_like(v_hat)
    psi_hat[..., 1:-1] = -v_hat[..., 1:-1] / g.ik[1:-1]
    return psi_hat


def dealias(f):
    """Zero every Fourier mode with |k| > N/3 (the 2/3 rule)."""
    g = _grid(f)
    return g.ifft(g.fft(f) * g.dealias_mask)


def diffuse_implicit(f, nu_dt):
    """Solve g - nu_dt * g'' = f (one backward-Euler diffusion step)."""
    if nu_dt < 0:
        raise ValueError(f"nu_dt must be nonnegative, got {nu_dt}")
    if nu_dt == 0:
        return np.array(f, dtype=float, copy=True)
    g = _grid(f)
    return g.ifft(g.fft(f) / (1.0 + nu_dt * g.k2))


def spectral_l2(f):
    """L2 norm over one period computed from Fourier coefficients (Parseval)."""
    g = _grid(f)
    f_hat = g.fft(f) / g.n
    weights = np.full(f_hat.shape[-1], 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    return float(np.sqrt(np.sum(weights * np.abs(f_hat) ** 2)))


def l2(f):
    return float(np.sqrt(np.mean(np.square(f))))


def project_mean_zero(f):
    return f - np.mean(f, axis=-1, keepdims=True)


def interpolate(f, z):
    """Evaluate the trigonometric interpolant of node values ``f`` at points ``z``.

    Direct O(N * len(z)) sum; meant for diagnostics, not for inner loops.
    """
    g = _grid(f)
    f_hat = g.fft(f) / g.n
    weights = np.full(f_hat.shape[-1], 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty(z.shape)
    chunk = max(1, 2**22 // f_hat.size)
    for start in range(0, z.size, chunk):
        zz = z.ravel()[start:start + chunk]
        phase = np.exp(1j * np.outer(zz, g.k))
        out.ravel()[start:start + chunk] = (phase @ (weights * f_hat)).real
    return out
