"""Smooth step and mollifier profiles, evaluated on floats or on jets."""

import numpy as np

from .jets import Jet, jexp

# below this argument exp(-1/t) and every derivative is under 1e-400
_TINY = 1e-3

BUMP_MASS_2D = 0.14849550677592205  # int_0^1 exp(-1/s) ds = E_2(1)


def _E(t):
    """exp(-1/t) for t > 0, zero otherwise."""
    if isinstance(t, Jet):
        keep = t.value.real > _TINY
        safe = Jet(np.where(keep, t.c, 1.0))
        return jexp(-1.0 / safe).masked(keep)
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    keep = t > _TINY
    out[keep] = np.exp(-1.0 / t[keep])
    return out


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, with step(t) + step(1-t) = 1."""
    a = _E(t)
    b = _E(1.0 - t)
    return a / (a + b)


def mollifier(t):
    """exp(-1/(1-t^2)) on |t| < 1, zero outside."""
    return _E(1.0 - t * t)


def radial_profile(u):
    """exp(-1/(1-u)) on u < 1 where u is a squared radius; zero outside."""
    return _E(1.0 - u)
