"""Heteroclinic layer profile ``tanh(x/sqrt(2))`` and the cubic double-well force.

All functions accept scalars or numpy arrays and are vectorised.
"""

from __future__ import annotations

import math

import numpy as np

SQRT2 = math.sqrt(2.0)

#: gamma'(0) = 1/sqrt(2)
GAMMA_PRIME_0 = 1.0 / SQRT2


def _sech2(y):
    # clipping keeps cosh finite; sech(700)**2 is already below the smallest double
    s = 1.0 / np.cosh(np.minimum(np.abs(y), 700.0))
    return s * s


def f(u):
    """Bistable nonlinearity ``u - u**3``."""
    u = np.asarray(u, dtype=float)
    return u - u**3


def gamma(x):
    """The layer profile, odd and increasing from -1 to 1."""
    return np.tanh(np.asarray(x, dtype=float) / SQRT2)


def gamma_prime(x):
    """First derivative ``sech^2(x/sqrt 2)/sqrt 2``, strictly positive and even."""
    return _sech2(np.asarray(x, dtype=float) / SQRT2) / SQRT2


def gamma_second(x):
    """Second derivative, equal to ``-f(gamma(x))``."""
    y = np.asarray(x, dtype=float) / SQRT2
    return -_sech2(y) * np.tanh(y)
