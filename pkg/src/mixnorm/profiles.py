"""Smooth compactly supported profile functions shared across the library.

All cutoffs are built from the classical mollifier exp(-1/(1-t^2)): its
integral gives a C-infinity ramp whose derivatives of every order vanish at
both ends, so plateau windows glue to constants without smoothness loss.
"""

from __future__ import annotations

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def mollifier(t: np.ndarray | float) -> np.ndarray:
    """exp(-1/(1-t^2)) on (-1, 1), identically 0 outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out


def _mollifier_integral(tau: np.ndarray) -> np.ndarray:
    # integral of the mollifier over [-1, tau], Gauss-Legendre per element
    half = (tau + 1.0) / 2.0
    nodes = -1.0 + half[..., None] * (_GL_NODES + 1.0)
    return half * np.sum(mollifier(nodes) * _GL_WEIGHTS, axis=-1)


_MOLLIFIER_MASS = float(_mollifier_integral(np.asarray([1.0]))[0])


def smoothstep(s: np.ndarray | float) -> np.ndarray:
    """C-infinity ramp: 0 for s <= 0, 1 for s >= 1, strictly monotone between."""
    s = np.asarray(s, dtype=float)
    tau = 2.0 * np.clip(s, 0.0, 1.0) - 1.0
    out = _mollifier_integral(tau) / _MOLLIFIER_MASS
    out = np.where(s <= 0.0, 0.0, out)
    out = np.where(s >= 1.0, 1.0, out)
    return out


def plateau_bump(x: np.ndarray | float, plateau: float, support: float) -> np.ndarray:
    """Even bump: exactly 1 on [-plateau, plateau], 0 outside (-support, support).

    The transition on [plateau, support] is the reversed smoothstep, so the
    profile is C-infinity with sup value exactly 1.
    """
    if not 0.0 <= plateau < support:
        raise ValueError(f"need 0 <= plateau < support, got {plateau}, {support}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = np.abs(x)
    out = np.zeros(a.shape)
    out[a <= plateau] = 1.0
    trans = (a > plateau) & (a < support)
    if np.any(trans):
        s = (a[trans] - plateau) / (support - plateau)
        out[trans] = 1.0 - smoothstep(s)
    return out


def smooth_partition_base(x: np.ndarray, width: float) -> np.ndarray:
    """Mollifier bump with support (-width, width), peak value 1."""
    return mollifier(np.asarray(x, dtype=float) / width) * np.e
