"""Central differences with one Richardson level."""
from __future__ import annotations

import numpy as np

STEP = 1e-4


def derivative(fn, x, h=STEP):
    """Jacobian-like array d[k, ...] = d fn / d x_k at x."""
    x = np.asarray(x, dtype=float)
    out = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = 1.0

        def central(s):
            return (np.asarray(fn(x + s * e)) - np.asarray(fn(x - s * e))) / (2 * s)

        out.append((4.0 * central(h / 2) - central(h)) / 3.0)
    return np.array(out)


def scalar_derivative(fn, t=0.0, h=STEP):
    """d fn / dt for a function of one real variable."""
    def central(s):
        return (np.asarray(fn(t + s)) - np.asarray(fn(t - s))) / (2 * s)
    return (4.0 * central(h / 2) - central(h)) / 3.0
