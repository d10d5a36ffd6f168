"""Metric pulled back along a flow, for checking d/dt g_t = -L_X g."""
from __future__ import annotations

import numpy as np

from .flow import jet_flow
from .jets import FieldJet


def _push(jet, x, v, t, h=1e-4):
    """d(phi_t)_x v by a Richardson-extrapolated central difference."""
    def curve(s):
        y = x + s * v
        return y / np.linalg.norm(y)

    def cd(hh):
        return (jet_flow(jet, curve(hh), t) - jet_flow(jet, curve(-hh), t)) / (2 * hh)

    return (4 * cd(h / 2) - cd(h)) / 3


def pulled_back_metric(jet: FieldJet, x, v, w, t):
    """g_t(v, w) with g_t = (phi_{-t})^* g, at the point x."""
    a = _push(jet, x, v, -t)
    b = _push(jet, x, w, -t)
    return float(a @ b)
