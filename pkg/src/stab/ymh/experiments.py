"""Vortex minimization and the epsilon stability scan."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bogomolny import bogomolny_defect
from .lattice import bundle_init, make_state
from .solve import YMHSchedule, ymh_solve
from .spectrum import operator_norm, ymh_spectrum_gauge_fixed


def initial_section(ops, seed=0, noise=0.1):
    """Unit section plus seeded complex noise; the minimizer nucleates the zeros."""
    rng = np.random.default_rng(seed)
    n = ops.mesh.n_vertices
    return np.ones(n) + noise * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


@dataclass
class VortexResult:
    state: object
    log: object
    energy: float
    lambda1: float
    hessian_norm: float
    defect: float
    residual_sum: float


def minimize_vortex(ops, degree, epsilon, seed=0, schedule=None, k=2):
    state = make_state(ops, bundle_init(ops.mesh, degree), initial_section(ops, seed), epsilon)
    state, log = ymh_solve(state, schedule or YMHSchedule())
    eig = ymh_spectrum_gauge_fixed(state, k, seed=seed)
    bog = bogomolny_defect(state)
    return VortexResult(state, log, log.energies[-1], float(eig.eigenvalues[0]),
                        operator_norm(state, seed=seed), bog.defect, bog.residual_sum)


def scan_epsilon(ops, degree=1, epsilons=(0.2, 0.3, 0.5, 0.9), seed=0, schedule=None):
    """Minimize at each epsilon and report energy / 2 pi, lambda_1 and the stability verdict."""
    rows = []
    for eps in epsilons:
        r = minimize_vortex(ops, degree, eps, seed=seed, schedule=schedule)
        rows.append({
            "epsilon": float(eps),
            "energyOver2Pi": r.energy / (2 * np.pi),
            "lambda1": r.lambda1,
            "hessianNorm": r.hessian_norm,
            "stable": bool(r.lambda1 >= -1e-6 * r.hessian_norm),
            "converged": bool(r.log.converged),
            "defect": r.defect,
        })
    return rows
