from .bogomolny import BogomolnyReport, bogomolny_defect, face_covariant_gradient
from .experiments import VortexResult, initial_section, minimize_vortex, scan_epsilon
from .io import load_state, save_state, state_from_dict, state_to_dict
from .lattice import (AdmissibilityError, LatticeBundle, YMHState, bundle_init, coulomb_project,
                      edge_vertex_matrix, energy_parts, face_edge_matrix, gauge_tangent, gauge_transform,
                      gradient_vector, make_state, natural_metric, pack, unpack, wrap, ymh_degree,
                      ymh_energy, ymh_gradient, ymh_hessian)
from .solve import YMHLog, YMHSchedule, gauge_penalty, gradient_norm, ymh_solve
from .spectrum import (TrivialPairCertificate, gauge_leak, operator_norm, trivial_pair,
                       trivial_pair_certificate, ymh_spectrum_gauge_fixed)

__all__ = [
    "BogomolnyReport", "bogomolny_defect", "face_covariant_gradient",
    "VortexResult", "initial_section", "minimize_vortex", "scan_epsilon",
    "load_state", "save_state", "state_from_dict", "state_to_dict",
    "AdmissibilityError", "LatticeBundle", "YMHState", "bundle_init", "coulomb_project",
    "edge_vertex_matrix", "energy_parts", "face_edge_matrix", "gauge_tangent", "gauge_transform",
    "gradient_vector", "make_state", "natural_metric", "pack", "unpack", "wrap", "ymh_degree",
    "ymh_energy", "ymh_gradient", "ymh_hessian",
    "YMHLog", "YMHSchedule", "gauge_penalty", "gradient_norm", "ymh_solve",
    "TrivialPairCertificate", "gauge_leak", "operator_norm", "trivial_pair",
    "trivial_pair_certificate", "ymh_spectrum_gauge_fixed",
]
