from .cpn import (CpnFrame, FrameError, bracket_checks, chart_metric, complex_structure,
                  cpn_eigenfunction_hessian, cpn_frame_build, cpn_lemma_prelim_check, cpn_trace_check, mix_basis,
                  eigenfunction, frame_invariants, geometry_at, kahler_symmetry_check, killing_form,
                  killing_jet, killing_jet_flow_check, su_basis)
from .frames import FieldData, PointFrame, random_field_data, sphere_point
from .integrands import gl_integrand, gl_q_terms, norm_F_sq, ymh_integrand, ymh_stress
from .lattice import per_xi_report, sphere_per_xi_stability_integrand
from .report import cpn_report, sphere_gl_report, sphere_ymh_report
from .sphere import conformal_tensors, gl_trace_sum, sphere_gl_trace, sphere_ymh_trace, ymh_trace_sum

__all__ = [
    "CpnFrame", "FrameError", "bracket_checks", "chart_metric", "complex_structure",
    "cpn_eigenfunction_hessian", "cpn_frame_build", "cpn_lemma_prelim_check", "cpn_trace_check", "mix_basis",
    "eigenfunction", "frame_invariants", "geometry_at", "kahler_symmetry_check", "killing_form",
    "killing_jet", "killing_jet_flow_check", "su_basis",
    "FieldData", "PointFrame", "random_field_data", "sphere_point",
    "gl_integrand", "gl_q_terms", "norm_F_sq", "ymh_integrand", "ymh_stress",
    "per_xi_report", "sphere_per_xi_stability_integrand",
    "cpn_report", "sphere_gl_report", "sphere_ymh_report",
    "conformal_tensors", "gl_trace_sum", "sphere_gl_trace", "sphere_ymh_trace", "ymh_trace_sum",
]
