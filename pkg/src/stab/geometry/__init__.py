from .fem import FemOperators, assemble_fem, gradient_field, laplace_spectrum, tangent_project
from .fields import PolynomialField, random_polynomial_field, vortex_pair_field
from .flow import conformal_flow, interpolate, jet_flow, pullback_field, rk4_flow, rotation_flow
from .io import read_coo, read_off, write_coo, write_off
from .jets import (FieldJet, conformal_field_jet, cross_matrix, rotation_field_jet,
                   sphere_curvature, sphere_ricci)
from .mesh import MAX_LEVEL, MeshError, TriMesh, build_icosphere, mesh_from_arrays
from .metric import pulled_back_metric
from .quadrature import continuum_gl_energy, directional_derivative, sphere_quadrature, tangent_frame

__all__ = [
    "FemOperators", "assemble_fem", "gradient_field", "laplace_spectrum", "tangent_project",
    "PolynomialField", "random_polynomial_field", "vortex_pair_field",
    "conformal_flow", "interpolate", "jet_flow", "pullback_field", "rk4_flow", "rotation_flow",
    "read_coo", "read_off", "write_coo", "write_off",
    "FieldJet", "conformal_field_jet", "cross_matrix", "rotation_field_jet",
    "sphere_curvature", "sphere_ricci",
    "MAX_LEVEL", "MeshError", "TriMesh", "build_icosphere", "mesh_from_arrays",
    "pulled_back_metric",
    "continuum_gl_energy", "directional_derivative", "sphere_quadrature", "tangent_frame",
]
