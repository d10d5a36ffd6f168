from .energy import (GLParams, GLState, as_pairs, from_pairs, gl_energy, gl_gradient,
                     gl_hessian_apply, gl_outer_second_variation, gl_residual, hessian_matrix,
                     make_state, mass_inner, mass_matrix_pairs, mass_norm, residual_norm)
from .solve import LineSearchError, Schedule, SolveLog, gl_solve
from .inner import (critical_integrand_terms, gl_inner_first, gl_inner_second_critical,
                    gl_inner_second_general)
from .spectrum import (Certificate, MorseIndex, conformal_directions, gl_instability_certificate,
                       gl_morse_index, gl_spectrum)
from .io import load_snapshot, save_snapshot, snapshot_from_dict, snapshot_to_dict
