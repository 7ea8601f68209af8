"""Time-fractional Allen-Cahn layers and spheres moving by powers of the mean curvature."""

from .caputo import (L1Weights, TimeHistory, caputo_direct, caputo_of_monomial, l1_apply,
                     l1_weights)
from .constants import (StructuralConstants, c_alpha_with_error, compute_C_alpha,
                        compute_c_alpha, structural_constants)
from .params import ModelParams
from .profile import f, gamma, gamma_prime, gamma_second
from .residual import (Ansatz, ResidualReport, ansatz_time_derivative, ansatz_value,
                       caputo_of_ansatz, fit_scaling_exponent, memory_integral,
                       radial_laplacian_of_ansatz, residual_E, residual_scan)
from .solver import (RadialGrid, SolverState, TrackingReport, extract_zero_level,
                     initialize, solve, step)
from .sphere_flow import (FlowTrajectory, SphereFlow, extinction_time, phi0_closed_form,
                          phi0_dot, phi0_rk4, psi0)

__version__ = "0.1.0"
