"""Secrecy-rate bounds for a degraded ISAC wiretap channel under correlated
Rayleigh fading, with independent brute-force and Monte Carlo verifiers."""

from .errors import ConvergenceError, DomainError, NumericalError
from .fading import (ChannelParams, FadingParams, amplitude_correlation,
                     ccdf_s1_sq, ccdf_s2_sq, is_stochastically_degraded,
                     joint_pdf, marginal_pdf_s1, marginal_pdf_s2, sample_pair)
from .oracle import (McConfig, McEstimate, brute_force_f_s, mc_entropy,
                     mc_rate_part_a, mc_rate_part_c, quad_part_b_ub)
from .quadrature import (Grid1D, Grid2D, QuadratureConfig,
                         expect_half_gaussian, integrate_2d,
                         integrate_semi_infinite, interpolate)
from .rates import (PartAParams, RateBreakdown, compute_rates, density_f_s,
                    entropy_h_s2, entropy_joint_given_x, joint_pdf_y1_s2,
                    rate_part_a, rate_part_b, rate_part_b_ub, rate_part_c)

__version__ = "1.0.0"

__all__ = [
    "ChannelParams", "ConvergenceError", "DomainError", "FadingParams",
    "Grid1D", "Grid2D", "McConfig", "McEstimate", "NumericalError",
    "PartAParams", "QuadratureConfig", "RateBreakdown",
    "amplitude_correlation", "brute_force_f_s", "ccdf_s1_sq", "ccdf_s2_sq",
    "compute_rates", "density_f_s", "entropy_h_s2", "entropy_joint_given_x",
    "expect_half_gaussian", "integrate_2d", "integrate_semi_infinite",
    "interpolate", "is_stochastically_degraded", "joint_pdf",
    "joint_pdf_y1_s2", "marginal_pdf_s1", "marginal_pdf_s2", "mc_entropy",
    "mc_rate_part_a", "mc_rate_part_c", "quad_part_b_ub", "rate_part_a",
    "rate_part_b", "rate_part_b_ub", "rate_part_c", "sample_pair",
    "__version__",
]
