"""Quasi-Gaussian distributions and a polar-coordinate characterization harness."""

from .characterize import (
    IndependenceReport,
    RegularityEstimate,
    chi_square_independence,
    estimate_regularity_degree,
    verify_characterization,
)
from .mixture import Atom, EmConfig, FitResult, MixtureModel, fit_em, log_likelihood, mixture_pdf, sample_mixture
from .multivar import (
    PolarSample,
    ProductQuasiGaussian,
    joint_pdf,
    polar_rect_probability,
    sample_vector,
    to_polar,
    to_spherical,
)
from .qgauss import (
    QuasiGaussianParams,
    cdf,
    i_alpha,
    make_params,
    moment,
    pdf,
    quantile,
    sample,
    sf,
    tail_asymptote,
)
from .specfun import inv_reg_lower_gamma, log_gamma, reg_lower_gamma

__version__ = "0.1.0"
