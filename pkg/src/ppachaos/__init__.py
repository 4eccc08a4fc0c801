"""Low-dimensional polynomial chaos surrogates learned from sample data.

Projection pursuit adaptation (:func:`fit_ppa`) learns an orthonormal stack of
projections together with one multivariate Hermite expansion over them;
projection pursuit regression (:func:`fit_ppr`) and classical Gaussian basis
adaptation (:mod:`ppachaos.adaptation`) are provided as baselines.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .multiindex import MultiIndexBasis, basis_size, enumerate_basis, hermite_value, hermite_derivative
from .transforms import InputSpec, MarginalSpec, from_gaussian, sample_gaussian, to_gaussian
from .pce import Dataset, PceModel, evaluate, fit_least_squares, moments, transfer_coefficients
from .density import DensityEstimate, empirical_cdf, kde, pdf_error, relative_l2, surrogate_density
from .ppr import PprModel, fit_ppr
from .ppa import PpaModel, fit_ppa, ppa_to_original
from .adaptation import (
    AdaptationReport,
    ProjectionStack,
    build_classical_rotation,
    classical_adaptation,
    correct_low_order,
    soa_update_rotation,
)
from .bench_models import borehole, get_benchmark, reference_density, ridge_test_fn
from .io import load_model, save_model
from .kernels import BACKEND
