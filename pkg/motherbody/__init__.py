"""
motherbody: normal matrix model with two point charges at ±ia

This package provides:
- Phase constants t_c and t* (model)
- Conformal map of the droplet and its sheet structure (conformal)
- Three-sheeted spectral curve and its discriminant (spectral)
- Mother-body measure mu1 and constrained measure mu2 (measures, equilibrium, droplet)
- Exact planar orthogonal polynomials (oracle) and their strong asymptotics (asympt)
- Deterministic CSV/JSON export and the ``motherbody`` command line (export, cli)

Usage:
    from motherbody import ModelParams, solve_map, build_measures

    cd = solve_map(ModelParams(a=2.0, c=1.0, t=0.1))
    ms = build_measures(cd)
"""

from .conformal import ConformalData, solve_map
from .errors import MotherbodyError, NumericalError, ValidationError
from .measures import Measures, build_measures
from .model import ModelParams, phase_constants
from .oracle import ExactPolynomial, OracleParams
from .report import ValidationReport
from .spectral import SpectralCurve, build_curve

__version__ = '0.1.0'

__all__ = [
    'ConformalData',
    'ExactPolynomial',
    'Measures',
    'ModelParams',
    'MotherbodyError',
    'NumericalError',
    'OracleParams',
    'SpectralCurve',
    'ValidationError',
    'ValidationReport',
    'build_curve',
    'build_measures',
    'phase_constants',
    'solve_map',
]
