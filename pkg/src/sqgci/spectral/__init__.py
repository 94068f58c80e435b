"""Fourier-side representation of fields on the unit torus."""
from .fields import (SpectralField, SymTensorField, VectorField, inverse, inverse_vector, transform,
                     transform_vector)
from .grid import GridSpec
from .littlewood_paley import LowPass, MeanOnly, RemoveMean, Shell, populated_shells, project
from .norms import LInf, Lp, SobolevHomog, norm
from .operators import (Div, FractionalLaplacian, Grad, InverseLaplacian, Partial, PerpDiv, PerpGrad,
                        PerpRiesz, apply_symbol, inverse_divergence)
from .products import AliasError, multiply

__all__ = [
    "AliasError", "Div", "FractionalLaplacian", "Grad", "GridSpec", "InverseLaplacian", "LInf", "LowPass",
    "Lp", "MeanOnly", "Partial", "PerpDiv", "PerpGrad", "PerpRiesz", "RemoveMean", "Shell", "SobolevHomog",
    "SpectralField", "SymTensorField", "VectorField", "apply_symbol", "inverse", "inverse_divergence",
    "inverse_vector", "multiply", "norm", "populated_shells", "project", "transform", "transform_vector",
]
