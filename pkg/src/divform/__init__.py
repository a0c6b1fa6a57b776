"""Numerical laboratory for divergence-form operators with complex coefficients.

Discretizes -div(A grad) on intervals and rectangles, computes p-ellipticity
constants of the coefficient matrices exactly, evaluates the semigroup
functional calculus of the resulting matrices, and runs maximal-operator,
Duhamel, Mellin-subordination and fractional-power-transfer experiments.
"""

from divform.grids import Grid, BoundaryCondition, GridFunction, lp_norm, random_test_function
from divform.ellipticity import (
    lambda_of,
    capital_lambda_of,
    delta_p,
    p_ellipticity_range,
    sobolev_exponents,
)
from divform.discretize import MatrixField, DiscreteOperator, assemble, kernel_projection
from divform.calculus import SpectralFactorization, MultiplierSpec, factorize, apply_function

__all__ = [
    "Grid",
    "BoundaryCondition",
    "GridFunction",
    "lp_norm",
    "random_test_function",
    "lambda_of",
    "capital_lambda_of",
    "delta_p",
    "p_ellipticity_range",
    "sobolev_exponents",
    "MatrixField",
    "DiscreteOperator",
    "assemble",
    "kernel_projection",
    "SpectralFactorization",
    "MultiplierSpec",
    "factorize",
    "apply_function",
]
