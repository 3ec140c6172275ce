"""Bost-Connes systems at finite truncation.

Exact Hecke-algebra arithmetic on the Bost-Connes groupoid, truncated
representations with Gibbs/KMS states, and the arithmetic partition functions
that arise as their traces: Riemann and Dedekind zeta, Dirichlet L-series,
zeta(b) zeta(b-1) for GL2 and its Hilbert-modular analogue.
"""
__version__ = "0.1.0"

from .arith import ResidueClass, divisor_sigma1, kronecker_symbol
from .groupoid import (HeckeElement, SymmetryElement, adjoint, analytic_evolve, convolve,
                       inner_mu, symmetry_act, time_evolve)
from .spectral import GibbsState, gibbs_evaluate, kms_check, partition_function, represent

__all__ = [
    "ResidueClass", "divisor_sigma1", "kronecker_symbol",
    "HeckeElement", "SymmetryElement", "adjoint", "analytic_evolve", "convolve", "inner_mu",
    "symmetry_act", "time_evolve",
    "GibbsState", "gibbs_evaluate", "kms_check", "partition_function", "represent",
]
