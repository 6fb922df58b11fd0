"""
Spectral analysis on the sphere
-------------------------------

Harmonic bases, spectral fields and transforms, and the operator P_σ.
"""
from .fields import (
    SpectralField,
    constant_field,
    evaluate_field,
    forward_transform,
    inverse_transform,
    l2_inner,
    project_pointwise,
    truncate,
    working_grid,
    zero_field,
)
from .harmonics import HarmonicBasis, basis_matrix, harmonic_basis, harmonic_dimension
from .operator import (
    apply_psigma,
    beckner_constant,
    conformal_constant,
    hsigma_inner,
    hsigma_norm,
    psigma_eigenvalue,
    psigma_multipliers,
    yamabe_quotient,
)
