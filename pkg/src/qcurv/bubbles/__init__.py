"""
Bubbles
-------

Bubble calculus: the standard bubbles and their interactions, the functional J_K,
level expansions near bubble sums, optimal representation, and remainder minimization.
"""
from .core import (
    BubbleEntry,
    BubbleParams,
    bubble_constant,
    bubble_derivatives,
    bubble_energy,
    bubble_field,
    bubble_residual,
    bubble_samples,
    epsilon_ij,
)
from .expansion import (
    ExpansionConstants,
    KCenterData,
    calibrate_constants,
    expansion_JK,
    interaction_bracket,
    linear_term,
    quadratic_term,
)
from .functional import (
    FunctionalParts,
    functional_gradient_coeffs,
    functional_JK,
    functional_parts,
    k_on_grid,
)
from .representation import in_neighborhood, optimal_representation
from .vbar import VbarResult, vbar_minimize
