"""
Flow
----

Gradient flow of J_K, concentration detection, subcritical continuation and the
Kazdan-Warner diagnostic.
"""
from .gradient import euler_lagrange_residual, gradient_JK
from .kazdan_warner import KazdanWarnerValue, kazdan_warner_integral
from .solver import (
    BranchPoint,
    FlowOptions,
    FlowResult,
    flow_run,
    peak_ratio,
    subcritical_branch,
    subcritical_solve,
)
