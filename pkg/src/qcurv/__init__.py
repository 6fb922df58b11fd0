import logging

from qcurv._version import __version__
from qcurv.bubbles import BubbleParams, functional_JK, optimal_representation, vbar_minimize
from qcurv.flow import FlowOptions, flow_run, subcritical_solve
from qcurv.kfuncs import make_k
from qcurv.morse import existence_verdict, find_critical_points
from qcurv.spectral import (
    SpectralField,
    apply_psigma,
    forward_transform,
    inverse_transform,
)
from qcurv.sphere import SpherePoint, build_grid

logger = logging.getLogger("qcurv")
# ensure reload() doesn't add another handler
if len(logger.handlers) == 0:
    logger.addHandler(logging.NullHandler())
