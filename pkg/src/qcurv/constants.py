"""
Collection of numerical defaults and tolerances (small, generally useful) constants.
"""
from typing import Tuple


UNIT_NORM_TOL: float = 1e-12
QUADRATURE_TOL: float = 1e-10

# positive-part floor applied before taking powers of a field
POSITIVE_FLOOR: float = 1e-14
DENOMINATOR_FLOOR: float = 1e-14

DEFAULT_OVERSAMPLE: int = 2

# bubble calibration
CALIBRATION_LAMBDAS: Tuple[float, float] = (8.0, 64.0)
CALIBRATION_SAMPLES: int = 6
CALIBRATION_TRUNCATION: int = 1024
CALIBRATION_RESIDUAL_MAX: float = 0.05

# optimal representation (Gauss-Newton)
GN_MAX_ITER: int = 100
GN_TOL: float = 1e-12
GN_SCAN_LAMBDAS: Tuple[float, float, int] = (1.0, 512.0, 40)
V0_TOL: float = 1e-8

# remainder minimization
VBAR_MAX_ITER: int = 500
VBAR_GTOL: float = 1e-12

# flow
FLOW_TOL: float = 1e-8
FLOW_MAX_ITER: int = 20000
ARMIJO_C1: float = 1e-4
ARMIJO_MIN_STEP: float = 1e-12
ARMIJO_MAX_STEP: float = 10.0
CONCENTRATION_LAMBDA: float = 1e3
CONCENTRATION_V_MAX: float = 0.1
CONCENTRATION_WINDOW: int = 3
NEGATIVE_MASS_MAX: float = 0.01
NEGATIVE_MASS_PATIENCE: int = 5
CHECK_EVERY: int = 25
KAZDAN_WARNER_TOL: float = 1e-5

# axial symmetry of K, required on zonal grids
ZONAL_K_TOL: float = 1e-10
ZONAL_K_HEIGHTS: int = 9
ZONAL_K_DIRECTIONS: int = 8

# critical points of K
NEWTON_STARTS: int = 200
NEWTON_MAX_ITER: int = 60
DEDUP_RADIUS: float = 1e-4
NONDEGENERACY_FLOOR: float = 1e-6
FD_STEP: float = 1e-5

# band separation ties
BAND_TIE_TOL: float = 1e-12
