"""
Morse Theory at Infinity
------------------------

Critical points of K, critical points at infinity of J_K with their levels and indices,
energy bands, and existence verdicts.
"""
from .critical import CriticalPointRecord, NewtonOptions, find_critical_points, k_extremes
from .infinity import (
    BandCheck,
    InfinityCriticalPoint,
    Inventory,
    a1_index,
    a2_bruteforce,
    a2_closed_form,
    a2_from_counts,
    band_check,
    enumerate_infinity,
    euler_sublevel,
    infinity_index,
    infinity_level,
    parity_counts,
    pinching_threshold,
)
from .verdict import ExistenceReport, Verdict, existence_verdict
