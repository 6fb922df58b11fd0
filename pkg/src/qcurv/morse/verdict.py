"""
Existence Verdicts
------------------

:mod:`qcurv.morse.verdict`: Collect the Morse data of K at infinity into one report and
evaluate the two pinching criteria for existence of solutions:

- *multi-peak*: K_max/K_min < (3/2)^{σ/(n-2σ)} and K⁺ has at least two points;
- *index-count*: K_max/K_min < 2^{σ/(n-2σ)} and A₁ = Σ_{K⁺} (-1)^{n - ind} ≠ 1.

Both require 0 < σ < (n-2)/2.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

from .. import errors, utils
from .critical import CriticalPointRecord
from .infinity import (
    BandCheck,
    Inventory,
    a1_index,
    a2_bruteforce,
    band_check,
    enumerate_infinity,
    euler_sublevel,
    k_plus_parities,
    parity_counts,
    pinching_threshold,
)

LOGGER = logging.getLogger(__name__)


class Verdict(NamedTuple):
    """Outcome of one criterion: all named clauses must hold."""

    holds: bool
    clauses: Dict[str, bool]

    @property
    def failing(self) -> List[str]:
        return [name for name, ok in self.clauses.items() if not ok]

    def to_dict(self) -> Dict[str, Any]:
        return {"holds": self.holds, "clauses": self.clauses, "failing": self.failing}


def _verdict(**clauses: bool) -> Verdict:
    return Verdict(all(clauses.values()), dict(clauses))


@dataclass
class ExistenceReport:
    n: int
    sigma: float
    k_max: float
    k_min: float
    pinching_ratio: float
    threshold_three_halves: float
    threshold_two: float
    a1: int
    k_plus_size: int
    inventory: Inventory
    bands: List[BandCheck]
    euler: Dict[int, Optional[int]]
    a2: int
    parities: Dict[str, int]
    multi_peak: Verdict
    index_count: Verdict
    warnings: List[str] = field(default_factory=list)

    @property
    def pair_sum(self) -> int:
        """Σ over pairs of K⁺ of (-1)^{1 + ι_i + ι_j}, i.e. -A₂."""
        return -self.a2

    @property
    def any_holds(self) -> bool:
        return self.multi_peak.holds or self.index_count.holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "sigma": self.sigma,
            "k_max": self.k_max,
            "k_min": self.k_min,
            "pinching_ratio": self.pinching_ratio,
            "thresholds": {
                "three_halves": self.threshold_three_halves,
                "two": self.threshold_two,
            },
            "a1": self.a1,
            "k_plus_size": self.k_plus_size,
            "inventory": self.inventory.to_dict(),
            "bands": [b._asdict() for b in self.bands],
            "euler": {str(ell): chi for ell, chi in self.euler.items()},
            "a2": self.a2,
            "pair_sum": self.pair_sum,
            "parities": self.parities,
            "verdicts": {
                "multi_peak": self.multi_peak.to_dict(),
                "index_count": self.index_count.to_dict(),
            },
            "warnings": self.warnings,
        }


def existence_verdict(
    records: Sequence[CriticalPointRecord],
    k_max: float,
    k_min: float,
    n: int,
    sigma: float,
    *,
    p_max: int = 2,
) -> ExistenceReport:
    """
    Build the :class:`ExistenceReport` for K from its classified critical points.

    A₁ sums ±1 over 𝒦⁺, so A₁ ≡ ♯𝒦⁺ (mod 2) and A₁ = 1 forces an odd ♯𝒦⁺; the
    consistency warning for A₁ = 1 with an even ♯𝒦⁺ therefore never fires on records
    whose A₁ comes from :func:`~qcurv.morse.infinity.a1_index`.

    Args:
        records: Critical points of K, e.g. from :func:`~qcurv.morse.critical.find_critical_points`.
        k_max: max K over the sphere.
        k_min: min K over the sphere.
        n: Dimension of the sphere.
        sigma: Order of the operator; must lie in (0, (n-2)/2).
        p_max: Largest number of members enumerated in the inventory.

    Raises:
        HypothesisError: for σ outside (0, (n-2)/2).
        ParameterDomainError: for 0 < k_min <= k_max violated.
    """
    sigma = utils.validate_sigma(n, sigma, existence=True)
    if not (k_min > 0 and k_max >= k_min):
        raise errors.ParameterDomainError(f"need 0 < k_min <= k_max, got {k_min}, {k_max}")
    for r in records:
        if r.location.n != n:
            raise errors.ConfigurationError(f"record at {r.location!r} is not on S^{n}")
    ratio = k_max / k_min
    k_plus_size = sum(1 for r in records if r.in_k_plus)
    a1 = a1_index(records, n)
    inventory = enumerate_infinity(records, sigma, p_max)
    bands = [band_check(k_max, k_min, n, sigma, ell) for ell in range(1, p_max + 1)]
    euler: Dict[int, Optional[int]] = {}
    for band in bands:
        try:
            euler[band.ell] = euler_sublevel(inventory, band.c_min_next)
        except errors.IncompleteInventoryError:
            euler[band.ell] = None
    parities = k_plus_parities(records, n)
    a2 = a2_bruteforce(parities)

    warnings = [
        f"inventory up to p = {p_max} does not cover band {ell}; its Euler count is unknown"
        for ell, chi in euler.items()
        if chi is None
    ]
    if a1 == 1 and k_plus_size % 2 == 0:
        warnings.append(
            f"A1 = 1 with an even number ({k_plus_size}) of points in K+; "
            "the parity of A1 contradicts the size of K+"
        )
    band_one = bands[0]
    band_two = bands[1] if len(bands) > 1 else band_check(k_max, k_min, n, sigma, 2)
    report = ExistenceReport(
        n=n,
        sigma=sigma,
        k_max=k_max,
        k_min=k_min,
        pinching_ratio=ratio,
        threshold_three_halves=pinching_threshold(n, sigma, 2),
        threshold_two=pinching_threshold(n, sigma, 1),
        a1=a1,
        k_plus_size=k_plus_size,
        inventory=inventory,
        bands=bands,
        euler=euler,
        a2=a2,
        parities=parity_counts(parities),
        multi_peak=_verdict(
            pinching_below_three_halves=band_two.separated,
            at_least_two_k_plus=k_plus_size >= 2,
        ),
        index_count=_verdict(
            pinching_below_two=band_one.separated,
            a1_not_one=a1 != 1,
        ),
        warnings=warnings,
    )
    for message in warnings:
        LOGGER.warning(message)
    LOGGER.info(
        "existence: ratio %.6g, A1 = %s, #K+ = %s, multi-peak %s, index-count %s",
        ratio, a1, k_plus_size, report.multi_peak.holds, report.index_count.holds,
    )
    return report
