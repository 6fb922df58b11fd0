"""
Critical Points at Infinity
---------------------------

:mod:`qcurv.morse.infinity`: Levels and indices of the critical points at infinity built
from critical points of K with -ΔK > 0, their enumeration, energy bands, and the Euler
characteristic bookkeeping of sublevel sets.

A critical point at infinity is an unordered set {y_1, ..., y_p} of distinct points of
K⁺. Its level is S (Σ K(y_i)^{-(n-2σ)/(2σ)})^{2σ/n} and its index p - 1 + Σ (n - ind(K, y_i)).
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, NamedTuple, Sequence, Union

import numpy as np
from cytoolz import itertoolz
from scipy import special

from .. import constants, errors, utils
from ..spectral.operator import beckner_constant
from .critical import CriticalPointRecord

LOGGER = logging.getLogger(__name__)


def a1_index(records: Sequence[CriticalPointRecord], n: int) -> int:
    """Σ over K⁺ of (-1)^{n - morse index}."""
    return int(sum((-1) ** (n - r.morse_index) for r in records if r.in_k_plus))


def _check_members(members: Sequence[CriticalPointRecord]) -> None:
    if not members:
        raise errors.DomainError("a critical point at infinity needs at least one member")
    for r in members:
        if not r.in_k_plus:
            raise errors.DomainError(
                f"{r.location!r} has ΔK = {r.laplacian:.4g} >= 0, so it is not in K+"
            )
    for a, b in itertools.combinations(members, 2):
        if a.location == b.location:
            raise errors.DomainError(f"{a.location!r} appears twice among the members")


def infinity_level(members: Sequence[CriticalPointRecord], sigma: float) -> float:
    """
    S (Σ K(y_i)^{-(n-2σ)/(2σ)})^{2σ/n}.

    Raises:
        DomainError: for members outside K⁺ or repeated members.
    """
    _check_members(members)
    n = members[0].location.n
    sigma = utils.validate_sigma(n, sigma)
    total = sum(r.k_value ** (-(n - 2.0 * sigma) / (2.0 * sigma)) for r in members)
    return beckner_constant(n, sigma) * total ** (2.0 * sigma / n)


def infinity_index(members: Sequence[CriticalPointRecord], n: int) -> int:
    """p - 1 + Σ (n - ind(K, y_i))."""
    _check_members(members)
    return len(members) - 1 + sum(n - r.morse_index for r in members)


@dataclass(frozen=True)
class InfinityCriticalPoint:
    members: tuple
    level: float
    index: int

    @property
    def p(self) -> int:
        return len(self.members)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "level": self.level,
            "index": self.index,
            "members": [r.location.coords.tolist() for r in self.members],
            "k_values": [r.k_value for r in self.members],
        }


@dataclass(frozen=True)
class Inventory:
    """
    Critical points at infinity with up to ``p_max`` members, sorted by level.

    ``coverage_level`` is the lowest level of any configuration with ``p_max + 1``
    members (infinite if K⁺ has at most ``p_max`` points); sublevels strictly below it
    are fully described by ``entries``.
    """

    entries: tuple
    p_max: int
    coverage_level: float

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[InfinityCriticalPoint]:
        return iter(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_max": self.p_max,
            "coverage_level": self.coverage_level,
            "entries": [e.to_dict() for e in self.entries],
        }


def enumerate_infinity(
    records: Sequence[CriticalPointRecord], sigma: float, p_max: int
) -> Inventory:
    """
    Every unordered subset of K⁺ with 1..``p_max`` members, with level and index.

    Raises:
        ParameterDomainError: for p_max < 1.
    """
    if p_max < 1:
        raise errors.ParameterDomainError(f"p_max must be >= 1, not {p_max}")
    k_plus = [r for r in records if r.in_k_plus]
    entries = []
    for p in range(1, min(p_max, len(k_plus)) + 1):
        for members in itertools.combinations(k_plus, p):
            n = members[0].location.n
            entries.append(
                InfinityCriticalPoint(
                    tuple(members), infinity_level(members, sigma), infinity_index(members, n)
                )
            )
    entries.sort(key=lambda e: (e.level, e.index))
    if len(k_plus) > p_max:
        highest = sorted(k_plus, key=lambda r: -r.k_value)[: p_max + 1]
        coverage = infinity_level(highest, sigma)
    else:
        coverage = math.inf
    return Inventory(tuple(entries), p_max, coverage)


class BandCheck(NamedTuple):
    """Energy band of ℓ-bubble configurations and whether it stays below the next one."""

    ell: int
    c_min: float
    c_max: float
    c_min_next: float
    stretched: float
    separated: bool


def band_check(k_max: float, k_min: float, n: int, sigma: float, ell: int) -> BandCheck:
    """
    Compare C_max^ℓ (K_max/K_min)^{(n-2σ)/n} against C_min^{ℓ+1}, where
    C_max^ℓ = ℓ^{2σ/n} S/K_min^{(n-2σ)/n} and C_min^ℓ = ℓ^{2σ/n} S/K_max^{(n-2σ)/n}.

    ``separated`` holds iff the comparison is strict, which is equivalent to
    K_max/K_min < ((ℓ+1)/ℓ)^{σ/(n-2σ)}; it is decided in log form, and differences within
    a relative 1e-12 count as ties (not separated).

    .. code-block:: pycon

        >>> band_check(1.02, 1.0, 3, 0.25, 1).separated
        True
    """
    if ell < 1:
        raise errors.ParameterDomainError(f"ell must be >= 1, not {ell}")
    if not (k_min > 0 and k_max >= k_min):
        raise errors.ParameterDomainError(f"need 0 < k_min <= k_max, got {k_min}, {k_max}")
    sigma = utils.validate_sigma(n, sigma)
    e = (n - 2.0 * sigma) / n
    S = beckner_constant(n, sigma)

    def c_min(l):
        return l ** (2.0 * sigma / n) * S / k_max**e

    def c_max(l):
        return l ** (2.0 * sigma / n) * S / k_min**e

    stretched = c_max(ell) * (k_max / k_min) ** e
    room = sigma * math.log((ell + 1.0) / ell)
    gap = room - (n - 2.0 * sigma) * math.log(k_max / k_min)
    separated = gap > constants.BAND_TIE_TOL * max(1.0, abs(room))
    return BandCheck(ell, c_min(ell), c_max(ell), c_min(ell + 1), stretched, separated)


def pinching_threshold(n: int, sigma: float, ell: int) -> float:
    """((ℓ+1)/ℓ)^{σ/(n-2σ)}, the largest pinching ratio keeping band ℓ separated."""
    return ((ell + 1.0) / ell) ** (sigma / (n - 2.0 * sigma))


def euler_sublevel(inventory: Inventory, level: float) -> int:
    """
    Σ (-1)^{index} over critical points at infinity strictly below ``level``.

    Raises:
        IncompleteInventoryError: if ``level`` exceeds the inventory's coverage level.
    """
    if level > inventory.coverage_level:
        raise errors.IncompleteInventoryError(
            f"level {level:.6g} exceeds the coverage level {inventory.coverage_level:.6g} of an "
            f"inventory enumerated up to p = {inventory.p_max}"
        )
    return int(sum((-1) ** e.index for e in inventory if e.level < level))


def a2_bruteforce(parities: Sequence[Union[bool, int]]) -> int:
    """
    Σ_{i<j} (-1)^{ι_i + ι_j} over index parities (True or odd integers mean odd).

    .. code-block:: pycon

        >>> a2_bruteforce([False, False, True])
        -1
    """
    bits = [int(p) % 2 for p in parities]
    return int(sum((-1) ** (a + b) for a, b in itertools.combinations(bits, 2)))


def a2_from_counts(evens: int, odds: int) -> int:
    """The same pair sum from parity counts: C(evens, 2) + C(odds, 2) - evens·odds."""
    return int(special.comb(evens, 2, exact=True) + special.comb(odds, 2, exact=True) - evens * odds)


def a2_closed_form(k: int) -> int:
    """Pair sum for k+1 even and k odd parities, which equals -k."""
    if k < 0:
        raise errors.ParameterDomainError(f"k must be >= 0, not {k}")
    return a2_from_counts(k + 1, k)


def parity_counts(parities: Sequence[Union[bool, int]]) -> Dict[str, int]:
    freqs = itertoolz.frequencies(int(p) % 2 for p in parities)
    return {"even": freqs.get(0, 0), "odd": freqs.get(1, 0)}


def k_plus_parities(records: Sequence[CriticalPointRecord], n: int) -> np.ndarray:
    """Index parities (n - ind) mod 2 of the points of K⁺."""
    return np.array([(n - r.morse_index) % 2 for r in records if r.in_k_plus], dtype=int)
