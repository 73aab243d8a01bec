"""Prime tables, prime subsets, and truncated density estimators.

The limiting Dirichlet / natural densities are not computable at finite
truncation, so everything here reports finite surrogates on explicit grids
and records the truncation (table bound X and smallest s) alongside.

All long sums go through :func:`math.fsum` (exact compensated
accumulation), which makes every reported ratio independent of summation
chunking and keeps the identity checks honest at 1e-12 tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Refuse sieves above this unless the caller raises the cap explicitly.
DEFAULT_SIEVE_CAP = 100_000_000


def default_s_grid() -> tuple[float, ...]:
    """Geometric approach to s = 1 from above: 1 + 2^-k, k = 1..7, descending."""
    return tuple(1.0 + 2.0**-k for k in range(1, 8))


def default_x_grid(bound: int) -> tuple[int, ...]:
    """Decade cutoffs 10, 100, ... capped at and including the table bound."""
    grid = []
    x = 10
    while x < bound:
        grid.append(x)
        x *= 10
    grid.append(bound)
    return tuple(grid)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes up to ``bound``, ascending."""

    bound: int
    primes: np.ndarray
    _power_sums: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return len(self.primes)

    def pi(self, x: float) -> int:
        """Number of table primes <= x."""
        return int(np.searchsorted(self.primes, x, side="right"))

    def power_sum(self, s: float) -> float:
        """sum_{p <= bound} p^-s, cached per table."""
        if s not in self._power_sums:
            self._power_sums[s] = math.fsum(
                (self.primes.astype(np.float64) ** -s).tolist()
            )
        return self._power_sums[s]


def sieve(bound: int, cap: int = DEFAULT_SIEVE_CAP) -> PrimeTable:
    """Eratosthenes sieve of all primes <= bound."""
    if bound < 2:
        raise ValueError("bound must be >= 2")
    if bound > cap:
        raise ValueError(f"sieve bound {bound} exceeds cap {cap}; raise cap to proceed")
    mask = np.ones(bound + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return PrimeTable(bound, np.flatnonzero(mask).astype(np.int64))


@dataclass(frozen=True, eq=False)
class PrimeSubset:
    """Subset of one table's primes, stored as an indicator aligned to it."""

    table: PrimeTable
    membership: np.ndarray

    def __post_init__(self) -> None:
        if len(self.membership) != len(self.table):
            raise ValueError("membership length must match the table")
        object.__setattr__(self, "membership", np.asarray(self.membership, dtype=bool))
        self.membership.setflags(write=False)

    @classmethod
    def all_primes(cls, table: PrimeTable) -> "PrimeSubset":
        return cls(table, np.ones(len(table), dtype=bool))

    @classmethod
    def empty(cls, table: PrimeTable) -> "PrimeSubset":
        return cls(table, np.zeros(len(table), dtype=bool))

    @classmethod
    def from_primes(cls, table: PrimeTable, primes) -> "PrimeSubset":
        arr = np.asarray(sorted({int(p) for p in primes}), dtype=np.int64)
        idx = np.searchsorted(table.primes, arr)
        if len(arr) and (
            np.any(idx >= len(table))
            or np.any(table.primes[np.minimum(idx, len(table) - 1)] != arr)
        ):
            raise ValueError("not every given prime is in the table")
        mask = np.zeros(len(table), dtype=bool)
        mask[idx] = True
        return cls(table, mask)

    @classmethod
    def residue_class(cls, table: PrimeTable, modulus: int, residues) -> "PrimeSubset":
        res = np.asarray(list(residues), dtype=np.int64)
        return cls(table, np.isin(table.primes % modulus, res))

    def complement(self) -> "PrimeSubset":
        return PrimeSubset(self.table, ~self.membership)

    def members(self) -> np.ndarray:
        return self.table.primes[self.membership]

    @property
    def count(self) -> int:
        return int(self.membership.sum())


def dirichlet_ratio(S: PrimeSubset, s: float) -> float:
    """sum_{p in S} p^-s / sum_{p in table} p^-s, both truncated at the
    table bound."""
    if s <= 1.0:
        raise ValueError("s must be > 1")
    num = math.fsum((S.members().astype(np.float64) ** -s).tolist())
    return num / S.table.power_sum(s)


def natural_ratio(S: PrimeSubset, x: float) -> float:
    """#{p in S, p <= x} / pi(x)."""
    if x < 2 or x > S.table.bound:
        raise ValueError(f"x must lie in [2, {S.table.bound}]")
    idx = S.table.pi(x)
    return float(S.membership[:idx].sum()) / idx


@dataclass(frozen=True)
class DensityEstimate:
    """Truncated density profile of one prime subset.

    ``s_grid`` descends toward 1, ``x_grid`` ascends to the table bound;
    the recorded (bound, s_min) say how far the truncation went.
    """

    s_grid: tuple[float, ...]
    x_grid: tuple[int, ...]
    dirichlet_ratios: tuple[float, ...]
    natural_ratios: tuple[float, ...]
    bound: int
    s_min: float

    @property
    def max_dirichlet(self) -> float:
        return max(self.dirichlet_ratios)


def density_profile(
    S: PrimeSubset,
    s_grid=None,
    x_grid=None,
) -> DensityEstimate:
    """Dirichlet and natural ratios of S over the given grids."""
    s_grid = default_s_grid() if s_grid is None else tuple(sorted((float(s) for s in s_grid), reverse=True))
    x_grid = default_x_grid(S.table.bound) if x_grid is None else tuple(sorted(int(x) for x in x_grid))
    if not s_grid or not x_grid:
        raise ValueError("grids must be non-empty")
    if s_grid[-1] <= 1.0:
        raise ValueError("all s must be > 1")
    if x_grid[-1] > S.table.bound or x_grid[0] < 2:
        raise ValueError("x grid must lie within [2, bound]")
    dir_ratios = tuple(dirichlet_ratio(S, s) for s in s_grid)
    nat_ratios = tuple(natural_ratio(S, x) for x in x_grid)
    return DensityEstimate(
        s_grid=s_grid,
        x_grid=x_grid,
        dirichlet_ratios=dir_ratios,
        natural_ratios=nat_ratios,
        bound=S.table.bound,
        s_min=s_grid[-1],
    )


def partial_summation_check(
    S: PrimeSubset, x: float, s: float
) -> tuple[float, float, float]:
    """Finite partial-summation identity for the counting function S(t).

    Checks  sum_{p in S, p <= x} p^-s  =  S(x)/x^s + s * int_1^x S(t) t^{-s-1} dt
    with the integral of the step function evaluated in closed form piece by
    piece.  Returns (lhs, rhs, gap); the identity is exact, so gap is pure
    float error.
    """
    if s <= 1.0:
        raise ValueError("s must be > 1")
    if x < 1 or x > S.table.bound:
        raise ValueError(f"x must lie in [1, {S.table.bound}]")
    x = float(x)
    q = S.members()
    q = q[q <= x].astype(np.float64)
    m = len(q)
    if m == 0:
        return 0.0, 0.0, 0.0
    lhs = math.fsum((q**-s).tolist())
    # s * int_{q_k}^{b_k} t^{-s-1} dt = q_k^-s - b_k^-s on each constancy piece
    b = np.append(q[1:], x)
    k = np.arange(1, m + 1, dtype=np.float64)
    integral = math.fsum((k * (q**-s - b**-s)).tolist())
    rhs = m * x**-s + integral
    return lhs, rhs, abs(lhs - rhs)


def weighted_L(table: PrimeTable, f, s: float) -> float:
    """Truncated L(s) = sum_{p <= bound} f(p) p^-s.

    ``f`` may be a callable (applied to the prime array), a dict keyed by
    prime, or an array of values aligned with the table.
    """
    if s <= 1.0:
        raise ValueError("s must be > 1")
    if callable(f):
        values = np.asarray(f(table.primes), dtype=np.float64)
    elif isinstance(f, dict):
        values = np.array([f[int(p)] for p in table.primes], dtype=np.float64)
    else:
        values = np.asarray(f, dtype=np.float64)
    if values.shape != table.primes.shape:
        raise ValueError("f must provide one value per table prime")
    terms = values * table.primes.astype(np.float64) ** -s
    return math.fsum(terms.tolist())


def lfunc_density_bound(C: float, D: float) -> float:
    """Upper Dirichlet-density bound C / (C + D) for a set on which a
    bounded weighted L-series puts weight >= D against a floor of -C."""
    if C <= 0 or D <= 0:
        raise ValueError("C and D must be positive")
    return C / (C + D)
