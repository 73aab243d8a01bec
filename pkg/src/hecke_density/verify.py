"""Eigenvalue inequality checks, exceptional-set density reports, and the
log-L decomposition over a whole assignment of Satake tuples to primes.

Central inequality: if a tuple is tempered and |mu| >= c then

    1 + sum_i (a_i + 1/a_i)  >=  g c^{2/g} - 2g + 1,

with equality on the equal-angle family a_1 = ... = a_g = e^{i phi},
cos phi = c^{2/g}/2 - 1.  Feeding the exceedance set of an assignment into
the bounded-L density lemma yields the two headline bounds

    abs mode    (2 - 1/g) c^{-2/g}      (standard-side argument)
    signed mode 4 / (c + 4)             (spin-side argument, genus 2)

A negative margin against a synthetic assignment is a finding, not a
failure: the bounds assume the relevant L-function has no pole at 1, which
arbitrary assignments are free to violate.  Reports therefore carry the
growth of the linear sums R(s) / T(s) along the s-grid as a divergence
diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .core import (
    Branch,
    FactorKind,
    SatakeTuple,
    TOL_CONSTRAINT,
    constraint_residual,
    factor_degree,
    from_free_angles,
    mu,
    mu_of_angles,
    rho1_of_angles,
    spin_root_angles,
    std_root_angles,
)
from .density import (
    DensityEstimate,
    PrimeSubset,
    PrimeTable,
    density_profile,
)
from .series import DEFAULT_R_CUT


class Mode(str, Enum):
    ABS = "abs"        # primes with |mu(p)| >= c
    SIGNED = "signed"  # primes with mu(p) >= c


@dataclass(eq=False)
class SatakeAssignment:
    """One tempered Satake tuple per table prime (a "virtual form").

    Tuples are held as an (n, g+1) angle matrix; ``tuple_at`` materializes
    a single SatakeTuple on demand.
    """

    genus: int
    table: PrimeTable
    angles: np.ndarray

    def __post_init__(self) -> None:
        self.angles = np.asarray(self.angles, dtype=np.float64)
        if self.angles.shape != (len(self.table), self.genus + 1):
            raise ValueError(
                f"angle matrix must have shape ({len(self.table)}, {self.genus + 1})"
            )

    def __len__(self) -> int:
        return len(self.table)

    def tuple_at(self, i: int) -> SatakeTuple:
        return SatakeTuple(self.genus, tuple(self.angles[i]))

    @cached_property
    def mu_values(self) -> np.ndarray:
        return mu_of_angles(self.angles)

    @cached_property
    def rho1_values(self) -> np.ndarray:
        return rho1_of_angles(self.angles)

    def max_constraint_residual(self) -> float:
        return float(constraint_residual(self.angles).max())

    def validate(self, tol: float = TOL_CONSTRAINT) -> list[str]:
        resid = self.max_constraint_residual()
        if resid > tol:
            return [f"worst central-constraint residual {resid:.3e} > {tol:.1e}"]
        return []


class LemmaIneqResult(NamedTuple):
    applicable: bool
    lhs: float
    rhs: float


def lemma_ineq_check(t: SatakeTuple, c: float) -> LemmaIneqResult:
    """Evaluate both sides of the exceedance inequality at one tuple.

    applicable iff |mu(t)| >= c; then lhs = 1 + sum 2 cos(theta_i) must be
    >= rhs = g c^{2/g} - 2g + 1 (up to float noise).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    g = t.genus
    applicable = abs(mu(t)) >= c
    lhs = 1.0 + 2.0 * math.fsum(math.cos(a) for a in t.angles[1:])
    rhs = g * c ** (2.0 / g) - 2.0 * g + 1.0
    return LemmaIneqResult(applicable, lhs, rhs)


def extremal_tuple(g: int, c: float) -> SatakeTuple:
    """Equal-angle tuple attaining the inequality's equality case.

    a_i = e^{i phi} for all 1 <= i <= g with cos phi = c^{2/g}/2 - 1, and
    a_0 the branch making mu >= 0; then mu = c exactly.
    """
    if not 0 < c <= 2**g:
        raise ValueError(f"c must lie in (0, 2^g] = (0, {2**g}]")
    x = c ** (2.0 / g) / 2.0 - 1.0
    phi = math.acos(max(-1.0, min(1.0, x)))
    return from_free_angles(g, [phi] * g, Branch.PLUS)


def theorem1_bound(g: int, c: float) -> float:
    """Upper Dirichlet-density bound (2 - 1/g) c^{-2/g} for {p : |mu(p)| >= c}."""
    if g < 1:
        raise ValueError("g must be >= 1")
    if c <= 0:
        raise ValueError("c must be positive")
    return (2.0 - 1.0 / g) / c ** (2.0 / g)


def theorem2_bound(c: float) -> float:
    """Upper Dirichlet-density bound 4 / (c + 4) for {p : mu(p) >= c} (genus 2)."""
    if c <= 0:
        raise ValueError("c must be positive")
    return 4.0 / (c + 4.0)


def exceptional_set_from_mu(
    table: PrimeTable, mu_values: np.ndarray, c: float, mode: Mode
) -> PrimeSubset:
    """Exceedance set from a bare array of mu values aligned to the table."""
    if c <= 0:
        raise ValueError("c must be positive")
    vals = np.asarray(mu_values, dtype=np.float64)
    if mode is Mode.ABS:
        return PrimeSubset(table, np.abs(vals) >= c)
    return PrimeSubset(table, vals >= c)


def exceptional_set(A: SatakeAssignment, c: float, mode: Mode) -> PrimeSubset:
    return exceptional_set_from_mu(A.table, A.mu_values, c, mode)


class LogLDecomposition(NamedTuple):
    log_l: float          # sum over primes of the truncated local logs
    linear_term: float    # R(s) or T(s): sum of c_1(p) p^-s
    remainder: float      # log_l - linear_term
    remainder_cap: float  # sum_p (D/2) p^{-2s} / (1 - p^{-s})


def log_L_decomposition(
    A: SatakeAssignment, kind: FactorKind, s: float, r_cut: int = DEFAULT_R_CUT
) -> LogLDecomposition:
    """Split the truncated log L(s) into its linear term plus a remainder
    with a hard cap.

    log L(s) = sum_p sum_{r<=r_cut} tr_r(p) / (r p^{rs}); the r = 1 layer
    is R(s) = sum rho(p) p^-s (standard) or T(s) = sum mu(p) p^-s (spin),
    and every deeper layer is dominated by |tr_r| <= D, giving the cap.
    """
    if s <= 1.0:
        raise ValueError("s must be > 1")
    if kind is FactorKind.SPIN:
        root_ang = spin_root_angles(A.angles)
        c1 = A.mu_values
    else:
        root_ang = std_root_angles(A.angles)
        c1 = A.rho1_values
    d = factor_degree(kind, A.genus)
    z0 = np.exp(1j * root_ang)
    z = z0.copy()
    pinv = A.table.primes.astype(np.float64) ** -s
    q = pinv.copy()
    per_prime = np.zeros(len(A))
    for r in range(1, r_cut + 1):
        if r > 1:
            z *= z0
            q *= pinv
        per_prime += z.sum(axis=1).real * q / r
    log_l = math.fsum(per_prime.tolist())
    linear = math.fsum((c1 * pinv).tolist())
    cap = math.fsum((0.5 * d * pinv**2 / (1.0 - pinv)).tolist())
    return LogLDecomposition(log_l, linear, log_l - linear, cap)


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one exceedance-density check at threshold c.

    margin = bound - max Dirichlet ratio over the grid.  A negative margin
    on a synthetic assignment is recorded, never raised: consult the
    diagnostics for divergence of the linear sum.
    """

    c: float
    mode: Mode
    bound: float
    margin: float
    estimate: DensityEstimate
    diagnostics: dict
    extrapolation: bool
    nontrivial_range: tuple[float, float]
    witnesses: tuple[tuple[int, float], ...] | None = None


def _linear_sum_diagnostics(
    table: PrimeTable, c1_values: np.ndarray, kind_label: str, s_grid
) -> dict:
    pf = table.primes.astype(np.float64)
    sums = [math.fsum((c1_values * pf**-s).tolist()) for s in s_grid]
    deltas = np.diff(sums)
    return {
        "kind": kind_label,
        "s": list(s_grid),
        "linear_sum": sums,
        # s_grid descends toward 1, so positive deltas mean growth as s -> 1+
        "monotone_growth": bool(len(sums) > 1 and np.all(deltas > 0)),
        "growth": float(sums[-1] - sums[0]) if len(sums) > 1 else 0.0,
    }


def verify_theorem(
    A: SatakeAssignment,
    c: float,
    mode: Mode,
    s_grid=None,
    x_grid=None,
    include_witnesses: bool = False,
) -> BoundReport:
    """Exceptional set, truncated density profile, theorem bound, margin,
    and divergence diagnostics for one (assignment, c, mode)."""
    g = A.genus
    S = exceptional_set(A, c, mode)
    est = density_profile(S, s_grid, x_grid)
    if mode is Mode.ABS:
        bound = theorem1_bound(g, c)
        diagnostics = _linear_sum_diagnostics(A.table, A.rho1_values, "std", est.s_grid)
        nontrivial = ((2.0 - 1.0 / g) ** (g / 2.0), float(2**g))
        extrapolation = False
    else:
        bound = theorem2_bound(c)
        diagnostics = _linear_sum_diagnostics(A.table, A.mu_values, "spin", est.s_grid)
        nontrivial = (0.0, 12.0 / 5.0)
        # the signed bound is proved only for genus 2
        extrapolation = g != 2
    margin = bound - est.max_dirichlet
    witnesses = None
    if include_witnesses:
        members = S.members()
        mus = A.mu_values[S.membership]
        witnesses = tuple((int(p), float(m)) for p, m in zip(members, mus))
    return BoundReport(
        c=float(c),
        mode=mode,
        bound=bound,
        margin=margin,
        estimate=est,
        diagnostics=diagnostics,
        extrapolation=extrapolation,
        nontrivial_range=nontrivial,
        witnesses=witnesses,
    )


@dataclass(frozen=True)
class SharpnessReport:
    """Balanced two-valued weight construction showing the density bound
    C/(C+D) is attained.

    f = +C on the residue-class set S and -C off it keeps the truncated
    L(s) bounded while S has density 1/2 = C/(C+C); the D > C variant
    (f = +2C on S) makes L grow along the grid, confirming that the
    bounded-L hypothesis is what pins the bound.
    """

    off_set_cap: float       # C: -C <= f everywhere
    on_set_floor: float      # D: f >= D on S
    ceiling: float           # E: f <= E everywhere (recorded, unused by the bound)
    modulus: int
    residue: int
    s_grid: tuple[float, ...]
    l_values: tuple[float, ...]
    max_abs_l: float
    bound: float
    density: DensityEstimate
    density_headline: float  # natural ratio at the full table bound
    variant_l_values: tuple[float, ...]
    variant_monotone_growth: bool


def lfunc_sharpness_harness(
    C: float,
    table: PrimeTable,
    residue_class_split: tuple[int, int] = (3, 1),
    s_grid=None,
    x_grid=None,
) -> SharpnessReport:
    """Run the equality-case construction for the bounded-L density lemma."""
    if C <= 0:
        raise ValueError("C must be positive")
    modulus, residue = residue_class_split
    S = PrimeSubset.residue_class(table, modulus, (residue,))
    est = density_profile(S, s_grid, x_grid)
    grid = est.s_grid
    pf = table.primes.astype(np.float64)
    sign = np.where(S.membership, 1.0, -1.0)
    l_values = tuple(math.fsum((C * sign * pf**-s).tolist()) for s in grid)
    variant_weights = np.where(S.membership, 2.0 * C, -C)
    variant = tuple(math.fsum((variant_weights * pf**-s).tolist()) for s in grid)
    growth = bool(len(variant) > 1 and np.all(np.diff(variant) > 0))
    return SharpnessReport(
        off_set_cap=C,
        on_set_floor=C,
        ceiling=C,
        modulus=modulus,
        residue=residue,
        s_grid=grid,
        l_values=l_values,
        max_abs_l=max(abs(v) for v in l_values),
        bound=C / (C + C),
        density=est,
        density_headline=est.natural_ratios[-1],
        variant_l_values=variant,
        variant_monotone_growth=growth,
    )
