"""Samplers producing Satake assignments over a prime table.

The eigenvalue-angle distribution of genuine higher-genus eigenforms is
unknown, so these samplers are test fixtures, not models: a uniform torus
family, the genus-1 semicircle (sin^2) family, constant extremal families,
and deterministic angle rules.

Reproducibility contract: stochastic kinds draw each prime's tuple from a
counter-based substream keyed by (seed, prime index), so an assignment is a
pure function of (spec, table) no matter how iteration is ordered or
chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .core import Branch, SatakeTuple, TWO_PI, from_free_angles
from .density import PrimeTable
from .verify import SatakeAssignment, extremal_tuple


class SamplerKind(str, Enum):
    UNIFORM_TORUS = "uniform_torus"
    SATO_TATE_G1 = "sato_tate_g1"
    EXTREMAL_CONSTANT = "extremal_constant"
    ANGLE_FAMILY = "angle_family"


_STOCHASTIC = frozenset({SamplerKind.UNIFORM_TORUS, SamplerKind.SATO_TATE_G1})

# sqrt of squarefree integers: independent irrationals for the default
# deterministic angle rule theta_{p,i} = 2*pi*frac(p * m_i)
_DEFAULT_MULTIPLIERS = (math.sqrt(2), math.sqrt(3), math.sqrt(5), math.sqrt(7))


@dataclass(frozen=True)
class SamplerSpec:
    kind: SamplerKind
    genus: int
    seed: int | None = None
    c: float | None = None
    multipliers: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.genus < 1:
            raise ValueError("genus must be >= 1")
        kind = SamplerKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in _STOCHASTIC:
            if self.seed is None:
                raise ValueError(f"{kind.value} requires a seed")
            if not 0 <= self.seed < 2**64:
                raise ValueError("seed must fit in 64 bits")
        if kind is SamplerKind.SATO_TATE_G1 and self.genus != 1:
            raise ValueError("the Sato-Tate sampler is genus 1 only")
        if kind is SamplerKind.EXTREMAL_CONSTANT:
            if self.c is None or not 0 < self.c <= 2**self.genus:
                raise ValueError("extremal_constant requires c in (0, 2^g]")
        if kind is SamplerKind.ANGLE_FAMILY:
            mult = self.multipliers or _DEFAULT_MULTIPLIERS[: self.genus]
            if len(mult) != self.genus:
                raise ValueError("need one multiplier per free angle")
            object.__setattr__(self, "multipliers", tuple(float(m) for m in mult))


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent per-index generator: a Philox stream at counter block
    index << 128, so substreams never overlap and depend only on
    (seed, index)."""
    return np.random.Generator(np.random.Philox(key=seed, counter=index << 128))


def sample_uniform(g: int, rng: np.random.Generator) -> SatakeTuple:
    """Free angles uniform on [0, 2pi), square-root branch by a fair bit.

    Draw order (g uniforms, then one branch integer) is part of the
    reproducibility contract.
    """
    thetas = rng.uniform(0.0, TWO_PI, size=g)
    branch = Branch.PLUS if rng.integers(0, 2) == 0 else Branch.MINUS
    return from_free_angles(g, thetas, branch)


# Inverse-CDF table for the density (2/pi) sin^2(theta) on [0, pi]:
# CDF(theta) = (2*theta - sin(2*theta)) / (2*pi), strictly increasing.
_ST_GRID = np.linspace(0.0, math.pi, 2**16 + 1)
_ST_CDF = (2.0 * _ST_GRID - np.sin(2.0 * _ST_GRID)) / TWO_PI


def satotate_cdf(theta: float) -> float:
    """Closed-form CDF of the sin^2 angle measure (for table validation)."""
    return (2.0 * theta - math.sin(2.0 * theta)) / TWO_PI


def sample_satotate_g1(rng: np.random.Generator) -> SatakeTuple:
    """Genus-1 tuple (a_0, a_1) = (e^{i theta}, e^{-2 i theta}) with theta
    drawn from the sin^2 measure by inverse-CDF interpolation; mu = 2 cos(theta)."""
    theta = float(np.interp(rng.random(), _ST_CDF, _ST_GRID))
    return SatakeTuple(1, (theta, -2.0 * theta))


def _satotate_thetas(rng: np.random.Generator, n: int) -> np.ndarray:
    """Bulk draw of n sin^2-distributed angles (same inverse-CDF table)."""
    return np.interp(rng.random(n), _ST_CDF, _ST_GRID)


def satotate_exceed_measure(c: float) -> float:
    """sin^2-measure of {theta : |2 cos(theta)| >= c}, by adaptive quadrature.

    The region is [0, arccos(c/2)] u [pi - arccos(c/2), pi]; symmetry halves
    the work.  The closed form (2a - sin 2a)/pi, a = arccos(c/2), is kept in
    the test suite as a cross-check, not used here.
    """
    if not 0.0 <= c <= 2.0:
        raise ValueError("c must lie in [0, 2]")
    a = math.acos(c / 2.0)
    val, _ = quad(lambda t: (2.0 / math.pi) * math.sin(t) ** 2, 0.0, a, epsabs=1e-13)
    return min(1.0, max(0.0, 2.0 * val))


def build_assignment(spec: SamplerSpec, table: PrimeTable) -> SatakeAssignment:
    """One tuple per table prime, per the spec's kind."""
    n = len(table)
    g = spec.genus
    angles = np.empty((n, g + 1), dtype=np.float64)
    if spec.kind is SamplerKind.EXTREMAL_CONSTANT:
        t = extremal_tuple(g, spec.c)
        angles[:] = np.asarray(t.angles)
    elif spec.kind is SamplerKind.ANGLE_FAMILY:
        p = table.primes.astype(np.float64)
        free = TWO_PI * np.modf(np.outer(p, np.asarray(spec.multipliers)))[0]
        theta0 = (-free.sum(axis=1) / 2.0) % TWO_PI
        angles[:, 0] = theta0
        angles[:, 1:] = free % TWO_PI
    elif spec.kind is SamplerKind.SATO_TATE_G1:
        for i in range(n):
            t = sample_satotate_g1(substream(spec.seed, i))
            angles[i] = t.angles
    else:
        for i in range(n):
            t = sample_uniform(g, substream(spec.seed, i))
            angles[i] = t.angles
    return SatakeAssignment(genus=g, table=table, angles=angles)
