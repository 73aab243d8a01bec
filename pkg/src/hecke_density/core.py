"""Tempered Satake tuples and their spin / standard local Euler factors.

A tuple of genus g holds g+1 unit-modulus parameters (a_0, a_1, ..., a_g),
stored as angles so that |a_i| = 1 is structural.  The trivial-central-
character constraint

    a_0^2 * a_1 * ... * a_g = 1

pins a_0 up to sign once a_1, ..., a_g are chosen, and forces the first
normalized eigenvalue

    mu = a_0 * (1 + a_1) * ... * (1 + a_g)

to be real.  The two Euler factors attached to a tuple are reciprocal
polynomials in x = p^{-s} with unit-circle inverse roots:

    spin:      roots a_0 * prod_{i in T} a_i over all subsets T of {1..g},
               degree 2^g;
    standard:  roots {1} u {a_i, 1/a_i : 1 <= i <= g}, degree 2g + 1.

Scalar operations use plain complex arithmetic on one tuple at a time; the
``*_of_angles`` helpers at the bottom are vectorized numpy kernels for
assignment-scale work and double as an independent cross-check of the
scalar path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations

import numpy as np

TWO_PI = 2.0 * math.pi

# ~100x double-precision accumulation error over <= 2^g <= 16 unit products.
TOL_CONSTRAINT = 1e-10
TOL_REAL = 1e-10
# Allowance on recorded moduli of ingested data before a tuple counts as
# non-tempered.
TOL_MAGNITUDE = 1e-6


class FactorKind(str, Enum):
    SPIN = "spin"
    STD = "std"


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


def factor_degree(kind: FactorKind, genus: int) -> int:
    """Degree of the local factor: 2^g for spin, 2g+1 for standard."""
    return 2**genus if kind is FactorKind.SPIN else 2 * genus + 1


@dataclass(frozen=True)
class SatakeTuple:
    """Genus plus g+1 parameter angles (radians, stored in [0, 2pi)).

    ``magnitudes`` records the moduli an ingested tuple was reconstructed
    from; it is provenance only and never enters any computation.  All
    arithmetic treats the parameters as exactly unit modulus.
    """

    genus: int
    angles: tuple[float, ...]
    magnitudes: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.genus, int) or self.genus < 1:
            raise ValueError(f"genus must be a positive integer, got {self.genus!r}")
        if len(self.angles) != self.genus + 1:
            raise ValueError(
                f"expected {self.genus + 1} angles for genus {self.genus}, "
                f"got {len(self.angles)}"
            )
        angles = tuple(float(t) % TWO_PI for t in self.angles)
        if any(not math.isfinite(t) for t in angles):
            raise ValueError("angles must be finite")
        object.__setattr__(self, "angles", angles)
        if self.magnitudes is not None:
            mags = tuple(float(m) for m in self.magnitudes)
            if len(mags) != self.genus + 1:
                raise ValueError("magnitudes must have length genus + 1")
            object.__setattr__(self, "magnitudes", mags)

    @property
    def params(self) -> tuple[complex, ...]:
        """The parameters (a_0, ..., a_g) as unit-modulus complex numbers."""
        return tuple(cmath.exp(1j * t) for t in self.angles)


def from_free_angles(
    genus: int, angles, branch: Branch = Branch.PLUS
) -> SatakeTuple:
    """Complete free angles theta_1..theta_g to a tuple satisfying the
    central constraint.

    a_0 must be a square root of 1/(a_1 * ... * a_g).  PLUS takes
    a_0 = exp(-i * (theta_1 + ... + theta_g) / 2) for the angles exactly as
    given (before any 2pi reduction); MINUS takes the opposite root.
    """
    free = [float(t) for t in angles]
    if len(free) != genus:
        raise ValueError(f"expected {genus} free angles, got {len(free)}")
    theta0 = -math.fsum(free) / 2.0
    if branch is Branch.MINUS:
        theta0 += math.pi
    return SatakeTuple(genus, (theta0, *free))


def _mu_complex(t: SatakeTuple) -> complex:
    a = t.params
    out = a[0]
    for ai in a[1:]:
        out *= 1.0 + ai
    return out


def mu(t: SatakeTuple, tol_real: float = TOL_REAL) -> float:
    """First normalized eigenvalue mu = a_0 * prod(1 + a_i), in product form.

    Raises if the imaginary residue exceeds ``tol_real``, which indicates a
    central-constraint violation upstream.
    """
    z = _mu_complex(t)
    if abs(z.imag) > tol_real:
        raise ValueError(
            f"mu has imaginary residue {z.imag:.3e} > {tol_real:.1e}; "
            "central constraint violated?"
        )
    return z.real


def mu_expanded(t: SatakeTuple, tol_real: float = TOL_REAL) -> float:
    """mu as the literal 2^g-term subset sum sum_T a_0 * prod_{i in T} a_i.

    Structurally different evaluation from :func:`mu`; the two agree within
    float noise on valid tuples.
    """
    a = t.params
    terms = []
    for k in range(t.genus + 1):
        for subset in combinations(range(1, t.genus + 1), k):
            z = a[0]
            for i in subset:
                z *= a[i]
            terms.append(z)
    total = sum(terms)
    if abs(total.imag) > tol_real:
        raise ValueError(
            f"mu_expanded has imaginary residue {total.imag:.3e} > {tol_real:.1e}"
        )
    return total.real


@dataclass(frozen=True)
class LocalFactor:
    """One local Euler factor prod_j (1 - alpha_j p^{-s})^{-1}, held by its
    inverse roots alpha_j (all on the unit circle)."""

    kind: FactorKind
    genus: int
    roots: tuple[complex, ...]

    def __post_init__(self) -> None:
        expected = factor_degree(self.kind, self.genus)
        if len(self.roots) != expected:
            raise ValueError(
                f"{self.kind.value} factor of genus {self.genus} needs "
                f"{expected} roots, got {len(self.roots)}"
            )

    @property
    def degree(self) -> int:
        return len(self.roots)


def local_factor(t: SatakeTuple, kind: FactorKind) -> LocalFactor:
    """Build the spin or standard local factor of a tuple.

    Spin roots are enumerated by subset size then lexicographic index.  The
    conjugate of the root for subset T is the root for its complement (via
    the central constraint), and the complement's angle is stored as the
    exact negation of its partner's, so the root multiset is exactly closed
    under conjugation in floating point (real series coefficients downstream
    are then structural, not approximate).
    """
    th = t.angles
    g = t.genus
    if kind is FactorKind.SPIN:
        canonical = {}
        for k in range(g + 1):
            for subset in combinations(range(1, g + 1), k):
                if 1 in subset:
                    canonical[subset] = th[0] + math.fsum(th[i] for i in subset)
        roots = []
        for k in range(g + 1):
            for subset in combinations(range(1, g + 1), k):
                if 1 in subset:
                    ang = canonical[subset]
                else:
                    comp = tuple(i for i in range(1, g + 1) if i not in subset)
                    ang = -canonical[comp]
                roots.append(cmath.exp(1j * ang))
    else:
        roots = [1.0 + 0.0j]
        for i in range(1, g + 1):
            roots.append(cmath.exp(1j * th[i]))
            roots.append(cmath.exp(-1j * th[i]))
    return LocalFactor(kind, t.genus, tuple(roots))


def validate(t: SatakeTuple, tol: float = TOL_CONSTRAINT) -> list[str]:
    """Check the tuple invariants; returns the list of violations (empty if
    the tuple is valid).  Violations are data, not errors."""
    report: list[str] = []
    resid = abs(cmath.exp(1j * (2.0 * t.angles[0] + math.fsum(t.angles[1:]))) - 1.0)
    if resid > tol:
        report.append(
            f"central constraint violated: |a_0^2 a_1...a_g - 1| = {resid:.3e} > {tol:.1e}"
        )
    imag = abs(_mu_complex(t).imag)
    if imag > tol:
        report.append(f"mu not real: |Im mu| = {imag:.3e} > {tol:.1e}")
    return report


def is_tempered(t: SatakeTuple, tol: float = TOL_MAGNITUDE) -> bool:
    """True when every recorded parameter modulus is within ``tol`` of 1.

    Always true for tuples built from angles alone; only ingested tuples
    carry recorded magnitudes that can fail this.
    """
    if t.magnitudes is None:
        return True
    return max(abs(m - 1.0) for m in t.magnitudes) <= tol


# ---------------------------------------------------------------------------
# Vectorized kernels over angle arrays of shape (..., g+1).


@lru_cache(maxsize=None)
def _subset_mask(genus: int) -> np.ndarray:
    """(2^g, g) 0/1 matrix; row t has bit i set iff i+1 is in subset t."""
    t = np.arange(2**genus, dtype=np.int64)
    return ((t[:, None] >> np.arange(genus)) & 1).astype(np.float64)


def spin_root_angles(angles: np.ndarray) -> np.ndarray:
    """Angles of all 2^g spin roots, shape (..., 2^g)."""
    angles = np.asarray(angles, dtype=np.float64)
    g = angles.shape[-1] - 1
    return angles[..., :1] + angles[..., 1:] @ _subset_mask(g).T


def std_root_angles(angles: np.ndarray) -> np.ndarray:
    """Angles of the 2g+1 standard roots {1} u {a_i, 1/a_i}, shape (..., 2g+1)."""
    angles = np.asarray(angles, dtype=np.float64)
    zero = np.zeros_like(angles[..., :1])
    return np.concatenate([zero, angles[..., 1:], -angles[..., 1:]], axis=-1)


def mu_of_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorized mu; real part only (imaginary part vanishes on valid tuples)."""
    z = np.exp(1j * np.asarray(angles, dtype=np.float64))
    return (z[..., 0] * np.prod(1.0 + z[..., 1:], axis=-1)).real


def rho1_of_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorized first standard coefficient rho = 1 + sum_i (a_i + 1/a_i)."""
    angles = np.asarray(angles, dtype=np.float64)
    return 1.0 + 2.0 * np.cos(angles[..., 1:]).sum(axis=-1)


def constraint_residual(angles: np.ndarray) -> np.ndarray:
    """Vectorized |a_0^2 a_1...a_g - 1|."""
    angles = np.asarray(angles, dtype=np.float64)
    total = 2.0 * angles[..., 0] + angles[..., 1:].sum(axis=-1)
    return np.abs(np.exp(1j * total) - 1.0)
