"""Dirichlet coefficients of local factors, their combinatorial bounds, and
truncated log evaluation with explicit tail control.

For a local factor with inverse roots alpha_1..alpha_d the coefficient of
p^{-rs} in its Dirichlet series is the complete homogeneous symmetric
polynomial h_r(alpha), a sum of binom(r+d-1, d-1) unit-modulus terms, which
is why |h_r| <= binom(r+d-1, d-1) with equality when every root is 1.

Two independent expansion routes are provided:

* :func:`expand` builds the reciprocal polynomial prod (1 - alpha_j x) and
  runs the linear recurrence c_r = -sum_k q_k c_{r-k};
* :func:`expand_oracle` multiplies truncated geometric series
  (1 + alpha_j x + alpha_j^2 x^2 + ...) term by term.

They share nothing past the root list, so agreement is a meaningful check.
Both run in 160-bit arithmetic and round to float64 at the end: the
coefficients grow like binom(r+d-1, d-1) (over 3e9 at genus 4, depth 20),
where double-precision intermediates would drown coefficient-sized
cancellation noise far above the 1e-9 realness and agreement tolerances.
"""

from __future__ import annotations

import math

import gmpy2

from .core import FactorKind, LocalFactor, SatakeTuple, local_factor

# Imaginary residue up to this is float noise and gets truncated; anything
# larger indicates a constraint violation and is an error.
IMAG_TOL = 1e-9

# With s >= 1.01 and p >= 2 this drives the log tail below 1e-18.
DEFAULT_R_CUT = 64


class CoeffSeries:
    """Coefficients c_0..c_{r_max} of one local factor, c_0 = 1.

    The coefficients depend only on the tuple, not on the prime: they are
    the values m(p^r) (spin) or rho(p^r) (standard) as functions of r.
    """

    __slots__ = ("kind", "genus", "depth", "coeffs")

    def __init__(self, kind: FactorKind, genus: int, depth: int, coeffs: tuple[float, ...]):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if len(coeffs) != depth + 1:
            raise ValueError("need depth + 1 coefficients")
        if coeffs[0] != 1.0:
            raise ValueError("c_0 must be exactly 1")
        self.kind = kind
        self.genus = genus
        self.depth = depth
        self.coeffs = coeffs

    def __repr__(self) -> str:  # pragma: no cover
        return f"CoeffSeries({self.kind.value}, g={self.genus}, coeffs={self.coeffs})"


# Internal working precision for the expansions; see the module docstring.
_PRECISION = 160


class _highprec:
    """Temporarily switch the thread's gmpy2 context to 160-bit."""

    def __enter__(self):
        self._saved = gmpy2.get_context()
        gmpy2.set_context(gmpy2.context(precision=_PRECISION))

    def __exit__(self, *exc):
        gmpy2.set_context(self._saved)


def _realify(coeffs, what: str) -> tuple[float, ...]:
    resid = max(abs(float(c.imag)) for c in coeffs)
    if resid > IMAG_TOL:
        raise ValueError(
            f"{what}: imaginary residue {resid:.3e} exceeds {IMAG_TOL:.1e}; "
            "root multiset not closed under conjugation?"
        )
    return tuple(float(c.real) for c in coeffs)


def expand(f: LocalFactor, r_max: int) -> CoeffSeries:
    """Series coefficients via the reciprocal-polynomial recurrence.

    With q(x) = prod_j (1 - alpha_j x) = sum_k q_k x^k the coefficients obey
    c_0 = 1 and c_r = -sum_{k=1}^{min(r,d)} q_k c_{r-k}.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    d = len(f.roots)
    with _highprec():
        q = [gmpy2.mpc(1)]
        for root in f.roots:
            z = gmpy2.mpc(root)
            nxt = [q[0]] + [q[i] - q[i - 1] * z for i in range(1, len(q))]
            nxt.append(-q[-1] * z)
            q = nxt
        c = [gmpy2.mpc(1)]
        for r in range(1, r_max + 1):
            m = min(r, d)
            acc = gmpy2.mpc(0)
            for k in range(1, m + 1):
                acc += q[k] * c[r - k]
            c.append(-acc)
        coeffs = _realify(c, "expand")
    return CoeffSeries(f.kind, f.genus, r_max, (1.0, *coeffs[1:]))


def expand_oracle(f: LocalFactor, r_max: int) -> CoeffSeries:
    """Series coefficients by brute-force multiplication of the truncated
    geometric series of each root.  Exists solely as an independent
    implementation to test :func:`expand` against."""
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    with _highprec():
        poly = [gmpy2.mpc(0)] * (r_max + 1)
        poly[0] = gmpy2.mpc(1)
        for root in f.roots:
            z = gmpy2.mpc(root)
            geo = [gmpy2.mpc(1)]
            for _ in range(r_max):
                geo.append(geo[-1] * z)
            nxt = [gmpy2.mpc(0)] * (r_max + 1)
            for i, pi in enumerate(poly):
                if pi == 0:
                    continue
                for j in range(r_max + 1 - i):
                    nxt[i + j] += pi * geo[j]
            poly = nxt
        coeffs = _realify(poly, "expand_oracle")
    return CoeffSeries(f.kind, f.genus, r_max, (1.0, *coeffs[1:]))


def coeff_bound(kind: FactorKind, genus: int, r: int) -> int:
    """Exact integer bound on |m(p^r)| (spin) or |rho(p^r) - rho(p^{r-1})|
    (standard): binom(r + 2^g - 1, 2^g - 1) resp. binom(r + 2g - 1, 2g - 1).

    Python integers are unbounded, so the result is always exact; there is
    no overflow to signal.
    """
    if genus < 1:
        raise ValueError("genus must be >= 1")
    if r < 0:
        raise ValueError("r must be >= 0")
    d = 2**genus if kind is FactorKind.SPIN else 2 * genus
    return math.comb(r + d - 1, d - 1)


def first_coefficient_identities(t: SatakeTuple) -> tuple[float, float]:
    """(m_1, rho_1): the first spin and standard coefficients.

    m_1 equals mu(t), and rho_1 equals 1 + sum_i (a_i + 1/a_i); both
    identities are exercised by the test suite rather than asserted here.
    """
    m1 = expand(local_factor(t, FactorKind.SPIN), 1).coeffs[1]
    rho1 = expand(local_factor(t, FactorKind.STD), 1).coeffs[1]
    return m1, rho1


def trace_power(t: SatakeTuple, kind: FactorKind, r: int) -> float:
    """tr_r = sum_j alpha_j^r over the factor's roots; real since the root
    multiset is closed under conjugation.  |tr_r| <= degree."""
    if r < 1:
        raise ValueError("r must be >= 1")
    total = sum(root**r for root in local_factor(t, kind).roots)
    if abs(total.imag) > IMAG_TOL:
        raise ValueError(
            f"trace power has imaginary residue {total.imag:.3e}"
        )
    return total.real


def log_local(
    t: SatakeTuple,
    kind: FactorKind,
    p: int,
    s: float,
    r_cut: int = DEFAULT_R_CUT,
) -> tuple[float, float]:
    """Truncated log of the local factor at p, with a guaranteed tail bound.

    log L_p(s) = sum_{r>=1} tr_r / (r p^{rs}); the value sums r <= r_cut and

        tail_bound = D * p^{-(r_cut+1)s} / ((r_cut+1) (1 - p^{-s}))

    with D the factor degree, so |true log - value| <= tail_bound.
    """
    if s <= 1.0:
        raise ValueError("s must be > 1")
    if p < 2:
        raise ValueError("p must be >= 2")
    if r_cut < 1:
        raise ValueError("r_cut must be >= 1")
    roots = local_factor(t, kind).roots
    d = len(roots)
    terms = []
    powers = list(roots)
    for r in range(1, r_cut + 1):
        if r > 1:
            powers = [w * root for w, root in zip(powers, roots)]
        tr = sum(powers).real
        terms.append(tr * p ** (-r * s) / r)
    value = math.fsum(terms)
    tail_bound = d * p ** (-(r_cut + 1) * s) / ((r_cut + 1) * (1.0 - p**-s))
    return value, tail_bound
