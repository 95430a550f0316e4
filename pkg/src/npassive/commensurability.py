"""Commensurable level triples and the cutoff order N*.

When consecutive gap ratios of a spectrum are rational p/q, occupation
vectors of order p can tie in energy while differing in which levels they
occupy; structural stability then pins the populations to a thermal
log-linear relation.  N* is the order beyond which this happens for every
triple, leaving only thermal or ground-supported states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .spectra import DiagonalState, Spectrum, _check_aligned

DEFAULT_MAX_DEN = 10**6
DEFAULT_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class RationalRatio:
    p: int
    q: int
    exact: bool

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("p/q must be in lowest terms")
        if not (self.p > self.q >= 1):
            raise ValueError("need p > q >= 1")


@dataclass(frozen=True)
class NStarResult:
    n_star: int | None
    triples: tuple[tuple[int, int, int] | None, ...]
    all_triples_lcm: int | None


def rational_ratio_detect(
    x: float, max_den: int = DEFAULT_MAX_DEN, tol: float = DEFAULT_RATIO_TOL
) -> RationalRatio | None:
    """Best rational p/q with q <= max_den matching x within tol, if any."""
    if not (math.isfinite(x) and x > 1):
        raise ValueError("ratio must be finite and > 1")
    frac = Fraction(x).limit_denominator(max_den)
    if abs(x - float(frac)) <= tol and frac > 1:
        return RationalRatio(p=frac.numerator, q=frac.denominator, exact=False)
    return None


def _level_ratios(s: Spectrum, triples):
    """Gap ratios (eps_c - eps_a)/(eps_b - eps_a) as floats or exact Fractions."""
    if s.rational_levels is not None:
        eps = [e for e, _ in s.rational_levels]
        exact = True
    else:
        eps = [e for e, _ in s.distinct_levels]
        exact = False
    out = []
    for a, b, c in triples:
        out.append(((eps[c] - eps[a]) / (eps[b] - eps[a]), exact))
    return out


def _detect_many(ratios, max_den, tol):
    found = []
    for ratio, exact in ratios:
        if exact:
            frac = Fraction(ratio)
            found.append(RationalRatio(p=frac.numerator, q=frac.denominator, exact=True))
        else:
            found.append(rational_ratio_detect(ratio, max_den, tol))
    return found


def n_star(
    s: Spectrum, max_den: int = DEFAULT_MAX_DEN, tol: float = DEFAULT_RATIO_TOL
) -> NStarResult:
    """Least order beyond which only thermal/ground states survive stability.

    Computed as the lcm of the numerators p of the consecutive-triple gap
    ratios; None when any consecutive ratio is irrational at the working
    precision.  The lcm over *all* level triples is reported alongside as a
    diagnostic (non-consecutive triples are not covered by the consecutive
    criterion).
    """
    L = s.num_levels
    if L < 3:
        raise ValueError("N* needs at least three distinct levels")
    consecutive = [(i, i + 1, i + 2) for i in range(L - 2)]
    ratios = _detect_many(_level_ratios(s, consecutive), max_den, tol)
    triples = tuple(
        (r.p, r.q, i) if r is not None else None
        for i, r in enumerate(ratios)
    )
    if any(r is None for r in ratios):
        value = None
    else:
        value = math.lcm(*(r.p for r in ratios))
    every = [
        (a, b, c) for a in range(L) for b in range(a + 1, L) for c in range(b + 1, L)
    ]
    all_ratios = _detect_many(_level_ratios(s, every), max_den, tol)
    if any(r is None for r in all_ratios):
        diag = None
    else:
        diag = math.lcm(*(r.p for r in all_ratios))
    return NStarResult(n_star=value, triples=triples, all_triples_lcm=diag)


def triple_forces_gibbs(
    s: Spectrum,
    rho: DiagonalState,
    triple: tuple[int, int, int],
    tol: float = 1e-9,
    max_den: int = DEFAULT_MAX_DEN,
    ratio_tol: float = DEFAULT_RATIO_TOL,
) -> bool:
    """Whether the populations on a commensurable level triple obey the
    thermal log-linear tie p*ln(lambda_b) = q*ln(lambda_c) + (p-q)*ln(lambda_a).

    ``triple`` holds distinct-level indices a < b < c.  Populations are taken
    as the within-level means.
    """
    _check_aligned(s, rho)
    a, b, c = triple
    if not (0 <= a < b < c < s.num_levels):
        raise ValueError("triple must hold increasing distinct-level indices")
    ((ratio, exact),) = _level_ratios(s, [triple])
    if exact:
        frac = Fraction(ratio)
        rr = RationalRatio(p=frac.numerator, q=frac.denominator, exact=True)
    else:
        rr = rational_ratio_detect(ratio, max_den, ratio_tol)
    if rr is None:
        raise ValueError("triple's gap ratio is not rational at this precision")
    means = []
    for idx in (a, b, c):
        lo, hi = s.level_slices[idx]
        means.append(sum(rho.populations[lo:hi]) / (hi - lo))
    la, lb, lc = means
    if min(la, lb, lc) <= 0:
        return False
    resid = (
        rr.p * math.log(lb) - rr.q * math.log(lc) - (rr.p - rr.q) * math.log(la)
    )
    return abs(resid) <= tol
