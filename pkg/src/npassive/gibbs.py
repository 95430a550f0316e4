"""Thermal-state functionals and the inverse problem beta(entropy).

All functionals are evaluated level-wise from (energy, log-multiplicity)
pairs, so astronomically degenerate spectra cost nothing extra.  The
entropy-to-beta inversion exploits strict monotonicity of S_beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectra import DiagonalState, Spectrum, _check_aligned, state_entropy

ENTROPY_TOL = 1e-12

# beyond this, exp(-beta*eps_max) underflows any achievable entropy gap and
# the state is numerically the uniform ground mixture
BETA_INF_FACTOR = 700.0


class NoGibbsCounterpartError(ValueError):
    """Requested entropy lies below ln(d0): no thermal state matches it."""


class EntropyRangeError(ValueError):
    """Requested entropy exceeds ln(d)."""


@dataclass(frozen=True)
class GibbsPoint:
    beta: float
    logZ: float
    energy: float
    entropy: float


def _logsumexp(a: np.ndarray) -> float:
    m = np.max(a)
    if not math.isfinite(m):
        return float(m)
    return float(m + math.log(np.sum(np.exp(a - m))))


def _thermal_functionals(eps: np.ndarray, logg: np.ndarray, beta: float):
    """(logZ, E, S) for populations proportional to g*exp(-beta*eps)."""
    if math.isinf(beta):
        return float(logg[0]), 0.0, float(logg[0])
    terms = logg - beta * eps
    logZ = _logsumexp(terms)
    # log of each level's total population, guaranteed <= 0
    logp = terms - logZ
    p = np.exp(logp)
    energy = float(np.dot(p, eps))
    # S = -sum over individual slots of (p/g) ln(p/g) = sum p*(logZ + beta*eps - ...)
    # expressed per level: level population p at per-slot log (logp - logg)
    entropy = float(-np.dot(p, logp - logg))
    return logZ, energy, entropy


def gibbs_point(s: Spectrum, beta: float) -> GibbsPoint:
    """Thermal functionals (logZ, energy, entropy) at inverse temperature beta."""
    if beta < 0:
        raise ValueError("beta must be >= 0 (or +inf)")
    logZ, energy, entropy = _thermal_functionals(
        s.level_energies, s.log_multiplicities, beta
    )
    return GibbsPoint(beta=beta, logZ=logZ, energy=energy, entropy=entropy)


def gibbs_populations(s: Spectrum, beta: float) -> DiagonalState:
    """Dense thermal state exp(-beta*eps_j)/Z, index-aligned to the spectrum."""
    if math.isinf(beta):
        pops = [0.0] * s.d
        for j in range(s.d0):
            pops[j] = 1.0 / s.d0
        return DiagonalState(tuple(pops))
    logZ = gibbs_point(s, beta).logZ
    pops = tuple(math.exp(-beta * e - logZ) for e in s.energies)
    total = sum(pops)
    return DiagonalState(tuple(p / total for p in pops))


def solve_beta_for_entropy(s: Spectrum, S_target: float, tol: float = ENTROPY_TOL) -> float:
    """Invert the strictly decreasing map beta -> S_beta by bisection.

    Returns +inf when the target is the minimum-entropy limit ln(d0).
    """
    ln_d = math.log(s.d)
    ln_d0 = math.log(s.d0)
    if S_target > ln_d + tol:
        raise EntropyRangeError(f"entropy {S_target} exceeds ln d = {ln_d}")
    if S_target < ln_d0 - tol:
        raise NoGibbsCounterpartError(
            f"entropy {S_target} below ln d0 = {ln_d0}: no thermal state matches"
        )
    if S_target >= ln_d - tol:
        return 0.0
    gap = S_target - ln_d0
    if gap <= 0:
        return math.inf
    # never accept a beta whose entropy is indistinguishable from the floor
    accept = min(tol, gap / 8.0)

    beta_cap = BETA_INF_FACTOR / s.eps_max
    lo, hi = 0.0, 1.0 / s.eps_max
    while gibbs_point(s, hi).entropy > S_target:
        lo = hi
        hi *= 2.0
        if hi > beta_cap:
            return math.inf
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        S_mid = gibbs_point(s, mid).entropy
        if abs(S_mid - S_target) <= accept:
            return mid
        if S_mid > S_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def isoentropic_energy(s: Spectrum, rho: DiagonalState) -> tuple[float, float]:
    """(beta_rho, E_beta) of the thermal state sharing the entropy of rho."""
    _check_aligned(s, rho)
    beta = solve_beta_for_entropy(s, state_entropy(rho))
    return beta, gibbs_point(s, beta).energy
