"""Passivity orders, structural stability, ergotropy, and related checks.

The order-N passivity condition is a family of log-linear inequalities over
occupation vectors: whenever one vector carries strictly more energy than
another, its product of populations must not exceed the other's.  All such
comparisons run in log-space with the convention that a zero count
contributes nothing even when the population is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectra import (
    DiagonalState,
    OccupationVector,
    Spectrum,
    _check_aligned,
    composition_count,
    compositions,
    state_energy,
)

DEFAULT_LOG_TOL = 1e-12
DEFAULT_STABILITY_TOL = 1e-9
DEFAULT_CAP = 200_000
DOUBLY_STOCHASTIC_TOL = 1e-10


@dataclass(frozen=True)
class PassivityVerdict:
    passive: bool
    witness: tuple[OccupationVector, OccupationVector] | None = None

    def __bool__(self) -> bool:
        return self.passive


@dataclass(frozen=True)
class CPClass:
    """Complete-passivity classification: 'Gibbs', 'GroundState', or 'NotCP'."""

    tag: str
    beta: float | None
    fit_residual: float


def default_energy_tol(eps_max: float, N: int) -> float:
    """Energy sums within this tolerance are treated as ties, not ordered."""
    return 1e-9 * max(1.0, eps_max * N)


def _log_weights(vectors: list[tuple[int, ...]], logpops) -> np.ndarray:
    """Sum of count*ln(lambda) per vector; zero counts contribute 0 always."""
    out = np.empty(len(vectors))
    for k, vec in enumerate(vectors):
        acc = 0.0
        for c, lp in zip(vec, logpops):
            if c:
                acc += c * lp  # lp may be -inf; 0 * (-inf) is skipped above
        out[k] = acc
    return out


def _scan_passive(energies, logpops, N, tol, energy_tol, cap):
    """Core order-N scan over arbitrary slot arrays.

    Returns None if passive, else the lexicographically first violating
    (higher-energy, lower-energy) pair of raw count tuples.
    """
    d = len(energies)
    if composition_count(d, N) > cap:
        from .spectra import EnumerationCapError

        raise EnumerationCapError(
            f"C({N + d - 1},{d - 1}) = {composition_count(d, N)} exceeds cap {cap}"
        )
    vectors = list(compositions(d, N))
    evals = np.array([sum(c * e for c, e in zip(v, energies)) for v in vectors])
    lweights = _log_weights(vectors, logpops)

    order = np.argsort(evals, kind="stable")
    # walk groups of tied energy from the top down; every group's minimum
    # log-weight must dominate the running maximum of strictly higher groups
    groups = []
    start = 0
    for k in range(1, len(order) + 1):
        if k == len(order) or evals[order[k]] - evals[order[k - 1]] > energy_tol:
            groups.append(order[start:k])
            start = k
    running_max = -math.inf
    violated = False
    for grp in reversed(groups):
        if running_max > np.min(lweights[grp]) + tol:
            violated = True
            break
        running_max = max(running_max, float(np.max(lweights[grp])))
    if not violated:
        return None
    for i, vi in enumerate(vectors):
        for j, vj in enumerate(vectors):
            if evals[i] > evals[j] + energy_tol and lweights[i] > lweights[j] + tol:
                return vi, vj
    return None  # unreachable unless tie-chaining absorbed the gap


def _scan_stable(energies, logpops, k, tol, energy_tol, cap):
    """True iff equal-energy order-k occupation pairs carry equal log-weights."""
    d = len(energies)
    if composition_count(d, k) > cap:
        from .spectra import EnumerationCapError

        raise EnumerationCapError(
            f"C({k + d - 1},{d - 1}) = {composition_count(d, k)} exceeds cap {cap}"
        )
    vectors = list(compositions(d, k))
    evals = np.array([sum(c * e for c, e in zip(v, energies)) for v in vectors])
    lweights = _log_weights(vectors, logpops)
    order = np.argsort(evals, kind="stable")
    start = 0
    for idx in range(1, len(order) + 1):
        if idx == len(order) or evals[order[idx]] - evals[order[idx - 1]] > energy_tol:
            grp = lweights[order[start:idx]]
            finite = np.isfinite(grp)
            if finite.all():
                if np.max(grp) - np.min(grp) > tol:
                    return False
            elif finite.any():
                return False  # some zero populations tied with non-zero ones
            start = idx
    return True


def is_passive_1(s: Spectrum, rho: DiagonalState, tol: float = 1e-12) -> PassivityVerdict:
    """Order-1 passivity: no population inversion across distinct energies."""
    _check_aligned(s, rho)
    eps = s.energies
    pops = rho.populations
    etol = default_energy_tol(s.eps_max, 1)
    for i in range(s.d):
        for j in range(s.d):
            if eps[i] > eps[j] + etol and pops[i] > pops[j] + tol:
                unit_i = tuple(1 if k == i else 0 for k in range(s.d))
                unit_j = tuple(1 if k == j else 0 for k in range(s.d))
                return PassivityVerdict(
                    False, (OccupationVector(unit_i), OccupationVector(unit_j))
                )
    return PassivityVerdict(True)


def is_n_passive(
    s: Spectrum,
    rho: DiagonalState,
    N: int,
    tol: float = DEFAULT_LOG_TOL,
    cap: int = DEFAULT_CAP,
) -> PassivityVerdict:
    """Order-N passivity of rho via exhaustive occupation-pair comparison."""
    _check_aligned(s, rho)
    if N < 1:
        raise ValueError("N must be >= 1")
    hit = _scan_passive(
        s.energies,
        rho.ln_populations,
        N,
        tol,
        default_energy_tol(s.eps_max, N),
        cap,
    )
    if hit is None:
        return PassivityVerdict(True)
    return PassivityVerdict(
        False, (OccupationVector(hit[0]), OccupationVector(hit[1]))
    )


def is_k_structurally_stable(
    s: Spectrum,
    rho: DiagonalState,
    k: int,
    tol: float = DEFAULT_STABILITY_TOL,
    cap: int = DEFAULT_CAP,
) -> bool:
    """Equal-energy occupation vectors of order k carry equal weights."""
    _check_aligned(s, rho)
    if k < 1:
        raise ValueError("k must be >= 1")
    return _scan_stable(
        s.energies,
        rho.ln_populations,
        k,
        tol,
        default_energy_tol(s.eps_max, k),
        cap,
    )


def passive_rearrangement(s: Spectrum, populations) -> DiagonalState:
    """Populations sorted non-increasing against energies sorted non-decreasing."""
    pops = sorted((float(p) for p in populations), reverse=True)
    if len(pops) != s.d:
        raise ValueError("population count must match spectrum dimension")
    return DiagonalState(tuple(pops))


def ergotropy_1(s: Spectrum, populations) -> float:
    """Maximal single-copy work: E(given alignment) - E(passive alignment)."""
    eps = s.energies
    pops = [float(p) for p in populations]
    if len(pops) != s.d:
        raise ValueError("population count must match spectrum dimension")
    e_actual = sum(p * e for p, e in zip(pops, eps))
    e_passive = sum(p * e for p, e in zip(sorted(pops, reverse=True), eps))
    return e_actual - e_passive


def ergotropy_general(populations, energies, overlap) -> float:
    """Work gain of a state with given eigenbasis overlap against H's basis.

    ``overlap[j][j']`` = |<j-th state eigenvector | j'-th energy eigenvector>|^2,
    a doubly stochastic matrix; identity recovers the diagonal case.
    """
    pops = np.asarray(populations, dtype=float)
    eps = np.asarray(energies, dtype=float)
    P = np.asarray(overlap, dtype=float)
    if P.shape != (len(pops), len(eps)):
        raise ValueError("overlap matrix shape must match populations x energies")
    if (
        np.max(np.abs(P.sum(axis=0) - 1)) > DOUBLY_STOCHASTIC_TOL
        or np.max(np.abs(P.sum(axis=1) - 1)) > DOUBLY_STOCHASTIC_TOL
        or np.min(P) < -DOUBLY_STOCHASTIC_TOL
    ):
        raise ValueError("overlap matrix is not doubly stochastic")
    e_actual = float(pops @ P @ eps)
    e_passive = float(np.dot(np.sort(pops)[::-1], np.sort(eps)))
    return e_actual - e_passive


def n_ergotropy(
    s: Spectrum, rho: DiagonalState, N: int, cap: int = DEFAULT_CAP
) -> float:
    """Work extractable from N copies under joint unitaries, per the whole batch.

    Works block-wise over occupation vectors with multinomial multiplicities,
    pairing weight blocks (descending) against energy blocks (ascending) by
    cumulative eigenvalue count, so the d^N tensor power is never expanded.
    """
    _check_aligned(s, rho)
    if N < 1:
        raise ValueError("N must be >= 1")
    if composition_count(s.d, N) > cap:
        from .spectra import EnumerationCapError

        raise EnumerationCapError("occupation enumeration exceeds cap")
    eps = s.energies
    pops = rho.populations
    blocks = []
    for vec in compositions(s.d, N):
        mult = math.factorial(N)
        for c in vec:
            mult //= math.factorial(c)
        w = 1.0
        for c, p in zip(vec, pops):
            if c:
                w *= p**c
        e = sum(c * x for c, x in zip(vec, eps))
        blocks.append((w, e, mult))

    by_weight = sorted(blocks, key=lambda t: -t[0])
    by_energy = sorted(blocks, key=lambda t: t[1])
    e_passive = 0.0
    j = 0
    remaining = by_energy[0][2]
    for w, _, mult in by_weight:
        need = mult
        while need:
            take = min(need, remaining)
            e_passive += take * w * by_energy[j][1]
            need -= take
            remaining -= take
            if remaining == 0 and j + 1 < len(by_energy):
                j += 1
                remaining = by_energy[j][2]
    e_actual = N * state_energy(s, rho)
    return e_actual - e_passive


def classify_complete_passivity(
    s: Spectrum, rho: DiagonalState, tol: float = 1e-8
) -> CPClass:
    """Decide whether rho is thermal, ground-supported, or neither.

    Fits -ln(lambda) = beta*eps + ln(Z) by least squares over the support and
    accepts the thermal tag only for full support, non-negative beta, and a
    max residual within tol.
    """
    _check_aligned(s, rho)
    pops = rho.populations
    eps = np.asarray(s.energies)
    support = [j for j, p in enumerate(pops) if p > 0]
    ground_cut = s.d0
    if all(j < ground_cut for j in support):
        return CPClass(tag="GroundState", beta=None, fit_residual=0.0)
    if len(support) < s.d:
        return CPClass(tag="NotCP", beta=None, fit_residual=math.inf)
    b = np.array([-math.log(p) for p in pops])
    if s.eps_max == 0:
        # single-level spectrum: every state is ground-supported
        return CPClass(tag="GroundState", beta=None, fit_residual=0.0)
    A = np.column_stack([eps, np.ones_like(eps)])
    (beta, logZ), *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ np.array([beta, logZ]) - b)))
    if residual <= tol and beta >= -1e-12:
        return CPClass(tag="Gibbs", beta=max(float(beta), 0.0), fit_residual=residual)
    return CPClass(tag="NotCP", beta=float(beta), fit_residual=residual)


def prep1_envelope(
    N: int,
    eps_a: float,
    eps_b: float,
    eps_c: float,
    lam_a: float,
    lam_c: float,
) -> tuple[float, float]:
    """Exact feasible interval for the middle population of an order-N
    passive triple.

    Given outer populations lam_a (low energy) and lam_c (high energy),
    every occupation-vector comparison among the three levels at order N
    yields a geometric inequality on the middle population; the returned
    interval is the intersection of all of them, so it matches brute-force
    order-N passivity checks exactly.
    """
    if not (eps_a < eps_b < eps_c):
        raise ValueError("need eps_a < eps_b < eps_c")
    if not (lam_a >= lam_c > 0):
        raise ValueError("need lam_a >= lam_c > 0")
    if N < 1:
        raise ValueError("N must be >= 1")
    etol = 1e-9 * max(1.0, (eps_c - eps_a) * N)
    la, lc = math.log(lam_a), math.log(lam_c)
    vecs = [
        (i, j, N - i - j) for i in range(N + 1) for j in range(N + 1 - i)
    ]
    lo, hi = -math.inf, math.inf
    # shifted energies keep the comparison translation invariant
    eb, ec = eps_b - eps_a, eps_c - eps_a
    for a1, b1, c1 in vecs:
        e1 = b1 * eb + c1 * ec
        for a2, b2, c2 in vecs:
            e2 = b2 * eb + c2 * ec
            if e1 <= e2 + etol:
                continue
            # weight(v1) <= weight(v2)
            coeff = b1 - b2
            rhs = (a2 - a1) * la + (c2 - c1) * lc
            if coeff > 0:
                hi = min(hi, rhs / coeff)
            elif coeff < 0:
                lo = max(lo, rhs / coeff)
    return math.exp(lo), math.exp(hi)
