"""Sampling the order-N passive set, energy-ratio maximization, and the
three-level saturation construction.

States here may live on spectra with astronomically degenerate levels, so a
level-resolved representation (one log-population per distinct level) is used
throughout; dense population vectors are materialized only when small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gibbs import gibbs_point, solve_beta_for_entropy
from .passivity import _scan_passive, default_energy_tol
from .spectra import (
    DiagonalState,
    EnumerationCapError,
    Spectrum,
    composition_count,
    compositions,
)

DEFAULT_CAP = 200_000
DEFAULT_B_MAX = 30.0


@dataclass(frozen=True)
class LevelState:
    """Per-slot log-populations, one entry per distinct level of a spectrum.

    Every basis state inside level ``ell`` carries population
    ``exp(log_populations[ell])``; the level as a whole carries
    multiplicity-times that.
    """

    log_populations: tuple[float, ...]

    def to_dense(self, s: Spectrum) -> DiagonalState:
        pops = []
        for lnp, (_, g) in zip(self.log_populations, s.distinct_levels):
            pops.extend([math.exp(lnp)] * g)
        total = sum(pops)
        return DiagonalState(tuple(p / total for p in pops))


@dataclass(frozen=True)
class AlphaScanRow:
    beta_rho: float
    alpha: float
    state: LevelState


@dataclass(frozen=True)
class SaturationParams:
    N: int
    m: int
    r: float
    beta_eps1: float
    g1: int
    g2: int
    xi: float
    eta: float
    k0: float


@dataclass(frozen=True)
class SaturationResult:
    params: SaturationParams
    state: LevelState
    spectrum: Spectrum
    alpha_pred: float
    alpha_measured: float
    alpha_max: float
    beta_rho: float


class InfeasibleSaturationError(RuntimeError):
    """The requested saturation fraction is outside the parameter window."""


def level_energy(s: Spectrum, ls: LevelState) -> float:
    lnp = np.asarray(ls.log_populations)
    return float(np.sum(np.exp(s.log_multiplicities + lnp) * s.level_energies))


def level_entropy(s: Spectrum, ls: LevelState) -> float:
    lnp = np.asarray(ls.log_populations)
    return float(-np.sum(np.exp(s.log_multiplicities + lnp) * lnp))


def level_state_from_b(s: Spectrum, b) -> LevelState:
    """Normalize per-level 'log-weights' b (population ~ exp(-b)) into a state."""
    b = np.asarray(b, dtype=float)
    terms = s.log_multiplicities - b
    m = np.max(terms)
    log_norm = m + math.log(np.sum(np.exp(terms - m)))
    return LevelState(tuple(-b - log_norm))


def verify_level_passive(s: Spectrum, ls: LevelState, N: int, tol: float | None = None,
                         cap: int = DEFAULT_CAP) -> bool:
    """Order-N passivity of a level-resolved (hence order-1 stable) state.

    Occupation vectors over individual slots of a level-uniform state fold to
    occupation vectors over levels, so scanning level space is exhaustive.
    """
    if tol is None:
        scale = max(1.0, max(abs(x) for x in ls.log_populations if math.isfinite(x)))
        tol = 1e-8 * N * scale
    hit = _scan_passive(
        tuple(s.level_energies),
        ls.log_populations,
        N,
        tol,
        default_energy_tol(s.eps_max, N),
        cap,
    )
    return hit is None


def _difference_vectors(energies, N, cap):
    """Deduplicated occupation differences I-J with strictly larger energy on I."""
    d = len(energies)
    if composition_count(d, N) > cap:
        raise EnumerationCapError("occupation enumeration exceeds cap")
    vectors = list(compositions(d, N))
    evals = [sum(c * e for c, e in zip(v, energies)) for v in vectors]
    etol = default_energy_tol(max(energies), N)
    seen = set()
    rows = []
    for i, vi in enumerate(vectors):
        for j, vj in enumerate(vectors):
            if evals[i] > evals[j] + etol:
                diff = tuple(a - b for a, b in zip(vi, vj))
                if diff not in seen:
                    seen.add(diff)
                    rows.append(diff)
    return np.array(rows, dtype=float)


def sample_n_passive(
    s: Spectrum,
    N: int,
    count: int,
    seed: int,
    stable: bool = False,
    b_max: float = DEFAULT_B_MAX,
    burn_in: int = 200,
    thin: int = 10,
    cap: int = DEFAULT_CAP,
) -> list[DiagonalState]:
    """Hit-and-run sampler over log-populations inside the order-N passive cone.

    Coordinates are b_j = -ln(population) up to a common shift; slot 0 is
    gauge-fixed to b=0.  With ``stable`` the walk runs over one coordinate per
    distinct level, so every sample is order-1 structurally stable.
    """
    if s.num_levels < 2:
        raise ValueError("single-level spectra have no passivity structure to sample")
    if count < 1:
        raise ValueError("count must be >= 1")
    if stable:
        energies = tuple(s.level_energies)
    else:
        energies = s.energies
    V = _difference_vectors(energies, N, cap)
    A = V[:, 1:]
    eps_free = np.array(energies[1:])
    n_free = len(eps_free)
    # lower box bound: ground-level slots may out-populate slot 0, others not
    lower = np.where(eps_free > 0, 0.0, -b_max)
    upper = np.full(n_free, b_max)

    rng = np.random.default_rng(seed)
    beta0 = b_max / (2.0 * s.eps_max)
    x = beta0 * eps_free  # thermal point: strictly inside the cone
    samples: list[DiagonalState] = []
    steps = burn_in + count * thin
    done = 0
    for step in range(steps):
        u = rng.standard_normal(n_free)
        u /= np.linalg.norm(u)
        t_lo, t_hi = -math.inf, math.inf
        au = A @ u
        ax = A @ x
        pos = au > 1e-14
        neg = au < -1e-14
        if pos.any():
            t_lo = max(t_lo, np.max(-ax[pos] / au[pos]))
        if neg.any():
            t_hi = min(t_hi, np.min(-ax[neg] / au[neg]))
        for k in range(n_free):
            if u[k] > 1e-14:
                t_lo = max(t_lo, (lower[k] - x[k]) / u[k])
                t_hi = min(t_hi, (upper[k] - x[k]) / u[k])
            elif u[k] < -1e-14:
                t_lo = max(t_lo, (upper[k] - x[k]) / u[k])
                t_hi = min(t_hi, (lower[k] - x[k]) / u[k])
        if t_hi > t_lo:
            x = x + rng.uniform(t_lo, t_hi) * u
            np.clip(x, lower, upper, out=x)
        if step >= burn_in and (step - burn_in) % thin == thin - 1:
            b = np.concatenate([[0.0], x])
            if stable:
                ls = level_state_from_b(s, b)
                samples.append(ls.to_dense(s))
            else:
                w = np.exp(-b)
                samples.append(DiagonalState(tuple(w / np.sum(w))))
            done += 1
            if done == count:
                break
    return samples


def _entropy_on_chord(s: Spectrum, b1: float, b2: float):
    ls = level_state_from_b(s, np.array([0.0, b1, b2]))
    return level_entropy(s, ls), ls


def max_alpha_scan(
    s: Spectrum,
    N: int,
    beta_grid,
    resolution: int = 200,
    cap: int = DEFAULT_CAP,
) -> list[AlphaScanRow]:
    """Maximize E over order-1 stable, order-N passive states at fixed entropy.

    Grid method for spectra with at most three distinct levels: sweep the
    first excited log-population, solve the entropy equality for the second
    by bisection along the feasible chord, keep the best energy.
    """
    if s.num_levels > 3:
        raise NotImplementedError("grid scan supports at most three distinct levels")
    rows: list[AlphaScanRow] = []
    eps = s.level_energies
    for beta in beta_grid:
        gp = gibbs_point(s, beta)
        if gp.energy <= 0:
            raise ValueError("scan needs beta with positive thermal energy")
        gibbs_ls = level_state_from_b(s, beta * eps)
        best_E = level_energy(s, gibbs_ls)
        best_ls = gibbs_ls
        if s.num_levels == 3:
            V = _difference_vectors(tuple(eps), N, cap)
            b1_hi = 1.2 * beta * eps[1] + 2.0
            for b1 in np.linspace(0.0, b1_hi, resolution):
                lo, hi = 0.0, 2000.0
                feasible = True
                for v0, v1, v2 in V:
                    if v2 > 0:
                        lo = max(lo, -v1 * b1 / v2)
                    elif v2 < 0:
                        hi = min(hi, -v1 * b1 / v2)
                    elif v1 * b1 < 0:
                        feasible = False
                        break
                if not feasible or hi <= lo:
                    continue
                ts = np.linspace(lo, hi, max(resolution, 64))
                vals = np.array(
                    [_entropy_on_chord(s, b1, t)[0] for t in ts]
                ) - gp.entropy
                for k in range(len(ts) - 1):
                    if vals[k] == 0.0 or vals[k] * vals[k + 1] < 0:
                        a, b = ts[k], ts[k + 1]
                        fa = vals[k]
                        for _ in range(100):
                            mid = 0.5 * (a + b)
                            fm = _entropy_on_chord(s, b1, mid)[0] - gp.entropy
                            if abs(fm) <= 1e-13:
                                a = b = mid
                                break
                            if (fm > 0) == (fa > 0):
                                a, fa = mid, fm
                            else:
                                b = mid
                        root = 0.5 * (a + b)
                        _, ls = _entropy_on_chord(s, b1, root)
                        E = level_energy(s, ls)
                        if E > best_E and verify_level_passive(s, ls, N, cap=cap):
                            best_E = E
                            best_ls = ls
        rows.append(AlphaScanRow(beta_rho=float(beta), alpha=best_E / gp.energy,
                                 state=best_ls))
    return rows


def _alpha_fixed_point(r: float, lng_ratio: float, beta_eps1: float,
                       alpha0: float) -> float:
    """Self-consistent energy ratio: 1/alpha = r - [ln(g2/g1) + ln(r*alpha)]/(B)."""
    alpha = alpha0
    for _ in range(500):
        denom = r - (lng_ratio + math.log(r * alpha)) / beta_eps1
        if denom <= 0:
            return math.inf
        new = 1.0 / denom
        if abs(new - alpha) <= 1e-13 * alpha:
            return new
        alpha = 0.5 * (alpha + new)
    return alpha


def saturation_construct(
    N: int,
    m: int,
    alpha_target_frac: float,
    eta: float = 1.0,
    k0: float = 10.0,
    delta_r: float = 1e-3,
    max_attempts: int = 14,
) -> SaturationResult:
    """Build a three-level order-N passive, order-1 stable state whose energy
    ratio approaches the theoretical maximum N/(N-R).

    Spectrum: levels (0, 1, r) with degeneracies (1, g1, g2) and r chosen so
    the inverse gap ratio 1/r falls in (m/N, (m+1)/N].  The top level's
    degeneracy grows with the inverse temperature so that a cold state can
    park weight there while keeping the first excited population large; the
    measured ratio converges to the target as the temperature scale grows.
    """
    if not (1 <= m < N):
        raise ValueError("need 1 <= m < N")
    if not (0 <= alpha_target_frac <= 1):
        raise ValueError("alpha_target_frac must lie in [0, 1]")
    r = (N / (m + 1)) * (1.0 + delta_r)
    if not (m / N < 1.0 / r <= (m + 1) / N):
        raise InfeasibleSaturationError("gap ratio 1/r escaped (m/N, (m+1)/N]")
    a_max = N / (N - r)
    a_sup = N / (m * r)  # above this the degeneracy window closes
    if alpha_target_frac * a_max >= 0.995 * a_sup:
        raise InfeasibleSaturationError(
            f"target {alpha_target_frac}*alpha_max = {alpha_target_frac * a_max:.6g} "
            f"exceeds the reachable ratio {0.995 * a_sup:.6g} "
            "(degeneracy window ln(g2/g1) < (q-1)|ln xi| is empty)"
        )
    alpha_t = min(0.98 * a_sup, 0.5 * (alpha_target_frac * a_max + a_sup))
    alpha_t = max(alpha_t, 1.02)

    B = 30.0 * max(1.0, (N / r) * math.log(r * a_max))
    last = None
    for _ in range(max_attempts):
        lng_ratio = B * (r - 1.0 / alpha_t) - math.log(r * alpha_t)
        if lng_ratio < math.log(2.0):
            B *= 1.5
            continue
        g1 = 1
        g2 = max(2, round(math.exp(min(lng_ratio, 700.0))))
        lng2 = math.log(g2)
        ln_xi = -B / alpha_t
        # top population saturates (with a hair of slack) the geometric
        # envelope lambda_1 <= lambda_2^(m/N) * lambda_0^((N-m)/N)
        ln_l0 = 0.0
        for _ in range(4):
            ln_l2 = (N / m) * (ln_xi - ((N - m) / N) * ln_l0) + 1e-6
            mass = math.exp(ln_xi) + math.exp(lng2 + ln_l2)
            if mass >= 1.0:
                break
            ln_l0 = math.log1p(-mass)
        if mass >= 1.0:
            B *= 1.5
            continue
        spectrum = Spectrum(((0.0, 1), (1.0, g1), (r, g2)))
        ls = LevelState((ln_l0, ln_xi, ln_l2))
        if not verify_level_passive(spectrum, ls, N):
            raise InfeasibleSaturationError(
                "constructed state failed the order-N passivity scan"
            )
        S = level_entropy(spectrum, ls)
        E = level_energy(spectrum, ls)
        beta = solve_beta_for_entropy(spectrum, S)
        E_beta = gibbs_point(spectrum, beta).energy
        alpha_meas = E / E_beta
        params = SaturationParams(
            N=N, m=m, r=r, beta_eps1=beta, g1=g1, g2=g2,
            xi=math.exp(ln_xi), eta=eta, k0=k0,
        )
        alpha_pred = _alpha_fixed_point(r, lng_ratio, beta, alpha_t)
        last = SaturationResult(
            params=params, state=ls, spectrum=spectrum,
            alpha_pred=alpha_pred, alpha_measured=alpha_meas,
            alpha_max=a_max, beta_rho=beta,
        )
        if alpha_meas >= alpha_target_frac * a_max:
            return last
        B *= 1.5
    raise InfeasibleSaturationError(
        f"did not reach {alpha_target_frac}*alpha_max after {max_attempts} "
        f"temperature doublings; best measured ratio "
        f"{last.alpha_measured if last else float('nan'):.6g}"
    )
