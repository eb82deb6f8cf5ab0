"""Crown and disc volumes: integrands, Monte Carlo, quadrature, closed forms.

Notation: a crown with n cusps and perimeter P has volume

    V_{n,P} = 2^{1-n} * int_{sum delta = P} (e^P - 1) / prod (e^{delta_i + delta_{i+1}} - 1)

with cyclic indices, integrated over delta_1..delta_{n-1}.  The disc and
the small-P constants q_n use the open chain prod (a_i + a_{i+1})^{-1}
instead, so q_n coincides with the disc volume with n + 2 cusps.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError
from .geometry import DeltaGaps, log_expm1
from .quadrature import de_nodes, gauss_legendre_panels
from .specfun import li2_real

PROPOSALS = ("uniform", "dirichlet_half")
STREAM_SIZE = 1 << 16
THREADS_ENV = "MODULI_THREADS"


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    n_samples: int
    seed: int
    proposal: str = "dirichlet_half"


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_bound: float
    evaluations: int


# ---------------------------------------------------------------------------
# integrands


def crown_integrand(g):
    """(e^P - 1) / prod (e^{d_i + d_{i+1}} - 1); last axis holds the gaps."""
    d = g.delta if isinstance(g, DeltaGaps) else np.asarray(g, dtype=float)
    P = d.sum(axis=-1)
    pair = d + np.roll(d, -1, axis=-1)
    return np.exp(log_expm1(P) - np.sum(log_expm1(pair), axis=-1))


def chain_integrand(a):
    """prod_i (a_i + a_{i+1})^{-1} over consecutive pairs, no wrap-around."""
    a = np.asarray(a, dtype=float)
    return 1.0 / np.prod(a[..., 1:] + a[..., :-1], axis=-1)


# ---------------------------------------------------------------------------
# Monte Carlo


def worker_count(threads: int | None = None) -> int:
    """Explicit argument, else $MODULI_THREADS, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None or raw == "":
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise DomainError("thread count must be positive")
    return threads


def sample_simplex(m: int, P: float, size: int, rng: np.random.Generator,
                   proposal: str = "dirichlet_half"):
    """Draw ``size`` points of {delta > 0, sum = P} with importance weights.

    The weights make ``mean(weight * h(delta))`` an unbiased estimate of the
    integral of h over the simplex (w.r.t. d delta_1 ... d delta_{m-1}).
    """
    if m < 2:
        raise DomainError("simplex needs at least two gaps")
    if proposal == "uniform":
        e = rng.standard_exponential((size, m))
        a = e / e.sum(axis=1, keepdims=True)
        w = np.full(size, math.exp((m - 1) * math.log(P) - gammaln(m)))
    elif proposal == "dirichlet_half":
        z = rng.standard_normal((size, m))
        z2 = z * z
        tot = z2.sum(axis=1, keepdims=True)
        a = z2 / tot
        # P^{m-1} Gamma(1/2)^m / Gamma(m/2) * prod sqrt(a_i)
        logc = (m - 1) * math.log(P) + m * gammaln(0.5) - gammaln(0.5 * m)
        w = np.exp(logc + np.sum(np.log(np.abs(z)), axis=1) - 0.5 * m * np.log(tot[:, 0]))
    else:
        raise DomainError(f"unknown proposal {proposal!r}")
    return P * a, w


def simplex_sample(n: int, P: float, rng: np.random.Generator, proposal: str = "dirichlet_half"):
    """One weighted draw: (DeltaGaps, weight)."""
    d, w = sample_simplex(n, P, 1, rng, proposal)
    return DeltaGaps(d[0]), float(w[0])


def _stream_moments(integrand, m, P, count, seed, k, proposal):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
    d, w = sample_simplex(m, P, count, rng, proposal)
    vals = integrand(d) * w
    mean = float(vals.mean())
    return count, mean, float(np.sum((vals - mean) ** 2))


def mc_simplex_integral(integrand: Callable, m: int, P: float, N: int, seed: int,
                        proposal: str = "dirichlet_half", threads: int | None = None) -> MCEstimate:
    """Monte Carlo integral over the simplex with a fixed stream layout.

    Samples are cut into streams of STREAM_SIZE draws, stream k seeded by
    SeedSequence(seed, spawn_key=(k,)); stream moments are merged in index
    order, so the result does not depend on the number of worker threads.
    """
    if N < 2:
        raise DomainError("need at least two samples")
    counts = [STREAM_SIZE] * (N // STREAM_SIZE)
    if N % STREAM_SIZE:
        counts.append(N % STREAM_SIZE)
    jobs = [(integrand, m, P, c, seed, k, proposal) for k, c in enumerate(counts)]
    nw = min(worker_count(threads), len(jobs))
    if nw > 1:
        with ThreadPoolExecutor(nw) as ex:
            parts = list(ex.map(lambda a: _stream_moments(*a), jobs))
    else:
        parts = [_stream_moments(*a) for a in jobs]

    n_tot, mean, m2 = 0, 0.0, 0.0
    for c, mu, s2 in parts:  # Chan et al. pairwise update, fixed order
        delta = mu - mean
        tot = n_tot + c
        mean += delta * c / tot
        m2 += s2 + delta * delta * n_tot * c / tot
        n_tot = tot
    stderr = math.sqrt(m2 / (n_tot - 1) / n_tot)
    return MCEstimate(mean, stderr, n_tot, seed, proposal)


def _scaled(est: MCEstimate, factor: float) -> MCEstimate:
    return MCEstimate(est.estimate * factor, est.stderr * factor, est.n_samples, est.seed, est.proposal)


def crown_volume_mc(n: int, P: float, N: int = 10**6, seed: int = 0,
                    proposal: str = "dirichlet_half", threads: int | None = None) -> MCEstimate:
    if n < 3:
        raise DomainError("MC route is for n >= 3; use v1_closed / v2_closed")
    if not P > 0:
        raise DomainError("P must be positive")
    if N < 10**4:
        raise DomainError("need N >= 10^4 samples")
    est = mc_simplex_integral(crown_integrand, n, P, N, seed, proposal, threads)
    return _scaled(est, 2.0 ** (1 - n))


def q_n_mc(n: int, N: int = 10**6, seed: int = 0, proposal: str = "dirichlet_half",
           threads: int | None = None) -> MCEstimate:
    """q_n = int_{sum a = 1} prod_{i<n} (a_i + a_{i+1})^{-1}."""
    if n < 3:
        raise DomainError("q_n defined for n >= 3")
    return mc_simplex_integral(chain_integrand, n, 1.0, N, seed, proposal, threads)


def disc_volume_mc(n: int, N: int = 10**6, seed: int = 0, proposal: str = "dirichlet_half",
                   threads: int | None = None) -> MCEstimate:
    """Disc volume; the n-2 gaps delta_2..delta_{n-1} sum to 1."""
    if n < 4:
        raise DomainError("disc volume defined for n >= 4")
    return mc_simplex_integral(chain_integrand, n - 2, 1.0, N, seed, proposal, threads)


# ---------------------------------------------------------------------------
# nested tanh-sinh quadrature over a small simplex


def _simplex_de_level(integrand, m: int, P: float, level: int):
    """One tanh-sinh evaluation of int over {g > 0, sum g = P}, m <= 4.

    Coordinates: Delta_2 = P a outermost, Delta_1 = Delta_2 b and
    Delta_3 = Delta_2 + (P - Delta_2) c, so every gap is a product of
    node values and complements and stays exact near the faces.
    """
    u, v, w = de_nodes(level)
    if m == 1:
        return float(integrand(np.array([[P]]))[0]), 1
    if m == 2:
        g = np.stack([P * u, P * v], axis=-1)
        return float(P * np.dot(w, integrand(g))), u.size
    total, evals = 0.0, 0
    for ai, bi, wi in zip(u, v, w):
        if m == 3:
            g = np.stack([P * ai * u, P * ai * v, np.full_like(u, P * bi)], axis=-1)
            val = np.dot(w, integrand(g)) * P * P * ai
        elif m == 4:
            g = np.empty((u.size, u.size, 4))
            g[..., 0] = (P * ai * u)[:, None]
            g[..., 1] = (P * ai * v)[:, None]
            g[..., 2] = (P * bi * u)[None, :]
            g[..., 3] = (P * bi * v)[None, :]
            val = w @ integrand(g) @ w * P**3 * ai * bi
        else:
            raise DomainError("nested quadrature implemented for at most 4 gaps")
        total += wi * val
        evals += u.size ** (m - 2)
    return float(total), evals


def simplex_quadrature(integrand, m: int, P: float, tol: float = 1e-9,
                       min_level: int = 1, max_level: int | None = None) -> QuadratureResult:
    """Refine the tanh-sinh step until two successive levels agree to ``tol``.

    The double-exponential error roughly squares with each halving of the
    step, so the last change is a (generous) bound on the error of the
    finer estimate and is reported as such.
    """
    if max_level is None:
        max_level = {1: 3, 2: 9, 3: 7, 4: 6}.get(m, 6)
    prev, evals, err = None, 0, math.inf
    for level in range(min_level, max_level + 1):
        val, ne = _simplex_de_level(integrand, m, P, level)
        evals += ne
        if m == 1:
            return QuadratureResult(val, 0.0, evals)
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                return QuadratureResult(val, err, evals)
        prev = val
    raise ConvergenceError(f"tanh-sinh did not reach {tol:g} (last change {err:.3g})")


def crown_volume_quadrature(n: int, P: float, tol: float = 1e-9) -> QuadratureResult:
    """Nested quadrature of the volume integral for n in {3, 4}."""
    if n not in (3, 4):
        raise DomainError("quadrature route available for n = 3, 4")
    if not P > 0:
        raise DomainError("P must be positive")
    r = simplex_quadrature(crown_integrand, n, P, tol)
    s = 2.0 ** (1 - n)
    return QuadratureResult(r.value * s, r.abs_error_bound * s, r.evaluations)


def disc_volume_quadrature(n: int, tol: float = 1e-9) -> QuadratureResult:
    if n not in (4, 5, 6):
        raise DomainError("disc quadrature available for n = 4, 5, 6")
    if n == 4:
        return QuadratureResult(1.0, 0.0, 1)
    return simplex_quadrature(chain_integrand, n - 2, 1.0, tol)


def q_n_quadrature(n: int, tol: float = 1e-9) -> QuadratureResult:
    if n not in (3, 4):
        raise DomainError("q_n quadrature available for n = 3, 4")
    return simplex_quadrature(chain_integrand, n, 1.0, tol)


# ---------------------------------------------------------------------------
# closed forms and asymptotics


def v1_closed(P: float | None = None) -> float:
    return 1.0


def v2_closed(P):
    return P / (2.0 * np.expm1(P))


def v3_closed(P):
    return (P * P + math.pi**2) / (8.0 * (np.exp(P) + 1.0))


def q3_closed() -> float:
    return math.pi**2 / 6.0


def q4_closed() -> float:
    """pi^2/3: the four-gap chain integral equals the six-cusp disc volume."""
    return math.pi**2 / 3.0


def crown_small_P_limit(n: int, q: float) -> float:
    return n * q / 2.0**n


def crown_asymptote_large_P(n: int, P):
    return P ** (n - 1) * np.exp(-P) / (2.0 ** (n - 1) * math.factorial(n - 1))


def _v4_bracket(D, P):
    return (-li2_real(np.exp(D - P)) + li2_real(np.exp(-P)) - li2_real(np.exp(-D))
            - li2_real(np.exp(P)) + li2_real(np.exp(P - D)) + li2_real(np.exp(D)))


def v4_reduced_quadrature(P: float, cutoff: float = 40.0, tol: float = 1e-12) -> QuadratureResult:
    """V_{4,P} from the one-dimensional dilogarithm reduction.

    Split at Delta = P/2.  On the left u = log(e^Delta - 1), on the right the
    mirror image t = log(e^{P - Delta} - 1); both map the logarithmic endpoint
    behaviour to exponentially decaying tails, truncated at -cutoff - P.
    """
    if not P > 0:
        raise DomainError("P must be positive")
    eP = math.exp(P)

    def left(u):
        D = np.logaddexp(0.0, u)
        return _v4_bracket(D, P) / (eP - np.exp(D))

    def right(t):
        E = np.logaddexp(0.0, t)  # P - Delta
        return _v4_bracket(P - E, P) / (eP - np.exp(E))

    lo = -cutoff - P
    mid = math.log(math.expm1(P / 2.0))

    def rule(panels):
        t, w = gauss_legendre_panels(lo, mid, panels, 10)
        return (np.dot(w, left(t)) + np.dot(w, right(t))) / 8.0

    # both integrands are smooth after the change of variables; double the
    # panel count until two composite Gauss-Legendre sums agree
    prev, evals, panels = rule(16), 320, 16
    for _ in range(6):
        panels *= 2
        val = rule(panels)
        evals += 20 * panels
        err = abs(val - prev)
        if err <= tol * abs(val):
            return QuadratureResult(float(val), float(err), evals)
        prev = val
    raise ConvergenceError(f"dilogarithm reduction did not converge (last change {err:.3g})")


def crown_volume(n: int, P: float) -> float:
    """Deterministic volume for n <= 4."""
    if n == 1:
        return v1_closed(P)
    if n == 2:
        return float(v2_closed(P))
    if n == 3:
        return float(v3_closed(P))
    if n == 4:
        return v4_reduced_quadrature(P).value
    raise DomainError("deterministic route available for n <= 4")


def mirzakhani_factorized(V_mir: float, holes: Sequence[tuple[float, int]],
                          N: int = 10**6, seed: int = 0) -> float:
    """V_mir * prod f_{n_i}(P_i) with f_0 = 1 and f_n(P) = P V_{n,P}."""
    if V_mir < 0:
        raise DomainError("V_mir must be non-negative")
    out = float(V_mir)
    for P, n in holes:
        if n < 0 or P < 0:
            raise DomainError("negative hole data")
        if n == 0:
            continue
        V = crown_volume(n, P) if n <= 4 else crown_volume_mc(n, P, N, seed).estimate
        out *= P * V
    return out
