"""Coordinates and actions on the fool's crown and on the cusped disc.

A crown of perimeter ``P`` with ``n`` bordered cusps is described by the
projections ``0 = Delta_0 < Delta_1 < ... < Delta_{n-1} < Delta_n = P`` of the
cusps onto the hole, or equivalently by the gaps ``delta_i``.  In the upper
half-plane the cusp ``i`` sits at ``e^{Delta_i}`` and the hole is the
geodesic from 0 to infinity; this picture is used for the kissing-horocycle
construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

_SHEAR_TOL = 1e-9


def log_expm1(a):
    """Stable log(e^a - 1) for a > 0 (scalar or array)."""
    a = np.asarray(a, dtype=float)
    small = a <= 1.0
    safe_small = np.where(small, a, 1.0)
    safe_big = np.where(small, 1.0, a)
    out = np.where(small, np.log(np.expm1(safe_small)), safe_big + np.log1p(-np.exp(-safe_big)))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, eq=False)
class CrownConfig:
    """Cusp projections Delta_1 < ... < Delta_{n-1} on a hole of perimeter P."""

    n: int
    P: float
    Delta: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        D = np.asarray(self.Delta, dtype=float).reshape(-1)
        object.__setattr__(self, "Delta", D)
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if not self.P > 0:
            raise DomainError("perimeter must be positive")
        if D.size != self.n - 1:
            raise DomainError(f"expected {self.n - 1} positions, got {D.size}")
        full = self.full
        if np.any(np.diff(full) <= 0):
            raise DomainError("positions must satisfy 0 < Delta_1 < ... < P")

    @property
    def full(self) -> np.ndarray:
        """Delta_0..Delta_n including the fixed endpoints 0 and P."""
        return np.concatenate(([0.0], self.Delta, [self.P]))


@dataclass(frozen=True, eq=False)
class DeltaGaps:
    """Cyclic gaps delta_1..delta_n, all positive."""

    delta: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=float).reshape(-1)
        object.__setattr__(self, "delta", d)
        if d.size < 1 or np.any(~(d > 0)):
            raise DomainError("gaps must be positive")

    @property
    def n(self) -> int:
        return self.delta.size

    @property
    def P(self) -> float:
        return float(self.delta.sum())

    def rotate(self, k: int) -> "DeltaGaps":
        return DeltaGaps(np.roll(self.delta, k))


@dataclass(frozen=True, eq=False)
class XCoords:
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        object.__setattr__(self, "x", x)
        if np.any(~(x > 0)) or np.any(np.diff(x) <= 0):
            raise DomainError("x-coordinates must be positive and strictly increasing")


@dataclass(frozen=True, eq=False)
class XiCoords:
    xi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float).reshape(-1)
        object.__setattr__(self, "xi", xi)
        if np.any(~(xi > 0)):
            raise DomainError("xi-coordinates must be positive")


@dataclass(frozen=True, eq=False)
class ShearCoords:
    """Shears y_i of the crown fat graph plus the decoration data alpha_i."""

    y: np.ndarray
    alpha: np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        object.__setattr__(self, "y", y)
        a = np.zeros_like(y) if self.alpha is None else np.asarray(self.alpha, dtype=float).reshape(-1)
        if a.shape != y.shape:
            raise DomainError("alpha and y must have equal length")
        object.__setattr__(self, "alpha", a)

    @property
    def n(self) -> int:
        return self.y.size


@dataclass(frozen=True, eq=False)
class HoroRadii:
    """Euclidean radii r_0..r_{n-1}; extended by r_{i+n} = r_i e^P."""

    r: np.ndarray
    P: float

    def at(self, k):
        n = self.r.size
        q, i = np.divmod(np.asarray(k), n)
        return self.r[i] * np.exp(q * self.P)


@dataclass(frozen=True, eq=False)
class DiscConfig:
    """Interior cusps 0 < z_2 < ... < z_{n-2} < 1 of an n-cusped disc."""

    n: int
    z: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float).reshape(-1)
        object.__setattr__(self, "z", z)
        if self.n < 3:
            raise DomainError("disc needs at least three cusps")
        if z.size != max(self.n - 3, 0):
            raise DomainError(f"expected {self.n - 3} interior positions")
        if np.any(np.diff(self.full) <= 0):
            raise DomainError("need 0 < z_2 < ... < z_{n-2} < 1")

    @property
    def full(self) -> np.ndarray:
        """z_1..z_{n-1} with z_1 = 0 and z_{n-1} = 1."""
        return np.concatenate(([0.0], self.z, [1.0]))

    @property
    def gaps(self) -> np.ndarray:
        """delta_i = z_i - z_{i-1}, i = 2..n-1."""
        return np.diff(self.full)


# ---------------------------------------------------------------------------
# Delta <-> gaps


def gaps_from_config(c: CrownConfig) -> DeltaGaps:
    return DeltaGaps(np.diff(c.full))


def config_from_gaps(g: DeltaGaps) -> CrownConfig:
    d = g.delta
    return CrownConfig(d.size, float(d.sum()), np.cumsum(d)[:-1])


def _gap_array(g) -> np.ndarray:
    return g.delta if isinstance(g, DeltaGaps) else np.asarray(g, dtype=float)


def crown_action(g, kappa: float = 1.0):
    """kappa * [sum log(e^{d_i + d_{i+1}} - 1) - sum log(e^{d_i} - 1)].

    ``g`` may be a DeltaGaps or an array whose last axis holds the gaps.
    """
    d = _gap_array(g)
    pair = d + np.roll(d, -1, axis=-1)
    return kappa * (np.sum(log_expm1(pair), axis=-1) - np.sum(log_expm1(d), axis=-1))


# ---------------------------------------------------------------------------
# kissing horocycles (odd n)


def kissing_radii(c: CrownConfig) -> HoroRadii:
    """Radii of mutually tangent horocycles at the cusps e^{Delta_i}.

    Two horocycles of radii r, r' at a < b are tangent iff
    2 sqrt(r r') = b - a.  With rho = log r the cyclic system
    rho_{i-1} + rho_i = b_i closes through rho_n = rho_0 + P and is solved
    by alternating sums; a solution exists only for odd n.
    """
    n = c.n
    if n % 2 == 0:
        raise DomainError("kissing configuration requires odd n")
    e = np.exp(c.full)
    b = 2.0 * np.log(np.diff(e) / 2.0)  # b_1..b_n
    signs = (-1.0) ** np.arange(n)  # +, -, +, ...
    rho = np.empty(n)
    rho[0] = 0.5 * (np.dot(signs, b) - c.P)
    for i in range(1, n):
        rho[i] = b[i - 1] - rho[i - 1]
    return HoroRadii(np.exp(rho), c.P)


def kissing_residual(c: CrownConfig, r: HoroRadii) -> float:
    """max relative violation of 2 sqrt(r_{i-1} r_i) = e^{Delta_i} - e^{Delta_{i-1}}."""
    e = np.exp(c.full)
    k = np.arange(1, c.n + 1)
    lhs = 2.0 * np.sqrt(r.at(k - 1) * r.at(k))
    rhs = np.diff(e)
    return float(np.max(np.abs(lhs - rhs) / rhs))


def _cusp_positions(c: CrownConfig, k):
    """e^{Delta_k} for any integer k, using Delta_{k+n} = Delta_k + P."""
    q, i = np.divmod(np.asarray(k), c.n)
    return np.exp(c.full[i] + q * c.P)


def s_lengths(c: CrownConfig, r: HoroRadii) -> np.ndarray:
    """Horocyclic lengths s_1..s_n cut out by the neighbouring arcs."""
    k = np.arange(1, c.n + 1)
    num = _cusp_positions(c, k + 1) - _cusp_positions(c, k - 1)
    return num / (2.0 * np.sqrt(r.at(k - 1) * r.at(k + 1)))


def s_lengths_tangent(r: HoroRadii) -> np.ndarray:
    """Same lengths via tan of half-angles: sqrt(r_i/r_{i-1}) + sqrt(r_i/r_{i+1})."""
    n = r.r.size
    k = np.arange(1, n + 1)
    ri = r.at(k)
    return np.sqrt(ri / r.at(k - 1)) + np.sqrt(ri / r.at(k + 1))


def action_from_geometry(c: CrownConfig, kappa: float = 1.0) -> float:
    """kappa * sum log s_i in the kissing gauge (odd n only).

    This differs from :func:`crown_action` by the constant kappa*P/2:
    prod s_i = e^{-P/2} prod (e^{d_i+d_{i+1}} - 1)/(e^{d_i} - 1).
    """
    r = kissing_radii(c)
    return float(kappa * np.sum(np.log(s_lengths(c, r))))


# ---------------------------------------------------------------------------
# x and xi coordinates


def x_from_Delta(c: CrownConfig) -> XCoords:
    D = c.Delta
    return XCoords(np.sinh(D / 2.0) / np.sinh((c.P - D) / 2.0))


def x_from_kissing(c: CrownConfig, r0: float = 1.0) -> np.ndarray:
    """x_i from horocycle radii, independent of the sinh formula.

    Fix a horocycle of radius r0 at the cusp 1 (and hence r0 e^P at e^P).
    The radius tangent to it at e^{Delta} is (e^Delta - 1)^2/(4 r0), the one
    tangent to the horocycle at e^P is (e^P - e^Delta)^2/(4 r0 e^P); x is
    the square root of their ratio (near over far).
    """
    e = np.exp(c.Delta)
    r_near = (e - 1.0) ** 2 / (4.0 * r0)
    r_far = (np.exp(c.P) - e) ** 2 / (4.0 * r0 * np.exp(c.P))
    return np.sqrt(r_near / r_far)


def Delta_from_x(x, P: float) -> CrownConfig:
    xv = x.x if isinstance(x, XCoords) else np.asarray(x, dtype=float)
    h = np.exp(P / 2.0)
    # e^D = (x e^P + e^{P/2}) / (x + e^{P/2}), written to keep precision for small x
    D = np.log1p(xv * (np.exp(P) - 1.0) / (xv + h)) if xv.size else xv
    return CrownConfig(xv.size + 1, P, D)


def xi_from_x(x: XCoords) -> XiCoords:
    return XiCoords(np.diff(x.x, prepend=0.0))


def x_from_xi(xi: XiCoords) -> XCoords:
    return XCoords(np.cumsum(xi.xi))


# ---------------------------------------------------------------------------
# shear coordinates


def _check_shear(s: ShearCoords, P: float):
    if abs(s.y.sum() - P) > _SHEAR_TOL * max(1.0, abs(P)):
        raise DomainError(f"shears must sum to P={P}, got {s.y.sum()}")


def shear_action(s: ShearCoords, P: float, kappa: float = 1.0) -> float:
    """kappa * sum log(2 cosh(y_i/2)); alpha does not enter."""
    _check_shear(s, P)
    y = np.abs(s.y)
    return float(kappa * np.sum(0.5 * y + np.log1p(np.exp(-y))))


def shear_action_from_lambdas(s: ShearCoords, P: float, kappa: float = 1.0) -> float:
    """kappa * sum log(lambda_{i,i+1} s_i) evaluated with the alpha's kept.

    lambda_{i,i+1} = exp((alpha_i + alpha_{i+1} + y_i)/2) and
    s_i = e^{-alpha_i}(1 + e^{-y_i}); the alpha's telescope cyclically.
    """
    _check_shear(s, P)
    a, y = s.alpha, s.y
    log_lam = 0.5 * (a + np.roll(a, -1) + y)
    log_s = -a + np.log1p(np.exp(-y))
    return float(kappa * np.sum(log_lam + log_s))


def mu_coefficients(y) -> np.ndarray:
    """mu_1..mu_n with mu_i = e^{-(y_{i+1}+...+y_n)/2} (1 + e^{y_{i+1}} + ... + e^{y_{i+1}+...+y_n}).

    mu_n is the empty sum, fixed to 1.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    mu = np.ones(n)
    for i in range(1, n):
        tail = y[i:]
        cs = np.concatenate(([0.0], np.cumsum(tail)))
        mu[i - 1] = np.exp(-0.5 * tail.sum()) * np.sum(np.exp(cs))
    return mu


def xi_from_shear(s: ShearCoords, P: float) -> XiCoords:
    """xi_i = e^{P/2 - (y_2+...+y_n)/2} mu_1 / (mu_i mu_{i+1} e^{y_{i+1}/2}), i = 1..n-1."""
    _check_shear(s, P)
    y = s.y
    n = y.size
    mu = mu_coefficients(y)
    pre = np.exp(0.5 * P - 0.5 * y[1:].sum()) * mu[0]
    i = np.arange(n - 1)
    return XiCoords(pre / (mu[i] * mu[i + 1] * np.exp(0.5 * y[i + 1])))


def gaps_from_shear(s: ShearCoords, P: float) -> DeltaGaps:
    """Shears -> xi -> x -> Delta -> gaps."""
    return gaps_from_config(Delta_from_x(x_from_xi(xi_from_shear(s, P)), P))


# ---------------------------------------------------------------------------
# disc


def disc_action(d: DiscConfig) -> float:
    """log prod_{i=2}^{n-2} (z_{i+1} - z_{i-1}) - log prod_{i=2}^{n-1} (z_i - z_{i-1})."""
    z = d.full
    num = np.sum(np.log(z[2:] - z[:-2]))
    return float(num - np.sum(np.log(d.gaps)))


def disc_measure_density(d: DiscConfig) -> float:
    return float(1.0 / np.prod(d.gaps))
