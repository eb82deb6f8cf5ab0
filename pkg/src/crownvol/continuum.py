"""Continuum limits: Schwarzian, discrete crown action, symplectic form.

Test functions carry exact derivatives up to third order.  Integrals over a
period use the fixed composite Gauss-Legendre rule from :mod:`.quadrature`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError
from .geometry import DeltaGaps, crown_action, log_expm1
from .poisson import symplectic_eval, x_jacobian_diag
from .quadrature import integrate_unit

TAU = 2.0 * math.pi
Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SmoothTestFn:
    """f and its first three derivatives; f(t+1) = f(t) + P when periodic."""

    f: Fn
    d1: Fn
    d2: Fn
    d3: Fn
    P: float = 1.0
    name: str = "f"

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))

    def compose(self, inner: "SmoothTestFn", name: str | None = None) -> "SmoothTestFn":
        """self o inner, derivatives by Faa di Bruno."""
        g, f = self, inner

        def d1(t):
            return g.d1(f.f(t)) * f.d1(t)

        def d2(t):
            F = f.f(t)
            return g.d2(F) * f.d1(t) ** 2 + g.d1(F) * f.d2(t)

        def d3(t):
            F = f.f(t)
            a1, a2, a3 = f.d1(t), f.d2(t), f.d3(t)
            return g.d3(F) * a1**3 + 3.0 * g.d2(F) * a1 * a2 + g.d1(F) * a3

        return SmoothTestFn(lambda t: g.f(f.f(t)), d1, d2, d3, P=np.nan,
                            name=name or f"{g.name}({f.name})")


@dataclass(frozen=True)
class Variation:
    """Tangent vector field u(t) on the circle with two derivatives."""

    u: Fn
    d1: Fn
    d2: Fn

    def pinned(self) -> "Variation":
        """u - u(0): vanishes at the fixed cusp t = 0."""
        u0 = float(self.u(np.array(0.0)))
        return Variation(lambda t: self.u(t) - u0, self.d1, self.d2)


@dataclass(frozen=True, eq=False)
class DiffeoGrid:
    n: int
    values: np.ndarray  # Delta_0..Delta_n
    P: float

    @classmethod
    def from_function(cls, f: SmoothTestFn, n: int) -> "DiffeoGrid":
        t = np.arange(n + 1) / n
        D = f(t) - f(0.0)
        if np.any(np.diff(D) <= 0):
            raise DomainError("f must be strictly increasing")
        return cls(n, D, float(D[-1]))

    @property
    def gaps(self) -> DeltaGaps:
        return DeltaGaps(np.diff(self.values))


# ---------------------------------------------------------------------------
# test functions


def identity_fn() -> SmoothTestFn:
    z = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return SmoothTestFn(lambda t: np.asarray(t, dtype=float), lambda t: z(t) + 1.0, z, z, 1.0, "id")


def linear_fn(P: float) -> SmoothTestFn:
    z = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return SmoothTestFn(lambda t: P * np.asarray(t, dtype=float), lambda t: z(t) + P, z, z, P, f"{P}t")


def sine_fn(amp: float, P: float = 1.0, k: int = 1) -> SmoothTestFn:
    """P t + amp sin(2 pi k t)."""
    w = TAU * k
    if amp * w >= P:
        raise DomainError("f' must stay positive")
    return SmoothTestFn(
        lambda t: P * t + amp * np.sin(w * t),
        lambda t: P + amp * w * np.cos(w * t),
        lambda t: -amp * w**2 * np.sin(w * t),
        lambda t: -amp * w**3 * np.cos(w * t),
        P, f"{P}t+{amp}sin",
    )


def disc_bump_fn(amp: float) -> SmoothTestFn:
    """t + amp sin^2(pi t): fixes 0 and 1, f' periodic."""
    if 2.0 * math.pi * amp >= 1.0 and amp > 0:
        raise DomainError("f' must stay positive")
    return SmoothTestFn(
        lambda t: t + amp * np.sin(math.pi * t) ** 2,
        lambda t: 1.0 + amp * math.pi * np.sin(TAU * t),
        lambda t: amp * math.pi * TAU * np.cos(TAU * t),
        lambda t: -amp * math.pi * TAU**2 * np.sin(TAU * t),
        1.0, f"t+{amp}sin^2",
    )


def exp_fn(alpha: float = 1.0) -> SmoothTestFn:
    e = lambda t: np.exp(alpha * np.asarray(t, dtype=float))
    return SmoothTestFn(e, lambda t: alpha * e(t), lambda t: alpha**2 * e(t),
                        lambda t: alpha**3 * e(t), np.nan, f"exp({alpha}.)")


def moebius_fn(a, b, c, d) -> SmoothTestFn:
    """(a t + b)/(c t + d)."""
    det = a * d - b * c
    if det == 0:
        raise DomainError("degenerate Moebius map")
    den = lambda t: c * np.asarray(t, dtype=float) + d
    return SmoothTestFn(
        lambda t: (a * t + b) / den(t),
        lambda t: det / den(t) ** 2,
        lambda t: -2.0 * c * det / den(t) ** 3,
        lambda t: 6.0 * c * c * det / den(t) ** 4,
        np.nan, "moebius",
    )


def crown_map_fn(P: float) -> SmoothTestFn:
    """g(F) = (e^F - 1)/(e^{P/2} - e^{F - P/2}), the Delta -> x map up to a factor."""
    h = math.exp(P / 2.0)
    eP = math.exp(P)
    # g = (e^F - 1) h / (eP - e^F) = h * (-1 + (eP - 1)/(eP - e^F))
    c = h * (eP - 1.0)
    q = lambda F: 1.0 / (eP - np.exp(F))
    e = lambda F: np.exp(F)
    return SmoothTestFn(
        lambda F: c * q(F) - h,
        lambda F: c * e(F) * q(F) ** 2,
        lambda F: c * (e(F) * q(F) ** 2 + 2.0 * e(F) ** 2 * q(F) ** 3),
        lambda F: c * (e(F) * q(F) ** 2 + 6.0 * e(F) ** 2 * q(F) ** 3 + 6.0 * e(F) ** 3 * q(F) ** 4),
        np.nan, "crown",
    )


def fourier_variation(k: int = 1, phase: str = "sin") -> Variation:
    w = TAU * k
    if phase == "sin":
        return Variation(lambda t: np.sin(w * t), lambda t: w * np.cos(w * t), lambda t: -w * w * np.sin(w * t))
    if phase == "cos":
        return Variation(lambda t: np.cos(w * t), lambda t: -w * np.sin(w * t), lambda t: -w * w * np.cos(w * t))
    raise DomainError("phase must be 'sin' or 'cos'")


def scaled_variation(u: Variation, a: float, v: Variation | None = None, b: float = 0.0) -> Variation:
    """a u + b v."""
    if v is None:
        return Variation(lambda t: a * u.u(t), lambda t: a * u.d1(t), lambda t: a * u.d2(t))
    return Variation(lambda t: a * u.u(t) + b * v.u(t), lambda t: a * u.d1(t) + b * v.d1(t),
                     lambda t: a * u.d2(t) + b * v.d2(t))


# ---------------------------------------------------------------------------
# Schwarzian


def schwarzian_from_derivs(d1, d2, d3):
    r = d2 / d1
    return d3 / d1 - 1.5 * r * r


def schwarzian(f: SmoothTestFn, t):
    t = np.asarray(t, dtype=float)
    return schwarzian_from_derivs(f.d1(t), f.d2(t), f.d3(t))


def schwarzian_fd(f: SmoothTestFn, t, h: float):
    """Schwarzian from 5-point central differences of f (secondary oracle)."""
    fm2, fm1, f0, fp1, fp2 = (f(t + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    d3 = (-fm2 + 2 * fm1 - 2 * fp1 + fp2) / (2 * h**3)
    return schwarzian_from_derivs(d1, d2, d3)


def cocycle_residual(g: SmoothTestFn, f: SmoothTestFn, t):
    """S[g o f, t] - f'(t)^2 S[g, f(t)] - S[f, t]."""
    t = np.asarray(t, dtype=float)
    F = f(t)
    return schwarzian(g.compose(f), t) - f.d1(t) ** 2 * schwarzian(g, F) - schwarzian(f, t)


def moebius_exp_schwarzian_residual(a, b, c, d, alpha, f: SmoothTestFn, t):
    """S[(a e^{alpha F} + b)/(c e^{alpha F} + d), F] + alpha^2/2 at F = f(t)."""
    F = f(np.asarray(t, dtype=float))
    h = moebius_fn(a, b, c, d).compose(exp_fn(alpha))
    if np.any(c * np.exp(alpha * F) + d == 0):
        raise DomainError("pole at the evaluation point")
    return schwarzian(h, F) + 0.5 * alpha**2


# ---------------------------------------------------------------------------
# discrete action and its expansion


def discrete_crown_action(f: SmoothTestFn, n: int) -> float:
    """sum_{i=0}^{n-1} log(e^{f(t_i + eps) - f(t_i - eps)} - 1), eps = 1/n."""
    if n < 3:
        raise DomainError("n must be >= 3")
    t = np.arange(n) / n
    eps = 1.0 / n
    return float(np.sum(log_expm1(f(t + eps) - f(t - eps))))


def disc_amplitude(f: SmoothTestFn) -> float:
    """int_0^1 log f'(t) dt (the coefficient of 1/eps)."""
    return integrate_unit(lambda t: np.log(f.d1(t)))


def action_expansion_target(f: SmoothTestFn) -> float:
    """(1/6) int (f'''/f' + f'^2)."""
    return integrate_unit(lambda t: f.d3(t) / f.d1(t) + f.d1(t) ** 2) / 6.0


def hill_form(f: SmoothTestFn) -> float:
    """(1/3) int (-S + f'^2/2).

    Equal to :func:`action_expansion_target` for periodic f' because
    int S = -(1/2) int f^(3)/f'.  With -S/2 in place of -S the Schwarzian
    part would be halved.
    """
    return integrate_unit(lambda t: -schwarzian(f, t) + 0.5 * f.d1(t) ** 2) / 3.0


def _richardson(eps: np.ndarray, r: np.ndarray) -> float:
    """Eliminate the leading linear term from r(eps) = c + a eps + ..."""
    if eps.size < 2:
        raise DomainError("need at least two grid sizes")
    e1, e2 = eps[-2], eps[-1]
    r1, r2 = r[-2], r[-1]
    return float((e1 * r2 - e2 * r1) / (e1 - e2))


def _check_monotone(r: np.ndarray, what: str, noise: float = 1e-6):
    """Successive changes must keep one sign and shrink.

    Changes below ``noise`` (relative) are ignored: the O(eps^2) local terms
    carry ~1e-16/eps rounding each, which R/eps amplifies to ~1e-7 at n ~ 4000.
    """
    if r.size < 3:
        return
    d = np.diff(r)
    floor = noise * max(1.0, float(np.max(np.abs(r))))
    big = d[np.abs(d) > floor]
    ok = big.size == 0 or np.all(big > 0) or np.all(big < 0)
    ok = ok and np.all(np.abs(d[1:]) <= np.abs(d[:-1]) + floor)
    if not ok:
        raise ConvergenceError(f"{what}: non-monotone convergence {r}")


@dataclass(frozen=True)
class ExpansionTable:
    n: tuple
    ratios: tuple  # R(eps)/eps
    coefficient: float
    target: float


def action_expansion_table(f: SmoothTestFn, n_list: Sequence[int]) -> ExpansionTable:
    ns = np.asarray(sorted(n_list))
    if ns.size < 2:
        raise DomainError("need at least two grid sizes")
    amp = disc_amplitude(f)
    P = f.P
    r = []
    for n in ns:
        eps = 1.0 / n
        t = np.arange(n) * eps
        # same R as  action - log(2 eps)/eps - amp/eps - P,  but subtracted
        # point by point to avoid cancelling O(1/eps) sums
        lfp = np.log(f.d1(t))
        local = log_expm1(f(t + eps) - f(t - eps)) - math.log(2.0 * eps) - lfp
        R = np.sum(local) + (np.sum(lfp) - amp / eps) - P
        r.append(R / eps)
    r = np.asarray(r)
    _check_monotone(r, "action expansion")
    c = _richardson(1.0 / ns, r)
    return ExpansionTable(tuple(int(k) for k in ns), tuple(r), c, action_expansion_target(f))


def action_expansion_coefficient(f: SmoothTestFn, n_list: Sequence[int]) -> float:
    return action_expansion_table(f, n_list).coefficient


def hill_boundary_term(f: SmoothTestFn) -> float:
    """(3/2) f''/f' evaluated between 0 and 1."""
    b = lambda t: 1.5 * f.d2(np.asarray(t, dtype=float)) / f.d1(np.asarray(t, dtype=float))
    return float(b(1.0) - b(0.0))


def hill_identity_residual(f: SmoothTestFn) -> float:
    """int S[f,t] dt + (1/2) int f'''/f' dt (vanishes for periodic f')."""
    return integrate_unit(lambda t: schwarzian(f, t) + 0.5 * f.d3(t) / f.d1(t))


def cross_ratio_schwarzian(f: SmoothTestFn, t: float, n: int) -> float:
    """(4 - CR)/(2 eps^2) with CR the cross ratio of f(t), ..., f(t + 3 eps)."""
    eps = 1.0 / n
    f0, f1, f2, f3 = (float(f(t + k * eps)) for k in range(4))
    cr = (f3 - f1) * (f2 - f0) / ((f3 - f2) * (f1 - f0))
    return (4.0 - cr) / (2.0 * eps * eps)


# ---------------------------------------------------------------------------
# symplectic forms


def _dlog_xi(f: SmoothTestFn, w: Variation, n: int) -> np.ndarray:
    t = np.arange(n + 1) / n
    D = f(t) - f(0.0)
    P = D[-1]
    x = np.sinh(D[1:-1] / 2.0) / np.sinh((P - D[1:-1]) / 2.0)
    dD = w.u(t[1:-1]) - w.u(np.array(0.0))
    dx = x_jacobian_diag(D[1:-1], P) * dD
    xi = np.diff(x, prepend=0.0)
    dxi = np.diff(dx, prepend=0.0)
    return dxi / xi


def discrete_symplectic(f: SmoothTestFn, u: Variation, v: Variation, n: int) -> float:
    """The xi-symplectic form of the n-cusp crown sampled from f, on (u, v).

    Delta_i = f(t_i) - f(0) and the variation moves Delta_i by
    u(t_i) - u(0) (the cusp at t = 0 is the reference and stays put).
    """
    if n % 2 == 0:
        raise DomainError("n must be odd")
    return symplectic_eval(_dlog_xi(f, u, n), _dlog_xi(f, v, n))


def gelfand_fuchs_form(f: SmoothTestFn, u: Variation, v: Variation) -> float:
    """-(1/4) int (u'v'' - v'u'')/f'^2."""
    return -0.25 * integrate_unit(lambda t: (u.d1(t) * v.d2(t) - v.d1(t) * u.d2(t)) / f.d1(t) ** 2)


def continuum_symplectic(f: SmoothTestFn, u: Variation, v: Variation) -> float:
    """-(1/4) int [(u'v'' - v'u'')/f'^2 - (u'v - v'u)]."""
    corr = integrate_unit(lambda t: u.d1(t) * v.u(t) - v.d1(t) * u.u(t))
    return gelfand_fuchs_form(f, u, v) + 0.25 * corr


def _gf_through(h: SmoothTestFn, f: SmoothTestFn, u: Variation, v: Variation) -> float:
    """Gelfand-Fuchs form of h o f, variations pushed through the chain rule.

    A variation u of f changes log (h o f)' by A_u = (h''/h')(f) u + u'/f';
    the form is -(1/4) int (A_u A_v' - A_v A_u').
    """
    def A(w: Variation, t):
        F = f(t)
        return h.d2(F) / h.d1(F) * w.u(t) + w.d1(t) / f.d1(t)

    def dA(w: Variation, t):
        F = f(t)
        G = h.d2(F) / h.d1(F)
        dG = (h.d3(F) / h.d1(F) - G * G) * f.d1(t)
        return dG * w.u(t) + G * w.d1(t) + (w.d2(t) * f.d1(t) - w.d1(t) * f.d2(t)) / f.d1(t) ** 2

    return -0.25 * integrate_unit(lambda t: A(u, t) * dA(v, t) - A(v, t) * dA(u, t))


def gf_change_of_variables_residual(g: SmoothTestFn, f: SmoothTestFn, u: Variation, v: Variation) -> float:
    """omega_GF[g o f] - omega_GF[f] + (1/2) int (u'v - v'u) S[g, f(t)].

    Variations that do not vanish at t = 0 should be pinned first when g has
    a pole inside the range of f (the crown map): otherwise the integrand is
    not integrable at the end of the period.
    """
    ident = identity_fn()
    corr = integrate_unit(lambda t: (u.d1(t) * v.u(t) - v.d1(t) * u.u(t)) * schwarzian(g, f(t)))
    return _gf_through(g, f, u, v) - _gf_through(ident, f, u, v) + 0.5 * corr


# ---------------------------------------------------------------------------
# disc


def disc_continuum_table(f: SmoothTestFn, n_list: Sequence[int]) -> ExpansionTable:
    """Richardson table for the disc action expansion.

    z_i = f(i eps), i = -1..n+1, with the end points weighted 1/2 (the
    fixed cusps z = 0, 1 each carry half a cell).
    """
    if abs(float(f(0.0))) > 1e-14 or abs(float(f(1.0)) - 1.0) > 1e-14:
        raise DomainError("disc test function must fix 0 and 1")
    ns = np.asarray(sorted(n_list))
    if ns.size < 2:
        raise DomainError("need at least two grid sizes")
    amp = disc_amplitude(f)
    r = []
    for n in ns:
        eps = 1.0 / n
        t = np.arange(n + 1) * eps
        w = np.ones(n + 1)
        w[0] = w[-1] = 0.5
        lfp = np.log(f.d1(t))
        local = np.log((f(t + eps) - f(t - eps)) / (2.0 * eps)) - lfp
        R = np.dot(w, local) + (np.dot(w, lfp) - amp / eps)
        r.append(R / eps)
    r = np.asarray(r)
    _check_monotone(r, "disc expansion")
    c = _richardson(1.0 / ns, r)
    return ExpansionTable(tuple(int(k) for k in ns), tuple(r), c, disc_target(f))


def disc_continuum_coefficient(f: SmoothTestFn, n_list: Sequence[int] = (501, 1001, 2001)) -> float:
    return disc_continuum_table(f, n_list).coefficient


def disc_target(f: SmoothTestFn) -> float:
    """(1/6) int f'''/f'."""
    return integrate_unit(lambda t: f.d3(t) / f.d1(t)) / 6.0
