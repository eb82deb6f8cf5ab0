"""Identity and convergence suites shared by the CLI."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import continuum as C
from . import geometry as G
from . import poisson as Po
from . import specfun as S

SUITES = ("specfun", "poisson", "geometry", "continuum")


@dataclass
class CheckResult:
    suite: str
    name: str
    value: float
    tol: float
    passed: bool
    note: str = ""

    def as_dict(self):
        return asdict(self)


def _res(suite, name, value, tol, note="", passed=None):
    value = float(value)
    if passed is None:
        passed = bool(abs(value) <= tol)
    return CheckResult(suite, name, value, tol, passed, note)


def _random_config(rng, n, P):
    while True:
        D = np.sort(rng.uniform(0.0, P, n - 1))
        if n == 1 or np.min(np.diff(np.concatenate(([0.0], D, [P])))) > 1e-3 * P:
            return G.CrownConfig(n, P, D)


def specfun_suite(seed: int = 0):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(0.0, 1.0, (2, 100))
    x = np.clip(x, 1e-6, 1 - 1e-6)
    y = np.clip(y, 1e-6, 1 - 1e-6)
    out = [_res("specfun", "five-term relation, 100 random pairs (max)", np.max(np.abs(S.five_term_residual(x, y))), 1e-12)]
    for P in (0.1, 1.0, 10.0):
        out.append(_res("specfun", f"two-term relation, real parts, P={P}", S.two_term_residual(P), 1e-10,
                        "Re Li2(1+e^P) + Re Li2(1+e^-P) = (pi^2 - P^2)/2"))
    out.append(_res("specfun", "Li2(1) = pi^2/6", S.dilog(1.0) - math.pi**2 / 6, 1e-15))
    out.append(_res("specfun", "Li2(-1) = -pi^2/12", S.dilog(-1.0) + math.pi**2 / 12, 1e-15))
    out.append(_res("specfun", "Re Li2(2) = pi^2/4", S.dilog_re(2.0) - math.pi**2 / 4, 1e-14))
    return out


def poisson_suite(seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for n in (3, 5, 7):
        worst_pf, worst_det, worst_br = 0.0, 0.0, 0.0
        for _ in range(50):
            x = np.cumsum(rng.uniform(0.05, 2.0, n - 1))
            M = Po.x_bracket_matrix(x)
            pf = Po.pfaffian(M)
            worst_pf = max(worst_pf, abs(pf / Po.pfaffian_closed_form(x) - 1))
            worst_det = max(worst_det, abs(pf * pf / np.linalg.det(M.matrix) - 1))
            worst_br = max(worst_br, Po.xi_bracket_transform_check(x))
        out.append(_res("poisson", f"Pfaffian closed form vs recursive, n={n}", worst_pf, 1e-10))
        out.append(_res("poisson", f"Pf^2 = det, n={n}", worst_det, 1e-10))
        out.append(_res("poisson", f"{{xi_i, xi_j}} = xi_i xi_j, n={n}", worst_br, 1e-12))
    for n in (4, 6, 8):
        xi = rng.uniform(0.1, 2.0, n - 1)
        out.append(_res("poisson", f"Casimir bracket, n={n}", Po.casimir_bracket_residual(xi), 0.0))
    for m in (2, 4, 6, 8):
        A, B = Po.ones_matrix(m).matrix, Po.inverse_ones_matrix(m).matrix
        out.append(_res("poisson", f"ones-matrix inverse, m={m}", np.max(np.abs(A @ B - np.eye(m))), 1e-14))
    for n in (3, 5, 7):
        out.append(_res("poisson", f"DH density |Pf(B)| = 1, n={n}", Po.dh_consistency(n), 1e-13,
                        f"signed Pf(B) = {Po.dh_pfaffian(n):+.0f}"))
    return out


def geometry_suite(seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for n in (3, 5, 7):
        kiss, tang, prod, xk = 0.0, 0.0, 0.0, 0.0
        for _ in range(20):
            c = _random_config(rng, n, rng.uniform(0.2, 5.0))
            r = G.kissing_radii(c)
            kiss = max(kiss, G.kissing_residual(c, r))
            s = G.s_lengths(c, r)
            tang = max(tang, np.max(np.abs(s / G.s_lengths_tangent(r) - 1)))
            lemma = G.crown_action(G.gaps_from_config(c))
            prod = max(prod, abs(np.sum(np.log(s)) + 0.5 * c.P - lemma) / max(1.0, abs(lemma)))
            xk = max(xk, np.max(np.abs(G.x_from_kissing(c) / G.x_from_Delta(c).x - 1)))
        out.append(_res("geometry", f"kissing condition, n={n}", kiss, 1e-12))
        out.append(_res("geometry", f"s_i two forms agree, n={n}", tang, 1e-12))
        out.append(_res("geometry", f"prod s_i * e^(P/2) = lemma product, n={n}", prod, 1e-10))
        out.append(_res("geometry", f"x from horocycle radii, n={n}", xk, 1e-12))
    for n in (3, 4, 5):
        worst = 0.0
        for _ in range(20):
            P = rng.uniform(0.2, 4.0)
            y = rng.normal(size=n)
            y[0] = P - y[1:].sum()
            sc = G.ShearCoords(y)
            a = G.crown_action(G.gaps_from_shear(sc, P))
            b = G.shear_action(sc, P) + 0.5 * P
            worst = max(worst, abs(a - b) / abs(a))
        out.append(_res("geometry", f"shear chain: lemma action = shear action + P/2, n={n}", worst, 1e-9))
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        c = _random_config(rng, n, rng.uniform(0.2, 5.0))
        back = G.Delta_from_x(G.x_from_Delta(c), c.P)
        worst = max(worst, np.max(np.abs(back.Delta - c.Delta)))
    out.append(_res("geometry", "Delta -> x -> Delta round trip (100 configs)", worst, 1e-12))
    return out


EXPANSION_GRID = (501, 1001, 2001, 4001)


def continuum_suite(seed: int = 0):
    rng = np.random.default_rng(seed)
    f = C.sine_fn(0.1)
    t = rng.uniform(0.0, 1.0, 100)
    out = [
        _res("continuum", "cocycle, g=exp", np.max(np.abs(C.cocycle_residual(C.exp_fn(1.0), f, t))), 1e-10),
        _res("continuum", "cocycle, g=Moebius", np.max(np.abs(C.cocycle_residual(C.moebius_fn(2.0, 1.0, 1.0, 3.0), f, t))), 1e-10),
    ]
    for alpha in (1.0, 2.0):
        r = C.moebius_exp_schwarzian_residual(2.0, 1.0, 1.0, 3.0, alpha, f, t)
        out.append(_res("continuum", f"S[Moebius(e^(alpha F)), F] = -alpha^2/2, alpha={alpha:g}", np.max(np.abs(r)), 1e-8))
    cm = C.crown_map_fn(1.0)
    out.append(_res("continuum", "crown map S[g,f] = -1/2", np.max(np.abs(C.schwarzian(cm, f(t)) + 0.5)), 1e-8))
    tm = 0.3
    est = C.cross_ratio_schwarzian(f, tm, 2000)
    exact = float(C.schwarzian(f, tm + 1.5 / 2000))
    out.append(_res("continuum", "cross-ratio Schwarzian, n=2000 (rel)", est / exact - 1, 0.05))
    out.append(_res("continuum", "Hill identity int S = -1/2 int f'''/f'", C.hill_identity_residual(C.sine_fn(0.12)), 1e-8))

    tab = C.action_expansion_table(f, EXPANSION_GRID)
    for n, r in zip(tab.n, tab.ratios):
        out.append(_res("continuum", f"  R(eps)/eps at n={n}", r - tab.target, math.inf, "distance to target"))
    out.append(_res("continuum", "expansion coefficient, f=t+0.1 sin 2pi t (rel)", tab.coefficient / tab.target - 1, 0.02))
    P = 1.7
    lin = C.action_expansion_coefficient(C.linear_fn(P), (2001, 4001))
    out.append(_res("continuum", "expansion coefficient, f=Pt vs P^2/6 (rel)", lin / (P * P / 6) - 1, 0.005))

    u, v = C.fourier_variation(1, "sin"), C.fourier_variation(1, "cos")
    cont = C.continuum_symplectic(f, u, v)
    errs = [abs(C.discrete_symplectic(f, u, v, n) / cont - 1) for n in (501, 1001, 2001)]
    out.append(_res("continuum", "symplectic form, n=2001 (rel)", errs[-1], 0.05))
    out.append(_res("continuum", "symplectic error decreasing over n=501,1001,2001", float(errs[0] > errs[1] > errs[2]) - 1.0, 0.0,
                    " ".join(f"{e:.3g}" for e in errs)))
    gf = C.gf_change_of_variables_residual(cm, f, u.pinned(), v.pinned())
    out.append(_res("continuum", "Gelfand-Fuchs change of variables, crown map", gf, 1e-6))
    d = C.disc_bump_fn(0.05)
    dt = C.disc_continuum_table(d, (501, 1001, 2001))
    out.append(_res("continuum", "disc coefficient vs (1/6) int f'''/f' (rel)", dt.coefficient / dt.target - 1, 0.03))
    return out


_SUITE_FUNCS: dict[str, Callable] = {
    "specfun": specfun_suite,
    "poisson": poisson_suite,
    "geometry": geometry_suite,
    "continuum": continuum_suite,
}


def run_suite(name: str, seed: int = 0):
    names = SUITES if name == "all" else (name,)
    out = []
    for s in names:
        out.extend(_SUITE_FUNCS[s](seed))
    return out
