"""Fixed quadrature rules.

* tanh-sinh (double exponential) nodes on (0, 1), returned together with the
  complementary coordinate 1 - u so that endpoint gaps never lose precision;
* composite Gauss-Legendre on an interval, used for smooth periodic
  integrands in the continuum checks.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

T_MAX = 3.5  # last node sits ~e^{-52} from the endpoint


@lru_cache(maxsize=16)
def de_nodes(level: int, t_max: float = T_MAX):
    """Nodes u, 1-u and weights of the tanh-sinh rule on (0, 1), step 2^-level."""
    h = 2.0**-level
    t = np.arange(-np.ceil(t_max / h), np.ceil(t_max / h) + 1) * h
    s = np.pi * np.sinh(t)
    # u = 1/(1+e^{-s}), 1-u = 1/(1+e^{s}); both evaluated without cancellation
    u = np.exp(-np.logaddexp(0.0, -s))
    v = np.exp(-np.logaddexp(0.0, s))
    w = h * np.pi * np.cosh(t) * u * v
    for a in (u, v, w):
        a.setflags(write=False)
    return u, v, w


@lru_cache(maxsize=8)
def gauss_legendre_panels(a: float, b: float, panels: int = 256, order: int = 8):
    """Nodes and weights of the composite Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def integrate_unit(func, panels: int = 256, order: int = 8) -> float:
    """Integral of a vectorised ``func`` over [0, 1] (2048 points by default)."""
    t, w = gauss_legendre_panels(0.0, 1.0, panels, order)
    return float(np.dot(w, func(t)))
