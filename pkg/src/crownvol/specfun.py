"""Real dilogarithm and the identities built from it.

Evaluation maps every argument into ``|z| <= 1/2`` with the reflection and
Landen transformations and then sums the power series, which converges at
least like ``2**-k`` there.  Only real values are produced; for ``x > 1`` the
real part of the principal branch is available through :func:`dilog_re`.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

PI2_6 = math.pi**2 / 6.0

# 0.5**56 / 56**2 < 1e-20, far below double precision.
_NTERMS = 56
_INV_K2 = 1.0 / np.arange(1, _NTERMS + 1, dtype=float) ** 2


def _series(z):
    """sum_{k>=1} z^k / k^2 by Horner's scheme, assumes |z| <= 1/2."""
    acc = np.zeros_like(z)
    for c in _INV_K2[::-1]:
        acc = acc * z + c
    return acc * z


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _unwrap(out, scalar):
    return float(out) if scalar else out


def _dilog_le1(x):
    """Vectorised Li2 on x <= 1 (no domain checks)."""
    out = np.empty_like(x)

    small = np.abs(x) <= 0.5
    out[small] = _series(x[small])

    # (1/2, 1): Euler reflection  Li2(x) = pi^2/6 - ln x ln(1-x) - Li2(1-x)
    m = (x > 0.5) & (x < 1.0)
    xm = x[m]
    out[m] = PI2_6 - np.log(xm) * np.log1p(-xm) - _series(1.0 - xm)

    out[x == 1.0] = PI2_6

    # [-1, -1/2): Landen  Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2, x/(x-1) in (1/3, 1/2]
    m = (x < -0.5) & (x >= -1.0)
    xm = x[m]
    out[m] = -_series(xm / (xm - 1.0)) - 0.5 * np.log1p(-xm) ** 2

    # x < -1: Landen lands in (1/2, 1), follow with reflection.
    m = x < -1.0
    xm = x[m]
    y = xm / (xm - 1.0)
    l1y = -np.log1p(-xm)  # log(1 - y)
    li2y = PI2_6 - np.log(y) * l1y - _series(1.0 / (1.0 - xm))
    out[m] = -li2y - 0.5 * np.log1p(-xm) ** 2
    return out


def dilog(x):
    """Dilogarithm Li2(x) = sum x^k/k^2 for real ``x <= 1``.

    Accepts scalars or arrays.  Raises :class:`DomainError` for ``x > 1``;
    use :func:`dilog_re` there.
    """
    arr, scalar = _as_array(x)
    arr = np.atleast_1d(arr)
    if np.any(arr > 1.0) or np.any(np.isnan(arr)):
        raise DomainError("dilog is real only for x <= 1; use dilog_re for x > 1")
    return _unwrap(_dilog_le1(arr).reshape(np.shape(x)), scalar)


def dilog_re(x):
    """Real part of Li2(x) for ``x > 1``.

    Uses Re Li2(x) = pi^2/3 - (1/2) ln^2 x - Li2(1/x).
    """
    arr, scalar = _as_array(x)
    arr = np.atleast_1d(arr)
    if np.any(~(arr > 1.0)):
        raise DomainError("dilog_re requires x > 1")
    lx = np.log(arr)
    out = 2.0 * PI2_6 - 0.5 * lx * lx - _dilog_le1(1.0 / arr)
    return _unwrap(out.reshape(np.shape(x)), scalar)


def li2_real(x):
    """Re Li2 on the whole real line: dispatches to dilog / dilog_re."""
    arr, scalar = _as_array(x)
    arr = np.atleast_1d(arr).astype(float)
    out = np.empty_like(arr)
    lo = arr <= 1.0
    out[lo] = _dilog_le1(arr[lo])
    hi = ~lo
    if np.any(hi):
        lx = np.log(arr[hi])
        out[hi] = 2.0 * PI2_6 - 0.5 * lx * lx - _dilog_le1(1.0 / arr[hi])
    return _unwrap(out.reshape(np.shape(x)), scalar)


def rogers_L(x):
    """L(x) = (pi/6) [Li2(x) + (1/2) ln x ln(1-x)] on 0 < x < 1.

    The pi/6 prefactor is kept so that the five-term relation reads as a
    plain vanishing sum; it plays no role in any residual.
    """
    arr, scalar = _as_array(x)
    arr = np.atleast_1d(arr)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("rogers_L requires 0 < x < 1")
    out = (math.pi / 6.0) * (_dilog_le1(arr) + 0.5 * np.log(arr) * np.log1p(-arr))
    return _unwrap(out.reshape(np.shape(x)), scalar)


def five_term_residual(x, y):
    """L(x) + L(y) - L(xy) - L(x(1-y)/(1-xy)) - L(y(1-x)/(1-xy))."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # 1 - xy written so that it keeps full precision when x, y -> 1
    den = (1.0 - x) + x * (1.0 - y)
    return (rogers_L(x) + rogers_L(y) - rogers_L(x * y)
            - rogers_L(x * (1.0 - y) / den) - rogers_L(y * (1.0 - x) / den))


def two_term_sum(P):
    """Re Li2(1+e^P) + Re Li2(1+e^-P)."""
    P = np.asarray(P, dtype=float)
    return dilog_re(1.0 + np.exp(P)) + dilog_re(1.0 + np.exp(-P))


def two_term_residual(P):
    """Residual of the real-part two-term relation at z = -e^P.

    Li2(1-z) + Li2(1-1/z) = ln^2(z)/2 continued to z = -e^P gives, for real
    parts, Re Li2(1+e^P) + Re Li2(1+e^-P) = (pi^2 - P^2)/2.  The tempting
    value (P^2 + pi^2)/2 (product of the two one-sided logarithms) is off
    by exactly P^2.
    """
    P = np.asarray(P, dtype=float)
    return two_term_sum(P) - 0.5 * (math.pi**2 - P * P)
