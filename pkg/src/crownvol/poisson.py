"""Bracket matrices, Pfaffians, the invariant measure and the symplectic form."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import DeltaGaps, XCoords, XiCoords

MAX_RECURSIVE_DIM = 8


@dataclass(frozen=True, eq=False)
class SkewForm:
    """Skew-symmetric matrix stored by its strict upper triangle."""

    upper: np.ndarray  # m x m, only entries above the diagonal are used

    def __post_init__(self):
        u = np.triu(np.asarray(self.upper, dtype=float), 1)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DomainError("SkewForm needs a square matrix")
        object.__setattr__(self, "upper", u)

    @classmethod
    def from_matrix(cls, M) -> "SkewForm":
        return cls(np.asarray(M, dtype=float))

    @property
    def dim(self) -> int:
        return self.upper.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.upper - self.upper.T


def ones_matrix(m: int) -> SkewForm:
    """The matrix with 1 above the diagonal ({log xi_i, log xi_j} for i < j)."""
    return SkewForm(np.ones((m, m)))


def x_bracket_matrix(x) -> SkewForm:
    """{x_i, x_j} = x_i (x_j - x_i) for i < j."""
    xv = x.x if isinstance(x, XCoords) else np.asarray(x, dtype=float)
    return SkewForm(xv[:, None] * (xv[None, :] - xv[:, None]))


def _pf(M: np.ndarray) -> float:
    m = M.shape[0]
    if m == 0:
        return 1.0
    total = 0.0
    rest = np.arange(1, m)
    for k, j in enumerate(rest):
        a = M[0, j]
        if a == 0.0:
            continue
        keep = np.delete(rest, k)
        sign = 1.0 if k % 2 == 0 else -1.0
        total += sign * a * _pf(M[np.ix_(keep, keep)])
    return total


def pfaffian(M) -> float:
    """Pfaffian by expansion along the first row; Pf([[0,a],[-a,0]]) = a."""
    A = M.matrix if isinstance(M, SkewForm) else np.asarray(M, dtype=float)
    m = A.shape[0]
    if m % 2:
        raise DomainError("Pfaffian needs an even dimension")
    if m > MAX_RECURSIVE_DIM:
        raise DomainError(f"recursive Pfaffian limited to dim <= {MAX_RECURSIVE_DIM}")
    return _pf(A)


def pfaffian_closed_form(x) -> float:
    """x_1 * prod_{i>=2} (x_i - x_{i-1})."""
    xv = x.x if isinstance(x, XCoords) else np.asarray(x, dtype=float)
    if xv.size % 2:
        raise DomainError("closed form needs an even number of x's (odd n)")
    return float(xv[0] * np.prod(np.diff(xv)))


def crown_measure_density_delta(g) -> float:
    """sinh(P/2) / prod sinh(d_i/2), density w.r.t. prod_{i<n} d(delta_i)/2."""
    d = g.delta if isinstance(g, DeltaGaps) else np.asarray(g, dtype=float)
    P = d.sum(axis=-1)
    return np.sinh(P / 2.0) / np.prod(np.sinh(d / 2.0), axis=-1)


def x_jacobian_diag(D, P: float) -> np.ndarray:
    """d x_i / d Delta_i = sinh(P/2) / (2 sinh^2((P - Delta_i)/2))."""
    D = np.asarray(D, dtype=float)
    return 0.5 * np.sinh(P / 2.0) / np.sinh((P - D) / 2.0) ** 2


def inverse_ones_matrix(m: int) -> SkewForm:
    """B_{ij} = (-1)^{i+j} above the diagonal; inverse of :func:`ones_matrix`."""
    if m % 2:
        raise DomainError("inverse exists only for even size")
    idx = np.arange(1, m + 1)
    return SkewForm((-1.0) ** (idx[:, None] + idx[None, :]))


def symplectic_eval(u, v) -> float:
    """sum_{i<j} (-1)^{i+j} (u_i v_j - v_i u_j), O(m) via prefix sums."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DomainError("length mismatch")
    s = (-1.0) ** np.arange(1, u.size + 1)
    su, sv = s * u, s * v
    pu = np.cumsum(su) - su  # sum_{i<j} s_i u_i
    pv = np.cumsum(sv) - sv
    return float(np.dot(pu, sv) - np.dot(pv, su))


def xi_bracket_matrix(x) -> np.ndarray:
    """{xi_i, xi_j} pushed forward from the x-bracket (xi = T x, T bidiagonal)."""
    xv = x.x if isinstance(x, XCoords) else np.asarray(x, dtype=float)
    m = xv.size
    T = np.eye(m) - np.eye(m, k=-1)
    A = x_bracket_matrix(xv).matrix
    return T @ A @ T.T


def xi_bracket_transform_check(x) -> float:
    """max_{i<j} |{xi_i, xi_j} - xi_i xi_j| / (xi_i xi_j)."""
    xv = x.x if isinstance(x, XCoords) else np.asarray(x, dtype=float)
    xi = np.diff(xv, prepend=0.0)
    Bxi = xi_bracket_matrix(xv)
    iu = np.triu_indices(xv.size, 1)
    target = np.outer(xi, xi)[iu]
    if target.size == 0:
        return 0.0
    return float(np.max(np.abs(Bxi[iu] - target) / target))


def _xi_array(xi) -> np.ndarray:
    return xi.xi if isinstance(xi, XiCoords) else np.asarray(xi, dtype=float)


def casimir_crown(xi) -> float:
    """xi_1 xi_3 ... xi_{n-1} / (xi_2 ... xi_{n-2}) for even n."""
    v = _xi_array(xi)
    if v.size % 2 == 0:
        raise DomainError("Casimir exists for even n (odd number of xi's)")
    return float(np.prod(v[0::2]) / np.prod(v[1::2]))


def casimir_bracket_residual(xi) -> int:
    """max_k |{log C, log xi_k}| in exact integer arithmetic."""
    m = _xi_array(xi).size
    if m % 2 == 0:
        raise DomainError("Casimir exists for even n (odd number of xi's)")
    c = [1 if i % 2 == 0 else -1 for i in range(m)]
    sgn = lambda a: (a > 0) - (a < 0)
    return max(abs(sum(c[i] * sgn(k - i) for i in range(m))) for k in range(m))


def dh_pfaffian(n: int) -> float:
    """Pf(B) for B = inverse_ones_matrix(n - 1); equals (-1)^k with k = (n-1)/2."""
    if n % 2 == 0:
        raise DomainError("DH check is for odd n")
    return pfaffian(inverse_ones_matrix(n - 1))


def dh_consistency(n: int) -> float:
    """| |Pf(B)| - 1 |: omega^k/k! against prod dlog xi as a measure.

    The sign of Pf(B) is (-1)^k in lexicographic order; it is an
    orientation, so only the modulus is compared.
    """
    return abs(abs(dh_pfaffian(n)) - 1.0)
