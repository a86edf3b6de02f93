#!/usr/bin/env python3
"""
Chebyshev Core - extremal growth of Chebyshev polynomials and the rate function

Evaluates T_n inside and outside [-1, 1], its derivatives, the outside-the-body
growth factors for multivariate polynomials, the coefficient-sum bounds, and the
rate function psi(tau, alpha) with its roots gamma0(alpha) and tau0(b).

Growth factors explode very fast in n, so everything that can overflow is returned
in log space with a separate sign.
"""

import math
import logging
from dataclasses import dataclass, asdict
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp
from scipy.optimize import bisect, minimize

from mz_errors import DomainError

logger = logging.getLogger('ChebyshevCore')

ROOT_XTOL = 1e-10
ROOT_MAXITER = 200

COMPACT_KINDS = ('interval', 'ellipse', 'disk', 'square')
BODY_KINDS = ('cube', 'octahedron', 'ball')


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as sign * exp(log_abs)"""
    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.log_abs > 709.0:
            return self.sign * math.inf
        return self.sign * math.exp(self.log_abs)

    @classmethod
    def from_value(cls, x: float) -> 'SignedLog':
        if x == 0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)


@dataclass(frozen=True)
class SymmetricCompact:
    kind: str
    alpha: float
    param: Optional[float] = None

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class RateParams:
    tau: float
    alpha: float = 1.0

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")

    @property
    def psi(self) -> float:
        return psi(self.tau, self.alpha)


def cheb_T(n: int, u: float) -> SignedLog:
    """
    T_n(u) in sign/log form. Inside [-1, 1] this is cos(n arccos u); outside it is
    the closed form ((u + sqrt(u^2-1))^n + (u - sqrt(u^2-1))^n) / 2 taken in logs.
    """
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    u = float(u)
    if abs(u) <= 1.0:
        return SignedLog.from_value(math.cos(n * math.acos(u)))

    t = math.acosh(abs(u))
    log_abs = n * t + math.log1p(math.exp(-2.0 * n * t)) - math.log(2.0)
    sign = -1 if (u < 0 and n % 2 == 1) else 1
    return SignedLog(log_abs, sign)


def cheb_growth_bound(n: int, u: float) -> float:
    """log(2^(n-1) u^n), the bound T_n(u) <= 2^(n-1) u^n for u >= 1"""
    if n < 1:
        raise DomainError(f"degree must be at least 1, got {n}")
    if u < 1:
        raise DomainError(f"u must be at least 1, got {u}")
    return (n - 1) * math.log(2.0) + n * math.log(u)


@lru_cache(maxsize=None)
def cheb_monomial_coefficients(n: int) -> Tuple[int, ...]:
    """Exact integer monomial coefficients of T_n, lowest degree first"""
    if n == 0:
        return (1,)
    if n == 1:
        return (0, 1)
    prev = cheb_monomial_coefficients(n - 2)
    cur = cheb_monomial_coefficients(n - 1)
    nxt = [0] * (n + 1)
    for j, c in enumerate(cur):
        nxt[j + 1] += 2 * c
    for j, c in enumerate(prev):
        nxt[j] -= c
    return tuple(nxt)


def _derivative_coefficients(n: int, l: int) -> List[int]:
    coeffs = cheb_monomial_coefficients(n)
    return [c * math.perm(j, l) for j, c in enumerate(coeffs)][l:]


def _cheb_deriv_mp(n: int, l: int, u: float):
    coeffs = _derivative_coefficients(n, l)
    # mpmath.polyval wants the leading coefficient first
    return mp.polyval([mp.mpf(c) for c in reversed(coeffs)], mp.mpf(u))


def cheb_deriv(n: int, l: int, u: float) -> float:
    """
    l-th derivative of T_n at u, from the exact integer coefficients evaluated in
    extended precision. Returns 0 when l > n.
    """
    if n < 0 or l < 0:
        raise DomainError("degree and derivative order must be nonnegative")
    if l > n:
        return 0.0
    with mp.workdps(30 + n):
        return float(_cheb_deriv_mp(n, l, u))


def outside_bound_tensor(n: int, k: Sequence[int], x: Sequence[float], lam: float) -> float:
    """
    log of lam^(-<k>) prod_j |T_n^(k_j)(x_j/lam)|, the factor bounding |D^k P(x)|/||P||
    for P of degree n per axis on the cube of half side lam, x outside it on every axis.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = [int(v) for v in np.atleast_1d(k)]
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if len(k) != len(x):
        raise DomainError("multi-index and point must have the same dimension")
    if np.any(np.abs(x) <= lam):
        raise DomainError("every coordinate must satisfy |x_j| > lambda")
    if any(kj > n for kj in k):
        return -math.inf

    total = -sum(k) * math.log(lam)
    with mp.workdps(30 + n):
        for kj, xj in zip(k, x):
            total += float(mp.log(abs(_cheb_deriv_mp(n, kj, xj / lam))))
    return total


def coeff_sum_bound_interval(n: int, m: int, A: float, B: float) -> float:
    """log of T_n((B+A+2)/(B-A))^m, bounding the monomial coefficient sum over [A,B]^m"""
    if not (0 < A < B):
        raise DomainError(f"need 0 < A < B, got A={A}, B={B}")
    return m * cheb_T(n, (B + A + 2.0) / (B - A)).log_abs


def coeff_sum_bound_exp(n: int, m: int, b: float) -> float:
    """m*n*log coth(b/4): the coefficient-sum factor over [e^-b, e^b]^m"""
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    return m * n * math.log(1.0 / math.tanh(b / 4.0))


def psi(tau: float, alpha: float = 1.0) -> float:
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    if alpha < 1:
        raise DomainError(f"alpha must be at least 1, got {alpha}")
    return math.sqrt(1.0 + tau * tau) / tau - math.asinh(tau) + math.log(alpha)


def _doubling_bracket(func: Callable[[float], float], lo: float, hi: float) -> Tuple[float, float]:
    """Grow ``hi`` until func changes sign on [lo, hi]; func(lo) must be positive"""
    while func(hi) > 0:
        lo, hi = hi, 2.0 * hi
        logger.debug(f"Bracket grown to [{lo}, {hi}]")
        if hi > 1e12:
            raise DomainError("no sign change found while bracketing the root")
    return lo, hi


def gamma0(alpha: float = 1.0) -> float:
    """Unique positive zero of psi(., alpha)"""
    if alpha < 1:
        raise DomainError(f"alpha must be at least 1, got {alpha}")
    func = lambda t: psi(t, alpha)
    lo, hi = _doubling_bracket(func, 1.0, 2.0)
    return bisect(func, lo, hi, xtol=ROOT_XTOL, maxiter=ROOT_MAXITER)


def alpha_of(kind: str, param: Optional[float] = None) -> SymmetricCompact:
    """alpha(K) = max |w + sqrt(w^2-1)| over K for the four supported compacts"""
    if kind == 'interval':
        return SymmetricCompact(kind, 1.0)
    if kind == 'ellipse':
        if param is None or param < 1:
            raise DomainError("ellipse needs a parameter R >= 1")
        return SymmetricCompact(kind, float(param), float(param))
    if kind == 'disk':
        if param is None or not param > 0:
            raise DomainError("disk needs a positive radius M")
        return SymmetricCompact(kind, param + math.sqrt(param * param + 1.0), float(param))
    if kind == 'square':
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        return SymmetricCompact(kind, golden + math.sqrt(golden))
    raise DomainError(f"unknown compact kind: {kind}; expected one of {', '.join(COMPACT_KINDS)}")


def G_function(tau: float, b: float) -> float:
    return b * (math.sqrt(1.0 + tau * tau) - tau * math.asinh(tau)) + math.log(1.0 / math.tanh(b / 4.0))


def tau0(b: float) -> float:
    """Unique root of G(., b) on (gamma0(1), inf); G is strictly decreasing there"""
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    func = lambda t: G_function(t, b)
    start = gamma0(1.0)
    lo, hi = _doubling_bracket(func, start, 2.0 * start)
    return bisect(func, lo, hi, xtol=ROOT_XTOL, maxiter=ROOT_MAXITER)


def lobatto_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    """``count`` Chebyshev-Lobatto points on [lo, hi], ascending, endpoints included"""
    if count < 2:
        return np.array([(lo + hi) / 2.0])
    theta = np.pi * np.arange(count) / (count - 1)
    return lo + (hi - lo) * (1.0 - np.cos(theta)) / 2.0


def estimate_sup_norm(func: Callable[[np.ndarray], np.ndarray], lower: Sequence[float],
                      upper: Sequence[float], nodes_per_axis: int = 64, refine: int = 8) -> float:
    """
    max |func| over the box [lower, upper]: tensor Lobatto grid maximum, then bounded
    local refinement from the best grid nodes. Still an under-estimate of the true sup.
    ``func`` maps an array of shape (P, m) to P values.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    m = lower.shape[0]
    axes = [lobatto_nodes(lower[j], upper[j], nodes_per_axis) for j in range(m)]
    grids = np.meshgrid(*axes, indexing='ij')
    grid = np.stack([g.ravel() for g in grids], axis=1)

    values = np.concatenate([np.abs(func(grid[s:s + 65536])) for s in range(0, len(grid), 65536)])
    best = float(values.max())
    if refine <= 0:
        return best

    bounds = list(zip(lower, upper))
    objective = lambda y: -float(np.abs(func(y[None, :]))[0])
    for idx in np.argsort(values)[::-1][:refine]:
        result = minimize(objective, grid[idx], method='L-BFGS-B', bounds=bounds)
        best = max(best, -float(result.fun))
    return best


def body_width(kind: str, M: float, m: int) -> float:
    """Width of the cube Q^m_M, the octahedron O^m_{1/M} or the ball of radius M"""
    if not M > 0:
        raise DomainError(f"M must be positive, got {M}")
    if kind == 'cube':
        return 2.0 * M
    if kind == 'octahedron':
        return 2.0 / (M * math.sqrt(m))
    if kind == 'ball':
        return 2.0 * M
    raise DomainError(f"unknown body kind: {kind}; expected one of {', '.join(BODY_KINDS)}")


def body_contains(kind: str, M: float, x: Sequence[float]) -> bool:
    x = np.asarray(x, dtype=float)
    if kind == 'cube':
        return bool(np.max(np.abs(x)) <= M)
    if kind == 'octahedron':
        return bool(np.sum(np.abs(x)) <= 1.0 / M)
    if kind == 'ball':
        return bool(np.linalg.norm(x) <= M)
    raise DomainError(f"unknown body kind: {kind}")


def growth_bound_outside(n: int, x: Sequence[float], kind: str, M: float) -> float:
    """log T_n(2|x|/w(V)), bounding |P(x)|/||P||_C(V) for x outside V"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if body_contains(kind, M, x):
        raise DomainError(f"x lies inside the {kind}")
    u = 2.0 * float(np.linalg.norm(x)) / body_width(kind, M, x.shape[0])
    return cheb_T(n, u).log_abs
