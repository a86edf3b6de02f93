#!/usr/bin/env python3
"""
Cheb Approx - tensor Fourier-Chebyshev expansion on cubes

Fits entire functions on Q^m_b by Gauss-Chebyshev quadrature (a DCT-II per axis),
evaluates the partial sums, and provides the certified coefficient-decay and
sup-error bounds together with the convergence-rate experiment for e^{sigma w}.
"""

import math
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from mpmath import mp
from numpy.polynomial import chebyshev as C
from scipy.fft import dctn

from chebyshev_core import gamma0, lobatto_nodes, psi
from mz_errors import DomainError, RateNotNegativeError, UnderResolvedQuadratureError

logger = logging.getLogger('ChebApprox')

MAX_DIM = 3
MAX_DEGREE = 64
CUBE_TOLERANCE = 1e-12

# Lobatto nodes per axis used when measuring sup errors
ERROR_GRID = {1: 4097, 2: 257, 3: 65}


@dataclass
class TensorChebSeries:
    """sum_k c_k prod_j T_{k_j}(x_j / b) over 0 <= k_j <= n, dense (n+1)^m coefficients"""
    m: int
    n: int
    b: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.m <= MAX_DIM:
            raise DomainError(f"dimension must be between 1 and {MAX_DIM}, got {self.m}")
        if not 0 <= self.n <= MAX_DEGREE:
            raise DomainError(f"degree must be between 0 and {MAX_DEGREE}, got {self.n}")
        if not self.b > 0:
            raise DomainError(f"half side must be positive, got {self.b}")
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.n + 1,) * self.m:
            raise DomainError(f"expected {(self.n + 1,) * self.m} coefficients, got {self.coeffs.shape}")

    def coefficient(self, k: Sequence[int]) -> complex:
        return complex(self.coeffs[tuple(int(v) for v in k)])

    def to_dict(self) -> Dict[str, Any]:
        return series_to_dict(self)


def series_to_dict(s: TensorChebSeries) -> Dict[str, Any]:
    rows = []
    for k in np.ndindex(*s.coeffs.shape):
        c = s.coeffs[k]
        rows.append([int(v) for v in k] + [float(c.real), float(c.imag)])
    return {'m': s.m, 'n': s.n, 'b': s.b, 'coeffs': rows}


def series_from_dict(data: Dict[str, Any]) -> TensorChebSeries:
    m, n = int(data['m']), int(data['n'])
    coeffs = np.zeros((n + 1,) * m, dtype=complex)
    for row in data['coeffs']:
        k = tuple(int(v) for v in row[:m])
        if any(v > n for v in k):
            raise DomainError(f"coefficient index {k} exceeds degree {n}")
        coeffs[k] = complex(row[m], row[m + 1])
    return TensorChebSeries(m, n, float(data['b']), coeffs)


def default_quadrature_points(n: int, b: float, sigma: float = 0.0) -> int:
    return max(2 * (n + 1), 4 * int(math.ceil(sigma * b)))


def fit_tensor_cheb(f: Callable[[np.ndarray], np.ndarray], b: float, n: int, m: int,
                    quad_points: Optional[int] = None, sigma: float = 0.0) -> TensorChebSeries:
    """
    Coefficients (2/pi)^m / 2^{r(k)} * integral of f(b cos theta) prod cos(k_j theta_j)
    by K-point Gauss-Chebyshev quadrature per axis. ``f`` maps (P, m) points to P
    values; r(k) counts the zero components of k.
    """
    if not 1 <= m <= MAX_DIM:
        raise DomainError(f"dimension must be between 1 and {MAX_DIM}, got {m}")
    if not 0 <= n <= MAX_DEGREE:
        raise DomainError(f"degree must be between 0 and {MAX_DEGREE}, got {n}")
    K = default_quadrature_points(n, b, sigma) if quad_points is None else int(quad_points)
    if K < 2 * (n + 1):
        raise UnderResolvedQuadratureError(
            f"under-resolved quadrature: {K} nodes per axis, need at least {2 * (n + 1)}"
        )

    theta = np.pi * (np.arange(K) + 0.5) / K
    nodes = b * np.cos(theta)
    grids = np.meshgrid(*([nodes] * m), indexing='ij')
    pts = np.stack([g.ravel() for g in grids], axis=1)
    values = np.asarray(f(pts), dtype=complex).reshape((K,) * m)

    transformed = dctn(values.real, type=2) + 1j * dctn(values.imag, type=2)
    transformed /= float(K) ** m
    for axis in range(m):
        index = [slice(None)] * m
        index[axis] = 0
        transformed[tuple(index)] /= 2.0

    coeffs = transformed[tuple([slice(0, n + 1)] * m)].copy()
    logger.debug(f"Fitted degree {n} series on Q^{m}_{b} with {K} nodes per axis")
    return TensorChebSeries(m, n, float(b), coeffs)


def _eval_unchecked(s: TensorChebSeries, pts: np.ndarray) -> np.ndarray:
    y = pts / s.b
    if s.m == 1:
        return C.chebval(y[:, 0], s.coeffs)
    if s.m == 2:
        return C.chebval2d(y[:, 0], y[:, 1], s.coeffs)
    return C.chebval3d(y[:, 0], y[:, 1], y[:, 2], s.coeffs)


def eval_series(s: TensorChebSeries, x: Sequence[float]):
    """
    Partial sum at x (one point of shape (m,) or many of shape (P, m)) by Clenshaw
    recurrence. Points must lie in the closed cube.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = arr.reshape(1, -1) if single else arr
    if pts.shape[1] != s.m:
        raise DomainError(f"points must have {s.m} coordinates")
    if np.any(np.abs(pts) > s.b * (1.0 + CUBE_TOLERANCE)):
        raise DomainError(f"point outside the cube of half side {s.b}")
    values = _eval_unchecked(s, pts)
    return complex(values[0]) if single else values


def truncate_total_degree(s: TensorChebSeries, degree: int) -> TensorChebSeries:
    """Zero every coefficient with <k> > degree"""
    total = np.zeros(s.coeffs.shape, dtype=int)
    for axis in range(s.m):
        shape = [1] * s.m
        shape[axis] = s.n + 1
        total = total + np.arange(s.n + 1).reshape(shape)
    coeffs = np.where(total <= degree, s.coeffs, 0.0)
    return TensorChebSeries(s.m, s.n, s.b, coeffs)


def measure_sup_error(f: Callable[[np.ndarray], np.ndarray], s: TensorChebSeries,
                      nodes_per_axis: Optional[int] = None) -> float:
    """max |f - s| over a tensor Lobatto grid of the series cube"""
    count = nodes_per_axis or ERROR_GRID[s.m]
    axis = lobatto_nodes(-s.b, s.b, count)
    grids = np.meshgrid(*([axis] * s.m), indexing='ij')
    pts = np.stack([g.ravel() for g in grids], axis=1)
    worst = 0.0
    for start in range(0, len(pts), 65536):
        chunk = pts[start:start + 65536]
        diff = np.asarray(f(chunk), dtype=complex) - _eval_unchecked(s, chunk)
        worst = max(worst, float(np.abs(diff).max()))
    return worst


@dataclass
class DecayCertificate:
    """|f(z)| <= A exp(sigma sum |z_j|) on C^m, used on the ellipse of parameter delta"""
    A: float
    sigma: float
    b: float
    delta: float
    m: int

    def __post_init__(self):
        for name in ('A', 'sigma', 'b', 'delta'):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.m < 1:
            raise DomainError(f"m must be positive, got {self.m}")


def coeff_decay_bound(cert: DecayCertificate, k: Sequence[int], sharp: bool = False) -> float:
    """
    log of 2^m A e^{m sigma b sqrt(1+delta^2)} / (delta + sqrt(1+delta^2))^<k>.
    With ``sharp`` the 2^m prefactor becomes 2^{m - r(k)}.
    """
    k = [int(v) for v in np.atleast_1d(k)]
    if len(k) != cert.m:
        raise DomainError(f"multi-index must have {cert.m} components")
    root = math.sqrt(1.0 + cert.delta ** 2)
    zeros = sum(1 for v in k if v == 0) if sharp else 0
    return ((cert.m - zeros) * math.log(2.0) + math.log(cert.A)
            + cert.m * cert.sigma * cert.b * root
            - sum(k) * math.log(cert.delta + root))


def tensor_decay_prefactor(m: int, tau: float) -> float:
    return m * 2.0 ** m * (1.0 - 1.0 / (tau + math.sqrt(1.0 + tau * tau))) ** (-m)


def compact_constant(alpha: float) -> float:
    g = gamma0(alpha)
    return 2.0 / (1.0 - alpha / (g + math.sqrt(1.0 + g * g)))


def approx_error_bound(A: float, m: int, n: int, tau: float) -> float:
    """log(C(m) A e^{n psi(tau)}), the sup error of the degree-n tensor partial sum"""
    if not A > 0:
        raise DomainError(f"A must be positive, got {A}")
    if tau <= gamma0(1.0):
        raise RateNotNegativeError(f"rate not negative: tau={tau} must exceed gamma0(1)")
    return math.log(tensor_decay_prefactor(m, tau)) + math.log(A) + n * psi(tau)


def univariate_error_bound(A: float, n: int, tau: float, K) -> float:
    """log(C(K) A e^{n psi(tau, alpha(K))}) for a symmetric compact K"""
    if not A > 0:
        raise DomainError(f"A must be positive, got {A}")
    if tau <= gamma0(K.alpha):
        raise RateNotNegativeError(
            f"rate not negative: tau={tau} must exceed gamma0({K.alpha:.6g})"
        )
    return math.log(compact_constant(K.alpha)) + math.log(A) + n * psi(tau, K.alpha)


def exp_chebyshev_coefficients(z: float, count: int, dps: int = 50) -> List:
    """
    e^{-z} times the Chebyshev coefficients of e^{z t} on [-1, 1]:
    I_0(z) and 2 I_k(z) for k >= 1, as mpmath numbers.
    """
    with mp.workdps(dps):
        scale = mp.exp(-mp.mpf(z))
        coeffs = []
        for k in range(count):
            value = mp.besseli(k, mp.mpf(z)) * scale
            coeffs.append(value if k == 0 else 2 * value)
        return coeffs


def convergence_rate_experiment(sigma: float, tau: float, n_list: Sequence[int],
                                grid_points: int = 4096) -> List[Dict[str, float]]:
    """
    Sup error of the degree-n Chebyshev partial sum of e^{sigma w} on
    [-n/(sigma tau), n/(sigma tau)] for each n. The tail of the exact expansion is
    summed on the grid, so no cancellation enters. Rows carry the absolute error,
    its n-th root, the error relative to ||f||, and the local rate between
    consecutive rows.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if tau <= gamma0(1.0):
        raise RateNotNegativeError(f"rate not negative: tau={tau} must exceed gamma0(1)")

    t = np.linspace(-1.0, 1.0, grid_points)
    rows: List[Dict[str, float]] = []
    prev_n, prev_log = None, None
    for n in sorted(int(v) for v in n_list):
        if n < 1:
            raise DomainError(f"degree must be positive, got {n}")
        z = n / tau
        tail_count = n + 40 + int(2 * z)
        coeffs = exp_chebyshev_coefficients(z, tail_count + 1)
        lead = coeffs[n + 1]
        tail = np.zeros(tail_count + 1)
        for k in range(n + 1, tail_count + 1):
            tail[k] = float(coeffs[k] / lead)
        log_relative = float(mp.log(lead)) + math.log(float(np.abs(C.chebval(t, tail)).max()))
        log_error = log_relative + z

        local = math.nan
        if prev_n is not None:
            local = math.exp((log_error - prev_log) / (n - prev_n))
        rows.append({
            'n': n,
            'error': math.exp(log_error),
            'rate': math.exp(log_error / n),
            'relative_error': math.exp(log_relative),
            'local_rate': local,
        })
        logger.info(f"Rate experiment n={n}: error^(1/n)={rows[-1]['rate']:.5f}, local={local:.5f}")
        prev_n, prev_log = n, log_error
    return rows
