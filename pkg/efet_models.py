#!/usr/bin/env python3
"""
EFET Models - entire functions of exponential/spherical type with known type sigma

Every discretization experiment runs on one of these families. Models evaluate on
arrays of points of shape (P, m) and know their type, their L_q integrability and,
where a decay law is known, an analytic tail bound outside a cube.

Derivatives go through a single finite-difference path for every family.
"""

import math
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from cheb_approx import (
    TensorChebSeries, fit_tensor_cheb, truncate_total_degree, _eval_unchecked,
    series_to_dict, series_from_dict, MAX_DEGREE,
)
from chebyshev_core import estimate_sup_norm
from geometry_nets import Window
from mz_errors import DomainError, NormDivergesError

logger = logging.getLogger('EfetModels')

SINC_TAYLOR_THRESHOLD = 1e-4
FD_STEP_FACTOR = 1e-4
INF = math.inf


def sinc(t: np.ndarray) -> np.ndarray:
    """sin(t)/t with the degree-6 Taylor polynomial below |t| < 1e-4"""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = np.abs(t) < SINC_TAYLOR_THRESHOLD
    big = ~small
    out[big] = np.sin(t[big]) / t[big]
    ts = t[small] ** 2
    out[small] = 1.0 - ts / 6.0 + ts * ts / 120.0 - ts ** 3 / 5040.0
    return out


def _as_points(x: np.ndarray, m: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if m > 1 or pts.shape[0] == 1 else pts.reshape(-1, 1)
    if pts.shape[1] != m:
        raise DomainError(f"points must have {m} coordinates, got {pts.shape[1]}")
    return pts


def _sphere_area(m: int) -> float:
    """Surface area of the unit sphere S^{m-1}"""
    return 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)


class EfetModel:
    """Base class for all model families"""

    kind = "base"
    sigma_type = "exponential"  # or spherical

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def efet_type(self) -> float:
        raise NotImplementedError

    def lq_finite(self, q: float) -> bool:
        return False

    def tail_bound(self, q: float, half_side: float) -> Optional[float]:
        """Upper bound for the integral of |f|^q outside Q^m_L, when a decay law is known"""
        return None

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass
class Sinc(EfetModel):
    """prod_j sin(sigma x_j)/(sigma x_j), value 1 at the origin"""
    sigma: float
    m: int = 1

    kind = "sinc"
    sigma_type = "exponential"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        pts = _as_points(x, self.m)
        return np.prod(sinc(self.sigma * pts), axis=1)

    def efet_type(self) -> float:
        return self.sigma

    def lq_finite(self, q: float) -> bool:
        return q > 1

    def tail_bound(self, q: float, half_side: float) -> Optional[float]:
        if q == INF or not self.lq_finite(q):
            return None
        s, L = self.sigma, half_side
        outer = 2.0 * s ** (-q) * L ** (1.0 - q) / (q - 1.0)
        full = 2.0 * q / (s * (q - 1.0))
        return self.m * outer * full ** (self.m - 1)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'sigma': self.sigma, 'm': self.m}


@dataclass
class SincPower(EfetModel):
    """(sin(sigma|x|/gamma) / (|x|/gamma))^gamma, radial, value sigma^gamma at 0"""
    sigma: float
    gamma: int
    m: int = 1

    kind = "sinc_power"
    sigma_type = "spherical"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if int(self.gamma) < 1:
            raise DomainError(f"gamma must be a positive integer, got {self.gamma}")
        self.gamma = int(self.gamma)

    @classmethod
    def for_exponent(cls, sigma: float, m: int, q: float) -> 'SincPower':
        """The witness with gamma = floor(m/q) + 1, so gamma*q > m"""
        gamma = 1 if q == INF else int(math.floor(m / q)) + 1
        return cls(sigma, gamma, m)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(_as_points(x, self.m), axis=1)
        return self.sigma ** self.gamma * sinc(self.sigma * r / self.gamma) ** self.gamma

    def efet_type(self) -> float:
        return self.sigma

    def lq_finite(self, q: float) -> bool:
        return q == INF or self.gamma * q > self.m

    def tail_bound(self, q: float, half_side: float) -> Optional[float]:
        if q == INF or not self.lq_finite(q):
            return None
        g, m, L = self.gamma, self.m, half_side
        return g ** (g * q) * _sphere_area(m) * L ** (m - g * q) / (g * q - m)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'sigma': self.sigma, 'gamma': self.gamma, 'm': self.m}


@dataclass
class ShiftedSinc(EfetModel):
    """sin(sigma|x-y|)/|x-y|; sup sigma at x = y and at most 1/delta off Q_delta(y)"""
    sigma: float
    shift: np.ndarray

    kind = "shifted_sinc"
    sigma_type = "spherical"

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        self.shift = np.atleast_1d(np.asarray(self.shift, dtype=float))

    @property
    def m(self) -> int:
        return self.shift.shape[0]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(_as_points(x, self.m) - self.shift, axis=1)
        return self.sigma * sinc(self.sigma * r)

    def efet_type(self) -> float:
        return self.sigma

    def lq_finite(self, q: float) -> bool:
        return q > self.m

    def tail_bound(self, q: float, half_side: float) -> Optional[float]:
        if q == INF or not self.lq_finite(q):
            return None
        reach = half_side - float(np.max(np.abs(self.shift)))
        if reach <= 0:
            return None
        return _sphere_area(self.m) * reach ** (self.m - q) / (q - self.m)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'sigma': self.sigma, 'shift': self.shift.tolist()}


def _separable_grid(axis_factors: List[np.ndarray], core: np.ndarray) -> np.ndarray:
    """Contract per-axis factor matrices (P_j, K_j) against a core tensor"""
    letters = 'abcdefgh'
    inner = 'ijklmnop'
    m = len(axis_factors)
    subscripts = ','.join(letters[j] + inner[j] for j in range(m))
    subscripts += ',' + inner[:m] + '->' + letters[:m]
    return np.einsum(subscripts, *axis_factors, core)


@dataclass
class ExpPolynomial(EfetModel):
    """E_N(w) = sum_k c_k e^{(k, w)} over k in {0..N}^m"""
    m: int
    N: int
    coeffs: np.ndarray

    kind = "exp_polynomial"
    sigma_type = "exponential"

    def __post_init__(self):
        if self.N < 0:
            raise DomainError(f"degree must be nonnegative, got {self.N}")
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.N + 1,) * self.m:
            raise DomainError(f"expected {(self.N + 1,) * self.m} coefficients, got {self.coeffs.shape}")

    def grid_values(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        k = np.arange(self.N + 1)
        factors = [np.exp(np.outer(np.asarray(a, dtype=float), k)) for a in axes]
        return _separable_grid(factors, self.coeffs)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        pts = _as_points(x, self.m)
        k = np.arange(self.N + 1)
        result = np.zeros(len(pts), dtype=complex)
        for idx in np.ndindex(*self.coeffs.shape):
            c = self.coeffs[idx]
            if c != 0:
                result += c * np.exp(pts @ k[list(idx)])
        return result

    def efet_type(self) -> float:
        """Per-axis type N: |E_N(w)| grows at most like exp(N sum |w_j|)"""
        return float(self.N)

    def coefficient_sum(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def lq_finite(self, q: float) -> bool:
        return q == INF and self.N == 0

    def to_dict(self) -> Dict[str, Any]:
        rows = [[int(v) for v in idx] + [float(c.real), float(c.imag)]
                for idx, c in np.ndenumerate(self.coeffs)]
        return {'kind': self.kind, 'm': self.m, 'N': self.N, 'coeffs': rows}


def random_exp_polynomial(m: int, N: int, rng: np.random.Generator) -> ExpPolynomial:
    shape = (N + 1,) * m
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return ExpPolynomial(m, N, coeffs)


@dataclass
class PositiveMeasureExp(EfetModel):
    """sum_l mu_l e^{(lambda_l, w)} with mu_l >= 0 and nodes lambda_l in Q^m_sigma"""
    sigma: float
    nodes: np.ndarray
    weights: np.ndarray

    kind = "positive_measure"
    sigma_type = "exponential"

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if len(self.weights) != len(self.nodes):
            raise DomainError("one weight per node is required")
        if np.any(self.weights < 0):
            raise DomainError("weights must be nonnegative")
        if np.any(np.abs(self.nodes) > self.sigma * (1.0 + 1e-12)):
            raise DomainError(f"nodes must lie in the cube of half side sigma={self.sigma}")

    @property
    def m(self) -> int:
        return self.nodes.shape[1]

    def grid_values(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        factors = [np.exp(np.outer(np.asarray(a, dtype=float), self.nodes[:, j]))
                   for j, a in enumerate(axes)]
        letters = 'abcdefgh'
        subscripts = ','.join(letters[j] + 'z' for j in range(self.m)) + ',z->' + letters[:self.m]
        return np.einsum(subscripts, *factors, self.weights)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        pts = _as_points(x, self.m)
        return np.exp(pts @ self.nodes.T) @ self.weights

    def efet_type(self) -> float:
        return self.sigma

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'sigma': self.sigma, 'nodes': self.nodes.tolist(),
                'weights': self.weights.tolist()}


def random_positive_measure(m: int, sigma: float, atoms: int,
                            rng: np.random.Generator) -> PositiveMeasureExp:
    nodes = rng.uniform(-sigma, sigma, size=(atoms, m))
    weights = rng.uniform(0.0, 1.0, size=atoms)
    return PositiveMeasureExp(sigma, nodes, weights)


@dataclass
class MollifiedSeries(EfetModel):
    """
    f_n = P_{2n} H_{beta,n}, where P_{2n} is a tensor Chebyshev fit truncated to total
    degree 2n and H_{beta,n}(x) = sinc(beta|x|/n)^(2n + 2 ceil(m/(2q)) + 2).
    """
    base: TensorChebSeries
    n: int
    beta: float
    q: float
    m: int
    sigma: float
    tau: float
    epsilon: float

    kind = "mollified_series"
    sigma_type = "spherical"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")

    @staticmethod
    def beta_for(tau: float, epsilon: float, sigma: float, m: int) -> float:
        """beta = 2 tau e^{(1+2 eps)/tau} / w*, with w* = 2/(sigma sqrt m)"""
        return tau * sigma * math.sqrt(m) * math.exp((1.0 + 2.0 * epsilon) / tau)

    @classmethod
    def from_model(cls, model: EfetModel, n: int, tau: float, epsilon: float,
                   q: float) -> 'MollifiedSeries':
        if 2 * n > MAX_DEGREE:
            raise DomainError(f"2n must not exceed {MAX_DEGREE}, got n={n}")
        sigma = model.efet_type()
        half = 2.0 * n / (tau * sigma)
        fitted = fit_tensor_cheb(model.evaluate, half, 2 * n, model.m, sigma=sigma)
        base = truncate_total_degree(fitted, 2 * n)
        beta = cls.beta_for(tau, epsilon, sigma, model.m)
        logger.info(f"Mollified series: n={n}, beta={beta:.4f}, cube half side {half:.4f}")
        return cls(base, n, beta, q, model.m, sigma, tau, epsilon)

    @property
    def extra_exponent(self) -> int:
        """ceil(m/(2q)); zero for q = inf"""
        return 0 if self.q == INF else int(math.ceil(self.m / (2.0 * self.q)))

    @property
    def h_exponent(self) -> int:
        return 2 * self.n + 2 * self.extra_exponent + 2

    @property
    def w_star(self) -> float:
        return 2.0 / (self.sigma * math.sqrt(self.m))

    def mollifier(self, x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(_as_points(x, self.m), axis=1)
        return sinc(self.beta * r / self.n) ** self.h_exponent

    def polynomial(self, x: np.ndarray) -> np.ndarray:
        return _eval_unchecked(self.base, _as_points(x, self.m))

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        pts = _as_points(x, self.m)
        return self.polynomial(pts) * self.mollifier(pts)

    @cached_property
    def octahedron_sup(self) -> float:
        """Estimated ||P_{2n}|| over the cube circumscribing (2n/tau) O^m_{1/sigma}"""
        b = self.base.b
        return estimate_sup_norm(self.polynomial, [-b] * self.m, [b] * self.m,
                                 nodes_per_axis=128 if self.m == 1 else 48)

    def efet_type(self) -> float:
        return 2.0 * self.beta * (1.0 + (self.extra_exponent + 1.0) / self.n)

    def lq_finite(self, q: float) -> bool:
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'base': series_to_dict(self.base), 'n': self.n,
                'beta': self.beta, 'q': None if self.q == INF else self.q, 'm': self.m,
                'sigma': self.sigma, 'tau': self.tau, 'epsilon': self.epsilon}


def evaluate(model: EfetModel, x: np.ndarray) -> np.ndarray:
    return model.evaluate(x)


def efet_type(model: EfetModel) -> float:
    return model.efet_type()


def model_to_dict(model: EfetModel) -> Dict[str, Any]:
    return model.to_dict()


def model_from_dict(data: Dict[str, Any]) -> EfetModel:
    """Rebuild a model from its JSON form, dispatching on ``kind``"""
    kind = data.get('kind')
    if kind == Sinc.kind:
        return Sinc(float(data['sigma']), int(data.get('m', 1)))
    if kind == SincPower.kind:
        return SincPower(float(data['sigma']), int(data['gamma']), int(data.get('m', 1)))
    if kind == ShiftedSinc.kind:
        return ShiftedSinc(float(data['sigma']), np.asarray(data['shift'], dtype=float))
    if kind == ExpPolynomial.kind:
        m, N = int(data['m']), int(data['N'])
        coeffs = np.zeros((N + 1,) * m, dtype=complex)
        for row in data['coeffs']:
            coeffs[tuple(int(v) for v in row[:m])] = complex(row[m], row[m + 1])
        return ExpPolynomial(m, N, coeffs)
    if kind == PositiveMeasureExp.kind:
        return PositiveMeasureExp(float(data['sigma']), data['nodes'], data['weights'])
    if kind == MollifiedSeries.kind:
        q = INF if data['q'] is None else float(data['q'])
        return MollifiedSeries(series_from_dict(data['base']), int(data['n']), float(data['beta']),
                               q, int(data['m']), float(data['sigma']), float(data['tau']),
                               float(data['epsilon']))
    raise DomainError(f"unknown model kind: {kind}")


def window_midpoints(window: Window, points_per_axis: int) -> np.ndarray:
    """Midpoints of a uniform tensor grid of cells covering the window"""
    step = 2.0 * window.half_side / points_per_axis
    axes = [window.lower[j] + step * (np.arange(points_per_axis) + 0.5) for j in range(window.dim)]
    grids = np.meshgrid(*axes, indexing='ij')
    return np.stack([g.ravel() for g in grids], axis=1)


def finite_difference(model: EfetModel, x: np.ndarray, k: Sequence[int],
                      step: Optional[float] = None) -> np.ndarray:
    """
    D^k f at the points x by tensor central differences,
    delta^k f = sum_i (-1)^i binom(k, i) f(x + (k/2 - i) h) / h^k per axis.
    """
    pts = _as_points(x, model.m)
    k = [int(v) for v in np.atleast_1d(k)]
    if len(k) != model.m:
        raise DomainError(f"multi-index must have {model.m} components")
    h = step if step is not None else FD_STEP_FACTOR / max(model.efet_type(), 1.0)

    result = np.zeros(len(pts), dtype=complex)
    stencils = [[(math.comb(kj, i) * (-1) ** i, (kj / 2.0 - i) * h) for i in range(kj + 1)] for kj in k]
    for combo in product(*stencils):
        weight = 1.0
        offset = np.zeros(model.m)
        for j, (w, shift) in enumerate(combo):
            weight *= w
            offset[j] = shift
        result += weight * model.evaluate(pts + offset)
    return result / h ** sum(k)


def _grid_norm(values: np.ndarray, q: float, cell: float) -> float:
    a = np.abs(values)
    if q == INF:
        return float(a.max())
    return float((np.sum(a ** q) * cell) ** (1.0 / q))


def _check_integrable(model: EfetModel, q: float):
    if not model.lq_finite(q) and not (isinstance(model, ExpPolynomial) and model.N == 0):
        raise NormDivergesError(f"norm diverges: {model.kind} is not in L_{q}")


def bernstein_check(model: EfetModel, k: Sequence[int], q: float, window: Window,
                    resolution: int) -> float:
    """||D^k f||_q / ||f||_q on the window; Bernstein says at most sigma^<k>"""
    _check_integrable(model, q)
    pts = window_midpoints(window, resolution)
    cell = (2.0 * window.half_side / resolution) ** model.m
    deriv = finite_difference(model, pts, k)
    base = model.evaluate(pts)
    ratio = _grid_norm(deriv, q, cell) / _grid_norm(base, q, cell)
    logger.debug(f"Bernstein ratio for {model.kind}, k={list(k)}, q={q}: {ratio:.6f}")
    return ratio


def gradient_l1_check(model: EfetModel, window: Window, resolution: int) -> float:
    """sup of sum_j |df/dx_j| over sup |f| on the window; at most m*sigma"""
    _check_integrable(model, INF)
    pts = window_midpoints(window, resolution)
    total = np.zeros(len(pts))
    for j in range(model.m):
        k = [0] * model.m
        k[j] = 1
        total += np.abs(finite_difference(model, pts, k))
    return float(total.max() / np.abs(model.evaluate(pts)).max())


def derivative_sum_bound(m: int, d: int, r: int, h: float, sigma: float, q: float) -> float:
    """(binom(m+d+r, m) - r)^(1/q) max{(h sigma)^r, (h sigma)^(d+r)}"""
    if r not in (0, 1):
        raise DomainError(f"r must be 0 or 1, got {r}")
    count = math.comb(m + d + r, m) - r
    return count ** (1.0 / q) * max((h * sigma) ** r, (h * sigma) ** (d + r))


def derivative_sum_check(model: EfetModel, h: float, q: float, d: int, r: int,
                         window: Window, resolution: int) -> float:
    """I_h(f) / ||f||_q with I_h(f)^q = sum over r <= <k> <= d+r of h^(<k>q) ||D^k f||_q^q"""
    if q == INF:
        raise DomainError("the derivative sum is defined for finite q")
    _check_integrable(model, q)
    pts = window_midpoints(window, resolution)
    cell = (2.0 * window.half_side / resolution) ** model.m
    total = 0.0
    for k in product(range(d + r + 1), repeat=model.m):
        order = sum(k)
        if r <= order <= d + r:
            values = model.evaluate(pts) if order == 0 else finite_difference(model, pts, k)
            total += h ** (order * q) * _grid_norm(values, q, cell) ** q
    return total ** (1.0 / q) / _grid_norm(model.evaluate(pts), q, cell)


def mollifier_gap_bound(ms: MollifiedSeries, x: np.ndarray) -> np.ndarray:
    """(n + c + 1)(beta|x|/n)^2 / 3 >= 1 - H_{beta,n}(x)"""
    r = np.linalg.norm(_as_points(x, ms.m), axis=1)
    return (ms.n + ms.extra_exponent + 1) * (ms.beta * r / ms.n) ** 2 / 3.0


def mollified_decay_bound(ms: MollifiedSeries, x: np.ndarray) -> np.ndarray:
    """
    C e^{-2n eps/tau} (w* n / (tau|x|))^(m/q + 2) with C calibrated from the measured
    sup of P_{2n}: C5 = ||P|| e^{-2n(1+eps)/tau} and C = (C5/2)(2e^{-(1+2eps)/tau})^(2c+2).
    """
    pts = _as_points(x, ms.m)
    if np.any(np.sum(np.abs(pts), axis=1) <= 2.0 * ms.n / (ms.tau * ms.sigma)):
        raise DomainError("x must lie outside the octahedron (2n/tau) O^m_{1/sigma}")
    n, tau, eps = ms.n, ms.tau, ms.epsilon
    c5 = ms.octahedron_sup * math.exp(-2.0 * n * (1.0 + eps) / tau)
    const = (c5 / 2.0) * (2.0 * math.exp(-(1.0 + 2.0 * eps) / tau)) ** (2 * ms.extra_exponent + 2)
    power = (0.0 if ms.q == INF else ms.m / ms.q) + 2.0
    r = np.linalg.norm(pts, axis=1)
    return const * math.exp(-2.0 * n * eps / tau) * (ms.w_star * n / (tau * r)) ** power


def decay_check_mollified(ms: MollifiedSeries, x: np.ndarray) -> bool:
    """|f_n(x)| stays under the power-law decay bound at every given point"""
    bound = mollified_decay_bound(ms, x)
    values = np.abs(ms.evaluate(x))
    holds = bool(np.all(values <= bound))
    if not holds:
        logger.warning(f"Mollified decay bound exceeded at {int(np.sum(values > bound))} point(s)")
    return holds
