#!/usr/bin/env python3
"""
Discretization Verify - constants and measured sum-to-norm ratios on nets

Computes the explicit constants of the two-sided discretization inequalities,
estimates truncated L_q norms and sample sums, and runs the verification
experiments (upper and lower ratios, sup-norm discretization, perturbation of
nodes, necessity witnesses, tensor knot sets for exponential polynomials).

The unspecified constant C(m,q) is the caller-supplied ``c_mq``; experiments test
scaling structure, never its value.
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

import mz_settings
from chebyshev_core import lobatto_nodes, psi, tau0, coeff_sum_bound_exp
from efet_models import (
    EfetModel, ExpPolynomial, PositiveMeasureExp, ShiftedSinc, random_exp_polynomial,
    random_positive_measure,
)
from geometry_nets import (
    PointSet, Window, CoverageReport, covering_check, packing_multiplicity, greedy_thin,
    min_pairwise_separation, cubes_have_disjoint_interiors, UNCOVERED,
)
from mz_errors import (
    DomainError, HypothesisViolatedError, NormDivergesError, DeltaSigmaTooLargeError,
    NotCoveringError, NotDisjointError, InsufficientPointsError,
)
from trial_orchestrator import TrialRunner

logger = logging.getLogger('DiscretizationVerify')

INF = math.inf
MIN_POINTS_PER_AXIS = 16
_CHUNK_POINTS = 1 << 16
CUBE_MZ_FAMILIES = ('complex', 'positive')


def parse_q(value: Union[str, float]) -> float:
    """q in [1, inf]; 'inf' selects the sup-norm branch"""
    if isinstance(value, str) and value.strip().lower() in ('inf', 'infinity', 'oo'):
        return INF
    q = float(value)
    if math.isnan(q) or q < 1:
        raise DomainError(f"q must lie in [1, inf], got {value}")
    return q


def _q_label(q: float) -> Union[str, float]:
    return 'inf' if q == INF else q


@dataclass
class LqEstimate:
    """Truncated L_q norm over a window, with the analytic tail when one is known"""
    q: float
    value: float
    window: Window
    points_per_axis: int
    tail_bound: Optional[float] = None

    def __post_init__(self):
        if self.value < 0:
            raise DomainError(f"norm estimate must be nonnegative, got {self.value}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'q': _q_label(self.q),
            'value': self.value,
            'window': self.window.to_dict(),
            'points_per_axis': self.points_per_axis,
            'tail_bound': self.tail_bound,
        }


@dataclass
class MZReport:
    """Measured discretization ratios next to their theoretical constants"""
    measured_ratio_upper: Optional[float] = None
    measured_ratio_lower: Optional[float] = None
    theoretical_C1: Optional[float] = None
    theoretical_C2: Optional[float] = None
    theoretical_C3: Optional[float] = None
    params: Dict[str, Any] = field(default_factory=dict)
    holds: bool = True
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ('measured_ratio_upper', 'measured_ratio_lower'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise DomainError(f"{name} must be nonnegative, got {value}")
        if self.theoretical_C3 is not None and not 0 < self.theoretical_C3 <= 1:
            raise DomainError(f"C3 must lie in (0, 1], got {self.theoretical_C3}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def d_exponent(m: int, q: float) -> int:
    """1 for m = 1, else floor(m/q) + 1"""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if m == 1:
        return 1
    return 1 if q == INF else int(math.floor(m / q)) + 1


def _require_finite_q(q: float):
    if not 1 <= q < INF:
        raise DomainError(f"q must lie in [1, inf) here, got {q}")


def _grid_chunks(window: Window, points_per_axis: int):
    """Cell midpoints of a uniform tensor grid on the window, in bounded chunks"""
    m = window.dim
    step = 2.0 * window.half_side / points_per_axis
    axes = [window.lower[j] + step * (np.arange(points_per_axis) + 0.5) for j in range(m)]
    total = points_per_axis ** m
    shape = (points_per_axis,) * m
    for start in range(0, total, _CHUNK_POINTS):
        idx = np.unravel_index(np.arange(start, min(start + _CHUNK_POINTS, total)), shape)
        yield np.stack([axes[j][idx[j]] for j in range(m)], axis=1)


def _tail_for(model: EfetModel, q: float, window: Window) -> Optional[float]:
    reach = window.half_side - float(np.max(np.abs(window.center)))
    if reach <= 0:
        return None
    return model.tail_bound(q, reach)


def lq_norm(model: EfetModel, q: float, window: Window, points_per_axis: int) -> LqEstimate:
    """
    Midpoint-rule estimate of ||f||_{L_q(window)}; the sup over the grid for q = inf.
    Families with a known decay law get the analytic bound on the tail integral.
    """
    if points_per_axis < MIN_POINTS_PER_AXIS:
        raise DomainError(f"points_per_axis must be at least {MIN_POINTS_PER_AXIS}, got {points_per_axis}")
    if window.dim != model.m:
        raise DomainError(f"window dimension {window.dim} does not match model dimension {model.m}")
    if not model.lq_finite(q) and not (isinstance(model, ExpPolynomial) and model.N == 0):
        raise NormDivergesError(f"norm diverges: {model.kind} is not in L_{_q_label(q)}")

    if q == INF:
        value = max(float(np.abs(model.evaluate(chunk)).max())
                    for chunk in _grid_chunks(window, points_per_axis))
        return LqEstimate(q, value, window, points_per_axis)

    cell = (2.0 * window.half_side / points_per_axis) ** model.m
    partial = [float(np.sum(np.abs(model.evaluate(chunk)) ** q))
               for chunk in _grid_chunks(window, points_per_axis)]
    value = (math.fsum(partial) * cell) ** (1.0 / q)
    tail = _tail_for(model, q, window)
    logger.debug(f"L_{q} norm of {model.kind} on half side {window.half_side}: {value:.10g} (tail {tail})")
    return LqEstimate(q, value, window, points_per_axis, tail)


def sample_sum(model: EfetModel, net: PointSet, q: float) -> float:
    """(sum |f(X_nu)|^q)^(1/q), summed in descending magnitude; the max for q = inf"""
    if len(net) == 0:
        raise InsufficientPointsError("insufficient points: the net is empty")
    magnitudes = np.abs(model.evaluate(net.points))
    if q == INF:
        return float(magnitudes.max())
    terms = np.sort(magnitudes ** q)[::-1]
    return math.fsum(terms.tolist()) ** (1.0 / q)


def c1_bound(delta1: float, sigma: float, m: int, q: float, n_mult: int, c_mq: float) -> float:
    """(delta1/2)^(-m/q) (N+1)^(1/q) (1 + C(m,q) max{delta1 sigma, (delta1 sigma)^d})"""
    _require_finite_q(q)
    d = d_exponent(m, q)
    ds = delta1 * sigma
    return (delta1 / 2.0) ** (-m / q) * (n_mult + 1) ** (1.0 / q) * (1.0 + c_mq * max(ds, ds ** d))


def c2_bound(delta: float, sigma: float, m: int, q: float, c_mq: float) -> float:
    """(4 delta)^(-m/q) 2^(1/q-1) (1 - C(m,q) max{(delta sigma)^q, (delta sigma)^(dq)})^(1/q)"""
    _require_finite_q(q)
    d = d_exponent(m, q)
    ds = delta * sigma
    inner = 1.0 - c_mq * max(ds ** q, ds ** (d * q))
    if inner <= 0:
        raise DeltaSigmaTooLargeError(
            f"delta*sigma too large: 1 - C(m,q) max{{...}} = {inner:.6g} is not positive"
        )
    return (4.0 * delta) ** (-m / q) * 2.0 ** (1.0 / q - 1.0) * inner ** (1.0 / q)


def delta_star(delta1: float, sigma: float, m: int, q: float, n_mult: int, c2: float,
               c_mq: float) -> float:
    """max{delta1, (C/sigma) ((N+1)/(delta1^m C2^q))^(1/(gamma q - m))}, gamma = floor(m/q)+1"""
    _require_finite_q(q)
    gamma = int(math.floor(m / q)) + 1
    second = (c_mq / sigma) * ((n_mult + 1) / (delta1 ** m * c2 ** q)) ** (1.0 / (gamma * q - m))
    return max(delta1, second)


def _resolve_c_mq(c_mq: Optional[float]) -> float:
    return mz_settings.DEFAULT_C_MQ if c_mq is None else float(c_mq)


def _uniform_grid_sup(model: EfetModel, window: Window,
                      resolution: int) -> Tuple[float, np.ndarray, float]:
    """Max |f| over the (resolution)^m node grid with endpoints, its node, and the grid step"""
    m = window.dim
    axes = [np.linspace(window.lower[j], window.upper[j], resolution) for j in range(m)]
    shape = (resolution,) * m
    best, best_node = 0.0, np.asarray(window.center, dtype=float)
    for start in range(0, resolution ** m, _CHUNK_POINTS):
        idx = np.unravel_index(np.arange(start, min(start + _CHUNK_POINTS, resolution ** m)), shape)
        pts = np.stack([axes[j][idx[j]] for j in range(m)], axis=1)
        values = np.abs(model.evaluate(pts))
        i = int(np.argmax(values))
        if values[i] > best:
            best, best_node = float(values[i]), pts[i]
    return best, best_node, 2.0 * window.half_side / (resolution - 1)


def _refine_sup(model: EfetModel, window: Window, start: np.ndarray, grid_sup: float) -> float:
    """Local L-BFGS-B ascent of |f| inside the window from the best grid node"""
    bounds = list(zip(window.lower, window.upper))
    objective = lambda y: -float(np.abs(model.evaluate(y[None, :]))[0])
    result = minimize(objective, np.asarray(start, dtype=float), method='L-BFGS-B', bounds=bounds)
    return max(grid_sup, -float(result.fun))


def verify_sup_inequality(model: EfetModel, net: PointSet, delta: float, sigma: float, m: int,
                          reference_window: Window, resolution: Optional[int] = None,
                          max_depth: Optional[int] = None) -> MZReport:
    """
    sup over the net >= (1 - m delta sigma) sup over the window, for a delta-covering
    net with 11 m^(3/2) delta sigma <= 1. The reference sup comes from a uniform grid,
    refined locally from its best node; the resolution slack is m sigma (step/2) times
    the refined sup.
    """
    if 11.0 * m ** 1.5 * delta * sigma > 1.0:
        raise HypothesisViolatedError(
            f"hypothesis violated: 11 m^(3/2) delta sigma = {11.0 * m ** 1.5 * delta * sigma:.6g} exceeds 1"
        )
    coverage = covering_check(net, delta, reference_window, max_depth)
    if not coverage.covered:
        raise NotCoveringError(f"net not delta-covering: covering check returned {coverage.state}")

    resolution = resolution or max(MIN_POINTS_PER_AXIS, int(math.ceil(2.0 * reference_window.half_side * sigma * 200)) + 1)
    net_sup = sample_sum(model, net, INF)
    grid_sup, best_node, step = _uniform_grid_sup(model, reference_window, resolution)
    reference_sup = _refine_sup(model, reference_window, best_node, grid_sup)
    slack = m * sigma * (step / 2.0) * reference_sup
    c3 = 1.0 - m * delta * sigma
    holds = net_sup >= c3 * reference_sup - slack
    if not holds:
        logger.warning(f"Sup inequality failed: net sup {net_sup:.6g} < {c3:.6g} * {reference_sup:.6g} - {slack:.3g}")
    else:
        logger.info(f"Sup inequality holds: net/reference = {net_sup / reference_sup:.6f} >= C3 = {c3:.6f}")

    return MZReport(
        measured_ratio_lower=net_sup / reference_sup if reference_sup > 0 else 1.0,
        theoretical_C3=c3,
        params={'delta': delta, 'sigma': sigma, 'm': m, 'q': 'inf', 'model': model.kind},
        holds=holds,
        details={'net_sup': net_sup, 'grid_sup': grid_sup, 'reference_sup': reference_sup,
                 'slack': slack, 'resolution': resolution,
                 'window': reference_window.to_dict(), 'coverage': coverage.to_dict()},
    )


def _model_norm(model: EfetModel, q: float, centers: PointSet) -> float:
    window = Window.around(centers, margin=max(1.0, 10.0 / model.efet_type()))
    return lq_norm(model, q, window, max(256, int(2.0 * window.half_side * model.efet_type() * 8))).value


def perturbation_check(model: EfetModel, centers: PointSet, h: float, q: float,
                       rng: Union[int, np.random.Generator, None] = None,
                       norm: Optional[float] = None,
                       targets: Optional[PointSet] = None) -> float:
    """
    |S(X) - S(Y)| / (h^(-m/q) max{h sigma, (h sigma)^d} ||f||_q), where S is the sample
    sum and Y_nu is drawn uniformly in the cube Q_h(X_nu) unless ``targets`` is given.
    """
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    if not cubes_have_disjoint_interiors(centers, h):
        raise NotDisjointError(f"cubes of half side {h} around the centers are not disjoint")
    if not model.lq_finite(q):
        raise NormDivergesError(f"norm diverges: {model.kind} is not in L_{_q_label(q)}")

    if targets is None:
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        moved = centers.points + gen.uniform(-h, h, size=centers.points.shape)
        targets = PointSet(centers.dim, moved)
    elif np.any(np.abs(targets.points - centers.points) > h):
        raise DomainError("every target must lie in the closed cube of half side h around its center")

    sigma = model.efet_type()
    m = centers.dim
    d = d_exponent(m, q)
    norm = norm if norm is not None else _model_norm(model, q, centers)
    scale = (1.0 if q == INF else h ** (-m / q)) * max(h * sigma, (h * sigma) ** d) * norm
    gap = abs(sample_sum(model, centers, q) - sample_sum(model, targets, q))
    return gap / scale


def perturbation_sweep(model: EfetModel, centers: PointSet, h_list: Sequence[float], q: float,
                       seeds: int, seed: int = 0, norm: Optional[float] = None,
                       runner: Optional[TrialRunner] = None) -> List[Dict[str, Any]]:
    """One row (h, trial, value) per step size and seed, trials run concurrently"""
    runner = runner or TrialRunner()
    norm = norm if norm is not None else _model_norm(model, q, centers)

    def handler(input_data: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        return {'value': perturbation_check(model, centers, input_data['h'], q, rng, norm)}

    runner.register_trial_handler('perturbation', handler)
    rows = []
    for h in h_list:
        results = runner.run('perturbation', {'h': float(h)}, seeds, seed)
        rows.extend({'h': float(h), 'trial': i, 'value': r['value']} for i, r in enumerate(results))
    logger.info(f"Perturbation sweep: {len(rows)} rows, max normalised value "
                f"{max(r['value'] for r in rows):.4g}")
    return rows


def necessity_witness(net: PointSet, delta: float, sigma: float, C3: float,
                      window: Optional[Window] = None,
                      max_depth: Optional[int] = None) -> Optional[Tuple[ShiftedSinc, float]]:
    """
    A net that leaves a point y at sup-distance >= delta from every node, with
    delta > 1/(C3 sigma), cannot satisfy the sup inequality with constant C3: the
    shifted sinc at y has sup sigma, but at most 1/delta on the net.
    Returns (model, sup_net |f_y| / sigma), or None when the window is covered.
    """
    if not 0 < C3 <= 1:
        raise DomainError(f"C3 must lie in (0, 1], got {C3}")
    if not delta > 1.0 / (C3 * sigma):
        raise HypothesisViolatedError(
            f"hypothesis violated: delta={delta} must exceed 1/(C3 sigma)={1.0 / (C3 * sigma):.6g}"
        )
    window = window or Window.around(net)
    coverage: CoverageReport = covering_check(net, delta, window, max_depth)
    if coverage.state != UNCOVERED:
        logger.info(f"No necessity witness: covering check returned {coverage.state}")
        return None

    witness = ShiftedSinc(sigma, np.asarray(coverage.witness))
    ratio = sample_sum(witness, net, INF) / sigma
    logger.info(f"Necessity witness at {coverage.witness}: net ratio {ratio:.6g} < C3 = {C3}")
    return witness, ratio


def _exp_poly_sup(E: Union[ExpPolynomial, PositiveMeasureExp], b: float, count: int,
                  refine: int = 4) -> float:
    """max |E| over a tensor Lobatto grid of Q^m_b, then local refinement from the best nodes"""
    axis = lobatto_nodes(-b, b, count)
    values = np.abs(E.grid_values([axis] * E.m))
    best = float(values.max())
    bounds = [(-b, b)] * E.m
    objective = lambda y: -float(np.abs(E.evaluate(y[None, :]))[0])
    for flat in np.argsort(values, axis=None)[::-1][:refine]:
        start = np.array([axis[i] for i in np.unravel_index(flat, values.shape)])
        result = minimize(objective, start, method='L-BFGS-B', bounds=bounds)
        best = max(best, -float(result.fun))
    return best


def _draw_exp_polynomial(m: int, N: int, family: str,
                         rng: np.random.Generator) -> Union[ExpPolynomial, PositiveMeasureExp]:
    """Complex coefficients on {0..N}^m, or a positive discrete measure with nodes in Q^m_N"""
    if family == 'positive':
        return random_positive_measure(m, float(N), (N + 1) ** m, rng)
    return random_exp_polynomial(m, N, rng)


def cube_mz_experiment(N: int, b: float, m: int, gamma_slack: float, grid_factor: int,
                       trials: int, seed: int, family: str = 'complex',
                       runner: Optional[TrialRunner] = None) -> Dict[str, Any]:
    """
    Random exponential polynomials of degree N per axis against a tensor knot set of
    (cN+1) Lobatto points per axis on Q^m_b. Records ||E||/max_knots |E| per trial;
    the reference sup uses a 64N-interval Lobatto grid that contains every knot set.
    The positive family draws discrete positive measures, whose growth constant D_n is 1.
    """
    if not 1 <= N <= 8:
        raise DomainError(f"N must lie in 1..8, got {N}")
    if not 1 <= m <= 2:
        raise DomainError(f"m must be 1 or 2, got {m}")
    if grid_factor < 2:
        raise DomainError(f"grid factor must be at least 2, got {grid_factor}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    if family not in CUBE_MZ_FAMILIES:
        raise DomainError(f"unknown family: {family}; expected one of {', '.join(CUBE_MZ_FAMILIES)}")

    knots_per_axis = grid_factor * N + 1
    knot_axis = lobatto_nodes(-b, b, knots_per_axis)
    runner = runner or TrialRunner()

    def handler(input_data: Dict[str, Any], rng: np.random.Generator) -> Dict[str, Any]:
        E = _draw_exp_polynomial(m, N, family, rng)
        knot_max = float(np.abs(E.grid_values([knot_axis] * m)).max())
        reference = max(_exp_poly_sup(E, b, 64 * N + 1), knot_max)
        return {'factor': reference / knot_max, 'reference_sup': reference, 'knot_max': knot_max}

    runner.register_trial_handler('cube_mz', handler)
    results = runner.run('cube_mz', {'N': N, 'b': b, 'm': m, 'family': family}, trials, seed)
    factors = [r['factor'] for r in results]
    max_factor = max(factors)
    holds = max_factor <= 1.0 + gamma_slack
    if not holds:
        logger.warning(f"Cube MZ factor {max_factor:.6f} exceeds 1 + gamma = {1.0 + gamma_slack}")
    logger.info(f"Cube MZ experiment N={N}, m={m}, c={grid_factor}: max factor {max_factor:.6f}")

    return {
        'N': N, 'b': b, 'm': m, 'grid_factor': grid_factor, 'gamma': gamma_slack,
        'family': family, 'trials': trials, 'seed': seed,
        'knots_per_axis': knots_per_axis, 'knot_count': knots_per_axis ** m,
        'max_factor': max_factor, 'mean_factor': float(np.mean(factors)), 'factors': factors,
        'holds': holds,
        'D_n': 1.0 if family == 'positive' else math.exp(coeff_sum_bound_exp(N, m, b)),
        'tau0': tau0(b),
    }


def exp_poly_global_certificate(E: ExpPolynomial, b: float, tau: Optional[float] = None,
                                samples: int = 500, seed: int = 0) -> Dict[str, Any]:
    """
    |E(w)| <= D ||E||_{Q^m_b} exp(N sum |w_j|) with D = coth(b/4)^(mN), checked on
    real points sampled from Q^m_{2b}. With tau, also n(N) = ceil(N m b tau) and
    D e^(n psi(tau)).
    """
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    D = math.exp(coeff_sum_bound_exp(E.N, E.m, b))
    cube_sup = _exp_poly_sup(E, b, 64 * max(E.N, 1) + 1)

    rng = np.random.default_rng(seed)
    w = rng.uniform(-2.0 * b, 2.0 * b, size=(samples, E.m))
    bound = D * cube_sup * np.exp(E.N * np.abs(w).sum(axis=1))
    values = np.abs(E.evaluate(w))
    holds = bool(np.all(values <= bound * (1.0 + 1e-12)))
    if not holds:
        logger.warning(f"Global certificate exceeded at {int(np.sum(values > bound))} sample(s)")

    result = {'D': D, 'sigma_eff': float(E.N), 'cube_sup': cube_sup, 'holds': holds,
              'max_ratio': float(np.max(values / bound)), 'b': b}
    if tau is not None:
        n = int(math.ceil(E.N * E.m * b * tau))
        result.update({'tau': tau, 'n': n, 'rate_bound': D * math.exp(n * psi(tau))})
    return result


def upper_mz_experiment(model: EfetModel, net: PointSet, delta1: float, sigma: float, m: int,
                        q: float, c_mq: Optional[float] = None, window: Optional[Window] = None,
                        points_per_axis: Optional[int] = None) -> MZReport:
    """
    Measured sample_sum/||f||_q against (delta1/2)^(-m/q)(N+1)^(1/q), the structural
    part of C1, allowed a relative slack C(m,q) max{delta1 sigma, (delta1 sigma)^d}.
    """
    _require_finite_q(q)
    c_mq = _resolve_c_mq(c_mq)
    window = window or Window.around(net, margin=1.0)
    ppa = points_per_axis or max(MIN_POINTS_PER_AXIS, int(2.0 * window.half_side * sigma * 16))
    norm = lq_norm(model, q, window, ppa)
    n_mult = packing_multiplicity(net, delta1)
    measured = sample_sum(model, net, q) / norm.value

    prediction = (delta1 / 2.0) ** (-m / q) * (n_mult + 1) ** (1.0 / q)
    c1 = c1_bound(delta1, sigma, m, q, n_mult, c_mq)
    holds = measured <= c1
    if not holds:
        logger.warning(f"Upper ratio {measured:.6g} exceeds C1 = {c1:.6g}")

    return MZReport(
        measured_ratio_upper=measured,
        theoretical_C1=c1,
        params={'delta1': delta1, 'sigma': sigma, 'm': m, 'q': q, 'N': n_mult, 'C_mq': c_mq,
                'model': model.kind},
        holds=holds,
        details={'prediction': prediction, 'norm': norm.to_dict(), 'net_size': len(net)},
    )


def lower_mz_experiment(model: EfetModel, net: PointSet, delta: float, sigma: float, m: int,
                        q: float, c_mq: Optional[float] = None, window: Optional[Window] = None,
                        points_per_axis: Optional[int] = None,
                        cover_window: Optional[Window] = None) -> MZReport:
    """Measured sample_sum/||f||_q against C2 for a delta-covering net"""
    _require_finite_q(q)
    c_mq = _resolve_c_mq(c_mq)
    c2 = c2_bound(delta, sigma, m, q, c_mq)
    coverage = covering_check(net, delta, cover_window or Window.around(net))
    if not coverage.covered:
        raise NotCoveringError(f"net not delta-covering: covering check returned {coverage.state}")

    window = window or Window.around(net, margin=1.0)
    ppa = points_per_axis or max(MIN_POINTS_PER_AXIS, int(2.0 * window.half_side * sigma * 16))
    norm = lq_norm(model, q, window, ppa)
    measured = sample_sum(model, net, q) / norm.value
    holds = measured >= c2
    if not holds:
        logger.warning(f"Lower ratio {measured:.6g} falls below C2 = {c2:.6g}")

    return MZReport(
        measured_ratio_lower=measured,
        theoretical_C2=c2,
        params={'delta': delta, 'sigma': sigma, 'm': m, 'q': q, 'C_mq': c_mq, 'model': model.kind},
        holds=holds,
        details={'norm': norm.to_dict(), 'coverage': coverage.to_dict(), 'net_size': len(net)},
    )


def thinned_net_constants(net: PointSet, delta: float, sigma: float, m: int, q: float,
                          c_mq: Optional[float] = None,
                          window: Optional[Window] = None) -> Dict[str, Any]:
    """
    Thin a delta-covering net at delta. The result is a delta-packing with
    multiplicity 0 and a 2 delta-covering, so it carries C1(delta, sigma, m, q, 0)
    and C2(2 delta, sigma, m, q).
    """
    c_mq = _resolve_c_mq(c_mq)
    thinned = greedy_thin(net, delta)
    separation = min_pairwise_separation(thinned) if len(thinned) > 1 else INF
    n_mult = packing_multiplicity(thinned, delta)
    coverage = covering_check(thinned, 2.0 * delta, window or Window.around(net))
    return {
        'points_in': len(net),
        'points_out': len(thinned),
        'separation': separation,
        'multiplicity': n_mult,
        'C1': c1_bound(delta, sigma, m, q, n_mult, c_mq),
        'C2': c2_bound(2.0 * delta, sigma, m, q, c_mq),
        'coverage': coverage.to_dict(),
        'net': thinned,
    }


def mz_report_rows(report: MZReport) -> List[Dict[str, Any]]:
    """param,measured,theoretical rows for CSV sweeps"""
    rows = []
    for name, measured, theoretical in (
        ('upper_ratio', report.measured_ratio_upper, report.theoretical_C1),
        ('lower_ratio', report.measured_ratio_lower,
         report.theoretical_C2 if report.theoretical_C2 is not None else report.theoretical_C3),
    ):
        if measured is not None or theoretical is not None:
            rows.append({'param': name, 'measured': measured, 'theoretical': theoretical})
    for key, value in report.params.items():
        rows.append({'param': key, 'measured': value, 'theoretical': None})
    return rows
