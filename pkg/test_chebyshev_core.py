#!/usr/bin/env python3
"""
Test Chebyshev growth bounds and rate-function roots
"""

import math

import numpy as np
import pytest
from mpmath import mp
from numpy.polynomial import polynomial as P

from chebyshev_core import (
    SignedLog, cheb_T, cheb_growth_bound, cheb_deriv, outside_bound_tensor,
    coeff_sum_bound_interval, coeff_sum_bound_exp, psi, gamma0, alpha_of, tau0,
    G_function, estimate_sup_norm, body_width, growth_bound_outside, lobatto_nodes,
)
from mz_errors import DomainError

TOL = 1e-9


def _polyval_nd(coeffs, pts):
    if coeffs.ndim == 1:
        return P.polyval(pts[:, 0], coeffs)
    if coeffs.ndim == 2:
        return P.polyval2d(pts[:, 0], pts[:, 1], coeffs)
    return P.polyval3d(pts[:, 0], pts[:, 1], pts[:, 2], coeffs)


def _sup(coeffs, lower, upper, nodes=48):
    return estimate_sup_norm(lambda pts: _polyval_nd(coeffs, pts), lower, upper,
                             nodes_per_axis=nodes, refine=4)


def test_signed_log_value():
    """Sign and magnitude recombine"""
    assert SignedLog.from_value(-3.5).value == pytest.approx(-3.5)
    assert SignedLog.from_value(0.0).value == 0.0


@pytest.mark.parametrize("n", [0, 1, 5, 17, 60])
def test_T_at_one(n):
    """T_n(1) = 1"""
    assert cheb_T(n, 1.0).value == pytest.approx(1.0)


def test_T3_at_two():
    """T_3(2) = 4*8 - 3*2"""
    t = cheb_T(3, 2.0)
    assert t.sign == 1
    assert t.value == pytest.approx(26.0, rel=1e-14)
    assert cheb_T(3, -2.0).value == pytest.approx(-26.0, rel=1e-14)


def test_T50_against_extended_precision():
    """Closed form at u = 1.01 against an mpmath three-term recurrence"""
    with mp.workdps(60):
        u = mp.mpf(1.01)
        a, b = mp.mpf(1), u
        for _ in range(49):
            a, b = b, 2 * u * b - a
        oracle = float(b)
    assert cheb_T(50, 1.01).value == pytest.approx(oracle, rel=1e-10)


def test_cos_form_consistency():
    """cheb_T(n, cos theta) = cos(n theta) for n <= 100"""
    thetas = np.linspace(0.0, np.pi, 41)
    for n in range(101):
        for th in thetas:
            assert abs(cheb_T(n, math.cos(th)).value - math.cos(n * th)) < 1e-10


def test_growth_bound_examples():
    """Equality at n=1, u=1 and 26 <= 32 at n=3, u=2"""
    assert cheb_growth_bound(1, 1.0) == pytest.approx(0.0)
    assert cheb_T(3, 2.0).log_abs <= cheb_growth_bound(3, 2.0)
    with pytest.raises(DomainError):
        cheb_growth_bound(3, 0.5)


def test_growth_bound_random():
    """T_n(u) <= 2^(n-1) u^n in log space"""
    rng = np.random.default_rng(1)
    for _ in range(500):
        n = int(rng.integers(1, 61))
        u = float(rng.uniform(1.0, 10.0))
        assert cheb_T(n, u).log_abs <= cheb_growth_bound(n, u) + TOL


@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_derivative_at_one_is_n_squared(n):
    """T_n'(1) = n^2"""
    assert cheb_deriv(n, 1, 1.0) == pytest.approx(n * n, rel=1e-12)


def test_derivative_order_zero_and_exhausted():
    """l = 0 agrees with cheb_T; l > n gives 0"""
    for n in range(12):
        for u in (-0.7, 0.3, 1.5, -2.5):
            assert cheb_deriv(n, 0, u) == pytest.approx(cheb_T(n, u).value, rel=1e-12, abs=1e-12)
    assert cheb_deriv(3, 4, 2.0) == 0.0


def test_derivative_finite_difference():
    """Central differences of order l-1 match order l at u = 1.5"""
    h = 1e-5
    for n in range(1, 11):
        for l in range(1, min(3, n) + 1):
            fd = (cheb_deriv(n, l - 1, 1.5 + h) - cheb_deriv(n, l - 1, 1.5 - h)) / (2 * h)
            assert fd == pytest.approx(cheb_deriv(n, l, 1.5), rel=1e-6)


def test_outside_factor_reduces_to_T():
    """m=1, k=0, x=2*lambda gives |T_n(2)|"""
    assert outside_bound_tensor(5, [0], [3.0], 1.5) == pytest.approx(cheb_T(5, 2.0).log_abs)
    with pytest.raises(DomainError):
        outside_bound_tensor(5, [0, 0], [3.0, 1.0], 1.5)


def test_univariate_derivative_bound_random():
    """|P^(l)(u)| <= b^-l |T_n^(l)(u/b)| ||P|| outside [-b, b]"""
    rng = np.random.default_rng(23)
    for _ in range(200):
        n = int(rng.integers(1, 11))
        b = float(rng.uniform(0.5, 2.0))
        c = rng.normal(size=n + 1)
        norm = _sup(c, [-b], [b], nodes=128)
        l = int(rng.integers(0, n + 1))
        u = float(rng.choice([-1, 1]) * rng.uniform(1.01, 3.0) * b)
        lhs = abs(P.polyval(u, P.polyder(c, l)))
        rhs = b ** (-l) * abs(cheb_deriv(n, l, u / b)) * norm
        assert lhs <= rhs * (1 + TOL)


def test_tensor_derivative_bound_random():
    """|D^k P(x)| <= lambda^-<k> prod |T_n^(k_j)(x_j/lambda)| ||P|| outside the cube"""
    rng = np.random.default_rng(29)
    for _ in range(200):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 7))
        lam = float(rng.uniform(0.5, 2.0))
        c = rng.normal(size=(n + 1,) * m)
        norm = _sup(c, [-lam] * m, [lam] * m, nodes=48 if m < 3 else 24)
        k = rng.integers(0, n + 1, size=m)
        x = rng.choice([-1, 1], size=m) * rng.uniform(1.01, 2.5, size=m) * lam
        dc = c
        for axis, order in enumerate(k):
            dc = P.polyder(dc, int(order), axis=axis)
        lhs = abs(_polyval_nd(dc, x[None, :])[0])
        rhs = math.exp(outside_bound_tensor(n, k, x, lam)) * norm
        assert lhs <= rhs * (1 + TOL)


def test_tensor_chebyshev_product_is_extremal():
    """Equality for P = prod T_n(x_j/lambda)"""
    n, lam = 4, 1.5
    t = np.zeros(n + 1)
    t[n] = 1.0
    mono = np.polynomial.chebyshev.cheb2poly(t) * (1.0 / lam) ** np.arange(n + 1)
    c = np.multiply.outer(mono, mono)
    norm = _sup(c, [-lam, -lam], [lam, lam])
    assert norm == pytest.approx(1.0, rel=1e-9)
    x = np.array([2.0, -3.0])
    k = [1, 2]
    dc = P.polyder(P.polyder(c, 1, axis=0), 2, axis=1)
    lhs = abs(_polyval_nd(dc, x[None, :])[0])
    assert lhs == pytest.approx(math.exp(outside_bound_tensor(n, k, x, lam)) * norm, rel=1e-8)


def test_growth_outside_cube_random():
    """|P(x)| <= T_n(2|x|/w(V)) ||P|| outside the unit cube"""
    rng = np.random.default_rng(31)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        c = rng.normal(size=(n + 1, n + 1))
        c[np.add.outer(np.arange(n + 1), np.arange(n + 1)) > n] = 0.0
        norm = _sup(c, [-1, -1], [1, 1])
        x = rng.uniform(-3, 3, size=2)
        if np.max(np.abs(x)) <= 1:
            continue
        lhs = abs(_polyval_nd(c, x[None, :])[0])
        assert lhs <= math.exp(growth_bound_outside(n, x, 'cube', 1.0)) * norm * (1 + TOL)


def test_body_widths():
    """Cube, octahedron and ball widths"""
    assert body_width('cube', 1.5, 3) == 3.0
    assert body_width('octahedron', 2.0, 4) == pytest.approx(2.0 / (2.0 * 2.0))
    assert body_width('ball', 1.0, 2) == 2.0
    with pytest.raises(DomainError):
        growth_bound_outside(3, [0.1, 0.1], 'octahedron', 1.0)


def test_interval_coefficient_bound_examples():
    """n=0 is an equality; m=1, n=1 on [1,3] gives factor 3"""
    assert coeff_sum_bound_interval(0, 2, 1.0, 3.0) == 0.0
    assert math.exp(coeff_sum_bound_interval(1, 1, 1.0, 3.0)) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        coeff_sum_bound_interval(2, 1, 0.0, 1.0)


def test_interval_coefficient_bound_random():
    """Sum of |monomial coefficients| <= T_n((B+A+2)/(B-A))^m ||U||"""
    rng = np.random.default_rng(37)
    for _ in range(200):
        m = int(rng.integers(1, 3))
        n = int(rng.integers(0, 6))
        A = float(rng.uniform(0.1, 2.0))
        B = A + float(rng.uniform(0.2, 3.0))
        c = rng.normal(size=(n + 1,) * m)
        norm = _sup(c, [A] * m, [B] * m)
        assert np.abs(c).sum() <= math.exp(coeff_sum_bound_interval(n, m, A, B)) * norm * (1 + TOL)


def test_exp_coefficient_bound_examples():
    """n=0 gives factor 1; b=4, n=1 gives coth(1)"""
    assert coeff_sum_bound_exp(0, 3, 2.0) == 0.0
    assert math.exp(coeff_sum_bound_exp(1, 1, 4.0)) == pytest.approx(1.313035, abs=1e-6)


def test_exp_coefficient_bound_random():
    """Sum of |coefficients| <= coth(b/4)^(mn) ||U|| on [e^-b, e^b]^m"""
    rng = np.random.default_rng(41)
    for _ in range(200):
        m = int(rng.integers(1, 3))
        n = int(rng.integers(0, 6))
        b = float(rng.uniform(0.3, 2.0))
        c = rng.normal(size=(n + 1,) * m)
        norm = _sup(c, [math.exp(-b)] * m, [math.exp(b)] * m)
        assert np.abs(c).sum() <= math.exp(coeff_sum_bound_exp(n, m, b)) * norm * (1 + TOL)


def test_psi_values():
    """psi(1) and psi(2) by arithmetic"""
    assert psi(1.0) == pytest.approx(0.532839, abs=1e-6)
    assert psi(2.0) == pytest.approx(-0.325601, abs=1e-6)
    assert psi(2.0, 3.0) == pytest.approx(psi(2.0) + math.log(3.0))


def test_psi_strictly_decreasing():
    """psi is decreasing in tau and negative past its root"""
    taus = np.linspace(0.1, 20, 400)
    values = [psi(t) for t in taus]
    assert all(a > b for a, b in zip(values, values[1:]))
    g = gamma0(1.0)
    assert psi(g + 0.01) < 0 < psi(g - 0.01)


@pytest.mark.parametrize("alpha, expected", [
    (1.0, 1.5088),
    (1.0 + math.sqrt(2.0), 3.3541),
    (alpha_of('square').alpha, 3.9896),
])
def test_gamma0_targets(alpha, expected):
    """Published roots of psi + log alpha"""
    assert gamma0(alpha) == pytest.approx(expected, abs=5e-4)


def test_gamma0_increasing_in_alpha():
    """Larger compacts need a larger oversampling ratio"""
    roots = [gamma0(a) for a in (1.0, 1.5, 2.0, 3.0)]
    assert roots == sorted(roots)


def test_alpha_of_kinds():
    """Closed forms of alpha(K)"""
    assert alpha_of('interval').alpha == 1.0
    assert alpha_of('disk', 1.0).alpha == pytest.approx(2.4142, abs=1e-4)
    assert alpha_of('square').alpha == pytest.approx(2.8900, abs=1e-4)
    assert alpha_of('ellipse', 1.7).alpha == 1.7
    with pytest.raises(DomainError):
        alpha_of('triangle')


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_tau0_root(b):
    """Root residual and location past gamma0"""
    t = tau0(b)
    assert abs(G_function(t, b)) < 1e-9
    assert t > gamma0(1.0)
    taus = np.linspace(0.2, 3 * t, 200)
    values = [G_function(x, b) for x in taus]
    assert all(a > c for a, c in zip(values, values[1:]))


def test_lobatto_nodes_include_endpoints():
    """Extrema grid is ascending and closed"""
    nodes = lobatto_nodes(-2.0, 3.0, 9)
    assert nodes[0] == pytest.approx(-2.0)
    assert nodes[-1] == pytest.approx(3.0)
    assert np.all(np.diff(nodes) > 0)
