#!/usr/bin/env python3
"""
Test sup-norm nets
Covering, packing, thinning and partition checks against brute-force oracles
"""

import itertools

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from geometry_nets import (
    COVERED, UNCOVERED, EPS_STRICT,
    PointSet, Window, CoverageReport,
    min_pairwise_separation, packing_multiplicity, covering_check, greedy_thin,
    intersection_bound, intersection_counts, disjoint_partition,
    cubes_have_disjoint_interiors, lattice_net, remove_within,
)
from mz_errors import (
    DomainError, HypothesisViolatedError, InsufficientPointsError,
    MultiplicityExceededError, PointBudgetExceededError,
)


def _brute_separation(points):
    best = np.inf
    for i, j in itertools.combinations(range(len(points)), 2):
        best = min(best, np.max(np.abs(points[i] - points[j])))
    return best


def test_point_set_rejects_bad_rows():
    """Wrong arity and non-finite coordinates are refused"""
    with pytest.raises(DomainError):
        PointSet(2, np.array([[0.0, 1.0, 2.0]]))
    with pytest.raises(DomainError):
        PointSet(1, np.array([[np.nan]]))


def test_csv_round_trip_keeps_points(tmp_path):
    """Headerless CSV written and read back gives the same points"""
    ps = PointSet.from_points([[0.1, -2.0], [1.0 / 3.0, 4.5]])
    path = tmp_path / "pts.csv"
    path.write_text(ps.to_csv())
    assert path.read_text().splitlines()[0].count(",") == 1
    back = PointSet.from_csv(str(path))
    assert back.dim == 2
    np.testing.assert_array_equal(back.points, ps.points)


@pytest.mark.parametrize("points, expected", [
    ([0.0, 1.0, 3.0], 1.0),
    ([[0.0, 0.0], [2.0, 0.5]], 2.0),
])
def test_min_pairwise_separation_examples(points, expected):
    """Minimum sup distance over distinct pairs"""
    assert min_pairwise_separation(PointSet.from_points(points)) == expected


def test_min_pairwise_separation_matches_brute_force():
    """Chunked scan agrees with the O(n^2) oracle"""
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1, 1, size=(100, 3))
    assert min_pairwise_separation(PointSet(3, pts)) == pytest.approx(_brute_separation(pts), abs=0)


def test_min_pairwise_separation_needs_two_points():
    """A single point has no separation"""
    with pytest.raises(InsufficientPointsError):
        min_pairwise_separation(PointSet.from_points([0.0]))


@pytest.mark.parametrize("points, delta1, expected", [
    ([0.0, 1.0, 2.0], 1.0, 0),
    ([0.0, 0.1, 0.2], 1.0, 2),
])
def test_packing_multiplicity_examples(points, delta1, expected):
    """Count of extra points inside the open cube of half side delta1/2"""
    assert packing_multiplicity(PointSet.from_points(points), delta1) == expected


def test_packing_multiplicity_empty_set_is_zero():
    """Empty set convention"""
    assert packing_multiplicity(PointSet(2, np.empty((0, 2))), 1.0) == 0


def test_packing_multiplicity_matches_clustered_oracle():
    """Clustered sets agree with a per-center count"""
    rng = np.random.default_rng(11)
    centers = rng.uniform(-3, 3, size=(8, 2))
    pts = np.concatenate([c + rng.normal(scale=0.1, size=(6, 2)) for c in centers])
    delta1 = 0.4
    d = cdist(pts, pts, metric='chebyshev')
    oracle = int(np.max(np.sum(d < delta1 / 2 * (1 - EPS_STRICT), axis=1))) - 1
    assert packing_multiplicity(PointSet(2, pts), delta1) == oracle


def test_zero_multiplicity_iff_half_separation():
    """Multiplicity 0 exactly when separation reaches delta1/2"""
    rng = np.random.default_rng(3)
    for _ in range(50):
        ps = PointSet(2, rng.uniform(-1, 1, size=(12, 2)))
        d1 = rng.uniform(0.05, 0.8)
        sep = min_pairwise_separation(ps)
        assert (packing_multiplicity(ps, d1) == 0) == (sep >= d1 / 2 * (1 - EPS_STRICT))


def test_lattice_below_two_delta_covers_window():
    """Spacing 2*delta*(1-1e-6) is a delta-covering"""
    delta = 0.25
    w = Window.cube(2, 1.0)
    net = lattice_net(2, 2 * delta * (1 - 1e-6), Window.cube(2, 1.0 + delta))
    report = covering_check(net, delta, w)
    assert report.state == COVERED
    assert report.witness is None


def test_lattice_at_two_delta_misses_half_delta():
    """Cell centres of 2*delta*Z^m are a distance delta from the lattice"""
    delta = 0.25
    w = Window.cube(2, 1.0)
    net = lattice_net(2, 2 * delta, Window.cube(2, 1.0 + delta))
    report = covering_check(net, delta / 2, w)
    assert report.state == UNCOVERED
    witness = np.array(report.witness)
    assert w.contains(witness)[0]
    assert np.max(np.abs(net.points - witness), axis=1).min() >= delta / 2 * (1 - EPS_STRICT)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_covering_check_agrees_with_dense_grid(seed):
    """Verdicts agree with a membership oracle on a grid of step delta/100"""
    rng = np.random.default_rng(seed)
    delta = 0.3
    w = Window.cube(2, 1.0)
    pts = rng.uniform(-1.3, 1.3, size=(40 + 10 * seed, 2))
    ps = PointSet(2, pts)
    report = covering_check(ps, delta, w)

    axis = np.arange(-1.0, 1.0 + 1e-12, delta / 100)
    gx, gy = np.meshgrid(axis, axis, indexing='ij')
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    reach = delta * (1 - EPS_STRICT)
    oracle_uncovered = False
    for start in range(0, len(grid), 50_000):
        if (cdist(grid[start:start + 50_000], pts, metric='chebyshev').min(axis=1) >= reach).any():
            oracle_uncovered = True
            break

    if oracle_uncovered:
        assert report.state == UNCOVERED
    if report.state == COVERED:
        assert not oracle_uncovered
    if report.state == UNCOVERED:
        witness = np.array(report.witness)
        assert np.max(np.abs(pts - witness), axis=1).min() >= reach


def test_covering_report_serialises_three_fields():
    """JSON view carries state, witness and resolution"""
    report = CoverageReport(UNCOVERED, witness=[0.0], resolution_reached=0.5)
    assert report.to_dict() == {'state': 'uncovered', 'witness': [0.0], 'resolution_reached': 0.5}
    with pytest.raises(DomainError):
        CoverageReport(COVERED, witness=[0.0])


def test_greedy_thin_hand_trace():
    """{0, .5, 1, 1.5, 2} at delta 1 keeps {0, 1, 2}"""
    thinned = greedy_thin(PointSet.from_points([0.0, 0.5, 1.0, 1.5, 2.0]), 1.0)
    assert thinned.points.ravel().tolist() == [0.0, 1.0, 2.0]


def test_greedy_thin_single_point():
    """Identity on a singleton"""
    thinned = greedy_thin(PointSet.from_points([[0.3, 0.7]]), 0.5)
    assert thinned.points.tolist() == [[0.3, 0.7]]


def test_thinned_covering_net_covers_at_double_radius():
    """A delta-covering thinned at delta still covers at 2*delta"""
    rng = np.random.default_rng(5)
    delta = 0.2
    w = Window.cube(2, 1.0)
    net = lattice_net(2, 0.25, Window.cube(2, 1.2))
    net = PointSet(2, net.points + rng.uniform(-0.02, 0.02, size=net.points.shape))
    assert covering_check(net, delta, w).state == COVERED
    thinned = greedy_thin(net, delta)
    assert covering_check(thinned, 2 * delta * (1 + EPS_STRICT), w).state == COVERED


@pytest.mark.parametrize("m, expected", [(1, 5), (2, 59)])
def test_intersection_bound_examples(m, expected):
    """Direct substitution at delta = delta1 = 1"""
    assert intersection_bound(m, 1.0, 1.0) == expected


def test_intersection_bound_hypothesis():
    """delta1 must stay below 2*delta"""
    with pytest.raises(HypothesisViolatedError):
        intersection_bound(2, 1.0, 2.0)


def test_disjoint_partition_of_disjoint_cubes():
    """Already disjoint cubes land in one bin"""
    bins = disjoint_partition(PointSet.from_points([0.0, 3.0, 6.0]), 1.0, 0)
    assert bins == [[0, 1, 2]]


def test_disjoint_partition_chain_of_cubes():
    """Cubes of half side 0.75 on the integers meet their two neighbours"""
    centers = PointSet.from_points(np.arange(10, dtype=float))
    assert intersection_counts(centers, 0.75).max() == 2
    bins = disjoint_partition(centers, 0.75, 2)
    assert 2 <= len(bins) <= 3
    assert sorted(i for b in bins for i in b) == list(range(10))
    for b in bins:
        assert cubes_have_disjoint_interiors(centers.subset(b), 0.75)


def test_disjoint_partition_reports_offending_cube():
    """An undersized bound fails on the first cube with nowhere to go"""
    with pytest.raises(MultiplicityExceededError) as info:
        disjoint_partition(PointSet.from_points(np.arange(5, dtype=float)), 0.75, 0)
    assert info.value.index == 1


def test_net_property_suite():
    """1000 random sets: thinning, intersection bound and partition all hold"""
    rng = np.random.default_rng(20240601)
    for _ in range(1000):
        m = int(rng.integers(1, 3))
        n = int(rng.integers(2, 40))
        pts = rng.uniform(-2, 2, size=(n, m))
        ps = PointSet(m, pts)
        delta1 = float(rng.uniform(0.1, 0.8))

        thinned = greedy_thin(ps, delta1)
        if len(thinned) > 1:
            assert min_pairwise_separation(thinned) >= delta1
        gaps = cdist(pts, thinned.points, metric='chebyshev').min(axis=1)
        assert np.all(gaps < delta1)

        delta = delta1 * float(rng.uniform(1.0, 2.0))
        bound = intersection_bound(m, delta, delta1)
        counts = intersection_counts(thinned, delta)
        assert counts.max() <= bound

        bins = disjoint_partition(thinned, delta, bound)
        assert len(bins) <= bound + 1
        assert sorted(i for b in bins for i in b) == list(range(len(thinned)))
        for b in bins:
            members = thinned.points[b]
            if len(members) > 1:
                d = cdist(members, members, metric='chebyshev')
                np.fill_diagonal(d, np.inf)
                assert d.min() > 2 * delta


def test_lattice_net_examples():
    """Small lattices enumerate exactly the points in the closed window"""
    line = lattice_net(1, 1.0, Window.cube(1, 2.0))
    assert line.points.ravel().tolist() == [-2.0, -1.0, 0.0, 1.0, 2.0]
    square = lattice_net(2, 2.0, Window.cube(2, 1.0))
    assert square.points.tolist() == [[0.0, 0.0]]


def test_lattice_net_count_matches_enumeration():
    """Count for spacing s on a side-L cube agrees with brute enumeration"""
    s, half = 0.3, 1.1
    net = lattice_net(2, s, Window.cube(2, half))
    ks = [k for k in range(-10, 11) if abs(k * s) <= half + 1e-9]
    assert len(net) == len(ks) ** 2


def test_lattice_net_budget():
    """Oversized windows are refused"""
    with pytest.raises(PointBudgetExceededError):
        lattice_net(2, 0.001, Window.cube(2, 10.0), point_budget=1000)


def test_remove_within_punches_open_hole():
    """Points in the open cube are dropped, boundary points kept"""
    ps = PointSet.from_points(np.arange(-5, 6, dtype=float))
    holed = remove_within(ps, [0.0], 3.0)
    assert holed.points.ravel().tolist() == [-5.0, -4.0, -3.0, 3.0, 4.0, 5.0]
