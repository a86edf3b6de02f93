#!/usr/bin/env python3
"""
Geometry Nets - sampling nets in R^m under the sup-norm

Construction, thinning, partition and certification of delta-covering and
delta1-packing point sets. R^m is always replaced by a caller-supplied bounded
window, so every net predicate here is window-relative.

Open-cube membership is tested as ``dist < delta * (1 - EPS_STRICT)``.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

import mz_settings
from mz_errors import (
    DomainError,
    HypothesisViolatedError,
    InsufficientPointsError,
    MultiplicityExceededError,
    PointBudgetExceededError,
)

logger = logging.getLogger('GeometryNets')

EPS_STRICT = 1e-12

# Coverage states
COVERED = "covered"
UNCOVERED = "uncovered"
UNDECIDED = "undecided"

_CHUNK_ROWS = 1024
_EXACT_CELL_BUDGET = 250_000


@dataclass
class PointSet:
    """Finite point set in R^m; row order is meaningful (greedy thinning scans it)"""
    dim: int
    points: np.ndarray
    claimed_delta: Optional[float] = None
    claimed_delta1: Optional[float] = None

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DomainError(f"dimension must be positive, got {self.dim}")
        self.dim = int(self.dim)

        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, self.dim)
        elif pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dim == 1 else pts.reshape(1, -1)

        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DomainError(f"every point must have exactly {self.dim} coordinates")
        if not np.all(np.isfinite(pts)):
            raise DomainError("all coordinates must be finite")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def from_points(cls, points: Sequence, **metadata) -> 'PointSet':
        arr = np.asarray(points, dtype=float)
        if arr.ndim <= 1:
            arr = arr.reshape(-1, 1)
        return cls(arr.shape[1], arr, **metadata)

    @classmethod
    def from_csv(cls, path: str) -> 'PointSet':
        """Read a headerless CSV, one point per line"""
        try:
            frame = pd.read_csv(path, header=None, dtype=float)
        except pd.errors.EmptyDataError:
            raise InsufficientPointsError(f"insufficient points: {path} is empty")
        logger.debug(f"Read {len(frame)} points of dimension {frame.shape[1]} from {path}")
        return cls(frame.shape[1], frame.to_numpy(dtype=float))

    def to_csv(self) -> str:
        return pd.DataFrame(self.points).to_csv(
            header=False, index=False, lineterminator='\n', float_format='%.17g'
        )

    def subset(self, indices: Sequence[int]) -> 'PointSet':
        return PointSet(self.dim, self.points[np.asarray(indices, dtype=int)])


@dataclass
class Window:
    """Closed cube Q^m_h(x0) with center x0 and half side h"""
    center: np.ndarray
    half_side: float

    def __post_init__(self):
        self.center = np.atleast_1d(np.asarray(self.center, dtype=float))
        if not self.half_side > 0:
            raise DomainError(f"half_side must be positive, got {self.half_side}")
        self.half_side = float(self.half_side)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.half_side

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.half_side

    @classmethod
    def cube(cls, m: int, half_side: float, center: Optional[Sequence[float]] = None) -> 'Window':
        return cls(np.zeros(m) if center is None else np.asarray(center, dtype=float), half_side)

    @classmethod
    def around(cls, ps: PointSet, margin: float = 0.0) -> 'Window':
        """Smallest cube containing the points, grown by ``margin``"""
        if len(ps) == 0:
            raise InsufficientPointsError("insufficient points: cannot bound an empty set")
        lo = ps.points.min(axis=0)
        hi = ps.points.max(axis=0)
        half = float(np.max(hi - lo)) / 2.0 + margin
        return cls((lo + hi) / 2.0, half if half > 0 else 1.0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.all(np.abs(np.atleast_2d(points) - self.center) <= self.half_side, axis=1)

    def to_dict(self) -> Dict:
        return {'center': self.center.tolist(), 'half_side': self.half_side}


@dataclass
class CoverageReport:
    """Tri-state covering verdict"""
    state: str  # covered, uncovered, undecided
    witness: Optional[List[float]] = None
    resolution_reached: float = 0.0
    cells_examined: int = 0

    def __post_init__(self):
        if self.state not in (COVERED, UNCOVERED, UNDECIDED):
            raise DomainError(f"unknown coverage state: {self.state}")
        if (self.witness is not None) != (self.state == UNCOVERED):
            raise DomainError("witness must be present exactly when the state is uncovered")

    @property
    def covered(self) -> bool:
        return self.state == COVERED

    def to_dict(self) -> Dict:
        return {
            'state': self.state,
            'witness': self.witness,
            'resolution_reached': self.resolution_reached,
        }


def _sup_distances(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.max(np.abs(points - x), axis=1)


def _open_reach(delta: float) -> float:
    return delta * (1.0 - EPS_STRICT)


def min_pairwise_separation(ps: PointSet) -> float:
    """Minimum sup-norm distance over distinct pairs"""
    if len(ps) < 2:
        raise InsufficientPointsError("insufficient points: separation needs at least 2 points")

    pts = ps.points
    best = math.inf
    for start in range(0, len(pts) - 1, _CHUNK_ROWS):
        block = pts[start:start + _CHUNK_ROWS]
        d = cdist(block, pts[start:], metric='chebyshev')
        rows = np.arange(d.shape[0])[:, None]
        cols = np.arange(d.shape[1])[None, :]
        d = np.where(cols > rows, d, np.inf)
        best = min(best, float(d.min()))
    return best


def packing_multiplicity(ps: PointSet, delta1: float) -> int:
    """
    Largest number of points in an open cube of half side delta1/2 centred at a
    point of the set, minus one. An empty set has multiplicity 0.
    """
    if not delta1 > 0:
        raise DomainError(f"delta1 must be positive, got {delta1}")
    if len(ps) == 0:
        return 0

    limit = _open_reach(delta1 / 2.0)
    worst = 0
    for start in range(0, len(ps), _CHUNK_ROWS):
        d = cdist(ps.points[start:start + _CHUNK_ROWS], ps.points, metric='chebyshev')
        worst = max(worst, int(np.count_nonzero(d < limit, axis=1).max()))
    return worst - 1


def _exact_candidate_limit(m: int) -> int:
    per_axis = _EXACT_CELL_BUDGET ** (1.0 / m)
    return int(min(512, max(1, math.floor((per_axis - 3.0) / 4.0))))


def _exact_cell_witness(cand: np.ndarray, center: np.ndarray, half: float,
                        reach: float) -> Optional[np.ndarray]:
    """
    Decide coverage of the closed cube [center-half, center+half] by the open cubes
    of half side ``reach`` around ``cand``. Cube faces split every axis into knots
    and open gaps; each product cell is either inside or outside each open cube, so
    one representative per cell decides it. Returns the deepest uncovered
    representative, or None when the cube is covered.
    """
    lo = center - half
    hi = center + half
    axes = []
    for j in range(center.shape[0]):
        faces = np.concatenate([cand[:, j] - reach, cand[:, j] + reach])
        faces = faces[(faces > lo[j]) & (faces < hi[j])]
        knots = np.unique(np.concatenate([[lo[j], hi[j]], faces]))
        gaps = 0.5 * (knots[:-1] + knots[1:])
        axes.append(np.concatenate([knots, gaps]))

    grids = np.meshgrid(*axes, indexing='ij')
    reps = np.stack([g.ravel() for g in grids], axis=1)

    best_gap = -math.inf
    witness = None
    for start in range(0, len(reps), 8192):
        chunk = reps[start:start + 8192]
        gap = cdist(chunk, cand, metric='chebyshev').min(axis=1)
        uncovered = gap >= reach
        if uncovered.any():
            i = int(np.argmax(np.where(uncovered, gap, -np.inf)))
            if gap[i] > best_gap:
                best_gap = float(gap[i])
                witness = chunk[i].copy()
    return witness


def _children(center: np.ndarray, half: float) -> List[np.ndarray]:
    quarter = half / 2.0
    m = center.shape[0]
    signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * m), indexing='ij')).reshape(m, -1).T
    return [center + quarter * s for s in signs]


def covering_check(ps: PointSet, delta: float, w: Window,
                   max_depth: Optional[int] = None) -> CoverageReport:
    """
    Certified tri-state decision of whether the open cubes Q°_delta(X_nu) cover
    the window, by recursive subdivision.

    A sub-cube is covered outright when it sits inside one open cube; its centre is
    an uncovered witness when no open cube contains it. Once few enough cubes meet
    a sub-cube it is decided exactly by face arrangement. Sub-cubes still open at
    ``max_depth`` make the verdict undecided, with the residual half side reported.
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if w.dim != ps.dim:
        raise DomainError(f"window dimension {w.dim} does not match point dimension {ps.dim}")
    max_depth = mz_settings.DEFAULT_MAX_DEPTH if max_depth is None else int(max_depth)

    reach = _open_reach(delta)
    pts = ps.points
    if len(pts) == 0:
        return CoverageReport(UNCOVERED, witness=w.center.tolist(), resolution_reached=w.half_side)

    exact_limit = _exact_candidate_limit(ps.dim)
    stack = [(w.center, w.half_side, 0, np.arange(len(pts)))]
    finest = w.half_side
    residual: Optional[float] = None
    cells = 0

    while stack:
        center, half, depth, cand = stack.pop()
        cells += 1
        finest = min(finest, half)

        d = _sup_distances(pts[cand], center)
        if d.min() + half < reach:
            continue
        if d.min() >= reach:
            logger.debug(f"Uncovered centre found at depth {depth}")
            return CoverageReport(UNCOVERED, witness=center.tolist(),
                                  resolution_reached=half, cells_examined=cells)

        cand = cand[d < half + reach]
        if len(cand) <= exact_limit:
            witness = _exact_cell_witness(pts[cand], center, half, reach)
            if witness is None:
                continue
            return CoverageReport(UNCOVERED, witness=witness.tolist(),
                                  resolution_reached=half, cells_examined=cells)

        if depth >= max_depth:
            residual = half if residual is None else min(residual, half)
            continue

        for child in _children(center, half):
            stack.append((child, half / 2.0, depth + 1, cand))

    if residual is not None:
        logger.warning(f"Covering undecided: residual sub-cube half side {residual:.3e}")
        return CoverageReport(UNDECIDED, resolution_reached=residual, cells_examined=cells)

    logger.debug(f"Window covered after examining {cells} sub-cubes")
    return CoverageReport(COVERED, resolution_reached=finest, cells_examined=cells)


def greedy_thin_indices(ps: PointSet, delta: float) -> List[int]:
    if len(ps) == 0:
        raise InsufficientPointsError("insufficient points: cannot thin an empty set")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")

    pts = ps.points
    kept = np.empty_like(pts)
    count = 0
    indices: List[int] = []
    for i, x in enumerate(pts):
        if count and _sup_distances(kept[:count], x).min() < delta:
            continue
        kept[count] = x
        count += 1
        indices.append(i)
    return indices


def greedy_thin(ps: PointSet, delta: float) -> PointSet:
    """
    Scan in index order and keep a point iff it lies outside the open cube of half
    side delta around every point kept so far. The result is a delta-packing, and
    every input point is within sup-distance < delta of a kept point.
    """
    indices = greedy_thin_indices(ps, delta)
    thinned = ps.subset(indices)
    thinned.claimed_delta1 = delta
    if ps.claimed_delta is not None and ps.claimed_delta <= delta:
        thinned.claimed_delta = 2.0 * delta
    logger.info(f"Greedy thinning at delta={delta}: kept {len(indices)} of {len(ps)} points")
    return thinned


def intersection_bound(m: int, delta: float, delta1: float) -> int:
    """N = floor(2^m((4 delta/delta1)^m - 1)) - 1, for delta1 < 2 delta"""
    if m < 1 or not delta > 0 or not delta1 > 0:
        raise DomainError("m must be positive and delta, delta1 must be positive")
    if delta1 >= 2.0 * delta:
        raise HypothesisViolatedError(
            f"hypothesis violated: delta1={delta1} must be smaller than 2*delta={2.0 * delta}"
        )
    value = 2.0 ** m * ((4.0 * delta / delta1) ** m - 1.0)
    return int(math.floor(value + 1e-9)) - 1


def intersection_counts(centers: PointSet, h: float) -> np.ndarray:
    """For each closed cube Q^m_h(X_nu), how many other cubes of the family meet it"""
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    counts = np.zeros(len(centers), dtype=int)
    for start in range(0, len(centers), _CHUNK_ROWS):
        d = cdist(centers.points[start:start + _CHUNK_ROWS], centers.points, metric='chebyshev')
        counts[start:start + _CHUNK_ROWS] = np.count_nonzero(d <= 2.0 * h, axis=1) - 1
    return counts


def cubes_have_disjoint_interiors(centers: PointSet, h: float) -> bool:
    if len(centers) < 2:
        return True
    return min_pairwise_separation(centers) >= 2.0 * h * (1.0 - EPS_STRICT)


def disjoint_partition(centers: PointSet, h: float, n_bound: int) -> List[List[int]]:
    """
    Pigeonhole partition of the closed cubes Q^m_h(X_nu) into at most n_bound+1
    bins of pairwise disjoint cubes. Cubes are placed in index order into the
    first bin none of whose members they meet.
    """
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    if n_bound < 0:
        raise DomainError(f"n_bound must be nonnegative, got {n_bound}")

    pts = centers.points
    bins: List[List[int]] = [[] for _ in range(n_bound + 1)]
    bin_of = np.full(len(pts), -1, dtype=int)

    for i in range(len(pts)):
        taken = set()
        if i:
            meets = _sup_distances(pts[:i], pts[i]) <= 2.0 * h
            taken = set(bin_of[:i][meets].tolist())
        for j in range(n_bound + 1):
            if j not in taken:
                bins[j].append(i)
                bin_of[i] = j
                break
        else:
            raise MultiplicityExceededError(i, n_bound)

    used = [b for b in bins if b]
    logger.info(f"Partitioned {len(pts)} cubes into {len(used)} disjoint bins (bound {n_bound + 1})")
    return used


def lattice_net(m: int, spacing: float, w: Window, offset: Optional[Sequence[float]] = None,
                point_budget: Optional[int] = None) -> PointSet:
    """All points of offset + spacing*Z^m inside the closed window, row-major"""
    if not spacing > 0:
        raise DomainError(f"spacing must be positive, got {spacing}")
    if w.dim != m:
        raise DomainError(f"window dimension {w.dim} does not match m={m}")
    budget = mz_settings.DEFAULT_POINT_BUDGET if point_budget is None else int(point_budget)
    shift = np.zeros(m) if offset is None else np.asarray(offset, dtype=float)

    axes = []
    for j in range(m):
        k_lo = math.ceil((w.lower[j] - shift[j]) / spacing - 1e-9)
        k_hi = math.floor((w.upper[j] - shift[j]) / spacing + 1e-9)
        axes.append(shift[j] + spacing * np.arange(k_lo, k_hi + 1, dtype=float))

    total = 1
    for axis in axes:
        total *= len(axis)
    if total > budget:
        raise PointBudgetExceededError(f"point budget exceeded: {total} lattice points > cap {budget}")

    if total == 0:
        return PointSet(m, np.empty((0, m)))
    grids = np.meshgrid(*axes, indexing='ij')
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return PointSet(m, pts, claimed_delta1=spacing)


def remove_within(ps: PointSet, center: Sequence[float], half_side: float) -> PointSet:
    """Drop the points lying in the open cube of the given half side around ``center``"""
    d = _sup_distances(ps.points, np.asarray(center, dtype=float))
    return ps.subset(np.flatnonzero(d >= half_side))
