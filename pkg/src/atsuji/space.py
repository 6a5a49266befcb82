"""Finite metric spaces: construction, axiom verification, and ball queries.

Conventions used throughout the package:

- Points are addressed by string ids.  A point's canonical index is its
  position in ``FiniteSpace.ids``; every tie-break (witness pairs, minimizers)
  picks the lexicographically least index pair, so results are deterministic
  regardless of how the caller orders its input sets.
- Balls are open: ``y`` belongs to ``B(A, eps)`` iff ``dist(y, a) < eps`` for
  some ``a`` in ``A``.
- The distance to the empty set is ``math.inf``, which propagates correctly
  through min/max reductions.
- Axiom-style comparisons are slack by the space's ``tol`` (default 1e-12);
  ball membership and threshold tests compare raw floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "PointId",
    "PointSpec",
    "FiniteSpace",
    "Violation",
    "AxiomReport",
    "MaxTriple",
    "DuplicatePointError",
    "IndiscerniblePointsError",
    "build_space",
    "verify_metric_axioms",
    "triple_max_triangle",
    "set_distance",
    "neighborhood",
    "uniform_interior_radius",
]

# A point is addressed by its string id; its index is the position in
# FiniteSpace.ids.
PointId = str

DEFAULT_TOL = 1e-12


class DuplicatePointError(ValueError):
    """Two point specs share the same id."""


class IndiscerniblePointsError(ValueError):
    """Two distinct point specs are closer than the comparison tolerance."""


@dataclass(frozen=True)
class PointSpec:
    """A point given by sparse Euclidean coordinates.

    ``coords`` maps a positive-integer slot to a real coordinate; absent slots
    are zero, and explicit zeros are equivalent to absent slots.
    """

    id: str
    coords: dict[int, float]

    def support(self) -> tuple[tuple[int, float], ...]:
        """Canonical (slot, value) pairs: zeros dropped, slots validated."""
        items = []
        for slot, value in self.coords.items():
            if not isinstance(slot, int) or slot < 1:
                raise ValueError(f"point {self.id!r}: slot {slot!r} must be an integer >= 1")
            v = float(value)
            if not math.isfinite(v):
                raise ValueError(f"point {self.id!r}: coordinate in slot {slot} is not finite")
            if v != 0.0:
                items.append((slot, v))
        return tuple(sorted(items))


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """An immutable finite point set with a precomputed distance matrix.

    ``dist`` is an n-by-n matrix aligned with ``ids``; it is copied and made
    read-only at construction.  Only structural properties are enforced here
    (shape, unique ids, finite entries); the metric axioms are checked by
    :func:`verify_metric_axioms` so that invalid matrices can be loaded,
    diagnosed, and reported.
    """

    ids: tuple[PointId, ...]
    dist: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        ids = tuple(self.ids)
        if not ids:
            raise ValueError("a finite space needs at least one point")
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DuplicatePointError(f"duplicate point ids: {dupes}")
        d = np.array(self.dist, dtype=float)
        if d.shape != (len(ids), len(ids)):
            raise ValueError(f"distance matrix shape {d.shape} does not match {len(ids)} points")
        if not np.isfinite(d).all():
            bad = np.argwhere(~np.isfinite(d))[0]
            raise ValueError(f"distance matrix entry {tuple(int(k) for k in bad)} is not finite")
        d.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "tol", float(self.tol))

    @cached_property
    def _index(self) -> dict[PointId, int]:
        return {p: k for k, p in enumerate(self.ids)}

    @property
    def n(self) -> int:
        return len(self.ids)

    def index(self, point: PointId) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise KeyError(f"point {point!r} is not in the space") from None

    def indices(self, points: Iterable[PointId]) -> np.ndarray:
        """Sorted, deduplicated canonical indices of ``points``."""
        return np.array(sorted({self.index(p) for p in points}), dtype=int)

    def distance(self, x: PointId, y: PointId) -> float:
        return float(self.dist[self.index(x), self.index(y)])


class Violation(NamedTuple):
    """One metric-axiom breach: kind, point indices involved, and how far the
    constraint is missed (tol-relative for the near-zero identity case)."""

    kind: str  # "nonneg" | "symmetry" | "identity" | "triangle"
    where: tuple[int, ...]
    magnitude: float


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    violations: list[Violation]


class MaxTriple(NamedTuple):
    triple: tuple[float, float, float]
    satisfies: bool


def build_space(specs: Iterable[PointSpec], tol: float = DEFAULT_TOL) -> FiniteSpace:
    """Build a space from sparse point specs under the l2 distance.

    Raises :class:`DuplicatePointError` on repeated ids and
    :class:`IndiscerniblePointsError` when two specs land within ``tol`` of
    each other (identical coordinates included), which would break the
    identity-of-indiscernibles axiom.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("at least one point spec is required")
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise DuplicatePointError(f"duplicate point ids: {dupes}")

    supports = [s.support() for s in specs]
    slots = sorted({slot for sup in supports for slot, _ in sup})
    slot_col = {slot: k for k, slot in enumerate(slots)}
    coords = np.zeros((len(specs), max(len(slots), 1)))
    for row, sup in enumerate(supports):
        for slot, value in sup:
            coords[row, slot_col[slot]] = value

    dist = cdist(coords, coords)
    np.fill_diagonal(dist, 0.0)

    close = np.argwhere(np.triu(dist <= tol, k=1))
    if close.size:
        i, j = close[0]
        raise IndiscerniblePointsError(
            f"points {ids[i]!r} and {ids[j]!r} are indiscernible "
            f"(distance {dist[i, j]!r} <= tol {tol!r})"
        )
    return FiniteSpace(ids=tuple(ids), dist=dist, tol=tol)


def verify_metric_axioms(space: FiniteSpace) -> AxiomReport:
    """Exhaustively check all pairs and all ordered triples of the matrix.

    Every breach beyond ``space.tol`` is reported; the scan never samples.
    Violations are listed by kind (nonneg, symmetry, identity, triangle) and
    lexicographically by index within each kind.
    """
    d = space.dist
    tol = space.tol
    n = space.n
    violations: list[Violation] = []

    for i, j in np.argwhere(d < -tol):
        violations.append(Violation("nonneg", (int(i), int(j)), float(-d[i, j])))

    gap = np.abs(d - d.T)
    for i, j in np.argwhere(np.triu(gap > tol, k=1)):
        violations.append(Violation("symmetry", (int(i), int(j)), float(gap[i, j])))

    diag = np.abs(np.diagonal(d))
    for (i,) in np.argwhere(diag > tol):
        violations.append(Violation("identity", (int(i), int(i)), float(diag[i])))
    for i, j in np.argwhere(np.triu(d <= tol, k=1)):
        violations.append(Violation("identity", (int(i), int(j)), float(tol - d[i, j])))

    # happy path: one reused buffer and a max-reduce per j; the detailed
    # per-triple listing runs only for the j that actually violate
    excess = np.empty_like(d)
    bad_js = []
    for j in range(n):
        np.add(d[:, j][:, None], d[j, :][None, :], out=excess)
        np.subtract(d, excess, out=excess)
        if excess.max() > tol:
            bad_js.append(j)
    triangle: list[Violation] = []
    for j in bad_js:
        np.add(d[:, j][:, None], d[j, :][None, :], out=excess)
        np.subtract(d, excess, out=excess)
        for i, k in np.argwhere(excess > tol):
            triangle.append(Violation("triangle", (int(i), j, int(k)), float(excess[i, k])))
    triangle.sort(key=lambda v: v.where)
    violations.extend(triangle)

    return AxiomReport(passed=not violations, violations=violations)


def triple_max_triangle(
    t1: tuple[float, float, float], t2: tuple[float, float, float]
) -> MaxTriple:
    """Componentwise max of two side triples, plus whether the result
    satisfies all three triangle inequalities.

    Raw float comparisons: rounding is monotone, so the max of two
    triangle-satisfying triples never spuriously fails.
    """
    if len(t1) != 3 or len(t2) != 3:
        raise ValueError("expected two triples of three side lengths")
    values = [float(v) for v in (*t1, *t2)]
    if any(v < 0 for v in values):
        raise ValueError("side lengths must be nonnegative")
    a, b, c = (max(values[k], values[k + 3]) for k in range(3))
    satisfies = a <= b + c and b <= a + c and c <= a + b
    return MaxTriple((a, b, c), satisfies)


def set_distance(space: FiniteSpace, x: PointId, A: Iterable[PointId]) -> float:
    """min over a in A of dist(x, a); ``math.inf`` when A is empty."""
    ix = space.index(x)
    idx = space.indices(A)
    if idx.size == 0:
        return math.inf
    return float(space.dist[ix, idx].min())


def neighborhood(space: FiniteSpace, A: Iterable[PointId], eps: float) -> set[PointId]:
    """Open-ball union B(A, eps) = { y : dist(y, a) < eps for some a in A }."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    idx = space.indices(A)
    if idx.size == 0:
        return set()
    mask = (space.dist[:, idx] < eps).any(axis=1)
    return {space.ids[k] for k in np.flatnonzero(mask)}


def uniform_interior_radius(
    space: FiniteSpace, K: Iterable[PointId], U: Iterable[PointId]
) -> float:
    """Largest r with B(z, r) contained in U for every z in K.

    Equals the minimum over z in K of the distance from z to the complement
    of U, and ``math.inf`` when U is the whole space.  Requires K nonempty
    and K a subset of U.
    """
    k_idx = space.indices(K)
    u_idx = space.indices(U)
    if k_idx.size == 0:
        raise ValueError("K must be nonempty")
    u_set = set(u_idx.tolist())
    if not set(k_idx.tolist()) <= u_set:
        outside = sorted(space.ids[k] for k in k_idx if k not in u_set)
        raise ValueError(f"K must be a subset of U; outside points: {outside}")
    comp_idx = np.array([k for k in range(space.n) if k not in u_set], dtype=int)
    if comp_idx.size == 0:
        return math.inf
    return float(space.dist[np.ix_(k_idx, comp_idx)].min())
