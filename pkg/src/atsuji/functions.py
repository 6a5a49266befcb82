"""Sampled real-valued functions on finite spaces and uniform-continuity
witness machinery.

Functions are finite value maps keyed by point id (serializable in reports),
not closures.  A witness pair is the universal counterexample currency: two
points at small distance whose function values differ by a lot.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .space import FiniteSpace, PointId, set_distance

__all__ = [
    "SampledFunction",
    "WitnessPair",
    "separator",
    "modulus_of_continuity",
    "uc_witness_search",
    "parity_function",
]

_GRID_ID = re.compile(r"^p_(\d+)_(\d+)$")


@dataclass(frozen=True)
class SampledFunction:
    """A real-valued function sampled on every point of a space."""

    values: dict[PointId, float]
    label: str

    def array(self, space: FiniteSpace) -> np.ndarray:
        """Values in canonical index order; the domain must match exactly."""
        if set(self.values) != set(space.ids):
            missing = sorted(set(space.ids) - set(self.values))[:3]
            extra = sorted(set(self.values) - set(space.ids))[:3]
            raise ValueError(
                f"function {self.label!r} domain does not match the space "
                f"(missing {missing}, extra {extra})"
            )
        return np.array([self.values[p] for p in space.ids], dtype=float)


@dataclass(frozen=True)
class WitnessPair:
    """Two points certifying a uniform-continuity failure: close in distance,
    far apart in value.  ``gap`` is 0 when no function is involved (pure
    isolation witnesses)."""

    x: PointId
    y: PointId
    distance: float
    gap: float


def separator(
    space: FiniteSpace, A: Iterable[PointId], B: Iterable[PointId]
) -> SampledFunction:
    """The ratio function x -> d(x,A) / (d(x,A) + d(x,B)).

    Exactly 0 on A and exactly 1 on B, with values in [0,1] everywhere;
    requires A and B nonempty and disjoint (which on a finite space with a
    valid metric keeps the denominator positive).
    """
    a_set = {space.ids[k] for k in space.indices(A)}
    b_set = {space.ids[k] for k in space.indices(B)}
    if not a_set or not b_set:
        raise ValueError("A and B must both be nonempty")
    overlap = a_set & b_set
    if overlap:
        raise ValueError(f"A and B must be disjoint; shared points: {sorted(overlap)}")
    values: dict[PointId, float] = {}
    for p in space.ids:
        da = set_distance(space, p, a_set)
        db = set_distance(space, p, b_set)
        if not da + db > 0:
            raise ValueError(f"d(x,A) + d(x,B) vanishes at {p!r}; matrix is degenerate")
        values[p] = da / (da + db)
    return SampledFunction(values=values, label=f"separator(|A|={len(a_set)},|B|={len(b_set)})")


def modulus_of_continuity(space: FiniteSpace, f: SampledFunction, eta: float) -> float:
    """Minimum distance among pairs whose value gap is at least eta.

    This is the largest valid delta for the gap threshold eta: every pair
    closer than the returned value has gap < eta.  ``math.inf`` when no pair
    reaches the gap.
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    v = f.array(space)
    gaps = np.abs(v[:, None] - v[None, :])
    mask = np.triu(gaps >= eta, k=1)
    if not mask.any():
        return math.inf
    return float(space.dist[mask].min())


def uc_witness_search(
    space: FiniteSpace, f: SampledFunction, eps0: float, delta: float
) -> WitnessPair | None:
    """Lexicographically least pair with distance < delta and gap >= eps0,
    or None when every delta-close pair has a small gap."""
    if not eps0 > 0:
        raise ValueError(f"eps0 must be positive, got {eps0!r}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    v = f.array(space)
    gaps = np.abs(v[:, None] - v[None, :])
    mask = np.triu((space.dist < delta) & (gaps >= eps0), k=1)
    hits = np.argwhere(mask)
    if hits.size == 0:
        return None
    i, j = hits[0]
    return WitnessPair(
        x=space.ids[i],
        y=space.ids[j],
        distance=float(space.dist[i, j]),
        gap=float(gaps[i, j]),
    )


def parity_function(space: FiniteSpace) -> SampledFunction:
    """1 where i+j is even, 0 where odd, reading (i, j) from ids ``p_{i}_{j}``.

    Continuous on the origin-free grid (its topology is discrete) yet not
    uniformly continuous: adjacent-j pairs get arbitrarily close while the
    gap stays 1.
    """
    values: dict[PointId, float] = {}
    for p in space.ids:
        m = _GRID_ID.match(p)
        if m is None:
            raise ValueError(f"point id {p!r} does not encode grid indices p_<i>_<j>")
        i, j = int(m.group(1)), int(m.group(2))
        values[p] = 1.0 if (i + j) % 2 == 0 else 0.0
    return SampledFunction(values=values, label="parity")
