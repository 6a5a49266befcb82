"""Remetrization: replace a metric by an equivalent-topology metric whose
neighborhood complements are uniformly isolated.

Given a base metric delta and a derived-set view D, the new distance is

- 0 when x = y,
- delta(x, y) when x or y lies in D,
- max(delta(x, y), 2^m) otherwise, where m is the dyadic level of
  max(delta(x, D), delta(y, D)).

The dyadic level of t > 0 is the unique integer m with 2^m < t <= 2^(m+1);
exact powers of two sit at the top of their interval, and levels are computed
by exponent extraction so no boundary is ever misclassified by a logarithm.

Points outside D keep their own level, and a pair's level is the max of its
endpoint levels (dyadic_level is monotone, so this equals the per-pair
definition above).  The complement of every eps-ball union around D then has
pairwise new-distances at least 2^(dyadic_level(eps)), while balls around
derived points are unchanged and isolated points stay isolated, so the
topology survives.

The construction needs delta(x, D) finite; when D is empty the fallback
max(delta, 1) is used instead (the pointwise max of delta with the unit
discrete metric), which preserves the then-discrete topology and is flagged
on the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .analysis import DerivedSetView, min_pairwise_distance
from .space import FiniteSpace, PointId, neighborhood

__all__ = [
    "RemetrizedSpace",
    "TopologyReport",
    "IsolationBoundReport",
    "dyadic_level",
    "remetrize",
    "verify_same_topology",
    "verify_isolation_bound",
]


@dataclass(frozen=True, eq=False)
class RemetrizedSpace:
    """A base space plus the rebuilt distance matrix and per-point dyadic
    levels (absent for derived-set members, and empty in fallback mode)."""

    base: FiniteSpace
    derived: DerivedSetView
    newdist: np.ndarray
    levels: dict[PointId, int]
    empty_derived_fallback_used: bool = False

    def __post_init__(self):
        d = np.array(self.newdist, dtype=float)
        if d.shape != self.base.dist.shape:
            raise ValueError(
                f"newdist shape {d.shape} does not match the base matrix {self.base.dist.shape}"
            )
        d.setflags(write=False)
        object.__setattr__(self, "newdist", d)

    @cached_property
    def space(self) -> FiniteSpace:
        """The remetrized space as a plain FiniteSpace (same ids and tol)."""
        return FiniteSpace(ids=self.base.ids, dist=self.newdist, tol=self.base.tol)


@dataclass(frozen=True)
class TopologyReport:
    passed: bool
    witness: tuple[PointId, PointId] | None = None
    failed_check: str | None = None  # "domination" | "derived_equality" | "isolation"


@dataclass(frozen=True)
class IsolationBoundReport:
    passed: bool
    n: int
    witness: tuple[PointId, PointId] | None = None
    observed_eta: float = math.inf


def dyadic_level(t: float) -> int:
    """The unique integer m with 2^m < t <= 2^(m+1), for finite t > 0.

    Uses frexp, so t = 2^k lands exactly at level k-1.  Raises when t is not
    a positive finite float or when 2^m would underflow to zero.
    """
    t = float(t)
    if not math.isfinite(t) or t <= 0:
        raise ValueError(f"dyadic level needs a positive finite value, got {t!r}")
    frac, exp = math.frexp(t)  # t = frac * 2^exp with frac in [0.5, 1)
    m = exp - 2 if frac == 0.5 else exp - 1
    if math.ldexp(1.0, m) == 0.0:
        raise ValueError(f"2^{m} underflows for t = {t!r}")
    return m


def remetrize(base: FiniteSpace, derived: DerivedSetView) -> RemetrizedSpace:
    """Apply the three-case construction to a finite space.

    Requires every derived member to be a point of the space, and rejects a
    view that leaves some outside point at distance 0 from it (impossible for
    a true derived set, which is closed, but a sloppy oracle over an invalid
    matrix could do it and the dyadic level would be undefined).
    """
    member_idx = base.indices(derived.members)
    n = base.n

    if member_idx.size == 0:
        newdist = np.maximum(base.dist, 1.0)
        np.fill_diagonal(newdist, 0.0)
        newdist.setflags(write=False)
        return RemetrizedSpace(
            base=base,
            derived=derived,
            newdist=newdist,
            levels={},
            empty_derived_fallback_used=True,
        )

    dist_to_derived = base.dist[:, member_idx].min(axis=1)
    member_mask = np.zeros(n, dtype=bool)
    member_mask[member_idx] = True
    bad = np.flatnonzero(~member_mask & (dist_to_derived <= 0.0))
    if bad.size:
        raise ValueError(
            f"point {base.ids[bad[0]]!r} is outside the derived set but at "
            "distance 0 from it; the dyadic level is undefined"
        )

    levels = np.zeros(n, dtype=np.int32)
    for k in np.flatnonzero(~member_mask):
        levels[k] = dyadic_level(dist_to_derived[k])

    pair_level = np.maximum(levels[:, None], levels[None, :])
    newdist = np.maximum(base.dist, np.ldexp(1.0, pair_level))
    # pairs touching the derived set keep the base distance, x = y stays 0
    newdist[member_mask, :] = base.dist[member_mask, :]
    newdist[:, member_mask] = base.dist[:, member_mask]
    np.fill_diagonal(newdist, 0.0)
    newdist.setflags(write=False)

    return RemetrizedSpace(
        base=base,
        derived=derived,
        newdist=newdist,
        levels={base.ids[k]: int(levels[k]) for k in np.flatnonzero(~member_mask)},
        empty_derived_fallback_used=False,
    )


def verify_same_topology(r: RemetrizedSpace) -> TopologyReport:
    """Check the topology-preservation guarantees pair by pair.

    (a) the new distance dominates the base distance, (b) pairs touching the
    derived set are unchanged, and (c) every non-derived point stays isolated
    (its smallest positive distance is positive under both metrics).  Fails
    with the lexicographically least offending pair.
    """
    base = r.base
    d_old, d_new, tol = base.dist, r.newdist, base.tol
    member_idx = base.indices(r.derived.members)
    member_mask = np.zeros(base.n, dtype=bool)
    member_mask[member_idx] = True

    below = np.argwhere(np.triu(d_new < d_old - tol, k=1))
    if below.size:
        i, j = below[0]
        return TopologyReport(
            passed=False, witness=(base.ids[i], base.ids[j]), failed_check="domination"
        )

    touching = member_mask[:, None] | member_mask[None, :]
    changed = np.argwhere(np.triu(touching & (np.abs(d_new - d_old) > tol), k=1))
    if changed.size:
        i, j = changed[0]
        return TopologyReport(
            passed=False,
            witness=(base.ids[i], base.ids[j]),
            failed_check="derived_equality",
        )

    off_diag = ~np.eye(base.n, dtype=bool)
    for k in np.flatnonzero(~member_mask):
        for mat in (d_old, d_new):
            row = mat[k][off_diag[k]]
            if row.size and not row.min() > 0:
                other = int(np.flatnonzero(off_diag[k])[int(row.argmin())])
                pair = tuple(sorted((int(k), other)))
                return TopologyReport(
                    passed=False,
                    witness=(base.ids[pair[0]], base.ids[pair[1]]),
                    failed_check="isolation",
                )

    return TopologyReport(passed=True)


def verify_isolation_bound(r: RemetrizedSpace, eta: float) -> IsolationBoundReport:
    """Check the headline guarantee at scale eta: outside the eta-neighborhood
    of the derived set (new-metric balls), every pair is at least
    2^dyadic_level(eta) apart, up to the space tolerance.  Vacuous pass when
    the complement has at most one point.
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    n = dyadic_level(eta)
    bound = math.ldexp(1.0, n)
    space_d = r.space
    if r.derived.members:
        ball = neighborhood(space_d, r.derived.members, eta)
        complement = [p for p in space_d.ids if p not in ball]
    else:
        complement = list(space_d.ids)
    report = min_pairwise_distance(space_d, complement)
    if report.eta >= bound - r.base.tol:
        return IsolationBoundReport(passed=True, n=n, observed_eta=report.eta)
    return IsolationBoundReport(
        passed=False, n=n, witness=report.witness, observed_eta=report.eta
    )
