"""Brute-force verification of counting and separation estimates.

Exhaustive, exact-arithmetic checks: the number of lines through at least
two ball lattice points (sandwiched between its proved bounds),
the line count through the origin, the Farey asymptotic ratio, and the
integer separation estimate for projections of the lattice along a
rational direction. All counts deduplicate lines by their reduced key;
pair enumeration is O(N_r^2) and guarded by an explicit budget.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import BudgetError, PreconditionError
from .lattice import (IntVec, as_fraction, ball_count, dot, enumerate_ball,
                      farey_count, norm2, primitive)
from .rays import Ray, ray_key

# default ceiling on enumerated point pairs (d=2 radius 64 fits under it)
DEFAULT_PAIR_BUDGET = 90_000_000
# default ceiling on (primitive direction, point) tests in the separation scan
DEFAULT_SEPARATION_BUDGET = 50_000_000


@dataclass(frozen=True)
class CountReport:
    """A counted quantity sandwiched between proved bounds."""

    r: Fraction
    d: int
    count: int
    lower_bound: int
    upper_bound: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "r": str(self.r),
            "d": self.d,
            "count": self.count,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "passed": self.passed,
        }


def _pack_key(key, offset: int, span: int) -> int:
    """Encode a ray key as one int to keep dedup sets compact."""
    code = 0
    for c in key.dir + key.base:
        c += offset
        if not 0 <= c < span:
            raise AssertionError("pack range too small")
        code = code * span + c
    return code


def _anchor_lines(points: list[IntVec], lo: int, hi: int,
                  offset: int, span: int) -> set[int]:
    keys: set[int] = set()
    n = len(points)
    for i in range(lo, hi):
        zi = points[i]
        for j in range(i + 1, n):
            zj = points[j]
            delta = tuple(a - b for a, b in zip(zj, zi))
            ray = Ray(zi, primitive(delta))
            keys.add(_pack_key(ray_key(ray), offset, span))
    return keys


def count_connecting_lines(r, d: int = 2, *, budget: int = DEFAULT_PAIR_BUDGET,
                           workers: int = 1) -> int:
    """Number of distinct lines through >= 2 lattice points of the r-ball.

    Pair enumeration with dedup by reduced line key. Workers > 1 partition
    the anchor index across processes; the merged count is deterministic.
    """
    points = enumerate_ball(d, r)
    n = len(points)
    npairs = n * (n - 1) // 2
    if npairs > budget:
        raise BudgetError(f"{npairs} point pairs exceed the budget of {budget}")
    rceil = math.isqrt(math.floor(as_fraction(r) ** 2)) + 1
    offset = 4 * rceil + 4
    span = 2 * offset + 1
    if workers <= 1 or n < 256:
        return len(_anchor_lines(points, 0, n - 1, offset, span))
    workers = min(workers, 32)
    bounds = [round(i * (n - 1) / workers) for i in range(workers + 1)]
    chunks = [(points, lo, hi, offset, span)
              for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
    keys: set[int] = set()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_anchor_lines_star, chunks):
            keys |= part
    return len(keys)


def _anchor_lines_star(args) -> set[int]:
    return _anchor_lines(*args)


def count_lines_through_origin(r, d: int = 2) -> int:
    """Distinct lines through the origin with a second ball lattice point.

    Equals the number of canonical primitive vectors of norm <= r; counted
    here by line-key dedup so the identity can be cross-checked against
    direct primitive enumeration.
    """
    origin = (0,) * d
    keys = set()
    for z in enumerate_ball(d, r):
        if z == origin:
            continue
        keys.add(ray_key(Ray(origin, primitive(z))))
    return len(keys)


def verify_count_bounds(r, d: int = 2, *, budget: int = DEFAULT_PAIR_BUDGET,
                        workers: int = 1) -> CountReport:
    """Sandwich the two-point-line count between the proved bounds.

    Lower: N_{r/2} (1 + N_{r/2}) / 2, strict. Upper: N_r^2, strict.
    """
    rf = as_fraction(r)
    if rf < 1:
        raise PreconditionError("radius must be >= 1")
    count = count_connecting_lines(rf, d, budget=budget, workers=workers)
    n_half = ball_count(d, rf / 2)
    n_full = ball_count(d, rf)
    lower = n_half * (1 + n_half) // 2
    upper = n_full * n_full
    return CountReport(r=rf, d=d, count=count, lower_bound=lower,
                       upper_bound=upper, passed=lower < count < upper)


def canonical_primitives(r, d: int = 2) -> list[IntVec]:
    """Canonical primitive vectors of norm <= r (one per antipodal pair)."""
    return [z for z in enumerate_ball(d, r)
            if any(c != 0 for c in z) and primitive(z) == z]


def separation_margin(R, d: int = 2, *,
                      budget: int = DEFAULT_SEPARATION_BUDGET) -> int:
    """Minimum of |zeta|^2 |z|^2 - (z.zeta)^2 over non-collinear pairs.

    zeta ranges over primitive directions of norm <= R, z over ball lattice
    points; the quantity is a nonnegative integer, zero exactly on
    collinear pairs, so the minimum over the rest being >= 1 is the exact
    separation estimate for lattice projections. Exact integer arithmetic.
    """
    prims = canonical_primitives(R, d)
    points = [z for z in enumerate_ball(d, R) if any(c != 0 for c in z)]
    if len(prims) * len(points) > budget:
        raise BudgetError("separation scan exceeds the configured budget")
    best: int | None = None
    for zeta in prims:
        n_zeta = norm2(zeta)
        for z in points:
            q = n_zeta * norm2(z) - dot(z, zeta) ** 2
            if q == 0:
                continue  # z collinear with zeta: separation is about the rest
            if q < 0:
                raise AssertionError("Cauchy-Schwarz violated: arithmetic bug")
            if best is None or q < best:
                best = q
    if best is None:
        raise PreconditionError("no non-collinear pairs at this radius")
    return best


def verify_projection_separation(R, d: int = 2, *,
                                 budget: int = DEFAULT_SEPARATION_BUDGET) -> bool:
    """True iff the exact projection-separation estimate holds up to R."""
    return separation_margin(R, d, budget=budget) >= 1


def farey_asymptotic_report(n: int, d: int = 2) -> float:
    """Ratio of the level-n Farey count to its n -> infinity law 3 n^2 / pi^2."""
    if d != 2:
        raise PreconditionError("asymptotic report implemented for d=2")
    return farey_count(n, 2) * math.pi ** 2 / (3.0 * n * n)


def unbounded_ray_witnesses(z: IntVec, count: int) -> Iterator[Ray]:
    """Distinct rays through one lattice point, as many as requested.

    Witnesses that the family of rational lines meeting a fixed ball point
    is infinite: directions (1, k, 0, ...) are pairwise non-parallel, so
    the lines are pairwise distinct and all pass through z.
    """
    z = tuple(z)
    for k in range(count):
        yield Ray(z, (1, k) + (0,) * (len(z) - 2))
