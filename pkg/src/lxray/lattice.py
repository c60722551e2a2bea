"""Exact integer-lattice primitives.

Lattice points are plain tuples of Python ints; radii and squared norms are
``fractions.Fraction``. Every geometric comparison in this module is exact:
nothing is ever decided by floating point. Float radii are accepted but are
converted to the exact rational value of the float before use.

Directions are represented by their canonical primitive vector: the integer
vector divided by the gcd of its entries, sign-flipped so that the first
nonzero entry is positive. Two integer vectors span the same line direction
iff they have the same canonical primitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetError, PreconditionError

IntVec = tuple[int, ...]

# enumeration cost guard for the definitional Farey counters
FAREY_ENUM_BUDGET = 60_000_000


def as_fraction(x) -> Fraction:
    """Exact rational of an int, Fraction, float or 'p/q' string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact binary value of the float
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def norm2(v: Sequence[int]) -> int:
    """Squared Euclidean norm of an integer vector."""
    return sum(c * c for c in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v, strict=True))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def scale(k, v: Sequence) -> tuple:
    return tuple(k * c for c in v)


def unit_vector(d: int, axis: int) -> IntVec:
    return tuple(1 if i == axis else 0 for i in range(d))


def enumerate_ball(d: int, r, center: IntVec | None = None) -> list[IntVec]:
    """All z in Z^d with |z - center|^2 <= r^2, in lexicographic order.

    The membership test compares the integer squared distance against the
    exact rational r^2, so the boundary is decided exactly for any rational
    (or float-valued) radius.
    """
    if d < 2:
        raise PreconditionError("dimension must be >= 2")
    rfrac = as_fraction(r)
    if rfrac < 0:
        raise PreconditionError("radius must be nonnegative")
    if center is None:
        center = (0,) * d
    if len(center) != d:
        raise PreconditionError(f"center has dimension {len(center)}, expected {d}")
    r2 = rfrac * rfrac
    num, den = r2.numerator, r2.denominator

    out: list[IntVec] = []
    coords = [0] * d

    def sweep(i: int, remaining: int) -> None:
        # remaining = den*r^2 - den*(partial squared distance), an integer
        if i == d:
            out.append(tuple(coords))
            return
        m = math.isqrt(remaining // den)
        for off in range(-m, m + 1):
            coords[i] = center[i] + off
            sweep(i + 1, remaining - den * off * off)

    sweep(0, num)
    return out


def ball_count(d: int, r) -> int:
    """Number of lattice points in the closed ball of radius r."""
    return len(enumerate_ball(d, r))


def primitive(z: Sequence[int]) -> IntVec:
    """Canonical primitive vector of a nonzero integer vector.

    Divides by the gcd of the entries and flips the sign so the first
    nonzero entry is positive; primitive(k*z) == primitive(z) for any
    nonzero integer k.
    """
    g = 0
    for c in z:
        g = math.gcd(g, c)
    if g == 0:
        raise PreconditionError("zero vector has no direction")
    v = tuple(c // g for c in z)
    for c in v:
        if c != 0:
            return v if c > 0 else tuple(-x for x in v)
    raise AssertionError("unreachable")


def is_canonical_direction(v: Sequence[int]) -> bool:
    """True iff v is a canonical primitive vector."""
    if all(c == 0 for c in v):
        return False
    return tuple(v) == primitive(v)


def prim_norm_le(theta: Sequence[int], rho) -> bool:
    """True iff the canonical primitive direction has Euclidean norm <= rho.

    This is the 'short rational direction' filter: directions failing it
    behave like irrational ones on balls of radius < rho/2.
    """
    rf = as_fraction(rho)
    return norm2(theta) <= rf * rf


@dataclass(frozen=True)
class ShellDecomposition:
    """Partition of a point set into shells of equal squared norm.

    ``shells[j]`` holds the points whose squared (in-plane) distance to the
    origin is ``norms2[j]``; norms strictly decrease with j, so the last
    shell is the innermost one. Points within a shell are in lexicographic
    order (a reproducibility convention; no semantics attach to it).
    """

    shells: tuple[tuple[IntVec, ...], ...]
    norms2: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.shells)

    def points(self) -> list[IntVec]:
        return [z for shell in self.shells for z in shell]


def build_shells(points: Iterable[IntVec], origin: Sequence | None = None,
                 plane=None) -> ShellDecomposition:
    """Group points by exact squared distance to origin, outermost first.

    With ``plane`` given (any object exposing ``inplane_norm2``), the
    distance is that of the point's projection onto the plane, so the
    decomposition orders a two-dimensional slice by its own radial norm.
    Ties form one shell; an empty input yields an empty decomposition.
    """
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise PreconditionError("points must be pairwise distinct")
    groups: dict[Fraction, list[IntVec]] = {}
    for z in pts:
        delta = vsub(z, origin) if origin is not None else z
        if plane is not None:
            n2 = plane.inplane_norm2(delta)
        else:
            n2 = Fraction(sum(Fraction(c) * Fraction(c) for c in delta))
        groups.setdefault(n2, []).append(z)
    ordered = sorted(groups.items(), key=lambda kv: kv[0], reverse=True)
    return ShellDecomposition(
        shells=tuple(tuple(sorted(g)) for _, g in ordered),
        norms2=tuple(n for n, _ in ordered),
    )


@dataclass(frozen=True)
class FareySet:
    """Reduced rational tuples with denominator at most n (level-n Farey points)."""

    n: int
    d: int
    points: frozenset


def farey_set(n: int, d: int = 2) -> FareySet:
    """The Farey points of level n as exact Fractions (d=2 only).

    For d >= 3 only counts are exposed (see ``farey_count``) to bound
    memory; requesting the point set raises.
    """
    if n < 1:
        raise PreconditionError("Farey level must be >= 1")
    if d != 2:
        raise PreconditionError("Farey point sets are exposed only for d=2")
    pts = {Fraction(p, q) for q in range(1, n + 1)
           for p in range(q) if math.gcd(p, q) == 1}
    return FareySet(n=n, d=d, points=frozenset(pts))


def farey_count(n: int, d: int = 2) -> int:
    """Number of level-n Farey points in dimension d, by direct enumeration.

    Counts tuples (p_1,...,p_{d-1}, q) with 0 <= p_i < q <= n whose d
    entries have gcd 1. This is the definitional count; ``totient_sieve``
    provides the independent cross-check for d=2.
    """
    if n < 1:
        raise PreconditionError("Farey level must be >= 1")
    if d < 2:
        raise PreconditionError("dimension must be >= 2")
    work = sum(q ** (d - 1) for q in range(1, n + 1))
    if work > FAREY_ENUM_BUDGET:
        raise BudgetError(f"farey_count({n}, {d}) needs {work} steps, "
                          f"budget is {FAREY_ENUM_BUDGET}")
    if d == 2:
        return sum(1 for q in range(1, n + 1)
                   for p in range(q) if math.gcd(p, q) == 1)
    total = 0
    for q in range(1, n + 1):
        stack = [(0, q)]
        # depth-first over p-tuples, carrying the running gcd with q
        while stack:
            depth, g = stack.pop()
            if depth == d - 1:
                if g == 1:
                    total += 1
                continue
            for p in range(q):
                stack.append((depth + 1, math.gcd(g, p)))
    return total


def totient_sieve(n: int) -> list[int]:
    """Euler totients phi(0..n) by a multiplicative sieve."""
    phi = list(range(n + 1))
    for p in range(2, n + 1):
        if phi[p] == p:  # p prime
            for m in range(p, n + 1, p):
                phi[m] -= phi[m] // p
    return phi


def totient_sum(n: int) -> int:
    """Sum of phi(q) for q = 1..n; equals farey_count(n, 2)."""
    return sum(totient_sieve(n)[1:])
