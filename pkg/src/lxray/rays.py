"""Rational rays on the integer lattice.

A ray is an (unoriented) straight line carrying lattice points: a lattice
base point plus a canonical primitive integer direction. Lines are
identified by a reduced key so that any two rays describing the same line
hash and compare equal; sinograms are stored per key.

The module also builds the per-point ray family used by the exact
inversions: each lattice point z is assigned the line through z that is
perpendicular, within a chosen coordinate or general integer plane, to z's
in-plane component. That makes z the unique in-plane-norm minimizer among
the lattice points of its ray, which is what drives the shell recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import PlanError, PreconditionError
from .lattice import (IntVec, as_fraction, dot, is_canonical_direction, norm2,
                      primitive, scale, unit_vector, vadd, vsub)


class Ray(NamedTuple):
    base: IntVec   # lattice point on the line
    dir: IntVec    # canonical primitive direction

    @property
    def d(self) -> int:
        return len(self.base)


class RayKey(NamedTuple):
    """Line identity: canonical direction plus the reduced base point.

    The base is shifted along the direction so that 0 <= base.dir < |dir|^2;
    every lattice point of the line reduces to the same representative.
    """

    dir: IntVec
    base: IntVec


def ray_key(ray: Ray) -> RayKey:
    p = ray.dir
    bp = 0
    pp = 0
    for bi, pi in zip(ray.base, p):
        bp += bi * pi
        pp += pi * pi
    k = bp // pp
    return RayKey(p, tuple(bi - k * pi for bi, pi in zip(ray.base, p)))


@dataclass(frozen=True)
class Plane:
    """Integer plane span{a, b} with its Gram data.

    a and b must be linearly independent integer vectors; det is the Gram
    determinant (a.a)(b.b) - (a.b)^2 > 0. Projections onto the plane are
    exact rationals with denominator det.
    """

    a: IntVec
    b: IntVec

    def __post_init__(self):
        a, b = tuple(self.a), tuple(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if len(a) != len(b):
            raise PreconditionError("plane vectors must share a dimension")
        aa, ab, bb = norm2(a), dot(a, b), norm2(b)
        det = aa * bb - ab * ab
        if det <= 0:
            raise PreconditionError("plane vectors must be linearly independent")
        object.__setattr__(self, "aa", aa)
        object.__setattr__(self, "ab", ab)
        object.__setattr__(self, "bb", bb)
        object.__setattr__(self, "det", det)

    @property
    def d(self) -> int:
        return len(self.a)

    def _coeff_nums(self, v: Sequence) -> tuple:
        """Numerators (times det) of the projection coefficients of v."""
        s, t = dot(v, self.a), dot(v, self.b)
        return s * self.bb - t * self.ab, t * self.aa - s * self.ab

    def inplane_norm2(self, v: Sequence) -> Fraction:
        """Exact |proj_plane(v)|^2 as a Fraction with denominator det."""
        s, t = dot(v, self.a), dot(v, self.b)
        un, vn = self._coeff_nums(v)
        return Fraction(s * un + t * vn, self.det)

    def slice_key(self, z: Sequence[int]) -> IntVec:
        """det * (component of z orthogonal to the plane), an integer vector.

        Two lattice points share a key iff they lie in the same affine
        slice parallel to the plane.
        """
        un, vn = self._coeff_nums(z)
        proj_num = vadd(scale(un, self.a), scale(vn, self.b))  # det * proj
        return vsub(scale(self.det, z), proj_num)


def coordinate_plane(d: int) -> Plane:
    """The span of the first two coordinate axes in dimension d."""
    return Plane(unit_vector(d, 0), unit_vector(d, 1))


def perp_ray(z: Sequence[int]) -> Ray:
    """The ray through z perpendicular to z's first-two-coordinates part.

    For z with z1 = z2 = 0 the perpendicularity constraint is vacuous and
    the direction is fixed to the first axis (any fixed rational in-plane
    direction serves the shell inversion equally well).
    """
    z = tuple(z)
    d = len(z)
    if d < 2:
        raise PreconditionError("dimension must be >= 2")
    if z[0] == 0 and z[1] == 0:
        return Ray(z, unit_vector(d, 0))
    dirv = primitive((-z[1], z[0]) + (0,) * (d - 2))
    return Ray(z, dirv)


def perp_ray_in_plane(z: Sequence[int], plane: Plane) -> Ray:
    """The ray through z, parallel to the plane, perpendicular to z in it.

    The direction is the canonical primitive of -(z.b)a + (z.a)b, which is
    orthogonal to z by construction (asserted exactly); in the degenerate
    case z.a = z.b = 0 the direction is fixed to primitive(a).
    """
    z = tuple(z)
    if len(z) != plane.d:
        raise PreconditionError("point and plane dimensions differ")
    s, t = dot(z, plane.a), dot(z, plane.b)
    if s == 0 and t == 0:
        return Ray(z, primitive(plane.a))
    w = vsub(scale(s, plane.b), scale(t, plane.a))
    assert dot(w, z) == 0
    return Ray(z, primitive(w))


def perp_family(points: Iterable[IntVec],
                plane: Plane | None = None) -> list[tuple[IntVec, Ray]]:
    """One ray per point: the per-point perpendicular family.

    The z -> line map is injective on any point set (distinct points on a
    common line get non-parallel directions), which keeps the inversion
    non-overdetermined; a key collision therefore means corrupt input.
    """
    out: list[tuple[IntVec, Ray]] = []
    seen: dict[RayKey, IntVec] = {}
    for z in points:
        ray = perp_ray(z) if plane is None else perp_ray_in_plane(z, plane)
        key = ray_key(ray)
        if key in seen:
            raise PlanError(f"points {seen[key]} and {z} map to one line")
        seen[key] = z
        out.append((tuple(z), ray))
    return out


def points_on_ray(ray: Ray, r=None, center: IntVec | None = None, *,
                  r2=None) -> list[IntVec]:
    """Lattice points of the ray within |x - center| <= r, ordered along it.

    Solves the integer-coefficient quadratic |base + k*dir - center|^2 <= r^2
    for the integer range of k exactly (no floating ray marching); pass
    either r or the squared radius r2.
    """
    if r2 is None:
        if r is None:
            raise PreconditionError("need a radius")
        rf = as_fraction(r)
        r2 = rf * rf
    else:
        r2 = as_fraction(r2)
    if r2 < 0:
        return []
    p = ray.dir
    base = ray.base
    u = vsub(base, center) if center is not None else base
    den, num = r2.denominator, r2.numerator
    pp = up = uu = 0
    for ui, pi in zip(u, p):
        pp += pi * pi
        up += ui * pi
        uu += ui * ui
    a = den * pp
    b = 2 * den * up
    c = den * uu - num
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    s = math.isqrt(disc)
    kmin = -((b + s) // (2 * a))
    kmax = (-b + s) // (2 * a)
    out = []
    for k in range(kmin, kmax + 1):
        # |u + k p|^2 via the quadratic form, no vector churn
        if den * (uu + k * (2 * up + k * pp)) <= num:
            out.append(tuple(bi + k * pi for bi, pi in zip(base, p)))
    return out


def effectively_irrational(theta: Sequence[int], r) -> bool:
    """True iff |theta|^2 > 4 r^2 for the canonical primitive theta.

    Consecutive lattice points of any line with this direction are more
    than 2r apart, so the line meets a radius-r ball in at most one
    lattice point: the direction acts irrationally at scale r.
    """
    if not is_canonical_direction(theta):
        raise PreconditionError("direction must be a canonical primitive vector")
    rf = as_fraction(r)
    return norm2(theta) > 4 * rf * rf


def slice_key(z: Sequence[int], plane: Plane) -> IntVec:
    return plane.slice_key(z)


def group_slices(points: Iterable[IntVec],
                 plane: Plane) -> dict[IntVec, list[IntVec]]:
    """Partition points by the affine slice (parallel to plane) they lie in."""
    groups: dict[IntVec, list[IntVec]] = {}
    for z in points:
        groups.setdefault(plane.slice_key(z), []).append(tuple(z))
    return {k: groups[k] for k in sorted(groups)}
