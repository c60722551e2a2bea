"""Exact inversions of the discrete transform.

Two mechanisms, both non-overdetermined (one ray consumed per point
recovered):

* the one-point formula, for far-from-rational directions: a line whose
  primitive direction is longer than the support diameter meets the ball
  in at most one lattice point, so the datum along it IS the value there;
* the shell recursion for the per-point perpendicular family: each point z
  is the strict in-plane-norm minimizer among the lattice points of its
  ray, so sweeping shells from the outermost inward leaves, at each step,
  a single unknown on the ray.

The recursion works slice by slice (2D affine slices parallel to the
chosen plane) and supports weighted data and annulus-restricted targets.
Exact for integer data: every subtraction is an exact double operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import (MissingDataError, PlanError, PreconditionError,
                     ZeroWeightError)
from .lattice import (IntVec, ShellDecomposition, as_fraction, build_shells,
                      enumerate_ball, norm2)
from .rays import (Plane, Ray, RayKey, coordinate_plane, effectively_irrational,
                   perp_family, points_on_ray, ray_key)
from .transform import GridFunction, Sinogram, Weight


@dataclass
class ReconPlan:
    """Everything a shell sweep needs: targets, rays, slices, shells.

    ``plane`` is None for the standard family (rays perpendicular to the
    first two coordinates); slices and in-plane norms then use the
    coordinate plane. ``alpha``/``beta`` record an annulus restriction of
    the target set.
    """

    d: int
    support_radius: Fraction
    points: tuple[IntVec, ...]
    rays: dict[IntVec, Ray]
    slices: dict[IntVec, ShellDecomposition]
    plane: Plane | None = None
    weight: Weight | None = None
    alpha: Fraction | None = None
    beta: Fraction | None = None
    norm2_of: Callable[[IntVec], Fraction] = field(default=None, repr=False)

    def ray_keys(self) -> set[RayKey]:
        return {ray_key(ray) for ray in self.rays.values()}


def _inplane_norm2_fn(d: int, plane: Plane | None):
    if plane is None:
        # fast integer path for the coordinate plane
        return lambda z: z[0] * z[0] + z[1] * z[1]
    return plane.inplane_norm2


def make_plan(d: int, support_radius, points: Iterable[IntVec] | None = None,
              plane: Plane | None = None, weight: Weight | None = None,
              alpha=None, beta=None) -> ReconPlan:
    """Build a reconstruction plan over a point set (default: the full ball).

    alpha/beta restrict the targets to in-plane norms within [alpha, beta].
    """
    r = as_fraction(support_radius)
    if plane is not None and plane.d != d:
        raise PreconditionError("plane dimension mismatch")
    pts = [tuple(z) for z in points] if points is not None else enumerate_ball(d, r)
    nfn = _inplane_norm2_fn(d, plane)
    af = as_fraction(alpha) if alpha is not None else None
    bf = as_fraction(beta) if beta is not None else None
    if af is not None or bf is not None:
        lo = af * af if af is not None else None
        hi = bf * bf if bf is not None else None
        pts = [z for z in pts
               if (lo is None or nfn(z) >= lo) and (hi is None or nfn(z) <= hi)]
    rays = dict(perp_family(pts, plane))
    geom = plane if plane is not None else coordinate_plane(d)
    slices: dict[IntVec, list[IntVec]] = {}
    for z in pts:
        slices.setdefault(geom.slice_key(z), []).append(z)
    decomps = {k: build_shells(v, plane=geom) for k, v in sorted(slices.items())}
    return ReconPlan(d=d, support_radius=r, points=tuple(pts), rays=rays,
                     slices=decomps, plane=plane, weight=weight,
                     alpha=af, beta=bf, norm2_of=nfn)


def recon_shells(g: Sinogram, plan: ReconPlan) -> GridFunction:
    """Invert per-point-perpendicular-family data by the shell sweep.

    Within each slice, shells are processed outermost first; for a target z
    the value is the ray datum minus the already-recovered values at the
    other lattice points of the ray (all of which lie strictly farther out,
    or outside the plan where they read as zero by the support assumption).
    With a plan weight W, data are weighted sums and the update divides by
    W(z, direction). A required entry missing from g is an error, never
    imputed.
    """
    w = plan.weight
    r2 = plan.support_radius * plan.support_radius
    out: dict[IntVec, float] = {}
    for skey in sorted(plan.slices):
        dec = plan.slices[skey]
        for shell, nu in zip(dec.shells, dec.norms2):
            for z in shell:
                ray = plan.rays[z]
                key = ray_key(ray)
                if key not in g.entries:
                    raise MissingDataError(f"no sinogram entry for ray of {z}")
                total = g.entries[key]
                for zeta in points_on_ray(ray, r2=r2):
                    if zeta == z:
                        continue
                    if plan.norm2_of(zeta) <= nu:
                        raise PlanError(
                            f"{zeta} on the ray of {z} is not in an earlier shell")
                    fz = out.get(zeta, 0.0)
                    if fz != 0.0:
                        total -= (w(zeta, ray.dir) * fz) if w else fz
                if w is not None:
                    wz = w(z, ray.dir)
                    if wz == 0:
                        raise ZeroWeightError(f"weight vanishes at {z}")
                    total /= wz
                out[z] = total
    return GridFunction(d=plan.d, support_radius=plan.support_radius, values=out)


def recon_shells_weighted(g: Sinogram, plan: ReconPlan) -> GridFunction:
    """Shell sweep for weighted data; the plan must carry the weight."""
    if plan.weight is None:
        raise PreconditionError("plan has no weight model")
    return recon_shells(g, plan)


def recon_annulus(g: Sinogram, plan: ReconPlan) -> GridFunction:
    """Recover f on an annulus of in-plane norms from the restricted family.

    Requires beta >= support radius: values farther out than beta would
    otherwise be unknown yet feed the recursion. Refused, not approximated.
    """
    if plan.beta is None:
        raise PreconditionError("plan carries no annulus bounds")
    if plan.beta < plan.support_radius:
        raise PreconditionError(
            f"annulus outer bound {plan.beta} is below the support radius "
            f"{plan.support_radius}")
    return recon_shells(g, plan)


def recon_one_point(g: Sinogram, points: Iterable[IntVec],
                    theta_of: Mapping[IntVec, IntVec] | Callable[[IntVec], IntVec],
                    r, weight: Weight | None = None) -> GridFunction:
    """Read f off one ray per point, for effectively irrational directions.

    Each target must lie in the support ball and its direction must satisfy
    the |prim|^2 > 4 r^2 criterion, which makes the target the only ball
    lattice point on its ray; the datum (weight-divided if given) is then
    the value itself.
    """
    rf = as_fraction(r)
    r2 = rf * rf
    pick = theta_of if callable(theta_of) else theta_of.__getitem__
    out: dict[IntVec, float] = {}
    for z in points:
        z = tuple(z)
        if norm2(z) > r2:
            raise PreconditionError(f"target {z} outside the support ball")
        theta = tuple(pick(z))
        if not effectively_irrational(theta, rf):
            raise PreconditionError(
                f"direction {theta} is not effectively irrational at radius {rf}")
        key = ray_key(Ray(z, theta))
        if key not in g.entries:
            raise MissingDataError(f"no sinogram entry for ray of {z}")
        val = g.entries[key]
        if weight is not None:
            wz = weight(z, theta)
            if wz == 0:
                raise ZeroWeightError(f"weight vanishes at {z}")
            val /= wz
        out[z] = val
    return GridFunction(d=g.d, support_radius=rf, values=out)


def one_point_directions(points: Iterable[IntVec], r,
                         spread: int = 7) -> dict[IntVec, IntVec]:
    """Assign each point an effectively irrational direction at radius r.

    Uses directions (m, 1, 0, ...) with m > 2r, cycling m over ``spread``
    consecutive values so nearby points get different rays.
    """
    rf = as_fraction(r)
    base = math.isqrt(math.floor(4 * rf * rf)) + 1  # floor(2r) + 1 > 2r
    out: dict[IntVec, IntVec] = {}
    for i, z in enumerate(sorted(tuple(p) for p in points)):
        m = base + (i % spread)
        theta = (m, 1) + (0,) * (len(z) - 2)
        assert effectively_irrational(theta, rf)
        out[z] = theta
    return out


def one_point_family(points: Iterable[IntVec],
                     theta_of: Mapping[IntVec, IntVec]) -> list[tuple[IntVec, Ray]]:
    """Family pairing each point with its one-point-formula ray."""
    return [(tuple(z), Ray(tuple(z), tuple(theta_of[tuple(z)]))) for z in points]
