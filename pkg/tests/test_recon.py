import random

import pytest

from conftest import random_int_grid
from lxray import (GridFunction, MissingDataError, Plane, PreconditionError,
                   ReconPlan, constant_weight, chord_weight,
                   enumerate_ball, forward_family, make_plan, norm2,
                   one_point_directions, one_point_family, perp_family,
                   recon_annulus, recon_one_point, recon_shells,
                   recon_shells_weighted)


def tstar_data(f, plan, weight=None):
    fam = perp_family(plan.points, plan.plane)
    return forward_family(f, fam, weight=weight)


def test_one_point_round_trip_indicator():
    f = GridFunction(2, 1, {(0, 0): 1.0})
    pts = enumerate_ball(2, 1)
    dirs = {z: (5, 2) for z in pts}
    g = forward_family(f, one_point_family(pts, dirs))
    rec = recon_one_point(g, pts, dirs, 1)
    assert rec.values_equal(f)


def test_one_point_round_trip_zero():
    pts = enumerate_ball(2, 2)
    dirs = one_point_directions(pts, 2)
    f = GridFunction(2, 2)
    g = forward_family(f, one_point_family(pts, dirs))
    rec = recon_one_point(g, pts, dirs, 2)
    assert rec.values_equal(f)


def test_one_point_round_trip_random():
    pts = enumerate_ball(2, 10)
    dirs = one_point_directions(pts, 10)
    assert all(norm2(t) > 400 for t in dirs.values())
    f = random_int_grid(2, 10, seed=12)
    g = forward_family(f, one_point_family(pts, dirs))
    rec = recon_one_point(g, pts, dirs, 10)
    assert rec.values_equal(f)


def test_one_point_weighted():
    pts = enumerate_ball(2, 3)
    dirs = one_point_directions(pts, 3)
    w = constant_weight(2.5)
    f = random_int_grid(2, 3, seed=14)
    g = forward_family(f, one_point_family(pts, dirs), weight=w)
    rec = recon_one_point(g, pts, dirs, 3, weight=w)
    worst = max(abs(rec.get(z) - f.get(z)) for z in pts)
    assert worst <= 1e-9


def test_one_point_errors():
    pts = enumerate_ball(2, 2)
    dirs = one_point_directions(pts, 2)
    f = random_int_grid(2, 2, seed=13)
    g = forward_family(f, one_point_family(pts, dirs))
    with pytest.raises(PreconditionError):
        recon_one_point(g, pts, {z: (1, 0) for z in pts}, 2)
    with pytest.raises(PreconditionError):
        recon_one_point(g, [(9, 9)], {(9, 9): (5, 2)}, 2)
    with pytest.raises(MissingDataError):
        recon_one_point(g, pts, {z: (2001, 1) for z in pts}, 2)


def test_shells_hand_example_ball_one():
    f = GridFunction(2, 1, {(0, 0): 1.0})
    plan = make_plan(2, 1)
    rec = recon_shells(tstar_data(f, plan), plan)
    assert rec.values_equal(f)
    assert rec.get((0, 0)) == 1.0


def test_shells_round_trip_small():
    for seed in range(5):
        f = random_int_grid(2, 2, seed=seed)
        plan = make_plan(2, 2)
        assert recon_shells(tstar_data(f, plan), plan).values_equal(f)


def test_shells_round_trip_d3_slices():
    f = random_int_grid(3, 3, seed=20)
    plan = make_plan(3, 3)
    assert recon_shells(tstar_data(f, plan), plan).values_equal(f)


def test_shells_round_trip_general_plane():
    pl = Plane((1, 1, 0), (0, 1, 1))
    plan = make_plan(3, 4, plane=pl)
    f = random_int_grid(3, 4, seed=21)
    assert recon_shells(tstar_data(f, plan), plan).values_equal(f)


def test_shells_missing_entry():
    f = random_int_grid(2, 2, seed=22)
    plan = make_plan(2, 2)
    g = tstar_data(f, plan)
    key = next(iter(g.entries))
    del g.entries[key]
    with pytest.raises(MissingDataError):
        recon_shells(g, plan)


def test_non_overdetermined_audit():
    for d, r in [(2, 4), (3, 3)]:
        plan = make_plan(d, r)
        g = tstar_data(random_int_grid(d, r, seed=23), plan)
        n = len(enumerate_ball(d, r))
        assert len(plan.points) == n
        assert len(g.entries) == n
        assert plan.ray_keys() == set(g.entries)


def test_intra_shell_order_independence():
    f = random_int_grid(2, 4, seed=24)
    plan = make_plan(2, 4)
    g = tstar_data(f, plan)
    baseline = recon_shells(g, plan)
    rng = random.Random(25)
    shuffled_slices = {}
    for skey, dec in plan.slices.items():
        shells = []
        for shell in dec.shells:
            shell = list(shell)
            rng.shuffle(shell)
            shells.append(tuple(shell))
        shuffled_slices[skey] = type(dec)(shells=tuple(shells), norms2=dec.norms2)
    plan2 = ReconPlan(d=plan.d, support_radius=plan.support_radius,
                      points=plan.points, rays=plan.rays, slices=shuffled_slices,
                      plane=plan.plane, weight=plan.weight, alpha=plan.alpha,
                      beta=plan.beta, norm2_of=plan.norm2_of)
    assert recon_shells(g, plan2).values_equal(baseline)


def test_right_inverse_on_used_rays():
    # an arbitrary integer-valued "sinogram" over the family is reproduced
    # exactly by forward-projecting the reconstruction
    plan = make_plan(2, 3)
    fam = perp_family(plan.points)
    rng = random.Random(26)
    g = forward_family(GridFunction(2, 3), fam)
    g.entries = {k: float(rng.randint(-20, 20)) for k in g.entries}
    rec = recon_shells(g, plan)
    again = forward_family(rec, fam)
    assert again.entries == g.entries


def test_annulus_full_equals_shells():
    f = random_int_grid(2, 3, seed=27)
    plan_full = make_plan(2, 3)
    plan_ann = make_plan(2, 3, alpha=0, beta=3)
    g = tstar_data(f, plan_ann)
    assert recon_annulus(g, plan_ann).values_equal(recon_shells(g, plan_full))


def test_annulus_partial_recovery():
    f = random_int_grid(2, 6, seed=28)
    plan = make_plan(2, 6, alpha=2, beta=6)
    g = tstar_data(f, plan)
    rec = recon_annulus(g, plan)
    assert len(plan.points) < len(enumerate_ball(2, 6))
    for z in plan.points:
        assert rec.get(z) == f.get(z)


def test_annulus_outside_support_is_zero():
    # data family reaches out to radius 4 but f lives inside radius 2
    f = random_int_grid(2, 2, seed=29)
    big = GridFunction(2, 4, f.values)
    plan = make_plan(2, 4, alpha=3, beta=4)
    g = tstar_data(big, plan)
    rec = recon_annulus(g, plan)
    assert all(rec.get(z) == 0.0 for z in plan.points)


def test_annulus_beta_below_radius_refused():
    plan = make_plan(2, 6, alpha=1, beta=4)
    g = tstar_data(GridFunction(2, 6), plan)
    with pytest.raises(PreconditionError):
        recon_annulus(g, plan)


def test_weighted_constant_matches_unweighted():
    f = random_int_grid(2, 3, seed=31)
    plan = make_plan(2, 3, weight=constant_weight(4.0))
    g = tstar_data(f, plan, weight=constant_weight(4.0))
    rec = recon_shells_weighted(g, plan)
    assert rec.values_equal(f)


def test_weighted_random_round_trip():
    rng = random.Random(32)
    cache = {}

    def w(z, dirv):
        key = (z, dirv)
        if key not in cache:
            cache[key] = rng.uniform(0.5, 2.0)
        return cache[key]

    f = random_int_grid(2, 8, seed=33)
    plan = make_plan(2, 8, weight=w)
    g = tstar_data(f, plan, weight=w)
    rec = recon_shells_weighted(g, plan)
    worst = max(abs(rec.get(z) - f.get(z)) / (1.0 + abs(f.get(z)))
                for z in plan.points)
    assert worst <= 1e-9


def test_weighted_chord_round_trip():
    w = chord_weight()
    f = random_int_grid(2, 5, seed=34)
    plan = make_plan(2, 5, weight=w)
    g = tstar_data(f, plan, weight=w)
    rec = recon_shells_weighted(g, plan)
    worst = max(abs(rec.get(z) - f.get(z)) / (1.0 + abs(f.get(z)))
                for z in plan.points)
    assert worst <= 1e-9


def test_weighted_requires_weight():
    plan = make_plan(2, 2)
    g = tstar_data(random_int_grid(2, 2, seed=35), plan)
    with pytest.raises(PreconditionError):
        recon_shells_weighted(g, plan)
