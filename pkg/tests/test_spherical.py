import numpy as np
import pytest

from auramimo import (
    DegenerateGeometry,
    Position,
    assemble_clusters,
    attach_focal_points,
    draw_lsp,
    fbs_focal_point,
    lbs_focal_point,
    share_table_for_segment,
    solve_departure_geometry,
    total_path_length,
)
from auramimo.clustergen import Cluster, ClusterSet
from auramimo.geom import SPEED_OF_LIGHT_M_S, unit_from_angles
from conftest import make_scenario, make_two_user_layout

C0 = SPEED_OF_LIGHT_M_S


def test_total_path_length_is_excess_plus_direct():
    apos = Position(0.0, 0.0, 10.0)
    user = Position(20.0, 0.0, 1.5)
    direct = np.sqrt(20.0**2 + 8.5**2)
    assert total_path_length(0.0, apos, user) == pytest.approx(direct)
    assert total_path_length(1e-7, apos, user) == pytest.approx(
        1e-7 * C0 + direct, rel=1e-15
    )
    with pytest.raises(ValueError):
        total_path_length(-1e-9, apos, user)


# Hand-solved cases: anchor at origin, user 10 m along +x, total path 20 m.
@pytest.mark.parametrize(
    "e_hat,expected_len,expected_focal",
    [
        ((0.0, 1.0, 0.0), 7.5, (0.0, 7.5, 0.0)),  # perpendicular departure
        ((1.0, 0.0, 0.0), 15.0, (15.0, 0.0, 0.0)),  # straight through the user
        ((-1.0, 0.0, 0.0), 5.0, (-5.0, 0.0, 0.0)),  # directly away
    ],
)
def test_focal_solve_worked_examples(e_hat, expected_len, expected_focal):
    apos = Position(0.0, 0.0, 0.0)
    user = Position(10.0, 0.0, 0.0)
    geom = solve_departure_geometry(apos, user, np.array(e_hat), 20.0)
    assert geom.e_len == pytest.approx(expected_len, rel=1e-12)
    focal = fbs_focal_point(geom, apos)
    np.testing.assert_allclose(focal.as_array(), expected_focal, atol=1e-9)
    # Closure: anchor->focal->user equals the prescribed total length.
    assert geom.e_len + focal.distance_to(user) == pytest.approx(20.0, rel=1e-12)


def test_zero_excess_delay_is_degenerate():
    apos = Position(0.0, 0.0, 0.0)
    user = Position(10.0, 0.0, 0.0)
    d_direct = 10.0
    with pytest.raises(DegenerateGeometry):
        solve_departure_geometry(apos, user, np.array([0.0, 1.0, 0.0]), d_direct)
    # Excess below the geometric tolerance is degenerate too.
    with pytest.raises(DegenerateGeometry):
        solve_departure_geometry(
            apos, user, np.array([0.0, 1.0, 0.0]), d_direct + 1e-10
        )


def test_unnormalized_direction_is_normalized():
    apos = Position(0.0, 0.0, 0.0)
    user = Position(10.0, 0.0, 0.0)
    a = solve_departure_geometry(apos, user, np.array([0.0, 2.0, 0.0]), 20.0)
    b = solve_departure_geometry(apos, user, np.array([0.0, 1.0, 0.0]), 20.0)
    assert a.e_len == pytest.approx(b.e_len, rel=1e-15)


def test_lbs_mirrors_departure_solve():
    user = Position(10.0, 0.0, 0.0)
    apos = Position(0.0, 0.0, 0.0)
    g_hat = unit_from_angles(137.0, 12.0)
    lbs = lbs_focal_point(user, apos, g_hat, 20.0)
    geom = solve_departure_geometry(user, apos, g_hat, 20.0)
    expected = fbs_focal_point(geom, user)
    assert lbs == expected  # identical code path, bit-identical result
    # And the arrival-side closure holds.
    assert user.distance_to(lbs) + lbs.distance_to(apos) == pytest.approx(
        20.0, rel=1e-12
    )


def _random_cases(n, rng):
    apos = rng.uniform([-50, -50, 0], [50, 50, 30], size=(n, 3))
    user = rng.uniform([-50, -50, 0], [50, 50, 3], size=(n, 3))
    tau = rng.uniform(1e-9, 1e-6, size=n)
    az = rng.uniform(-180.0, 180.0, size=n)
    el = rng.uniform(-89.0, 89.0, size=n)
    e_hat = np.stack(
        [
            np.cos(np.radians(el)) * np.cos(np.radians(az)),
            np.cos(np.radians(el)) * np.sin(np.radians(az)),
            np.sin(np.radians(el)),
        ],
        axis=1,
    )
    d_c = tau * C0 + np.linalg.norm(user - apos, axis=1)
    return apos, user, e_hat, d_c


def test_closure_holds_over_random_geometries(rng):
    apos, user, e_hat, d_c = _random_cases(2000, rng)
    for i in range(len(d_c)):
        a = Position(*apos[i])
        u = Position(*user[i])
        geom = solve_departure_geometry(a, u, e_hat[i], float(d_c[i]))
        focal = fbs_focal_point(geom, a)
        total = geom.e_len + focal.distance_to(u)
        assert abs(total - d_c[i]) / d_c[i] <= 1e-9
        assert geom.e_len > 0


def test_solver_matches_bisection_oracle(rng):
    # Oracle: solve len + |apos + len*e - user| = d_c by bisection on
    # [0, d_c]; the left end is negative (no path), the right end
    # nonnegative, and the function is nondecreasing in len.
    apos, user, e_hat, d_c = _random_cases(2000, rng)

    lo = np.zeros_like(d_c)
    hi = d_c.copy()
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        focal = apos + mid[:, None] * e_hat
        f = mid + np.linalg.norm(focal - user, axis=1) - d_c
        hi = np.where(f >= 0, mid, hi)
        lo = np.where(f < 0, mid, lo)
    oracle = 0.5 * (lo + hi)

    for i in range(len(d_c)):
        geom = solve_departure_geometry(
            Position(*apos[i]), Position(*user[i]), e_hat[i], float(d_c[i])
        )
        assert abs(geom.e_len - oracle[i]) <= 1e-6


def test_focal_point_lies_along_departure_direction(rng):
    apos, user, e_hat, d_c = _random_cases(200, rng)
    for i in range(len(d_c)):
        a = Position(*apos[i])
        geom = solve_departure_geometry(
            a, Position(*user[i]), e_hat[i], float(d_c[i])
        )
        focal = fbs_focal_point(geom, a)
        direction = (focal.as_array() - apos[i]) / geom.e_len
        np.testing.assert_allclose(direction, e_hat[i], atol=1e-9)


# ---------------------------------------------------------------------------
# Attachment to generated cluster sets
# ---------------------------------------------------------------------------


def _attached(layout, seed=3):
    scenario = make_scenario()
    table = share_table_for_segment(layout, 0, 7)
    lsp = draw_lsp(scenario, layout, seed=seed)
    cs = assemble_clusters(table, lsp, layout, scenario, seed=seed)
    return attach_focal_points(cs, layout, lsp_draw=lsp, seed=seed), layout


def test_attach_full_set_with_four_subarrays():
    cs, layout = _attached(make_two_user_layout(2.0))
    subs = layout.array.subarrays
    ref = layout.array.reference_subarray().index
    for c in cs.clusters.values():
        assert c.lbs is not None and len(c.fbs) == 4
        assert len(c.table_entries()) == 5 + 3 * 4
        gen_pos = layout.segment_start_position(c.generating_user, 0)
        if c.boresight:
            assert c.lbs == gen_pos
            assert all(f == gen_pos for f in c.fbs)
            assert c.interior_raw_m == 0.0
            assert c.g_len_m == 0.0
            continue
        # Departure-side closure per sub-array.
        for sub in subs:
            d_c = total_path_length(c.tau_s, sub.center, gen_pos)
            total = c.e_len_m[sub.index] + c.fbs[sub.index].distance_to(gen_pos)
            assert abs(total - d_c) / d_c <= 1e-9
        # Arrival-side closure against the reference sub-array.
        d_ref = total_path_length(c.tau_s, subs[ref].center, gen_pos)
        lbs_total = c.g_len_m + c.lbs.distance_to(subs[ref].center)
        assert abs(lbs_total - d_ref) / d_ref <= 1e-9
        assert c.d_c_ref_m == pytest.approx(d_ref, rel=1e-12)
        assert c.interior_raw_m == pytest.approx(
            d_ref - c.e_len_m[ref] - c.g_len_m, abs=1e-9
        )


def test_table_entries_require_attachment():
    layout = make_two_user_layout(2.0)
    scenario = make_scenario()
    table = share_table_for_segment(layout, 0, 7)
    lsp = draw_lsp(scenario, layout, seed=3)
    cs = assemble_clusters(table, lsp, layout, scenario, seed=3)
    c = next(iter(cs.clusters.values()))
    with pytest.raises(ValueError):
        c.table_entries()


def _degenerate_cluster_set():
    # Zero excess delay without the boresight marker cannot be solved.
    cluster = Cluster(
        cluster_id=0,
        segment_index=0,
        owner_set=(1,),
        generating_user=1,
        tau_s=0.0,
        power=1.0,
        power_raw=1.0,
        aoa_az_deg=30.0,
        aoa_el_deg=0.0,
        aod_az_deg=np.array([10.0]),
        aod_el_deg=np.array([0.0]),
        boresight=False,
    )
    return ClusterSet(
        segment_index=0,
        clusters={0: cluster},
        by_user={1: (0,)},
        power_denominator={1: 1.0},
    )


def test_degenerate_cluster_raises_without_redraw_source():
    layout = make_two_user_layout(2.0)
    with pytest.raises(DegenerateGeometry):
        attach_focal_points(_degenerate_cluster_set(), layout)


def test_degenerate_cluster_exhausts_retries():
    layout = make_two_user_layout(2.0)
    lsp = draw_lsp(make_scenario(), layout, seed=1)
    # Redrawn angles cannot fix a zero excess delay; the retry loop must
    # give up with a descriptive error rather than spin forever.
    with pytest.raises(DegenerateGeometry, match="redraws"):
        attach_focal_points(_degenerate_cluster_set(), layout, lsp_draw=lsp, seed=1)
