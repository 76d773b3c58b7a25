"""Per-owner materialization of shared clusters.

Every cluster is duplicated into one view per owner. The generating
user's view is a verbatim copy. Other owners either keep the generated
parameters and re-solve both focal points from their own position
(kept-parameters, for far clusters), or keep the focal points and read
angles and delay off the fixed geometry (kept-focal-point, for clusters
within three segment lengths of the joining owner).

A joining owner standing exactly at the generating user's position gets
a verbatim copy in either mode: both rules are fixed points there, and
copying keeps the equality bit-exact instead of round-trip-rounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clustergen import Cluster, ClusterSet
from .geom import SPEED_OF_LIGHT_M_S, angles_from_vector, unit_from_angles
from .layout import Position, UserLayout
from .spherical import fbs_focal_point, lbs_focal_point, solve_departure_geometry, total_path_length

MODE_GENERATOR = "generator"
MODE_KEPT_PARAMETERS = "kept-parameters"
MODE_KEPT_FOCAL = "kept-focal-point"


@dataclass(frozen=True)
class OwnerView:
    """Effective cluster parameters as seen by one owner."""

    user_id: int
    cluster_id: int
    generating_user: int
    recalc_mode: str
    delay_s: float
    power: float
    aoa_az_deg: float
    aoa_el_deg: float
    aod_az_deg: np.ndarray
    aod_el_deg: np.ndarray
    lbs: Position
    fbs: tuple[Position, ...]
    e_len_m: np.ndarray
    g_len_m: float
    interior_raw_m: float
    boresight: bool

    @property
    def n_subarrays(self) -> int:
        return len(self.aod_az_deg)

    def table_entries(self) -> list:
        row = [self.delay_s, self.power, self.aoa_az_deg, self.aoa_el_deg]
        for a in range(self.n_subarrays):
            row.append(float(self.aod_az_deg[a]))
            row.append(float(self.aod_el_deg[a]))
        return row + [self.lbs] + list(self.fbs)


@dataclass(frozen=True)
class OwnerViews:
    """All owner views of one segment, indexed (user, cluster)."""

    segment_index: int
    views: dict[tuple[int, int], OwnerView] = field(repr=False, default_factory=dict)
    by_user: dict[int, tuple[int, ...]] = field(repr=False, default_factory=dict)

    def of(self, user_id: int, cluster_id: int) -> OwnerView:
        return self.views[(user_id, cluster_id)]

    def views_of_user(self, user_id: int) -> list[OwnerView]:
        return [self.views[(user_id, c)] for c in self.by_user[user_id]]

    @property
    def user_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.by_user))


def _verbatim_view(
    cluster: Cluster, user_id: int, mode: str, power: float
) -> OwnerView:
    return OwnerView(
        user_id=user_id,
        cluster_id=cluster.cluster_id,
        generating_user=cluster.generating_user,
        recalc_mode=mode,
        delay_s=cluster.tau_s,
        power=power,
        aoa_az_deg=cluster.aoa_az_deg,
        aoa_el_deg=cluster.aoa_el_deg,
        aod_az_deg=cluster.aod_az_deg,
        aod_el_deg=cluster.aod_el_deg,
        lbs=cluster.lbs,
        fbs=cluster.fbs,
        e_len_m=cluster.e_len_m,
        g_len_m=cluster.g_len_m,
        interior_raw_m=cluster.interior_raw_m,
        boresight=cluster.boresight,
    )


def choose_recalc_mode(
    cluster: Cluster, owner_pos: Position, segment_length_m: float
) -> str:
    """Kept-focal-point iff the receiver-side focal point lies strictly
    within three segment lengths of the joining owner."""
    distance = cluster.lbs.distance_to(owner_pos)
    if distance < 3.0 * segment_length_m:
        return MODE_KEPT_FOCAL
    return MODE_KEPT_PARAMETERS


def _colocated(a: Position, b: Position) -> bool:
    return a.x == b.x and a.y == b.y and a.z == b.z


def recalc_kept_parameters(
    cluster: Cluster,
    owner_id: int,
    owner_pos: Position,
    layout: UserLayout,
    power: float,
) -> OwnerView:
    """Keep delay/power/angles; re-solve both focal points from the
    owner's position with the owner's own total path length."""
    gen_pos = layout.segment_start_position(
        cluster.generating_user, cluster.segment_index
    )
    if _colocated(owner_pos, gen_pos):
        return _verbatim_view(cluster, owner_id, MODE_KEPT_PARAMETERS, power)

    subarrays = layout.array.subarrays
    ref_index = layout.array.reference_subarray().index

    e_len = np.empty(len(subarrays))
    fbs = []
    for sub in subarrays:
        d_c = total_path_length(cluster.tau_s, sub.center, owner_pos)
        e_hat = unit_from_angles(
            float(cluster.aod_az_deg[sub.index]), float(cluster.aod_el_deg[sub.index])
        )
        geom = solve_departure_geometry(sub.center, owner_pos, e_hat, d_c)
        e_len[sub.index] = geom.e_len
        fbs.append(fbs_focal_point(geom, sub.center))

    ref_center = subarrays[ref_index].center
    d_c_ref = total_path_length(cluster.tau_s, ref_center, owner_pos)
    g_hat = unit_from_angles(cluster.aoa_az_deg, cluster.aoa_el_deg)
    lbs = lbs_focal_point(owner_pos, ref_center, g_hat, d_c_ref)
    g_len = owner_pos.distance_to(lbs)

    return OwnerView(
        user_id=owner_id,
        cluster_id=cluster.cluster_id,
        generating_user=cluster.generating_user,
        recalc_mode=MODE_KEPT_PARAMETERS,
        delay_s=cluster.tau_s,
        power=power,
        aoa_az_deg=cluster.aoa_az_deg,
        aoa_el_deg=cluster.aoa_el_deg,
        aod_az_deg=cluster.aod_az_deg,
        aod_el_deg=cluster.aod_el_deg,
        lbs=lbs,
        fbs=tuple(fbs),
        e_len_m=e_len,
        g_len_m=g_len,
        interior_raw_m=d_c_ref - float(e_len[ref_index]) - g_len,
        boresight=cluster.boresight,
    )


def recalc_kept_focal_point(
    cluster: Cluster,
    owner_id: int,
    owner_pos: Position,
    layout: UserLayout,
    power: float,
) -> OwnerView:
    """Keep both focal points; recompute angles from the frozen geometry
    and the delay from the owner's own end-to-end path length.

    The delay reuses the cluster's signed interior length so that the
    generating position is an exact fixed point; the result is floored
    at zero.
    """
    gen_pos = layout.segment_start_position(
        cluster.generating_user, cluster.segment_index
    )
    if _colocated(owner_pos, gen_pos):
        return _verbatim_view(cluster, owner_id, MODE_KEPT_FOCAL, power)

    subarrays = layout.array.subarrays
    ref_index = layout.array.reference_subarray().index

    aod_az = np.empty(len(subarrays))
    aod_el = np.empty(len(subarrays))
    for sub in subarrays:
        az, el = angles_from_vector(
            cluster.fbs[sub.index].as_array() - sub.center.as_array()
        )
        aod_az[sub.index] = az
        aod_el[sub.index] = el
    aoa_az, aoa_el = angles_from_vector(
        cluster.lbs.as_array() - owner_pos.as_array()
    )

    ref_center = subarrays[ref_index].center
    e_ref = float(cluster.e_len_m[ref_index])
    g_len = owner_pos.distance_to(cluster.lbs)
    direct = owner_pos.distance_to(ref_center)
    delay = (e_ref + cluster.interior_raw_m + g_len - direct) / SPEED_OF_LIGHT_M_S
    delay = max(0.0, delay)

    return OwnerView(
        user_id=owner_id,
        cluster_id=cluster.cluster_id,
        generating_user=cluster.generating_user,
        recalc_mode=MODE_KEPT_FOCAL,
        delay_s=delay,
        power=power,
        aoa_az_deg=aoa_az,
        aoa_el_deg=aoa_el,
        aod_az_deg=aod_az,
        aod_el_deg=aod_el,
        lbs=cluster.lbs,
        fbs=cluster.fbs,
        e_len_m=cluster.e_len_m,
        g_len_m=g_len,
        interior_raw_m=cluster.interior_raw_m,
        boresight=cluster.boresight,
    )


def share_clusters(cluster_set: ClusterSet, layout: UserLayout) -> OwnerViews:
    """One view per (owner, cluster), all verbatim copies of the stored
    parameters; non-generators still carry their own normalized power."""
    views: dict[tuple[int, int], OwnerView] = {}
    for user_id, cluster_ids in cluster_set.by_user.items():
        for cluster_id in cluster_ids:
            cluster = cluster_set.clusters[cluster_id]
            mode = MODE_GENERATOR if user_id == cluster.generating_user else "shared"
            views[(user_id, cluster_id)] = _verbatim_view(
                cluster, user_id, mode, cluster_set.effective_power(user_id, cluster_id)
            )
    return OwnerViews(
        segment_index=cluster_set.segment_index,
        views=views,
        by_user=dict(cluster_set.by_user),
    )


def recalculate_views(
    shared: OwnerViews,
    cluster_set: ClusterSet,
    layout: UserLayout,
    segment_length_m: float,
) -> OwnerViews:
    """Resolve every non-generating view through its recalculation mode.

    Zero-excess-delay clusters always keep their focal points: their
    collapsed geometry cannot support a re-solve (there is no excess path
    to distribute), and the focal points are the physically meaningful
    part of such a cluster.
    """
    views: dict[tuple[int, int], OwnerView] = {}
    for (user_id, cluster_id), view in shared.views.items():
        cluster = cluster_set.clusters[cluster_id]
        if user_id == cluster.generating_user:
            views[(user_id, cluster_id)] = view
            continue
        owner_pos = layout.segment_start_position(user_id, shared.segment_index)
        if cluster.boresight:
            mode = MODE_KEPT_FOCAL
        else:
            mode = choose_recalc_mode(cluster, owner_pos, segment_length_m)
        if mode == MODE_KEPT_FOCAL:
            views[(user_id, cluster_id)] = recalc_kept_focal_point(
                cluster, user_id, owner_pos, layout, view.power
            )
        else:
            views[(user_id, cluster_id)] = recalc_kept_parameters(
                cluster, user_id, owner_pos, layout, view.power
            )
    return OwnerViews(
        segment_index=shared.segment_index, views=views, by_user=dict(shared.by_user)
    )
