"""Focal points for spherical-wave synthesis.

A cluster's total path length is fixed by its excess delay plus the
straight-line distance between the sub-array center and the user. Given
a departure (or arrival) direction, the law of cosines pins the distance
from the array (or user) to the single bounce point that closes the path
at exactly that total length; those bounce points are the transmitter-
and receiver-side focal points. The closed form is

    len = (d_c^2 - |r0|^2) / (2 * (d_c - r0 . dir))

with r0 the anchor-to-far-end vector, which always satisfies the closure
len + |focal - far_end| = d_c. It degenerates only when there is no
excess path (d_c -> |r0|, i.e. zero excess delay).

Zero-excess-delay clusters (one per sharing group by construction) are
handled by collapsing both focal points onto the generating user's
segment-start position, which reproduces the direct-path length for
every element without inventing geometry the delay cannot support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clustergen import ClusterSet, gen_arrival_angles, gen_departure_angles
from .errors import DegenerateGeometry
from .geom import SPEED_OF_LIGHT_M_S, unit_from_angles
from .layout import Position, UserLayout
from .lsp import STREAM_REDRAW, LspDraw

EPSILON_M = 1e-9
MAX_ANGLE_RETRIES = 16


@dataclass(frozen=True)
class FocalGeometry:
    """Solved single-bounce geometry on the departure side.

    r0: anchor-to-user vector (meters); d_c: total path length; e_hat:
    unit departure direction; e_len: anchor-to-focal distance. beta (the
    angle at the anchor between r0 and e_hat, degrees) and f_vec (the
    user-to-focal vector) are diagnostics.
    """

    r0: np.ndarray
    d_c: float
    e_hat: np.ndarray
    e_len: float
    beta_deg: float
    f_vec: np.ndarray


def total_path_length(tau_s: float, apos: Position, user_pos: Position) -> float:
    """Total propagation path length: excess delay times c plus the
    direct anchor-user distance."""
    if tau_s < 0:
        raise ValueError(f"excess delay must be nonnegative, got {tau_s}")
    return tau_s * SPEED_OF_LIGHT_M_S + apos.distance_to(user_pos)


def _solve_focal_length(d_c: float, r0: np.ndarray, direction: np.ndarray) -> float:
    """Distance along `direction` from the anchor to the bounce point."""
    r0_norm = float(np.linalg.norm(r0))
    if d_c <= r0_norm + EPSILON_M:
        raise DegenerateGeometry(
            f"no excess path: d_c={d_c!r} vs direct {r0_norm!r}"
        )
    denom = 2.0 * (d_c - float(r0 @ direction))
    if denom <= EPSILON_M:
        raise DegenerateGeometry(
            f"direction inconsistent with delay: denominator {denom!r}"
        )
    return (d_c * d_c - r0_norm * r0_norm) / denom


def solve_departure_geometry(
    apos: Position, user_pos: Position, e_hat: np.ndarray, d_c: float
) -> FocalGeometry:
    """Full departure-side solve with diagnostics."""
    e_hat = np.asarray(e_hat, dtype=float)
    norm = float(np.linalg.norm(e_hat))
    if abs(norm - 1.0) > 1e-12:
        e_hat = e_hat / norm
    r0 = user_pos.as_array() - apos.as_array()
    e_len = _solve_focal_length(d_c, r0, e_hat)
    r0_norm = float(np.linalg.norm(r0))
    if r0_norm > 0:
        cos_beta = float(np.clip(r0 @ e_hat / r0_norm, -1.0, 1.0))
        beta = math.degrees(math.acos(cos_beta))
    else:
        beta = 0.0
    f_vec = e_len * e_hat - r0
    return FocalGeometry(
        r0=r0, d_c=float(d_c), e_hat=e_hat, e_len=e_len, beta_deg=beta, f_vec=f_vec
    )


def fbs_focal_point(geom: FocalGeometry, apos: Position) -> Position:
    """Transmitter-side bounce point: anchor plus e_len along e_hat."""
    p = apos.as_array() + geom.e_len * geom.e_hat
    return Position(float(p[0]), float(p[1]), float(p[2]))


def lbs_focal_point(
    user_pos: Position, apos: Position, g_hat: np.ndarray, d_c: float
) -> Position:
    """Receiver-side bounce point; the same solve with the roles swapped
    (anchor = user, far end = sub-array center, direction = arrival)."""
    geom = solve_departure_geometry(user_pos, apos, g_hat, d_c)
    return fbs_focal_point(geom, user_pos)


def _attach_one(cluster, gen_pos: Position, layout: UserLayout) -> None:
    """Solve and store LBS, per-sub-array FBS, and path bookkeeping."""
    subarrays = layout.array.subarrays
    ref_index = layout.array.reference_subarray().index

    if cluster.boresight:
        # Zero excess delay: both bounce points collapse onto the
        # generating user's segment-start position. Drawn angles are kept
        # in the table; the geometry simply cannot bend the path.
        cluster.lbs = gen_pos
        cluster.fbs = tuple(gen_pos for _ in subarrays)
        cluster.e_len_m = np.array(
            [gen_pos.distance_to(s.center) for s in subarrays]
        )
        cluster.g_len_m = 0.0
        cluster.d_c_ref_m = float(cluster.e_len_m[ref_index])
        cluster.interior_raw_m = 0.0
        return

    e_len = np.empty(len(subarrays))
    fbs = []
    for sub in subarrays:
        d_c = total_path_length(cluster.tau_s, sub.center, gen_pos)
        e_hat = unit_from_angles(
            float(cluster.aod_az_deg[sub.index]), float(cluster.aod_el_deg[sub.index])
        )
        geom = solve_departure_geometry(sub.center, gen_pos, e_hat, d_c)
        e_len[sub.index] = geom.e_len
        fbs.append(fbs_focal_point(geom, sub.center))

    ref_center = subarrays[ref_index].center
    d_c_ref = total_path_length(cluster.tau_s, ref_center, gen_pos)
    g_hat = unit_from_angles(cluster.aoa_az_deg, cluster.aoa_el_deg)
    lbs = lbs_focal_point(gen_pos, ref_center, g_hat, d_c_ref)

    cluster.lbs = lbs
    cluster.fbs = tuple(fbs)
    cluster.e_len_m = e_len
    cluster.g_len_m = gen_pos.distance_to(lbs)
    cluster.d_c_ref_m = d_c_ref
    cluster.interior_raw_m = d_c_ref - float(e_len[ref_index]) - cluster.g_len_m


def attach_focal_points(
    cluster_set: ClusterSet,
    layout: UserLayout,
    lsp_draw: LspDraw | None = None,
    seed: int = 0,
) -> ClusterSet:
    """Attach one LBS and A FBS positions to every cluster in place.

    On a degenerate solve the cluster's angles are redrawn from a
    dedicated per-cluster stream (up to MAX_ANGLE_RETRIES, needs
    lsp_draw); delays make degeneracy unreachable for nonzero excess
    delay, so this is a safety net, not a hot path.
    """
    for cluster_id in sorted(cluster_set.clusters):
        cluster = cluster_set.clusters[cluster_id]
        gen_pos = layout.segment_start_position(
            cluster.generating_user, cluster_set.segment_index
        )
        try:
            _attach_one(cluster, gen_pos, layout)
            continue
        except DegenerateGeometry:
            if lsp_draw is None:
                raise
        lsp = lsp_draw.of(cluster.generating_user, cluster_set.segment_index)
        rng = np.random.default_rng(
            np.random.SeedSequence(
                seed, spawn_key=(STREAM_REDRAW, cluster_set.segment_index, cluster_id)
            )
        )
        for attempt in range(MAX_ANGLE_RETRIES):
            aod_az, aod_el = gen_departure_angles(
                cluster.n_subarrays, lsp.sigma_aod_deg, lsp.sigma_eod_deg, rng
            )
            aoa_az, aoa_el = gen_arrival_angles(
                np.ones(1), lsp.sigma_aoa_deg, lsp.sigma_eoa_deg, rng
            )
            cluster.aod_az_deg = aod_az
            cluster.aod_el_deg = aod_el
            cluster.aoa_az_deg = float(aoa_az[0])
            cluster.aoa_el_deg = float(aoa_el[0])
            try:
                _attach_one(cluster, gen_pos, layout)
                break
            except DegenerateGeometry:
                if attempt == MAX_ANGLE_RETRIES - 1:
                    raise DegenerateGeometry(
                        f"cluster {cluster_id}: geometry still degenerate after "
                        f"{MAX_ANGLE_RETRIES} angle redraws"
                    )
    return cluster_set
