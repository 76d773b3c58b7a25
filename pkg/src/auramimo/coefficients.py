"""Channel coefficient synthesis from owner views.

Each cluster expands into 20 scatterers. Their angular offsets are the
centers of 20 equal-mass bins of a zero-mean Laplacian, normalized to
unit RMS and scaled by the intra-cluster spread; they rotate the focal
directions in azimuth, so every scatterer gets its own bounce points at
the focal distances. Per transmit element i (in sub-array a) and
snapshot t the scatterer path is

    L(i, l, t) = |elem_i - FBS_{a,l}| + D_int + |LBS_l - rx(t)|

and the coefficient is the sum over scatterers of
sqrt(power/20) * exp(-j*2*pi/lambda * L + j*phi_l). Scatterer positions
are frozen per segment; only the receiver term moves with the snapshot
(drifting). All randomness (per-cluster phases and the departure-side
offset pairing) is keyed by cluster id, so synthesis order and worker
count cannot change a single value.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import IncompleteViews
from .geom import SPEED_OF_LIGHT_M_S, rotate_azimuth
from .layout import UserLayout
from .lsp import STREAM_SCATTERERS
from .sharing import OwnerView, OwnerViews

log = logging.getLogger(__name__)

N_SCATTERERS = 20


def laplacian_offsets(n: int = N_SCATTERERS) -> np.ndarray:
    """n angular offsets at the centers of n equal-mass Laplacian bins,
    normalized to unit RMS; exactly symmetric in +/- pairs.

    The lower half comes from the Laplacian quantile function ln(2q)
    (q < 1/2) and is mirrored, so the sum is exactly zero.
    """
    if n == 1:
        return np.zeros(1)
    if n % 2 != 0:
        raise ValueError("scatterer count must be even (or 1)")
    half = n // 2
    # q_k = (k + 0.5)/n for the lower half; quantile(q) = ln(2q).
    lower = np.log((2.0 * np.arange(half) + 1.0) / n)
    offsets = np.concatenate([lower, -lower[::-1]])
    rms = math.sqrt(float(np.mean(offsets**2)))
    return offsets / rms


def scatterer_randomness(
    seed: int, cluster_id: int, n: int = N_SCATTERERS
) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster initial phases and the departure-side offset
    permutation, keyed by cluster id alone so every owner of a shared
    cluster sees the same scatterers."""
    rng = np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(STREAM_SCATTERERS, cluster_id))
    )
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n)
    perm = rng.permutation(n)
    return phases, perm


def _fan_positions(
    anchor: np.ndarray, focal: np.ndarray, offsets_deg: np.ndarray
) -> np.ndarray:
    """Scatterer bounce points: the anchor->focal direction rotated in
    azimuth by each offset, at the original focal distance. Shape (n, 3).
    A zero-length focal leg collapses the fan onto the focal point."""
    delta = focal - anchor
    dist = float(np.linalg.norm(delta))
    if dist == 0.0:
        return np.tile(focal, (len(offsets_deg), 1))
    direction = delta / dist
    return anchor + dist * np.array([rotate_azimuth(direction, d) for d in offsets_deg])


@dataclass(frozen=True)
class ChannelTensor:
    """Synthesized coefficients and path delays.

    coefficients: complex, (user, rx antenna, tx element, cluster,
    snapshot); delays: seconds, (user, cluster, snapshot). Users are
    ordered by id along the first axis.
    """

    user_ids: tuple[int, ...]
    coefficients: np.ndarray
    delays: np.ndarray
    carrier_hz: float
    seed: int

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("non-finite channel coefficients")
        if not np.all(np.isfinite(self.delays)) or np.any(self.delays < 0):
            raise ValueError("delays must be finite and nonnegative")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coefficients.shape

    def user_index(self, user_id: int) -> int:
        return self.user_ids.index(user_id)


def _synthesize_user(
    views: list[OwnerView],
    elements: np.ndarray,
    sub_of_element: np.ndarray,
    sub_centers: np.ndarray,
    rx_positions: np.ndarray,
    anchor: np.ndarray,
    wavenumber: float,
    offsets_deg: np.ndarray,
    randomness: dict[int, tuple[np.ndarray, np.ndarray]],
    ref_index: int,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Coefficients (tx, cluster, snapshot) and delays (cluster, snapshot)
    for one user; also returns how many views had a negative interior
    length clamped away."""
    n_tx = elements.shape[0]
    n_snap = rx_positions.shape[0]
    n_clusters = len(views)
    coeff = np.empty((n_tx, n_clusters, n_snap), dtype=np.complex128)
    delays = np.empty((n_clusters, n_snap))
    clamped = 0

    for c, view in enumerate(views):
        phases, perm = randomness[view.cluster_id]
        n_sc = len(phases)
        amp = math.sqrt(view.power / n_sc)
        interior = view.interior_raw_m
        if interior < 0.0:
            clamped += 1
            interior = 0.0

        # Frozen scatterer bounce points for this owner's segment.
        lbs_points = _fan_positions(anchor, view.lbs.as_array(), offsets_deg)
        dep_offsets = offsets_deg[perm]
        fbs_points = np.array(
            [
                _fan_positions(sub_centers[a], view.fbs[a].as_array(), dep_offsets)
                for a in range(len(view.fbs))
            ]
        )  # (A, n_sc, 3)

        # Element -> departure bounce point, per scatterer: (tx, n_sc).
        fbs_per_elem = fbs_points[sub_of_element]  # (tx, n_sc, 3)
        d_tx = np.linalg.norm(elements[:, None, :] - fbs_per_elem, axis=2)
        # Arrival bounce point -> rx position, per snapshot: (snap, n_sc).
        d_rx = np.linalg.norm(
            rx_positions[:, None, :] - lbs_points[None, :, :], axis=2
        )

        tx_phase = np.exp(-1j * wavenumber * (d_tx + interior))
        rx_phase = np.exp(1j * (phases[None, :] - wavenumber * d_rx))
        coeff[:, c, :] = amp * np.einsum("il,tl->it", tx_phase, rx_phase)

        # Center-path delay: reference-sub-array leg + interior + moving
        # receiver leg, all scatterer offsets at zero.
        d_center_rx = np.linalg.norm(rx_positions - view.lbs.as_array(), axis=1)
        delays[c, :] = (
            float(view.e_len_m[ref_index]) + interior + d_center_rx
        ) / SPEED_OF_LIGHT_M_S

    return coeff, delays, clamped


def synthesize(
    views: OwnerViews,
    layout: UserLayout,
    carrier_hz: float,
    seed: int,
    *,
    cluster_angle_spread_deg: float = 3.0,
    n_scatterers: int = N_SCATTERERS,
    workers: int = 1,
) -> ChannelTensor:
    """Synthesize the channel tensor for one segment.

    Scatterer phases and offset pairings are derived from (seed, cluster
    id) before any parallel work starts; per-user synthesis then only
    reads frozen inputs, so the result is independent of worker count and
    completion order. `n_scatterers` exists as a test hook (1 collapses
    the cluster to its center ray).
    """
    user_ids = views.user_ids
    if not user_ids:
        raise IncompleteViews("no owner views to synthesize")
    per_user = [views.views_of_user(u) for u in user_ids]
    counts = {len(v) for v in per_user}
    if len(counts) != 1:
        raise IncompleteViews(f"users disagree on cluster count: {sorted(counts)}")
    for u, user_views in zip(user_ids, per_user):
        for v in user_views:
            if v.lbs is None or v.fbs is None or v.e_len_m is None:
                raise IncompleteViews(
                    f"view (user {u}, cluster {v.cluster_id}) has no focal points"
                )

    offsets = laplacian_offsets(n_scatterers) * cluster_angle_spread_deg
    all_cluster_ids = sorted({v.cluster_id for uv in per_user for v in uv})
    randomness = {
        cid: scatterer_randomness(seed, cid, n_scatterers) for cid in all_cluster_ids
    }

    elements = layout.array.element_matrix()
    sub_of_element = layout.array.subarray_of_element()
    sub_centers = np.array([s.center.as_array() for s in layout.array.subarrays])
    ref_index = layout.array.reference_subarray().index
    wavenumber = 2.0 * math.pi * carrier_hz / SPEED_OF_LIGHT_M_S

    n_users = len(user_ids)
    n_tx = elements.shape[0]
    n_clusters = counts.pop()
    segment = views.segment_index
    n_snap = layout.segments[segment].n_snapshots

    coefficients = np.empty((n_users, 1, n_tx, n_clusters, n_snap), dtype=np.complex128)
    delays = np.empty((n_users, n_clusters, n_snap))

    def run_one(k: int) -> int:
        u = user_ids[k]
        rx = layout.segment_positions(u, segment)
        anchor = layout.segment_start_position(u, segment).as_array()
        coeff_u, delays_u, clamped = _synthesize_user(
            per_user[k],
            elements,
            sub_of_element,
            sub_centers,
            rx,
            anchor,
            wavenumber,
            offsets,
            randomness,
            ref_index,
        )
        coefficients[k, 0] = coeff_u
        delays[k] = delays_u
        return clamped

    if workers <= 1:
        clamp_counts = [run_one(k) for k in range(n_users)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            clamp_counts = list(pool.map(run_one, range(n_users)))
    total_clamped = sum(clamp_counts)
    if total_clamped:
        log.warning(
            "segment %d: interior path length clamped to 0 for %d cluster view(s)",
            segment,
            total_clamped,
        )

    return ChannelTensor(
        user_ids=user_ids,
        coefficients=coefficients,
        delays=delays,
        carrier_hz=carrier_hz,
        seed=seed,
    )


def planar_vs_spherical_error(
    view: OwnerView, layout: UserLayout, carrier_hz: float
) -> np.ndarray:
    """Max absolute per-element phase deviation (radians) per sub-array
    between spherical distances to the departure focal point and the
    far-field linear phase along the sub-array's departure direction."""
    wavenumber = 2.0 * math.pi * carrier_hz / SPEED_OF_LIGHT_M_S
    elements = layout.array.element_matrix()
    errors = np.zeros(len(view.fbs))
    for sub in layout.array.subarrays:
        focal = view.fbs[sub.index].as_array()
        center = sub.center.as_array()
        leg = focal - center
        dist = float(np.linalg.norm(leg))
        if dist == 0.0:
            continue
        direction = leg / dist
        elems = elements[sub.element_range[0] : sub.element_range[1]]
        d_spherical = np.linalg.norm(elems - focal, axis=1)
        d_linear = dist - (elems - center) @ direction
        errors[sub.index] = float(np.max(np.abs(d_spherical - d_linear))) * wavenumber
    return errors
