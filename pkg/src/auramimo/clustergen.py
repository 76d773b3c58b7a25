"""Initial cluster parameters: delays, powers, arrival and per-sub-array
departure angles, generated per sharing group from one member's LSPs.

Shared clusters are single objects referenced from every owner's list;
per-user parameter views are materialized later by the sharing module.
RNG streams are keyed by (segment, group) so groups can be generated in
any order or in parallel without changing a single draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingLsp
from .geom import clip_elevation_deg, wrap_azimuth_deg
from .grouping import ShareTable
from .layout import Position, UserLayout
from .lsp import STREAM_CLUSTERS, LspDraw, ScenarioConfig


@dataclass
class Cluster:
    """One multipath cluster with per-sub-array departure parameters.

    Before focal points are attached the cluster carries 4 + 2A scalars
    (delay, power, arrival az/el, A departure az/el pairs); afterwards it
    carries 5 + 3A table entries (each focal point counts as one).
    `power` is the generating user's share after per-user normalization;
    `power_raw` is the within-group share used to renormalize for other
    owners.
    """

    cluster_id: int
    segment_index: int
    owner_set: tuple[int, ...]
    generating_user: int
    tau_s: float
    power: float
    power_raw: float
    aoa_az_deg: float
    aoa_el_deg: float
    aod_az_deg: np.ndarray
    aod_el_deg: np.ndarray
    boresight: bool = False
    # Attached by the focal-point pass:
    lbs: Position | None = None
    fbs: tuple[Position, ...] | None = None
    d_c_ref_m: float | None = None
    g_len_m: float | None = None
    e_len_m: np.ndarray | None = None
    interior_raw_m: float | None = None

    @property
    def n_subarrays(self) -> int:
        return len(self.aod_az_deg)

    def pre_focal_scalars(self) -> list[float]:
        """The 4 + 2A scalar parameters of the pre-focal-point table."""
        row = [self.tau_s, self.power, self.aoa_az_deg, self.aoa_el_deg]
        for a in range(self.n_subarrays):
            row.append(float(self.aod_az_deg[a]))
            row.append(float(self.aod_el_deg[a]))
        return row

    def table_entries(self) -> list:
        """The 5 + 3A entries after focal points (positions count as one)."""
        if self.lbs is None or self.fbs is None:
            raise ValueError(f"cluster {self.cluster_id} has no focal points yet")
        return self.pre_focal_scalars() + [self.lbs] + list(self.fbs)


@dataclass(frozen=True)
class ClusterSet:
    """All clusters of one segment plus per-user ordered membership."""

    segment_index: int
    clusters: dict[int, Cluster] = field(repr=False, default_factory=dict)
    by_user: dict[int, tuple[int, ...]] = field(repr=False, default_factory=dict)
    power_denominator: dict[int, float] = field(repr=False, default_factory=dict)

    def clusters_of_user(self, user_id: int) -> list[Cluster]:
        return [self.clusters[c] for c in self.by_user[user_id]]

    def effective_power(self, user_id: int, cluster_id: int) -> float:
        """Cluster power renormalized so this user's powers sum to 1."""
        return self.clusters[cluster_id].power_raw / self.power_denominator[user_id]

    @property
    def user_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.by_user))


def gen_delays(n: int, sigma_tau_s: float, r_tau: float, rng) -> np.ndarray:
    """n excess delays: exponential draws with scale r_tau * sigma_tau,
    sorted ascending, shifted so the first is exactly 0."""
    if n < 1:
        raise ValueError("need at least one cluster")
    rng = _as_rng(rng)
    raw = rng.exponential(scale=r_tau * sigma_tau_s, size=n)
    raw.sort()
    return raw - raw[0]


def gen_powers(
    delays: np.ndarray,
    sigma_tau_s: float,
    r_tau: float,
    shadow_std_db: float,
    rng,
) -> np.ndarray:
    """Exponentially decaying powers with per-cluster log-normal shadowing,
    normalized to sum 1."""
    rng = _as_rng(rng)
    delays = np.asarray(delays, dtype=float)
    shadow_db = rng.normal(0.0, shadow_std_db, size=delays.shape)
    p = np.exp(-delays * (r_tau - 1.0) / (r_tau * sigma_tau_s)) * 10.0 ** (
        -shadow_db / 10.0
    )
    return p / p.sum()


def gen_arrival_angles(
    powers: np.ndarray, sigma_aoa_deg: float, sigma_eoa_deg: float, rng
) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster arrival (azimuth, elevation) in degrees.

    Azimuth magnitudes are Gaussian with std sigma_aoa and get a random
    sign, then wrap to (-180, 180]; elevations are Gaussian with std
    sigma_eoa clipped to [-90, 90].
    """
    rng = _as_rng(rng)
    n = len(powers)
    az_mag = np.abs(rng.normal(0.0, sigma_aoa_deg, size=n))
    signs = rng.integers(0, 2, size=n) * 2 - 1
    az = wrap_azimuth_deg(signs * az_mag)
    el = clip_elevation_deg(rng.normal(0.0, sigma_eoa_deg, size=n))
    return np.atleast_1d(az), np.atleast_1d(el)


def gen_departure_angles(
    n_subarrays: int, sigma_aod_deg: float, sigma_eod_deg: float, rng
) -> tuple[np.ndarray, np.ndarray]:
    """Independent departure (azimuth, elevation) per sub-array, same
    marginal law as the arrival angles with departure spreads."""
    if n_subarrays < 1:
        raise ValueError("need at least one sub-array")
    rng = _as_rng(rng)
    az_mag = np.abs(rng.normal(0.0, sigma_aod_deg, size=n_subarrays))
    signs = rng.integers(0, 2, size=n_subarrays) * 2 - 1
    az = wrap_azimuth_deg(signs * az_mag)
    el = clip_elevation_deg(rng.normal(0.0, sigma_eod_deg, size=n_subarrays))
    return np.atleast_1d(az), np.atleast_1d(el)


def _as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def group_rng(seed: int, segment_index: int, group_row: int) -> np.random.Generator:
    """The RNG stream of one sharing group; keyed, not sequential."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(STREAM_CLUSTERS, segment_index, group_row))
    )


def assemble_clusters(
    share_table: ShareTable,
    lsp_draw: LspDraw,
    layout: UserLayout,
    scenario: ScenarioConfig,
    seed: int,
) -> ClusterSet:
    """Generate every group's clusters from a uniformly chosen member's LSPs.

    Per group, in its own RNG stream, the draw order is: generating user
    (multi-user groups only), delays, shadowed powers, arrival angles,
    then per cluster the per-sub-array departure angles. Powers are
    group-normalized; the stored cluster power is the generating user's
    per-user-normalized share.
    """
    n_subarrays = layout.array.n_subarrays
    segment_index = share_table.segment_index
    clusters: dict[int, Cluster] = {}

    for group_row, group in enumerate(share_table.groups):
        if group.count == 0:
            continue
        rng = group_rng(seed, segment_index, group_row)
        if len(group.members) == 1:
            generator = group.members[0]
        else:
            generator = group.members[int(rng.integers(len(group.members)))]
        lsp = lsp_draw.of(generator, segment_index)

        delays = gen_delays(group.count, lsp.sigma_tau_s, scenario.r_tau, rng)
        powers = gen_powers(
            delays, lsp.sigma_tau_s, scenario.r_tau, scenario.shadow_std_db, rng
        )
        aoa_az, aoa_el = gen_arrival_angles(
            powers, lsp.sigma_aoa_deg, lsp.sigma_eoa_deg, rng
        )
        for k, cluster_id in enumerate(group.cluster_ids):
            aod_az, aod_el = gen_departure_angles(
                n_subarrays, lsp.sigma_aod_deg, lsp.sigma_eod_deg, rng
            )
            clusters[cluster_id] = Cluster(
                cluster_id=cluster_id,
                segment_index=segment_index,
                owner_set=group.members,
                generating_user=generator,
                tau_s=float(delays[k]),
                power=float(powers[k]),  # finalized to per-user share below
                power_raw=float(powers[k]),
                aoa_az_deg=float(aoa_az[k]),
                aoa_el_deg=float(aoa_el[k]),
                aod_az_deg=aod_az,
                aod_el_deg=aod_el,
                boresight=(delays[k] == 0.0),
            )

    by_user = {
        u: tuple(sorted(share_table.clusters_of_user(u))) for u in share_table.users
    }
    denominator = {
        u: float(sum(clusters[c].power_raw for c in ids))
        for u, ids in by_user.items()
    }
    for c in clusters.values():
        c.power = c.power_raw / denominator[c.generating_user]

    return ClusterSet(
        segment_index=segment_index,
        clusters=clusters,
        by_user=by_user,
        power_denominator=denominator,
    )
