"""Seeded end-to-end orchestration.

Per segment, in order: sharing proportions and counts, initial cluster
parameters, focal points, per-owner duplication, recalculation; then
coefficient synthesis and metrics. Cluster ids are unique across the
whole run (each segment's allocation starts where the previous ended),
which keys the per-cluster scatterer randomness globally.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustergen import ClusterSet, assemble_clusters
from .coefficients import ChannelTensor, planar_vs_spherical_error, synthesize
from .config import RunConfig
from .grouping import ShareTable, share_table_for_segment
from .lsp import draw_lsp
from .metrics import MetricsReport, correlation_metrics
from .sharing import OwnerViews, recalculate_views, share_clusters
from .spherical import attach_focal_points
from .tensorio import write_tensor_binary, write_tensor_text


@dataclass(frozen=True)
class SegmentResult:
    share_table: ShareTable
    cluster_set: ClusterSet
    views: OwnerViews


@dataclass(frozen=True)
class RunResult:
    config: RunConfig
    segments: list[SegmentResult]
    tensor: ChannelTensor
    metrics: MetricsReport


def run_segment(
    config: RunConfig, lsp_draw, segment_index: int, id_base: int = 0
) -> SegmentResult:
    """The five per-segment stages, in order, for one segment."""
    layout = config.layout
    table = share_table_for_segment(
        layout,
        segment_index,
        config.total_clusters_per_user,
        id_base=id_base,
    )
    clusters = assemble_clusters(table, lsp_draw, layout, config.scenario, config.seed)
    attach_focal_points(clusters, layout, lsp_draw, config.seed)
    shared = share_clusters(clusters, layout)
    views = recalculate_views(
        shared, clusters, layout, layout.segments[segment_index].length_m
    )
    return SegmentResult(share_table=table, cluster_set=clusters, views=views)


def run(config: RunConfig) -> RunResult:
    layout = config.layout
    lsp_draw = draw_lsp(config.scenario, layout, config.seed)

    segments: list[SegmentResult] = []
    id_base = 0
    for segment in layout.segments:
        result = run_segment(config, lsp_draw, segment.index, id_base)
        ids = result.share_table.cluster_ids
        if ids:
            id_base = max(ids) + 1
        segments.append(result)

    tensors = [
        synthesize(
            seg.views,
            layout,
            config.carrier_hz,
            config.seed,
            cluster_angle_spread_deg=config.scenario.cluster_angle_spread_deg,
            workers=config.workers,
        )
        for seg in segments
    ]
    tensor = ChannelTensor(
        user_ids=tensors[0].user_ids,
        coefficients=np.concatenate([t.coefficients for t in tensors], axis=4),
        delays=np.concatenate([t.delays for t in tensors], axis=2),
        carrier_hz=config.carrier_hz,
        seed=config.seed,
    )

    report = correlation_metrics(tensor)
    _fill_sharing_and_planar_metrics(report, segments, config)
    return RunResult(config=config, segments=segments, tensor=tensor, metrics=report)


def _fill_sharing_and_planar_metrics(
    report: MetricsReport, segments: list[SegmentResult], config: RunConfig
) -> None:
    users = config.layout.user_ids
    for i, u in enumerate(users):
        for v in users[i + 1 :]:
            shared = 0
            for seg in segments:
                ids_u = set(seg.share_table.clusters_of_user(u))
                ids_v = set(seg.share_table.clusters_of_user(v))
                shared += len(ids_u & ids_v)
            report.shared_cluster_counts[(u, v)] = shared

    worst: dict[int, float] = {}
    for seg in segments:
        for view in seg.views.views.values():
            errors = planar_vs_spherical_error(view, config.layout, config.carrier_hz)
            for sub_index, err in enumerate(errors):
                worst[sub_index] = max(worst.get(sub_index, 0.0), float(err))
    report.planar_error_max_rad.update(worst)


def _fmt(value) -> str:
    if isinstance(value, float):  # incl. numpy float64, repr'd as plain float
        return repr(float(value))
    return str(value)


def _view_param_columns(view, n_subarrays: int) -> list[str]:
    cols = [
        _fmt(view.delay_s),
        _fmt(view.power),
        _fmt(view.aoa_az_deg),
        _fmt(view.aoa_el_deg),
    ]
    for a in range(n_subarrays):
        cols.append(_fmt(float(view.aod_az_deg[a])))
        cols.append(_fmt(float(view.aod_el_deg[a])))
    cols += [_fmt(view.lbs.x), _fmt(view.lbs.y), _fmt(view.lbs.z)]
    for a in range(n_subarrays):
        p = view.fbs[a]
        cols += [_fmt(p.x), _fmt(p.y), _fmt(p.z)]
    return cols


def _param_header(n_subarrays: int) -> list[str]:
    head = ["delay_s", "power", "aoa_az_deg", "aoa_el_deg"]
    for a in range(n_subarrays):
        head += [f"aod_az_deg_{a}", f"aod_el_deg_{a}"]
    head += ["lbs_x_m", "lbs_y_m", "lbs_z_m"]
    for a in range(n_subarrays):
        head += [f"fbs{a}_x_m", f"fbs{a}_y_m", f"fbs{a}_z_m"]
    return head


def write_outputs(result: RunResult, out_dir=None) -> dict[str, Path]:
    """Write tensor, per-user cluster tables, the owner-view table, the
    share table, and metrics. Returns the file paths by kind."""
    config = result.config
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_subarrays = config.layout.array.n_subarrays
    paths: dict[str, Path] = {}

    if config.out_format == "binary":
        tensor_path = out / "channel.bin"
        write_tensor_binary(result.tensor, tensor_path)
    else:
        tensor_path = out / "channel.tsv"
        write_tensor_text(result.tensor, tensor_path)
    paths["tensor"] = tensor_path

    share_path = out / "share_table.tsv"
    with open(share_path, "w") as f:
        f.write("segment\tmembers\tproportion\tscaled_proportion\tcount\tcluster_ids\n")
        for seg in result.segments:
            for row in seg.share_table.report_rows():
                f.write(
                    f"{seg.share_table.segment_index}\t{row['members']}\t"
                    f"{_fmt(row['proportion'])}\t{_fmt(row['scaled_proportion'])}\t"
                    f"{row['count']}\t{row['cluster_ids']}\n"
                )
    paths["share_table"] = share_path

    header = _param_header(n_subarrays)
    for user in config.layout.user_ids:
        user_path = out / f"clusters_user{user}.tsv"
        with open(user_path, "w") as f:
            f.write(
                "segment\tcluster_id\tmembers\tgenerating_user\tboresight\t"
                + "\t".join(header)
                + "\n"
            )
            for seg in result.segments:
                for view in seg.views.views_of_user(user):
                    cluster = seg.cluster_set.clusters[view.cluster_id]
                    members = "+".join(str(u) for u in cluster.owner_set)
                    f.write(
                        f"{seg.share_table.segment_index}\t{view.cluster_id}\t"
                        f"{members}\t{cluster.generating_user}\t"
                        f"{int(view.boresight)}\t"
                        + "\t".join(_view_param_columns(view, n_subarrays))
                        + "\n"
                    )
        paths[f"clusters_user{user}"] = user_path

    views_path = out / "cluster_views.tsv"
    with open(views_path, "w") as f:
        f.write(
            "segment\tcluster_id\towner\trecalc_mode\t" + "\t".join(header) + "\n"
        )
        for seg in result.segments:
            for (user, cluster_id) in sorted(seg.views.views):
                view = seg.views.views[(user, cluster_id)]
                f.write(
                    f"{seg.share_table.segment_index}\t{cluster_id}\t{user}\t"
                    f"{view.recalc_mode}\t"
                    + "\t".join(_view_param_columns(view, n_subarrays))
                    + "\n"
                )
    paths["cluster_views"] = views_path

    metrics_path = out / "metrics.tsv"
    with open(metrics_path, "w") as f:
        f.write("metric\tkey1\tkey2\tvalue\n")
        for row in result.metrics.report_rows():
            f.write("\t".join(str(x) for x in row) + "\n")
    paths["metrics"] = metrics_path

    return paths
