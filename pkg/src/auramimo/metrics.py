"""Run diagnostics: inter-user channel correlation, sharing statistics,
and the spherical-vs-planar phase deviation summary."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coefficients import ChannelTensor


@dataclass
class MetricsReport:
    """pair_correlation holds per-snapshot normalized inner products of
    the stacked (tx element x cluster) channel vectors; means are over
    snapshots. Sharing counts and planar errors are filled by the run
    pipeline (they need cluster tables, not just the tensor)."""

    pair_correlation: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    pair_correlation_mean: dict[tuple[int, int], float] = field(default_factory=dict)
    shared_cluster_counts: dict[tuple[int, int], int] = field(default_factory=dict)
    planar_error_max_rad: dict[int, float] = field(default_factory=dict)

    def report_rows(self) -> list[tuple]:
        rows: list[tuple] = []
        for (u, v), mean in sorted(self.pair_correlation_mean.items()):
            rows.append(("pair_correlation_mean", u, v, repr(float(mean))))
        for (u, v), per_snap in sorted(self.pair_correlation.items()):
            rows.append(
                ("pair_correlation", u, v, "+".join(repr(float(x)) for x in per_snap))
            )
        for (u, v), count in sorted(self.shared_cluster_counts.items()):
            rows.append(("shared_clusters", u, v, str(count)))
        for sub, err in sorted(self.planar_error_max_rad.items()):
            rows.append(("planar_error_max_rad", sub, "", repr(err)))
        return rows


def pair_correlation(h_u: np.ndarray, h_v: np.ndarray) -> np.ndarray:
    """|h_u^H h_v| / (|h_u| |h_v|) per snapshot for (vector, snapshot)
    matrices; zero-norm snapshots give 0."""
    num = np.abs(np.sum(np.conj(h_u) * h_v, axis=0))
    den = np.linalg.norm(h_u, axis=0) * np.linalg.norm(h_v, axis=0)
    out = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return np.minimum(out, 1.0)


def correlation_metrics(tensor: ChannelTensor) -> MetricsReport:
    """Per-user-pair normalized channel correlation from a tensor."""
    n_users, n_rx, n_tx, n_clusters, n_snap = tensor.coefficients.shape
    report = MetricsReport()
    for i in range(n_users):
        for j in range(i + 1, n_users):
            # Stack rx antennas alongside tx x cluster; rx is 1 in practice.
            h_i = tensor.coefficients[i].reshape(n_rx * n_tx * n_clusters, n_snap)
            h_j = tensor.coefficients[j].reshape(n_rx * n_tx * n_clusters, n_snap)
            corr = pair_correlation(h_i, h_j)
            key = (tensor.user_ids[i], tensor.user_ids[j])
            report.pair_correlation[key] = corr
            report.pair_correlation_mean[key] = float(corr.mean())
    return report
