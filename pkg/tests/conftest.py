"""Shared fixtures and layout builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from auramimo import (
    Position,
    ScenarioConfig,
    build_layout,
    linear_track,
    uniform_linear_array,
)


def make_scenario(**overrides) -> ScenarioConfig:
    params = dict(
        delay_spread_median_s=1e-7,
        delay_spread_log_std=0.3,
        aoa_spread_median_deg=40.0,
        aoa_spread_log_std=0.2,
        aod_spread_median_deg=20.0,
        aod_spread_log_std=0.2,
        eoa_spread_median_deg=5.0,
        eoa_spread_log_std=0.2,
        eod_spread_median_deg=3.0,
        eod_spread_log_std=0.2,
        shadow_std_db=3.0,
        r_tau=2.5,
        clusters_per_user=7,
        carrier_hz=3.5e9,
        correlation_distance_m=50.0,
        cluster_angle_spread_deg=3.0,
    )
    params.update(overrides)
    return ScenarioConfig(**params)


def make_two_user_layout(
    separation_m: float,
    *,
    stationarity_m: float = 5.0,
    n_snapshots: int = 4,
    snapshot_spacing_m: float = 0.5,
    n_elements: int = 64,
    element_spacing_m: float = 0.05,
    bs_stationarity_m: float = 0.8,
    start_x: float = 30.0,
):
    """Two users on parallel tracks (heading +y), given start separation."""
    tracks = [
        linear_track(
            1, Position(start_x, 0.0, 1.5), 90.0, n_snapshots, snapshot_spacing_m
        ),
        linear_track(
            2,
            Position(start_x + separation_m, 0.0, 1.5),
            90.0,
            n_snapshots,
            snapshot_spacing_m,
        ),
    ]
    elements = uniform_linear_array(
        n_elements, element_spacing_m, Position(0.0, 0.0, 10.0)
    )
    return build_layout(
        tracks,
        elements,
        stationarity_user_m=stationarity_m,
        bs_stationarity_m=bs_stationarity_m,
    )


def make_point_layout(
    positions_by_user: dict[int, tuple[float, float, float]],
    stationarity_m: float,
    *,
    n_elements: int = 8,
    element_spacing_m: float = 0.05,
    bs_stationarity_m: float = 10.0,
):
    """Static single-snapshot users at explicit positions (one segment)."""
    tracks = [
        linear_track(u, Position(*xyz), 0.0, 1, 0.5)
        for u, xyz in sorted(positions_by_user.items())
    ]
    elements = uniform_linear_array(
        n_elements, element_spacing_m, Position(0.0, 0.0, 10.0)
    )
    return build_layout(
        tracks,
        elements,
        stationarity_user_m=stationarity_m,
        bs_stationarity_m=bs_stationarity_m,
    )


@pytest.fixture
def scenario() -> ScenarioConfig:
    return make_scenario()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250818)
