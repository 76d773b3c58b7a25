"""Run configuration: a single JSON document with explicit units in every
key name. Tracks are either explicit point lists or compact linear
specs; the array is either an explicit element list or a uniform linear
array spec. Parsing normalizes, validates, and builds the layout, so a
parsed config is always runnable."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ChannelModelError, ConfigError
from .layout import Position, Track, UserLayout, build_layout, linear_track, uniform_linear_array
from .lsp import ScenarioConfig

FORMATS = ("binary", "text")


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig
    layout: UserLayout
    seed: int
    workers: int
    out_dir: str
    out_format: str
    layout_spec: dict  # normalized form, kept for round-trip serialization

    @property
    def total_clusters_per_user(self) -> int:
        return self.scenario.clusters_per_user

    @property
    def carrier_hz(self) -> float:
        return self.scenario.carrier_hz


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key '{key}'")
    return mapping[key]


def _position(value, context: str) -> Position:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{context}: expected [x, y, z], got {value!r}")
    try:
        return Position(float(value[0]), float(value[1]), float(value[2]))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{context}: {e}") from None


def _parse_tracks(users: list, context: str) -> list[Track]:
    if not isinstance(users, list) or not users:
        raise ConfigError(f"{context}: 'users' must be a non-empty list")
    tracks = []
    for idx, spec in enumerate(users):
        ctx = f"{context}.users[{idx}]"
        if not isinstance(spec, dict):
            raise ConfigError(f"{ctx}: expected an object")
        user_id = int(_require(spec, "user_id", ctx))
        spacing = float(_require(spec, "snapshot_spacing_m", ctx))
        try:
            if "points_m" in spec:
                points = tuple(
                    _position(p, f"{ctx}.points_m[{i}]")
                    for i, p in enumerate(spec["points_m"])
                )
                tracks.append(
                    Track(user_id=user_id, points=points, snapshot_spacing_m=spacing)
                )
            else:
                start = _position(_require(spec, "start_m", ctx), f"{ctx}.start_m")
                tracks.append(
                    linear_track(
                        user_id=user_id,
                        start=start,
                        heading_deg=float(spec.get("heading_deg", 0.0)),
                        n_snapshots=int(_require(spec, "n_snapshots", ctx)),
                        snapshot_spacing_m=spacing,
                    )
                )
        except ValueError as e:
            raise ConfigError(f"{ctx}: {e}") from None
    return tracks


def _parse_elements(array_spec: dict, context: str) -> list[Position]:
    if "element_positions_m" in array_spec:
        return [
            _position(p, f"{context}.element_positions_m[{i}]")
            for i, p in enumerate(array_spec["element_positions_m"])
        ]
    origin = _position(_require(array_spec, "origin_m", context), f"{context}.origin_m")
    axis = array_spec.get("axis", [1.0, 0.0, 0.0])
    if not isinstance(axis, (list, tuple)) or len(axis) != 3:
        raise ConfigError(f"{context}.axis: expected [x, y, z]")
    try:
        return uniform_linear_array(
            n_elements=int(_require(array_spec, "n_elements", context)),
            spacing_m=float(_require(array_spec, "spacing_m", context)),
            origin=origin,
            axis=tuple(float(a) for a in axis),
        )
    except ValueError as e:
        raise ConfigError(f"{context}: {e}") from None


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    scen_raw = _require(raw, "scenario", "config")
    if not isinstance(scen_raw, dict):
        raise ConfigError("config.scenario must be an object")
    try:
        scenario = ScenarioConfig(**scen_raw)
    except TypeError as e:
        raise ConfigError(f"config.scenario: {e}") from None
    except ChannelModelError as e:
        raise ConfigError(f"config.scenario: {e}") from None

    layout_raw = _require(raw, "layout", "config")
    if not isinstance(layout_raw, dict):
        raise ConfigError("config.layout must be an object")
    tracks = _parse_tracks(_require(layout_raw, "users", "config.layout"), "config.layout")
    elements = _parse_elements(
        _require(layout_raw, "array", "config.layout"), "config.layout.array"
    )
    try:
        layout = build_layout(
            tracks=tracks,
            array_elements=elements,
            stationarity_user_m=float(
                _require(layout_raw, "stationarity_user_m", "config.layout")
            ),
            bs_stationarity_m=float(
                _require(layout_raw, "bs_stationarity_m", "config.layout")
            ),
        )
    except (ChannelModelError, ValueError) as e:
        raise ConfigError(f"config.layout: {e}") from None

    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("config.output must be an object")
    out_format = output.get("format", "binary")
    if out_format not in FORMATS:
        raise ConfigError(
            f"config.output.format must be one of {FORMATS}, got {out_format!r}"
        )

    seed = int(raw.get("seed", 0))
    workers = int(raw.get("workers", 1))
    if workers < 1:
        raise ConfigError("config.workers must be >= 1")

    return RunConfig(
        scenario=scenario,
        layout=layout,
        seed=seed,
        workers=workers,
        out_dir=str(output.get("dir", "out")),
        out_format=out_format,
        layout_spec=_normalize_layout_spec(layout_raw),
    )


def _normalize_layout_spec(layout_raw: dict) -> dict:
    """Canonical layout sub-document (floats coerced, defaults filled)."""
    users = []
    for spec in layout_raw["users"]:
        entry = {
            "user_id": int(spec["user_id"]),
            "snapshot_spacing_m": float(spec["snapshot_spacing_m"]),
        }
        if "points_m" in spec:
            entry["points_m"] = [[float(c) for c in p] for p in spec["points_m"]]
        else:
            entry["start_m"] = [float(c) for c in spec["start_m"]]
            entry["heading_deg"] = float(spec.get("heading_deg", 0.0))
            entry["n_snapshots"] = int(spec["n_snapshots"])
        users.append(entry)
    arr = layout_raw["array"]
    if "element_positions_m" in arr:
        array = {
            "element_positions_m": [[float(c) for c in p] for p in arr["element_positions_m"]]
        }
    else:
        array = {
            "n_elements": int(arr["n_elements"]),
            "spacing_m": float(arr["spacing_m"]),
            "origin_m": [float(c) for c in arr["origin_m"]],
            "axis": [float(c) for c in arr.get("axis", [1.0, 0.0, 0.0])],
        }
    return {
        "stationarity_user_m": float(layout_raw["stationarity_user_m"]),
        "bs_stationarity_m": float(layout_raw["bs_stationarity_m"]),
        "array": array,
        "users": users,
    }


def config_to_dict(config: RunConfig) -> dict:
    """Normalized document; parse(config_to_dict(c)) is a fixed point."""
    return {
        "seed": config.seed,
        "workers": config.workers,
        "scenario": config.scenario.as_dict(),
        "layout": config.layout_spec,
        "output": {"dir": config.out_dir, "format": config.out_format},
    }


def load_config(path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {p} is not valid JSON: {e}") from None
    return parse_config(raw)


def dump_config(config: RunConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")
