"""Users, tracks, segments, auras, and the base-station array.

Positions are Cartesian in meters. Tracks are explicit snapshot position
lists; the segment schedule is shared by all users (segment transitions
must be synchronized). The base-station array is split into contiguous
sub-arrays whose extent fits within the base-station stationarity
interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyArray, UnknownSegment, UnknownUser, UnsynchronizedTracks

# Spacing / center agreement tolerance, meters.
GEOMETRY_TOL_M = 1e-9


@dataclass(frozen=True)
class Position:
    """Cartesian point in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"position coordinates must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def distance_to(self, other: "Position") -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))

    def horizontal_distance_to(self, other: "Position") -> float:
        """2D (x, y) distance; aura overlap is a circle test, z is ignored."""
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Track:
    """Snapshot positions of one user, equally spaced along the trajectory."""

    user_id: int
    points: tuple[Position, ...]
    snapshot_spacing_m: float

    def __post_init__(self) -> None:
        if len(self.points) < 1:
            raise ValueError(f"track of user {self.user_id} has no points")
        if self.snapshot_spacing_m <= 0:
            raise ValueError("snapshot_spacing_m must be positive")
        for i in range(1, len(self.points)):
            step = self.points[i - 1].distance_to(self.points[i])
            if abs(step - self.snapshot_spacing_m) > GEOMETRY_TOL_M:
                raise ValueError(
                    f"track of user {self.user_id}: spacing {step!r} at snapshot "
                    f"{i} differs from declared {self.snapshot_spacing_m!r}"
                )

    def __len__(self) -> int:
        return len(self.points)


def linear_track(
    user_id: int,
    start: Position,
    heading_deg: float,
    n_snapshots: int,
    snapshot_spacing_m: float,
) -> Track:
    """Straight horizontal track starting at `start` (heading measured from +x)."""
    h = math.radians(heading_deg)
    dx = math.cos(h) * snapshot_spacing_m
    dy = math.sin(h) * snapshot_spacing_m
    points = tuple(
        Position(start.x + i * dx, start.y + i * dy, start.z) for i in range(n_snapshots)
    )
    return Track(user_id=user_id, points=points, snapshot_spacing_m=snapshot_spacing_m)


@dataclass(frozen=True)
class Segment:
    """Contiguous snapshot range with constant large-scale parameters."""

    index: int
    first_snapshot: int
    n_snapshots: int
    length_m: float


@dataclass(frozen=True)
class Aura:
    """Circle around a user's segment-start position; overlap governs sharing."""

    center: Position
    radius_m: float

    def __post_init__(self) -> None:
        if self.radius_m <= 0:
            raise ValueError("aura radius must be positive")


@dataclass(frozen=True)
class SubArray:
    """Contiguous run of array elements within one stationarity interval."""

    index: int
    element_range: tuple[int, int]  # [start, stop)
    center: Position

    @property
    def n_elements(self) -> int:
        return self.element_range[1] - self.element_range[0]


@dataclass(frozen=True)
class ArrayGeometry:
    element_positions: tuple[Position, ...]
    subarrays: tuple[SubArray, ...]
    bs_stationarity_m: float

    @property
    def n_elements(self) -> int:
        return len(self.element_positions)

    @property
    def n_subarrays(self) -> int:
        return len(self.subarrays)

    def element_matrix(self) -> np.ndarray:
        """(n_elements, 3) float array of element positions."""
        return np.array([p.as_array() for p in self.element_positions])

    def subarray_of_element(self) -> np.ndarray:
        """Sub-array index for every element."""
        out = np.empty(self.n_elements, dtype=int)
        for sub in self.subarrays:
            out[sub.element_range[0] : sub.element_range[1]] = sub.index
        return out

    def reference_subarray(self) -> SubArray:
        """Sub-array whose center is closest to the whole-array centroid.

        Used as the anchor for receiver-side focal points and interior
        path lengths; ties resolve to the lowest index.
        """
        centroid = self.element_matrix().mean(axis=0)
        best = min(
            self.subarrays,
            key=lambda s: (float(np.linalg.norm(s.center.as_array() - centroid)), s.index),
        )
        return best


def build_segments(tracks: list[Track], stationarity_user_m: float) -> tuple[Segment, ...]:
    """Split the (synchronized) tracks into segments of one stationarity interval.

    All tracks must agree in point count and snapshot spacing; the returned
    schedule is shared by every user. The last segment absorbs fewer
    snapshots when the division is not exact.
    """
    if not tracks:
        raise UnsynchronizedTracks("no tracks given")
    if stationarity_user_m <= 0:
        raise ValueError("stationarity_user_m must be positive")
    ref = tracks[0]
    for t in tracks[1:]:
        if len(t) != len(ref):
            raise UnsynchronizedTracks(
                f"user {t.user_id} has {len(t)} snapshots but user "
                f"{ref.user_id} has {len(ref)}"
            )
        if abs(t.snapshot_spacing_m - ref.snapshot_spacing_m) > GEOMETRY_TOL_M:
            raise UnsynchronizedTracks(
                f"user {t.user_id} snapshot spacing {t.snapshot_spacing_m} differs "
                f"from user {ref.user_id} spacing {ref.snapshot_spacing_m}"
            )

    spacing = ref.snapshot_spacing_m
    per_segment = max(1, int(stationarity_user_m / spacing + GEOMETRY_TOL_M))
    segments = []
    first = 0
    while first < len(ref):
        count = min(per_segment, len(ref) - first)
        segments.append(
            Segment(
                index=len(segments),
                first_snapshot=first,
                n_snapshots=count,
                length_m=count * spacing,
            )
        )
        first += count
    return tuple(segments)


def partition_subarrays(
    elements: list[Position], bs_stationarity_m: float
) -> tuple[SubArray, ...]:
    """Split an ordered element list into contiguous sub-arrays.

    The per-sub-array element count is floor(stationarity / element step),
    counting each element as occupying one step, so no sub-array extends
    past the stationarity interval; leftover elements form a final shorter
    sub-array. A stationarity interval larger than the aperture yields a
    single sub-array (stationary model).
    """
    if not elements:
        raise EmptyArray("array has no elements")
    if bs_stationarity_m <= 0:
        raise ValueError("bs_stationarity_m must be positive")

    if len(elements) == 1:
        step = 0.0
    else:
        step = max(
            elements[i].distance_to(elements[i + 1]) for i in range(len(elements) - 1)
        )
    if step <= 0:
        per_subarray = len(elements)
    else:
        per_subarray = max(1, int(bs_stationarity_m / step + GEOMETRY_TOL_M))

    subarrays = []
    start = 0
    while start < len(elements):
        stop = min(start + per_subarray, len(elements))
        block = elements[start:stop]
        center = np.mean([p.as_array() for p in block], axis=0)
        subarrays.append(
            SubArray(
                index=len(subarrays),
                element_range=(start, stop),
                center=Position(*center),
            )
        )
        start = stop
    return tuple(subarrays)


def uniform_linear_array(
    n_elements: int,
    spacing_m: float,
    origin: Position,
    axis: tuple[float, float, float] = (1.0, 0.0, 0.0),
) -> list[Position]:
    """Element positions of a uniform linear array starting at `origin`."""
    a = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(a)
    if norm == 0:
        raise ValueError("array axis must be nonzero")
    a = a / norm
    base = origin.as_array()
    return [Position(*(base + i * spacing_m * a)) for i in range(n_elements)]


@dataclass(frozen=True)
class UserLayout:
    """Immutable simulation layout: synchronized tracks, shared segment
    schedule, per-user per-segment auras, and the partitioned array."""

    tracks: tuple[Track, ...]
    segments: tuple[Segment, ...]
    array: ArrayGeometry
    stationarity_user_m: float
    _track_by_user: dict[int, Track] = field(repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        lookup = {t.user_id: t for t in self.tracks}
        if len(lookup) != len(self.tracks):
            raise ValueError("duplicate user ids in layout")
        object.__setattr__(self, "_track_by_user", lookup)

    @property
    def user_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._track_by_user))

    def track_of(self, user_id: int) -> Track:
        try:
            return self._track_by_user[user_id]
        except KeyError:
            raise UnknownUser(f"user {user_id} not in layout") from None

    def segment(self, segment_index: int) -> Segment:
        if not 0 <= segment_index < len(self.segments):
            raise UnknownSegment(
                f"segment {segment_index} outside schedule of {len(self.segments)}"
            )
        return self.segments[segment_index]

    def segment_start_position(self, user_id: int, segment_index: int) -> Position:
        """First position of the user in the segment (the aura anchor)."""
        track = self.track_of(user_id)
        seg = self.segment(segment_index)
        return track.points[seg.first_snapshot]

    def segment_positions(self, user_id: int, segment_index: int) -> np.ndarray:
        """(n_snapshots, 3) rx positions of the user across the segment."""
        track = self.track_of(user_id)
        seg = self.segment(segment_index)
        pts = track.points[seg.first_snapshot : seg.first_snapshot + seg.n_snapshots]
        return np.array([p.as_array() for p in pts])

    def aura_of(self, user_id: int, segment_index: int) -> Aura:
        return Aura(
            center=self.segment_start_position(user_id, segment_index),
            radius_m=self.stationarity_user_m,
        )


def build_layout(
    tracks: list[Track],
    array_elements: list[Position],
    stationarity_user_m: float,
    bs_stationarity_m: float,
) -> UserLayout:
    """Assemble a validated layout from tracks and array element positions."""
    segments = build_segments(tracks, stationarity_user_m)
    subarrays = partition_subarrays(array_elements, bs_stationarity_m)
    array = ArrayGeometry(
        element_positions=tuple(array_elements),
        subarrays=subarrays,
        bs_stationarity_m=bs_stationarity_m,
    )
    return UserLayout(
        tracks=tuple(tracks),
        segments=segments,
        array=array,
        stationarity_user_m=stationarity_user_m,
    )
