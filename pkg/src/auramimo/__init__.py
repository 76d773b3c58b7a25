"""Geometry-based stochastic channel simulator for massive MIMO with
aura-based multi-user cluster sharing, per-sub-array non-stationarity,
and spherical-wave coefficient synthesis."""

from .clustergen import (
    Cluster,
    ClusterSet,
    assemble_clusters,
    gen_arrival_angles,
    gen_delays,
    gen_departure_angles,
    gen_powers,
)
from .coefficients import (
    ChannelTensor,
    laplacian_offsets,
    planar_vs_spherical_error,
    synthesize,
)
from .config import RunConfig, config_to_dict, dump_config, load_config, parse_config
from .errors import (
    ChannelModelError,
    ComponentTooLarge,
    ConfigError,
    DegenerateGeometry,
    EmptyArray,
    IncompleteViews,
    InvalidScenario,
    MissingLsp,
    UnknownSegment,
    UnknownUser,
    UnsynchronizedTracks,
)
from .geom import SPEED_OF_LIGHT_M_S
from .grouping import (
    GroupShare,
    OverlapGraph,
    ShareTable,
    build_overlap_graph,
    compute_proportions,
    connected_components,
    normalize_and_count,
    share_table_for_segment,
)
from .layout import (
    ArrayGeometry,
    Aura,
    Position,
    Segment,
    SubArray,
    Track,
    UserLayout,
    build_layout,
    build_segments,
    linear_track,
    partition_subarrays,
    uniform_linear_array,
)
from .lsp import LspDraw, LspValues, ScenarioConfig, draw_lsp
from .metrics import MetricsReport, correlation_metrics, pair_correlation
from .pipeline import RunResult, run, run_segment, write_outputs
from .sharing import (
    MODE_GENERATOR,
    MODE_KEPT_FOCAL,
    MODE_KEPT_PARAMETERS,
    OwnerView,
    OwnerViews,
    choose_recalc_mode,
    recalc_kept_focal_point,
    recalc_kept_parameters,
    recalculate_views,
    share_clusters,
)
from .spherical import (
    FocalGeometry,
    attach_focal_points,
    fbs_focal_point,
    lbs_focal_point,
    solve_departure_geometry,
    total_path_length,
)
from .tensorio import read_tensor_binary, write_tensor_binary, write_tensor_text

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
