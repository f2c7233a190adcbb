"""Authoring and context-aware placement of instruction labels.

Two pipelines share this package: an authoring side that segments
instruction text and tags each step with a key object, and a consumption
side that replays gaze/hand traces and searches the discretized anchoring
surfaces for the cheapest label placement.
"""

from .context import (
    Frame,
    FrameWindow,
    GazeTarget,
    HandSample,
    HandTarget,
    MotionScript,
    MotionSegment,
    TraceError,
    eye_midpoint,
    frame_weights_from_speeds,
    gaze_angular_speeds,
    gaze_forward,
    generate_synthetic_trace,
    get_frame_weights,
    read_trace,
    write_trace,
)
from .costs import (
    CostWeights,
    LabelGeometry,
    Placement,
    PlacementContext,
    cost_breakdown,
    hand_angle_cost,
    make_placement,
    occlusion_map,
    preference_cost,
    readability_cost,
    total_cost,
    visibility_cost,
)
from .document import (
    KITCHEN_VOCABULARY,
    DocumentError,
    DocumentProfile,
    InstructionStep,
    LabelVocabulary,
    apply_predictions,
    author_profile,
    delete_step,
    edit_text,
    merge_steps,
    read_document_profile,
    rule_label,
    segment_document,
    split_step,
    write_document_profile,
)
from .geometry import Quat, Ray, Vec3, angle_between, get_rotation, ray_rect_intersect
from .importance import get_map, get_overall_map, project_joints, soften
from .optimizer import (
    AnnealingConfig,
    SearchResult,
    best_neighbor,
    cross_surface_fallback,
    greedy_search,
    simulated_annealing,
)
from .spatial import (
    AnchoringSurface,
    KeyObject,
    ProfileError,
    SpatialProfile,
    cell_center,
    d_max,
    load_spatial_profile,
    read_spatial_profile,
    write_spatial_profile,
)

__version__ = "0.1.0"
