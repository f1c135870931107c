"""starnav: starshaped free-space navigation with a reactive modulation
controller, an incremental frontier roadmap, and a deterministic 2D lidar
simulator plus benchmark harness."""

from .control import (AtReferencePoint, ControlCommand, ControllerConfig,
                      EmptyRegionList, ModulationBasis, OutsideRegion,
                      SingularBasis, blend_nearest, combine_overlaps, modulate,
                      modulation_basis, raw_guidance, track_unicycle)
from .episode import (BatchSummary, Outcome, RunRecord, run_batch, run_episode,
                      summarize_runs)
from .export import (export_artifacts, load_record, record_from_dict,
                     record_to_dict, render_svg, save_record,
                     write_batch_csv, write_svg, write_trajectory_csv)
from .frontier import (Cluster, FrontierCandidate, SidePointPair, cluster_scan,
                       dbscan_labels, extract_frontiers, side_points)
from .geometry import (DegeneratePoint, Point2, PolarCoord, Pose2, Scan,
                       cart_to_polar, polar_to_cart, wrap_angle)
from .roadmap import (AlreadyExpanded, InvalidTransition, NodeStatus, NoPath,
                      Roadmap, RoadmapNode, StartOutsideRegion, UnknownNode,
                      init_roadmap)
from .scenario import (EpisodeLimits, ForestParams, FrontierParams, LoopParams,
                       ScenarioError, ScenarioSpec, load_scan, load_scenario,
                       save_scan, save_scenario, scan_from_dict, scan_to_dict,
                       scenario_from_dict)
from .sim import (Circle, ConvexPolygon, LidarModel, PlacementFailed,
                  PoseOutOfBounds, Rect, SimState, UnknownLayout, Wall, World,
                  check_collision, gen_forest, gen_maze, obstacle_distance,
                  raycast_scan, step_robot)
from .starshape import (FitConfig, PiecewiseBoundary, PolySegment,
                        StarshapedRegion, TooFewPoints, contains, eval_radius,
                        eval_radius_deriv, fit_region, gamma, region_from_dict,
                        region_to_dict)

__version__ = "0.1.0"

__all__ = [
    "AlreadyExpanded", "AtReferencePoint", "BatchSummary", "Circle", "Cluster",
    "ControlCommand", "ControllerConfig", "ConvexPolygon", "DegeneratePoint",
    "EmptyRegionList", "EpisodeLimits", "FitConfig", "ForestParams",
    "FrontierCandidate", "FrontierParams", "InvalidTransition", "LidarModel",
    "LoopParams", "ModulationBasis", "NoPath", "NodeStatus", "Outcome",
    "OutsideRegion", "PiecewiseBoundary", "PlacementFailed", "Point2",
    "PolarCoord", "PolySegment", "Pose2", "PoseOutOfBounds", "Rect", "Roadmap",
    "RoadmapNode", "RunRecord", "Scan", "ScenarioError", "ScenarioSpec",
    "SidePointPair", "SimState", "SingularBasis", "StarshapedRegion",
    "StartOutsideRegion", "TooFewPoints", "UnknownLayout", "UnknownNode",
    "Wall", "World", "blend_nearest", "cart_to_polar", "check_collision",
    "cluster_scan", "combine_overlaps", "contains", "dbscan_labels",
    "eval_radius", "eval_radius_deriv", "export_artifacts", "extract_frontiers",
    "fit_region", "gamma", "gen_forest", "gen_maze", "init_roadmap",
    "load_record", "load_scan", "load_scenario", "modulate", "modulation_basis",
    "obstacle_distance", "polar_to_cart", "raw_guidance", "raycast_scan",
    "record_from_dict", "record_to_dict", "region_from_dict", "region_to_dict",
    "render_svg", "run_batch", "run_episode", "save_record", "save_scan",
    "save_scenario", "scan_from_dict", "scan_to_dict", "scenario_from_dict",
    "side_points", "step_robot", "summarize_runs", "track_unicycle",
    "wrap_angle", "write_batch_csv", "write_svg", "write_trajectory_csv",
]
