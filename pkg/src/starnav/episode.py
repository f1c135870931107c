"""Episode loop and batch benchmarking.

One episode drives the robot from start to goal: regions are fitted and the
roadmap expanded whenever the map needs to grow (start of run, arrival at an
Extendable short-term goal, or after a node was marked stuck), a shortest-path
search picks the short-term goal each tick, and the modulated, blended,
unicycle-tracked command advances the simulator state.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .control import (blend_nearest, combine_overlaps, raw_guidance,
                      track_unicycle)
from .frontier import cluster_scan, extract_frontiers
from .geometry import Point2, Pose2, Scan
from .roadmap import NodeStatus, NoPath, Roadmap, init_roadmap
from .scenario import ScenarioSpec
from .sim import SimState, check_collision, raycast_scan, step_robot
from .starshape import StarshapedRegion, fit_region


class Outcome(Enum):
    SUCCESS = "Success"
    TIMEOUT = "Timeout"
    COLLISION = "Collision"
    NO_PATH = "NoPath"


@dataclass
class RunRecord:
    """Everything observable about one episode."""

    scenario_hash: str
    seed: int
    outcome: Outcome
    trajectory: np.ndarray  # rows (t, x, y, heading, v, w, control_ms)
    events: list[tuple[float, str, int | None]]
    roadmap: dict
    world_dict: dict
    start: Point2
    goal: Point2
    travel_time: float
    path_length: float
    control_times: list[float]  # seconds, one per control tick
    fit_times: list[float]  # seconds, one per region fit
    scenario: dict


@dataclass(frozen=True)
class BatchSummary:
    """Aggregate statistics over a seed batch; means/stds over successes only."""

    n_runs: int
    n_success: int
    success_rate: float
    travel_time_mean: float
    travel_time_std: float
    path_length_mean: float
    path_length_std: float
    control_ms_mean: float
    control_ms_std: float
    fit_ms_mean: float
    fit_ms_std: float
    outcomes: tuple[tuple[int, str], ...] = ()


def _world_dict(world) -> dict:
    from .scenario import obstacle_to_dict
    b = world.bounds
    return {"bounds": [b.xmin, b.ymin, b.xmax, b.ymax],
            "obstacles": [obstacle_to_dict(o) for o in world.obstacles]}


def run_episode(spec: ScenarioSpec, seed: int, measure_timing: bool = True) -> RunRecord:
    """Run one seeded episode to termination.

    With measure_timing=False all logged timings are exactly 0.0, which makes
    the record (and its exports) bitwise reproducible for identical inputs.
    """
    world, start, goal = spec.resolve(seed)
    lidar = spec.lidar
    ctrl = spec.controller
    loop = spec.loop
    limits = spec.limits
    fit_cfg = spec.fit
    sigma = ctrl.sigma
    robot_radius = ctrl.robot_radius

    state = SimState(Pose2(start, math.atan2(goal.y - start.y, goal.x - start.x)))
    rm: Roadmap | None = None
    scan: Scan | None = None
    last_scan_time = -math.inf
    scan_count = 0
    target_node: int | None = None
    stall_anchor = start
    stall_since = 0.0
    deferred: dict[int, float] = {}  # node id -> retry time

    events: list[tuple[float, str, int | None]] = []
    traj: list[tuple[float, ...]] = []
    control_times: list[float] = []
    fit_times: list[float] = []
    outcome: Outcome | None = None
    clock = time.perf_counter if measure_timing else (lambda: 0.0)

    def take_scan() -> Scan:
        nonlocal scan_count
        rng_seed = None
        if lidar.noise_stddev > 0.0:
            rng_seed = np.random.SeedSequence([max(seed, 0), scan_count])
        scan_count += 1
        return raycast_scan(world, state.pose, lidar, rng_seed)

    def fit_here(region_id: str) -> tuple[StarshapedRegion, list]:
        """Fit a region at the current pose from a fresh scan; returns frontiers too."""
        nonlocal scan, last_scan_time
        scan = take_scan()
        last_scan_time = state.time
        t0 = clock()
        region = fit_region(state.pose.position, scan, fit_cfg, region_id)
        clusters = cluster_scan(scan, spec.frontier.eps, spec.frontier.min_pts)
        frontiers = extract_frontiers(clusters, region, robot_radius)
        fit_times.append(clock() - t0)
        return region, frontiers

    while True:
        p = state.pose.position
        if p.distance_to(goal) <= limits.goal_tolerance:
            outcome = Outcome.SUCCESS
            break
        if state.time >= limits.max_sim_time:
            outcome = Outcome.TIMEOUT
            break

        if scan is None or state.time - last_scan_time >= loop.scan_period - 1e-12:
            scan = take_scan()
            last_scan_time = state.time

        def expand_at(node_id: int) -> None:
            """Fit here and expand node_id; zero usable frontiers mark it stuck."""
            region, frontiers = fit_here(f"n{node_id}")
            new_ids = rm.expand_node(node_id, region, frontiers)
            if new_ids:
                events.append((state.time, "expand", node_id))
            else:
                rm.mark_stuck(node_id)
                events.append((state.time, "mark_stuck", node_id))

        # roadmap growth: start of episode, or arrival at an Extendable target
        replanned = False
        if rm is None:
            region, frontiers = fit_here("n0")
            rm = init_roadmap(p, region)
            rm.expand_node(rm.root_id, region, frontiers)
            events.append((state.time, "expand", rm.root_id))
        else:
            replanned = rm.consume_replan()
            if target_node is not None:
                node = rm.nodes[target_node]
                if (node.status is NodeStatus.EXTENDABLE
                        and p.distance_to(node.position) <= loop.reach_tolerance):
                    expand_at(target_node)
                    target_node = None

        t_ctrl = clock()

        for nid in [n for n, until in deferred.items()
                    if until <= state.time
                    or rm.nodes[n].status is not NodeStatus.EXTENDABLE]:
            del deferred[nid]

        path_ids: list[int] | None = None
        while path_ids is None:
            try:
                path_ids, p_sg = rm.plan_short_term_goal(p, goal,
                                                         frozenset(deferred))
            except NoPath:
                if deferred:
                    # every remaining frontier is backing off; release the
                    # one expiring first instead of giving up the episode
                    del deferred[min(deferred, key=deferred.get)]
                else:
                    outcome = Outcome.NO_PATH
                    events.append((state.time, "no_path", None))
                    break
        if outcome is not None:
            break
        if replanned:
            events.append((state.time, "replan", None))

        # the pursued vertex is the one right after the attachment node;
        # entering a region re-attaches the virtual start there, so planning
        # every tick advances the target without extra bookkeeping
        target_node = path_ids[1] if len(path_ids) >= 2 else None

        # stall watchdog (beyond the published algorithm): the repulsion
        # blend can pin the robot at an equilibrium between obstacles well
        # short of its target. Stalling close to an Extendable target counts
        # as arriving there. Otherwise the route's Extendable destination is
        # backed off for a while so another route gets tried first; marking
        # it stuck outright would permanently delete frontier coverage that
        # may be reachable from elsewhere.
        if p.distance_to(stall_anchor) >= loop.stall_distance:
            stall_anchor = p
            stall_since = state.time
        elif (target_node is not None
              and state.time - stall_since >= loop.stall_timeout):
            node = rm.nodes[target_node]
            dest = rm.nodes[path_ids[-1]]
            if (node.status is NodeStatus.EXTENDABLE
                    and p.distance_to(node.position) <= loop.stall_expand_slack):
                expand_at(target_node)
            else:
                if dest.status is NodeStatus.EXTENDABLE:
                    deferred[dest.id] = state.time + loop.stall_defer
                    events.append((state.time, "defer", dest.id))
                # a far pin means the map has no vantage point near this
                # wedge; plant one at the robot so the side openings become
                # candidates, unless some node already sits here
                if all(p.distance_to(n.position) > 2.0 * loop.reach_tolerance
                       for n in rm.nodes.values()):
                    expand_at(rm.insert_node(p, path_ids[0]))
            stall_anchor = p
            stall_since = state.time

        regions = rm.regions_containing(p)
        if not regions:
            nearest = min(
                (n for n in rm.nodes.values() if n.status is NodeStatus.EXPANDED),
                key=lambda n: (p.distance_to(n.position), n.id))
            regions = [nearest.region]
        v_mod = combine_overlaps(regions, p, raw_guidance(p, p_sg), sigma)
        v_cmd = blend_nearest(v_mod, p, scan, ctrl)
        cmd = track_unicycle(v_cmd, state.pose, ctrl)

        control_s = clock() - t_ctrl
        control_times.append(control_s)
        traj.append((state.time, p.x, p.y, state.pose.heading,
                     cmd.v, cmd.w, control_s * 1000.0))

        state = step_robot(state, cmd, loop.dt)
        if check_collision(world, state.pose.position, robot_radius):
            state = replace(state, collided=True)
            outcome = Outcome.COLLISION
            events.append((state.time, "collision", None))
            break

    final = state.pose
    traj.append((state.time, final.position.x, final.position.y, final.heading,
                 0.0, 0.0, 0.0))
    trajectory = np.array(traj, dtype=float)
    deltas = np.diff(trajectory[:, 1:3], axis=0)
    path_length = float(np.hypot(deltas[:, 0], deltas[:, 1]).sum())

    return RunRecord(
        scenario_hash=spec.hash(),
        seed=seed,
        outcome=outcome,
        trajectory=trajectory,
        events=events,
        roadmap=rm.to_dict() if rm is not None else {"root": None, "nodes": [], "edges": []},
        world_dict=_world_dict(world),
        start=start,
        goal=goal,
        travel_time=float(state.time),
        path_length=path_length,
        control_times=control_times,
        fit_times=fit_times,
        scenario=spec.to_dict(),
    )


def _mean_std(values: list[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 0.0
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def summarize_runs(records: list[RunRecord]) -> BatchSummary:
    """Aggregate a batch; records are ordered by seed so summaries do not
    depend on the order episodes were run."""
    records = sorted(records, key=lambda r: r.seed)
    successes = [r for r in records if r.outcome is Outcome.SUCCESS]
    tt_mean, tt_std = _mean_std([r.travel_time for r in successes])
    pl_mean, pl_std = _mean_std([r.path_length for r in successes])
    ctrl_all = [1000.0 * t for r in successes for t in r.control_times]
    fit_all = [1000.0 * t for r in successes for t in r.fit_times]
    ctrl_mean, ctrl_std = _mean_std(ctrl_all)
    fit_mean, fit_std = _mean_std(fit_all)
    return BatchSummary(
        n_runs=len(records),
        n_success=len(successes),
        success_rate=len(successes) / len(records) if records else 0.0,
        travel_time_mean=tt_mean, travel_time_std=tt_std,
        path_length_mean=pl_mean, path_length_std=pl_std,
        control_ms_mean=ctrl_mean, control_ms_std=ctrl_std,
        fit_ms_mean=fit_mean, fit_ms_std=fit_std,
        outcomes=tuple((r.seed, r.outcome.value) for r in records),
    )


def run_batch(spec: ScenarioSpec, seeds: list[int],
              measure_timing: bool = True) -> BatchSummary:
    """Run independent episodes for each seed and aggregate."""
    records = [run_episode(spec, s, measure_timing) for s in seeds]
    return summarize_runs(records)
