"""Incremental frontier roadmap.

Nodes are positions with a lifecycle status: Extendable candidates become
Expanded (with an attached free-space region) when visited and fruitful, or
Stuck when expansion there cannot grow the map. Planning runs a shortest-path
search over the non-Stuck graph from a virtual start vertex attached to the
regions containing the robot.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum

from .frontier import FrontierCandidate
from .geometry import Point2
from .starshape import StarshapedRegion, contains, region_to_dict


class NodeStatus(Enum):
    EXTENDABLE = "extendable"
    EXPANDED = "expanded"
    STUCK = "stuck"


class UnknownNode(KeyError):
    """Referenced node id is not in the roadmap."""


class AlreadyExpanded(ValueError):
    """Expansion requested for a node that is already Expanded."""


class InvalidTransition(ValueError):
    """Requested status change is not a legal lifecycle transition."""


class NoPath(RuntimeError):
    """Every route to the goal or to an Extendable node is blocked."""


class StartOutsideRegion(ValueError):
    """init_roadmap called with a region that does not contain the start."""


@dataclass
class RoadmapNode:
    id: int
    position: Point2
    status: NodeStatus
    region: StarshapedRegion | None = None


# virtual vertex ids used only inside the search
_START = -1
_GOAL = -2


class Roadmap:
    """Mutable roadmap graph. Single-writer: the episode loop owns mutation."""

    def __init__(self) -> None:
        self.nodes: dict[int, RoadmapNode] = {}
        self.edges: set[tuple[int, int]] = set()
        self.adj: dict[int, set[int]] = {}
        self.root_id: int | None = None
        self._next_id = 0
        self._replan_pending = False

    # -- construction -----------------------------------------------------

    def _add_node(self, position: Point2, status: NodeStatus,
                  region: StarshapedRegion | None = None) -> int:
        nid = self._next_id
        self._next_id += 1
        self.nodes[nid] = RoadmapNode(nid, position, status, region)
        self.adj[nid] = set()
        return nid

    def _add_edge(self, a: int, b: int) -> None:
        self.edges.add((min(a, b), max(a, b)))
        self.adj[a].add(b)
        self.adj[b].add(a)

    def node(self, nid: int) -> RoadmapNode:
        try:
            return self.nodes[nid]
        except KeyError:
            raise UnknownNode(nid) from None

    def expanded_regions(self) -> list[tuple[int, StarshapedRegion]]:
        return [(n.id, n.region) for n in self.nodes.values()
                if n.status is NodeStatus.EXPANDED and n.region is not None]

    def regions_containing(self, p: Point2) -> list[StarshapedRegion]:
        return [r for _, r in self.expanded_regions() if contains(r, p)]

    # -- lifecycle --------------------------------------------------------

    def expand_node(self, node_id: int, region: StarshapedRegion,
                    frontiers: list[FrontierCandidate]) -> list[int]:
        """Expand a node with a freshly fitted region and its frontier candidates.

        Candidates inside another Expanded node's region are discarded. A
        non-root node with zero surviving candidates is NOT expanded: it stays
        Extendable and an empty list is returned so the caller can mark it
        stuck. The root always expands (and may be re-expanded in place).
        """
        node = self.node(node_id)
        is_root = node_id == self.root_id
        if not is_root:
            if node.status is NodeStatus.EXPANDED:
                raise AlreadyExpanded(node_id)
            if node.status is NodeStatus.STUCK:
                raise InvalidTransition(f"node {node_id} is stuck")

        others = [r for nid, r in self.expanded_regions() if nid != node_id]
        usable = [f for f in frontiers
                  if not any(contains(r, f.position) for r in others)]
        if not usable and not is_root:
            return []

        node.status = NodeStatus.EXPANDED
        node.region = region
        new_ids = []
        for cand in usable:
            nid = self._add_node(cand.position, NodeStatus.EXTENDABLE)
            self._add_edge(node_id, nid)
            new_ids.append(nid)
        return new_ids

    def insert_node(self, position: Point2, parent_id: int) -> int:
        """Add an Extendable node at an arbitrary position, joined to a parent.

        Normally new nodes only appear as frontier candidates of an expansion.
        The episode loop additionally plants one where the robot itself stands
        when it gets wedged between obstacles: a region fitted from the wedge
        tends to expose side openings that no earlier vantage point saw.
        """
        parent = self.node(parent_id)
        nid = self._add_node(position, NodeStatus.EXTENDABLE)
        self._add_edge(parent.id, nid)
        return nid

    def mark_stuck(self, node_id: int) -> None:
        """Mark an Extendable node Stuck and raise the replan flag."""
        node = self.node(node_id)
        if node.status is not NodeStatus.EXTENDABLE:
            raise InvalidTransition(f"node {node_id} is {node.status.value}, not extendable")
        node.status = NodeStatus.STUCK
        self._replan_pending = True

    def consume_replan(self) -> bool:
        """Return and clear the replan flag (set by mark_stuck)."""
        pending = self._replan_pending
        self._replan_pending = False
        return pending

    # -- planning ---------------------------------------------------------

    def plan_short_term_goal(self, robot: Point2, goal: Point2,
                             excluded: frozenset[int] = frozenset(),
                             ) -> tuple[list[int], Point2]:
        """Shortest-path short-term goal selection.

        Returns (path node ids from the robot outward, short-term goal point).
        The path begins at the Expanded node the search attaches the robot
        through; the short-term goal is the first vertex past it. If one region
        contains both robot and goal the robot heads straight for the goal
        (empty path). If the goal is in no region, the target is the reachable
        Extendable node minimizing path cost plus straight-line distance to the
        goal, ties broken by smaller id. Nodes in `excluded` are passed over as
        targets (the episode loop uses this to back off from frontiers it
        failed to reach) but keep their status. Raises NoPath when no route
        survives the Stuck filter.
        """
        start_ids = [nid for nid, r in self.expanded_regions() if contains(r, robot)]
        if not start_ids:
            # transient: the robot wandered outside every region; attach to the
            # nearest Expanded node instead of failing the episode
            expanded = [n for n in self.nodes.values() if n.status is NodeStatus.EXPANDED]
            if not expanded:
                raise NoPath("no expanded regions")
            nearest = min(expanded, key=lambda n: (robot.distance_to(n.position), n.id))
            start_ids = [nearest.id]

        goal_ids = {nid for nid, r in self.expanded_regions() if contains(r, goal)}
        if goal_ids.intersection(start_ids):
            return [], goal

        dist, prev = self._dijkstra(robot, start_ids)

        if goal_ids:
            best_id, best_cost = None, math.inf
            for nid in sorted(goal_ids):
                if dist.get(nid, math.inf) == math.inf:
                    continue
                total = dist[nid] + self.nodes[nid].position.distance_to(goal)
                if total < best_cost - 1e-12:
                    best_id, best_cost = nid, total
            if best_id is not None:
                path = self._reconstruct(prev, best_id)
                return path, self._sg_point(path)

        best_id, best_cost = None, math.inf
        for nid in sorted(self.nodes):
            node = self.nodes[nid]
            if node.status is not NodeStatus.EXTENDABLE or nid in excluded:
                continue
            if dist.get(nid, math.inf) == math.inf:
                continue
            total = dist[nid] + node.position.distance_to(goal)
            if total < best_cost - 1e-12:
                best_id, best_cost = nid, total
        if best_id is None:
            raise NoPath("all routes blocked by stuck nodes")
        path = self._reconstruct(prev, best_id)
        return path, self._sg_point(path)

    def _sg_point(self, path: list[int]) -> Point2:
        # path[0] is the attachment node whose region holds the robot already;
        # the short-term goal is the vertex after it
        idx = 1 if len(path) >= 2 else 0
        return self.nodes[path[idx]].position

    def _dijkstra(self, robot: Point2, start_ids: list[int]) -> tuple[dict[int, float], dict[int, int]]:
        dist: dict[int, float] = {}
        prev: dict[int, int] = {}
        heap: list[tuple[float, int]] = []
        for nid in sorted(set(start_ids)):
            d = robot.distance_to(self.nodes[nid].position)
            dist[nid] = d
            prev[nid] = _START
            heapq.heappush(heap, (d, nid))
        while heap:
            d, nid = heapq.heappop(heap)
            if d > dist.get(nid, math.inf):
                continue
            pos = self.nodes[nid].position
            for nbr in self.adj[nid]:
                if self.nodes[nbr].status is NodeStatus.STUCK:
                    continue
                nd = d + pos.distance_to(self.nodes[nbr].position)
                if nd < dist.get(nbr, math.inf) - 1e-15:
                    dist[nbr] = nd
                    prev[nbr] = nid
                    heapq.heappush(heap, (nd, nbr))
        return dist, prev

    def _reconstruct(self, prev: dict[int, int], last: int) -> list[int]:
        path = [last]
        while prev[path[-1]] != _START:
            path.append(prev[path[-1]])
        path.reverse()
        return path

    # -- persistence ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "root": self.root_id,
            "nodes": [
                {
                    "id": n.id,
                    "position": [n.position.x, n.position.y],
                    "status": n.status.value,
                    "region": region_to_dict(n.region) if n.region is not None else None,
                }
                for n in (self.nodes[k] for k in sorted(self.nodes))
            ],
            "edges": sorted(list(e) for e in self.edges),
        }


def init_roadmap(start: Point2, region: StarshapedRegion) -> Roadmap:
    """Fresh roadmap with a single Expanded root at the start position.

    The region must contain the start (it is the free space fitted there).
    """
    if not contains(region, start):
        raise StartOutsideRegion(f"start {start} outside region {region.id}")
    rm = Roadmap()
    rm.root_id = rm._add_node(start, NodeStatus.EXPANDED, region)
    return rm
