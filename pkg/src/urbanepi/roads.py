"""Road network: crossing/section graph, shortest paths, door-to-door routes.

Short trips (at or below the walk threshold, 3 km by default) go point to
point in a straight line. Longer trips are composed of five parts: a straight
leg to the nearest point on any road, a straight leg from there to the nearest
crossing, the shortest node-to-node path through the graph, then the mirrored
two legs on the destination side.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass

from .errors import ValidationError
from .geometry import (Point, cumulative_offsets, dist, point_along_polyline,
                       polyline_length, project_point_to_polyline, sub_polyline)

log = logging.getLogger(__name__)

DEFAULT_WALK_THRESHOLD_M = 3000.0

# Relative slack for "same length" when walking the shortest-path edge set.
_TIE_EPS = 1e-9


@dataclass(frozen=True)
class Straight:
    """Straight off-road segment between two points."""

    start: Point
    end: Point

    @property
    def length(self) -> float:
        return dist(self.start, self.end)


@dataclass(frozen=True)
class OnRoad:
    """Traversal of one road edge between two arc offsets.

    Offsets are measured along the stored polyline; enter > exit means the
    edge is traversed against its stored direction.
    """

    edge_id: str
    enter: float
    exit: float

    @property
    def length(self) -> float:
        return abs(self.exit - self.enter)


@dataclass(frozen=True)
class Edge:
    edge_id: str
    node_a: str
    node_b: str
    polyline: tuple[Point, ...]
    length: float
    two_way: bool


class RoutePath:
    """Ordered route segments plus a materialized coordinate polyline."""

    def __init__(self, segments: list[Straight | OnRoad], polyline: list[Point]):
        self.segments = segments
        self.total_length = sum(s.length for s in segments)
        self.polyline = polyline if len(polyline) >= 2 else polyline * 2 or []
        self._offsets = cumulative_offsets(self.polyline) if self.polyline else [0.0]

    def point_at(self, s: float) -> Point:
        return point_along_polyline(self.polyline, self._offsets, s)

    @property
    def start(self) -> Point:
        return self.polyline[0]

    @property
    def end(self) -> Point:
        return self.polyline[-1]


class RoadGraph:
    """Directed road graph; two-way sections expand to both directions."""

    def __init__(self, nodes: dict[str, Point], edges: list[Edge]):
        problems = []
        for e in edges:
            if e.node_a not in nodes or e.node_b not in nodes:
                problems.append(f"edge {e.edge_id}: unknown endpoint node")
                continue
            if dist(e.polyline[0], nodes[e.node_a]) > 1e-6:
                problems.append(f"edge {e.edge_id}: polyline start != node {e.node_a}")
            if dist(e.polyline[-1], nodes[e.node_b]) > 1e-6:
                problems.append(f"edge {e.edge_id}: polyline end != node {e.node_b}")
            if e.length <= 0.0:
                problems.append(f"edge {e.edge_id}: zero-length section")
            arc = polyline_length(e.polyline)
            if abs(arc - e.length) > 1e-6 * max(1.0, arc):
                problems.append(f"edge {e.edge_id}: stored length differs from arc length")
        degree = {nid: 0 for nid in nodes}
        for e in edges:
            if e.node_a in degree and e.node_b in degree:
                degree[e.node_a] += 1
                degree[e.node_b] += 1
        for nid in sorted(degree):
            if degree[nid] == 0:
                problems.append(f"node {nid}: degree 0 (every crossing joins >= 1 section)")
        if problems:
            raise ValidationError(problems)

        self.nodes = dict(nodes)
        self.edges: dict[str, Edge] = {e.edge_id: e for e in edges}
        self._edge_offsets = {e.edge_id: cumulative_offsets(e.polyline) for e in edges}
        # adjacency: node -> [(neighbor, length, edge_id, forward)]
        adj: dict[str, list[tuple[str, float, str, bool]]] = {n: [] for n in nodes}
        for e in edges:
            adj[e.node_a].append((e.node_b, e.length, e.edge_id, True))
            if e.two_way:
                adj[e.node_b].append((e.node_a, e.length, e.edge_id, False))
        for n in adj:
            adj[n].sort(key=lambda t: (t[0], t[2]))
        self._adj = adj

    @classmethod
    def build(cls, nodes: dict[str, Point],
              edge_specs: list[tuple[str, str, str, list[Point] | None, bool]]) -> "RoadGraph":
        """Build from (edge_id, node_a, node_b, polyline-or-None, two_way) tuples."""
        edges = []
        for eid, a, b, poly, two_way in edge_specs:
            if poly is None:
                poly = [nodes[a], nodes[b]]
            pts = tuple((float(x), float(y)) for x, y in poly)
            edges.append(Edge(eid, a, b, pts, polyline_length(pts), two_way))
        return cls(nodes, edges)

    def edge_point(self, edge_id: str, offset: float) -> Point:
        e = self.edges[edge_id]
        return point_along_polyline(e.polyline, self._edge_offsets[edge_id], offset)

    def edge_sub_polyline(self, edge_id: str, s0: float, s1: float) -> list[Point]:
        e = self.edges[edge_id]
        return sub_polyline(e.polyline, self._edge_offsets[edge_id], s0, s1)

    def _dijkstra(self, source: str, reverse: bool = False) -> dict[str, float]:
        dist_to: dict[str, float] = {source: 0.0}
        heap = [(0.0, source)]
        if reverse:
            radj: dict[str, list[tuple[str, float]]] = {n: [] for n in self.nodes}
            for u in self._adj:
                for v, w, _eid, _fwd in self._adj[u]:
                    radj[v].append((u, w))
            neighbors = lambda u: radj[u]
        else:
            neighbors = lambda u: [(v, w) for v, w, _e, _f in self._adj[u]]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist_to.get(u, math.inf):
                continue
            for v, w in neighbors(u):
                nd = d + w
                if nd < dist_to.get(v, math.inf):
                    dist_to[v] = nd
                    heapq.heappush(heap, (nd, v))
        return dist_to

    def nearest_node(self, p: Point) -> str:
        """Closest crossing to p; ties broken by lowest node id."""
        best_id = None
        best = (math.inf, "")
        for nid in self.nodes:
            key = (dist(self.nodes[nid], p), nid)
            if key < best:
                best = key
                best_id = nid
        assert best_id is not None
        return best_id

    def nearest_on_road(self, p: Point) -> tuple[str, float, Point]:
        """Closest point on any road section, by perpendicular projection.

        Returns (edge id, arc offset, point); ties go to the lowest edge id.
        """
        best: tuple[float, str, float, Point] | None = None
        for eid in sorted(self.edges):
            e = self.edges[eid]
            off, q, d = project_point_to_polyline(p, e.polyline, self._edge_offsets[eid])
            # ties resolved by iteration order: lowest edge id wins
            if best is None or d < best[0] - 1e-12:
                best = (d, eid, off, q)
        assert best is not None
        return best[1], best[2], best[3]


def shortest_path(graph: RoadGraph, src: str, dst: str) -> RoutePath | None:
    """Minimum-length directed path between two crossings, or None if unreachable.

    Among equal-length paths the one with the lexicographically smallest node
    id sequence is returned, which makes the result deterministic.
    """
    if src not in graph.nodes or dst not in graph.nodes:
        raise KeyError(f"unknown node in ({src!r}, {dst!r})")
    if src == dst:
        return RoutePath([], [graph.nodes[src], graph.nodes[src]])
    dist_fwd = graph._dijkstra(src)
    if dst not in dist_fwd:
        return None
    dist_rev = graph._dijkstra(dst, reverse=True)
    total = dist_fwd[dst]
    eps = _TIE_EPS * max(1.0, total)

    # Walk tight edges from src, always picking the smallest next node id.
    segments: list[OnRoad] = []
    polyline: list[Point] = [graph.nodes[src]]
    u = src
    visited = {u}
    while u != dst:
        choice = None
        for v, w, eid, forward in graph._adj[u]:
            if v in visited and v != dst:
                continue
            via = dist_fwd[u] + w + dist_rev.get(v, math.inf)
            if via <= total + eps:
                if choice is None or (v, eid) < (choice[0], choice[1]):
                    choice = (v, eid, w, forward)
        assert choice is not None, "tight-edge walk lost the shortest path"
        v, eid, w, forward = choice
        e = graph.edges[eid]
        if forward:
            segments.append(OnRoad(eid, 0.0, e.length))
            polyline.extend(e.polyline[1:])
        else:
            segments.append(OnRoad(eid, e.length, 0.0))
            polyline.extend(reversed(e.polyline[:-1]))
        visited.add(v)
        u = v
    return RoutePath(list(segments), polyline)


def route_on_roads(graph: RoadGraph, ps: Point, pe: Point,
                   walk_threshold: float = DEFAULT_WALK_THRESHOLD_M) -> RoutePath:
    """Door-to-door route between two arbitrary points.

    Straight line when the points are within walk_threshold of each other,
    else the 5-part composition through the road graph. If the graph core is
    unreachable the route degrades to a straight line with a warning.
    """
    if dist(ps, pe) <= walk_threshold:
        return RoutePath([Straight(ps, pe)], [ps, pe])

    eid_s, off_s, q_s = graph.nearest_on_road(ps)
    eid_e, off_e, q_e = graph.nearest_on_road(pe)
    n_s = graph.nearest_node(q_s)
    n_e = graph.nearest_node(q_e)
    core = shortest_path(graph, n_s, n_e)
    if core is None:
        log.warning("road route %s -> %s: graph core unreachable (%s -> %s), "
                    "falling back to straight line", ps, pe, n_s, n_e)
        return RoutePath([Straight(ps, pe)], [ps, pe])

    segments: list[Straight | OnRoad] = []
    polyline: list[Point] = [ps]

    def add_straight(a: Point, b: Point) -> None:
        if dist(a, b) > 1e-12:
            segments.append(Straight(a, b))
            polyline.append(b)

    add_straight(ps, q_s)
    add_straight(polyline[-1], graph.nodes[n_s])
    for seg in core.segments:
        segments.append(seg)
    if core.polyline and core.total_length > 0.0:
        polyline.extend(core.polyline[1:])
    add_straight(polyline[-1], q_e)
    add_straight(polyline[-1], pe)
    if not segments:
        segments = [Straight(ps, pe)]
        polyline = [ps, pe]
    return RoutePath(segments, polyline)
