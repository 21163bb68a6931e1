"""Public-transportation network and itinerary search.

Lines are directed stop sequences served by vehicles departing every headway
seconds. Itineraries are found by growing stop sets simultaneously from the
origin and the destination: the first level collects stops within the access
radius (1 km by default) of the point, and each further level steps one stop
forward along every line and then collects stops within the transfer radius
(50 m by default). Origin-side levels follow line direction; destination-side
levels step against it, so any reconstructed ride is feasible on a directed
line. A stop present in one level from each side yields a candidate journey;
among all candidates within the level budget the itinerary with the fewest
transfers wins, then the least estimated travel time, then the lowest meeting
stop id.

Estimated times charge arc length / vehicle speed per section, half a headway
per boarding, and walking time for access, egress and transfer walks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .geometry import Point, PointIndex, cumulative_offsets, dist

DEFAULT_RADII_M = (1000.0, 50.0)
DEFAULT_MAX_LEVELS = 4
DEFAULT_WALK_SPEED_MS = 5.0 / 3.6

LineKey = tuple[str, int]


@dataclass(frozen=True)
class DirectedLine:
    line_id: str
    direction: int
    stops: tuple[str, ...]
    headway: float
    speed: float

    @property
    def key(self) -> LineKey:
        return (self.line_id, self.direction)


@dataclass(frozen=True)
class TransitLeg:
    """One ride: board at one stop, alight at a later stop of the same line."""

    board_stop: str
    alight_stop: str
    line_id: str
    direction: int


@dataclass
class TransitItinerary:
    legs: list[TransitLeg]
    transfers: int
    access_walk: tuple[Point, str]          # origin point -> first stop
    egress_walk: tuple[str, Point]          # last stop -> destination point
    transfer_walks: list[tuple[str, str]]   # stop-to-stop walks between legs
    est_duration: float


class TransitGraph:
    """Stops plus directed lines, with the successor/predecessor tables and
    the stop index the search needs."""

    def __init__(self, stops: dict[str, Point], lines: list[DirectedLine]):
        problems = []
        for line in lines:
            if len(line.stops) < 2:
                problems.append(f"line {line.key}: needs at least 2 stops")
            if len(set(line.stops)) != len(line.stops):
                problems.append(f"line {line.key}: repeated stop in sequence")
            for sid in line.stops:
                if sid not in stops:
                    problems.append(f"line {line.key}: unknown stop {sid!r}")
            if line.headway <= 0 or line.speed <= 0:
                problems.append(f"line {line.key}: headway and speed must be > 0")
        if len({ln.key for ln in lines}) != len(lines):
            problems.append("duplicate (line id, direction) pair")
        if problems:
            raise ValidationError(problems)
        self._within_cache: dict[tuple[str, float], list[str]] = {}

        self.stops = dict(stops)
        self.lines: dict[LineKey, DirectedLine] = {ln.key: ln for ln in lines}
        self._offsets: dict[LineKey, list[float]] = {}
        # stop -> [(line key, index in sequence)]
        self._serving: dict[str, list[tuple[LineKey, int]]] = {s: [] for s in stops}
        for key in sorted(self.lines):
            line = self.lines[key]
            pts = [stops[s] for s in line.stops]
            self._offsets[key] = cumulative_offsets(pts)
            for i, sid in enumerate(line.stops):
                self._serving[sid].append((key, i))
        self._index = PointIndex(stops.items())

    def line_offsets(self, key: LineKey) -> list[float]:
        return self._offsets[key]

    def section_length(self, key: LineKey, index: int) -> float:
        offs = self._offsets[key]
        return offs[index + 1] - offs[index]

    def serving(self, stop_id: str) -> list[tuple[LineKey, int]]:
        return self._serving[stop_id]

    def stops_within(self, center: Point, radius: float) -> list[str]:
        """Stops at distance <= radius from center, nearest first."""
        return self._index.query_circle(center, radius)

    def stops_within_of_stop(self, stop_id: str, radius: float) -> list[str]:
        """Memoized stops_within around a stop (hot in the level expansion)."""
        key = (stop_id, radius)
        hit = self._within_cache.get(key)
        if hit is None:
            hit = self._index.query_circle(self.stops[stop_id], radius)
            self._within_cache[key] = hit
        return hit

    def next_stops(self, stop_id: str) -> set[str]:
        """Stops coming immediately next after stop_id on every directed line
        serving it; empty for terminal-only stops."""
        out = set()
        for key, i in self._serving[stop_id]:
            seq = self.lines[key].stops
            if i + 1 < len(seq):
                out.add(seq[i + 1])
        return out

    def prev_stops(self, stop_id: str) -> set[str]:
        """Stops from which stop_id is immediately reachable on some line."""
        out = set()
        for key, i in self._serving[stop_id]:
            if i > 0:
                out.add(self.lines[key].stops[i - 1])
        return out


@dataclass
class _Label:
    """Best (legs, time) journey prefix/suffix ending or starting at a stop.

    line is the line the traveler is aboard (origin side) or boards at this
    stop without walking first (destination side); None after/before a walk.
    """

    stop: str
    line: LineKey | None
    legs: int
    time: float
    parent: "_Label | None" = None
    ride: tuple[str, LineKey, str] | None = None  # (from stop, line, to stop)
    walked_from: str | None = None

    def better_than(self, other: "_Label") -> bool:
        return (self.legs, self.time) < (other.legs, other.time)


def _radius_for(radii, level: int) -> float:
    idx = min(level - 1, len(radii) - 1)
    return radii[idx]


def _consider(frontier: dict[str, dict], lab: _Label) -> None:
    per_stop = frontier.setdefault(lab.stop, {})
    cur = per_stop.get(lab.line)
    if cur is None or lab.better_than(cur):
        per_stop[lab.line] = lab


def _expand(graph: TransitGraph, prev: dict[str, dict], radius: float,
            walk_speed: float, forward: bool) -> dict[str, dict]:
    """One search level: ride a single section from every labeled stop, then
    collect transfer stops within the level radius around the arrival stop."""
    new: dict[str, dict] = {}
    for stop in sorted(prev):
        for line_key in sorted(prev[stop], key=lambda k: (k is None, k)):
            lab = prev[stop][line_key]
            for key, i in graph.serving(stop):
                line = graph.lines[key]
                if forward:
                    if i + 1 >= len(line.stops):
                        continue
                    other = line.stops[i + 1]
                    ride_len = graph.section_length(key, i)
                else:
                    if i == 0:
                        continue
                    other = line.stops[i - 1]
                    ride_len = graph.section_length(key, i - 1)
                ride_t = ride_len / line.speed
                if lab.line == key:
                    legs, t = lab.legs, lab.time + ride_t
                else:
                    legs, t = lab.legs + 1, lab.time + 0.5 * line.headway + ride_t
                if forward:
                    ride = (stop, key, other)
                else:
                    ride = (other, key, stop)
                arrived = _Label(other, key, legs, t, parent=lab, ride=ride)
                _consider(new, arrived)
                for s2 in graph.stops_within_of_stop(other, radius):
                    if s2 == other:
                        continue
                    walk_t = dist(graph.stops[other], graph.stops[s2]) / walk_speed
                    _consider(new, _Label(s2, None, legs, t + walk_t,
                                          parent=arrived, walked_from=other))
    return new


def _first_level(graph: TransitGraph, p: Point, radius: float,
                 walk_speed: float) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for sid in graph.stops_within(p, radius):
        walk_t = dist(p, graph.stops[sid]) / walk_speed
        _consider(out, _Label(sid, None, 0, walk_t))
    return out


def _reconstruct(graph: TransitGraph, ps: Point, pe: Point,
                 s_lab: _Label, e_lab: _Label,
                 total_legs: int, total_time: float) -> TransitItinerary:
    # Origin-side ride chain in journey order.
    rides: list[tuple[str, LineKey, str]] = []
    walks: list[tuple[int, str, str]] = []   # (#rides before the walk, a, b)
    lab = s_lab
    chain = []
    while lab is not None:
        chain.append(lab)
        lab = lab.parent
    chain.reverse()
    first_stop = chain[0].stop
    for lab in chain:
        if lab.ride is not None:
            rides.append(lab.ride)
        elif lab.walked_from is not None:
            walks.append((len(rides), lab.walked_from, lab.stop))
    # Destination-side labels chain from the meet toward Pe already.
    lab = e_lab
    while lab is not None:
        if lab.ride is not None:
            rides.append(lab.ride)
        elif lab.walked_from is not None and lab.parent is not None:
            # Journey order: walk from this stop to the stop ridden from next.
            walks.append((len(rides), lab.stop, lab.walked_from))
        last_stop = lab.stop
        lab = lab.parent

    # Merge consecutive single-section rides on one line into legs.
    legs: list[TransitLeg] = []
    transfer_walks: list[tuple[str, str]] = []
    walk_at = {}
    for n_rides, a, b in walks:
        walk_at.setdefault(n_rides, []).append((a, b))
    for n, ride in enumerate(rides):
        frm, key, to = ride
        joined = (legs
                  and legs[-1].line_id == key[0] and legs[-1].direction == key[1]
                  and legs[-1].alight_stop == frm
                  and n not in walk_at)
        if joined:
            legs[-1] = TransitLeg(legs[-1].board_stop, to, key[0], key[1])
        else:
            legs.append(TransitLeg(frm, to, key[0], key[1]))
            if n in walk_at:
                transfer_walks.extend(walk_at[n])
    assert len(legs) == total_legs, "leg merge disagrees with search labels"
    transfer_walks.extend(walk_at.get(len(rides), []))

    return TransitItinerary(
        legs=legs,
        transfers=max(0, len(legs) - 1),
        access_walk=(ps, first_stop),
        egress_walk=(last_stop, pe),
        transfer_walks=transfer_walks,
        est_duration=total_time,
    )


def route_transit(graph: TransitGraph, ps: Point, pe: Point,
                  radii=DEFAULT_RADII_M,
                  max_levels: int = DEFAULT_MAX_LEVELS,
                  walk_speed: float = DEFAULT_WALK_SPEED_MS) -> TransitItinerary | None:
    """Best public-transport itinerary from ps to pe, or None when the level
    budget is exhausted without the two searches meeting.

    radii[0] is the access/egress search radius, later entries the per-level
    transfer radius (the last entry repeats). max_levels bounds the number of
    levels grown on each side.
    """
    if not radii:
        raise ValueError("radii schedule must be non-empty")
    s_levels = [_first_level(graph, ps, _radius_for(radii, 1), walk_speed)]
    e_levels = [_first_level(graph, pe, _radius_for(radii, 1), walk_speed)]
    for level in range(2, max_levels + 1):
        r = _radius_for(radii, level)
        if s_levels[-1]:
            s_levels.append(_expand(graph, s_levels[-1], r, walk_speed, forward=True))
        if e_levels[-1]:
            e_levels.append(_expand(graph, e_levels[-1], r, walk_speed, forward=False))

    best = None  # (legs, time, stop, i, j, s_lab, e_lab, merged)
    for i, s_front in enumerate(s_levels):
        for j, e_front in enumerate(e_levels):
            for stop in sorted(set(s_front) & set(e_front)):
                for s_lab in s_front[stop].values():
                    for e_lab in e_front[stop].values():
                        merged = (s_lab.line is not None
                                  and s_lab.line == e_lab.line)
                        legs = s_lab.legs + e_lab.legs - (1 if merged else 0)
                        time = s_lab.time + e_lab.time
                        if merged:
                            # One boarding, not two: drop the double-counted wait.
                            time -= 0.5 * graph.lines[s_lab.line].headway
                        cand = (legs, time, stop, i, j, s_lab, e_lab, merged)
                        if best is None or cand[:5] < best[:5]:
                            best = cand
    if best is None:
        return None
    legs, time, _stop, _i, _j, s_lab, e_lab, _merged = best
    return _reconstruct(graph, ps, pe, s_lab, e_lab, legs, time)
