"""Mode-aware travel planning between sublocations, with memoization.

Road modes (walk, bike, car) use straight-line or 5-part road routes; transit
uses the public-transport search and falls back to a car trip when that search
fails. Plans are cached per (origin, destination, mode) because agents repeat
the same trips day after day.
"""

from __future__ import annotations

from dataclasses import dataclass

from .city import CityModel
from .geometry import Point, dist
from .roads import DEFAULT_WALK_THRESHOLD_M, RoadGraph, RoutePath, route_on_roads
from .transit import (DEFAULT_MAX_LEVELS, DEFAULT_RADII_M, TransitGraph,
                      TransitItinerary, route_transit)

DEFAULT_MODE_SPEEDS_MS = {
    "walk": 5.0 / 3.6,
    "bike": 15.0 / 3.6,
    "car": 30.0 / 3.6,
}

ROAD_MODES = ("walk", "bike", "car")
TRANSIT_MODE = "transit"
TRANSIT_FALLBACK_MODE = "car"


@dataclass(frozen=True)
class TravelPlan:
    """A planned leg: the mode actually used, its route and estimated time."""

    mode: str
    road_path: RoutePath | None
    itinerary: TransitItinerary | None
    est_duration: float


class CityRouter:
    def __init__(self, city: CityModel, roads: RoadGraph,
                 transit: TransitGraph | None = None,
                 mode_speeds: dict[str, float] | None = None,
                 walk_threshold: float = DEFAULT_WALK_THRESHOLD_M,
                 transit_radii=DEFAULT_RADII_M,
                 transit_max_levels: int = DEFAULT_MAX_LEVELS):
        self.city = city
        self.roads = roads
        self.transit = transit
        self.mode_speeds = dict(DEFAULT_MODE_SPEEDS_MS)
        if mode_speeds:
            self.mode_speeds.update(mode_speeds)
        self.walk_threshold = walk_threshold
        self.transit_radii = tuple(transit_radii)
        self.transit_max_levels = transit_max_levels
        self._cache: dict[tuple[str, str, str], TravelPlan] = {}

    def plan(self, src_sl: str, dst_sl: str, mode: str) -> TravelPlan:
        key = (src_sl, dst_sl, mode)
        hit = self._cache.get(key)
        if hit is None:
            ps = self.city.sublocations[src_sl].center
            pe = self.city.sublocations[dst_sl].center
            hit = self.plan_points(ps, pe, mode)
            self._cache[key] = hit
        return hit

    def plan_points(self, ps: Point, pe: Point, mode: str) -> TravelPlan:
        if mode == TRANSIT_MODE and self.transit is not None:
            itin = route_transit(self.transit, ps, pe,
                                 radii=self.transit_radii,
                                 max_levels=self.transit_max_levels,
                                 walk_speed=self.mode_speeds["walk"])
            if itin is not None and itin.legs:
                return TravelPlan(TRANSIT_MODE, None, itin, itin.est_duration)
            if itin is not None:
                # Search met inside the access circles: the trip is a walk.
                mode = "walk"
            else:
                mode = TRANSIT_FALLBACK_MODE
        elif mode == TRANSIT_MODE:
            mode = TRANSIT_FALLBACK_MODE
        if mode not in self.mode_speeds:
            raise ValueError(f"unknown travel mode {mode!r}")
        path = route_on_roads(self.roads, ps, pe, self.walk_threshold)
        speed = self.mode_speeds[mode]
        return TravelPlan(mode, path, None, path.total_length / speed)

    def straight_walk_time(self, a: Point, b: Point) -> float:
        return dist(a, b) / self.mode_speeds["walk"]
