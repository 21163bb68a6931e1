"""City model: typed regions containing typed sublocations.

A region is a polygonal piece of city land with one of six functional types.
A sublocation is a room-like disc inside a region where people spend time and
where close contact can transmit disease. Which sublocation classes a region
may contain is fixed by the class table below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from shapely.geometry import Point as ShPoint
from shapely.geometry import Polygon as ShPolygon
from shapely.prepared import prep

from .geometry import Point, PointIndex, dist


class RegionType(Enum):
    HOUSING = "Housing"
    OFFICE = "Office"
    SCHOOL = "School"
    UNIVERSITY = "University"
    MEDICAL = "Medical"
    RECREATIONAL = "Recreational"


class SLClass(Enum):
    HOUSING = "Housing"
    OFFICE = "Office"
    CLASSROOM = "Classroom"
    PATIENT_ROOM = "PatientRoom"
    RECREATIONAL = "Recreational"


class Exposure(Enum):
    INDOOR = "Indoor"
    OUTDOOR = "Outdoor"


# Sublocation classes each region type may contain.
ALLOWED_SL_CLASSES: dict[RegionType, frozenset[SLClass]] = {
    RegionType.HOUSING: frozenset(
        {SLClass.HOUSING, SLClass.OFFICE, SLClass.RECREATIONAL, SLClass.CLASSROOM}),
    RegionType.OFFICE: frozenset({SLClass.OFFICE, SLClass.RECREATIONAL}),
    RegionType.SCHOOL: frozenset(
        {SLClass.HOUSING, SLClass.OFFICE, SLClass.CLASSROOM, SLClass.RECREATIONAL}),
    RegionType.UNIVERSITY: frozenset(
        {SLClass.HOUSING, SLClass.OFFICE, SLClass.CLASSROOM, SLClass.RECREATIONAL}),
    RegionType.MEDICAL: frozenset(
        {SLClass.OFFICE, SLClass.PATIENT_ROOM, SLClass.RECREATIONAL}),
    RegionType.RECREATIONAL: frozenset({SLClass.RECREATIONAL}),
}


@dataclass(frozen=True)
class Region:
    region_id: str
    region_type: RegionType
    boundary: tuple[Point, ...]


@dataclass(frozen=True)
class Sublocation:
    sl_id: str
    sl_class: SLClass
    region_id: str
    center: Point
    radius: float
    exposure: Exposure


@dataclass(frozen=True)
class Violation:
    """One invariant breach found by validate_city."""

    entity_id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.entity_id}: [{self.rule}] {self.message}"


class CityModel:
    """Immutable world geometry: regions, sublocations and a point index."""

    def __init__(self, regions: list[Region], sublocations: list[Sublocation]):
        self.regions: dict[str, Region] = {r.region_id: r for r in regions}
        self.sublocations: dict[str, Sublocation] = {s.sl_id: s for s in sublocations}
        self._polygons: dict[str, ShPolygon] = {
            r.region_id: ShPolygon(r.boundary) for r in regions
        }
        self._prepared = {rid: prep(poly) for rid, poly in self._polygons.items()}
        self._index = PointIndex((s.sl_id, s.center) for s in sublocations)
        self._by_class: dict[SLClass, list[Sublocation]] = {c: [] for c in SLClass}
        for s in sorted(sublocations, key=lambda s: s.sl_id):
            self._by_class[s.sl_class].append(s)

    def region_polygon(self, region_id: str) -> ShPolygon:
        return self._polygons[region_id]

    def region_contains(self, region_id: str, point: Point) -> bool:
        # Boundary points count as inside.
        return self._prepared[region_id].covers(ShPoint(point))

    def sublocations_of_class(self, sl_class: SLClass) -> list[Sublocation]:
        return self._by_class[sl_class]

    def sublocations_near(self, point: Point, radius: float,
                          class_filter: SLClass | None = None) -> list[Sublocation]:
        """All sublocations within radius of point, nearest first.

        Ties are broken by ascending sublocation id; the returned set equals
        an exhaustive distance scan.
        """
        hits = self._index.query_circle(point, radius)
        subs = [self.sublocations[sl_id] for sl_id in hits]
        if class_filter is not None:
            subs = [s for s in subs if s.sl_class == class_filter]
        return subs


def validate_city(city: CityModel) -> list[Violation]:
    """Check every region/sublocation invariant; violations are data, not errors.

    Idempotent and side-effect free: returns one record per breach, naming
    the entity and the rule.
    """
    out: list[Violation] = []
    for rid in sorted(city.regions):
        region = city.regions[rid]
        if len(region.boundary) < 3:
            out.append(Violation(rid, "region-polygon",
                                 "boundary needs at least 3 vertices"))
            continue
        poly = city.region_polygon(rid)
        if not poly.is_valid:
            out.append(Violation(rid, "region-polygon",
                                 "boundary must be a simple polygon"))
    for sl_id in sorted(city.sublocations):
        sl = city.sublocations[sl_id]
        if sl.radius <= 0.0:
            out.append(Violation(sl_id, "sl-radius", "radius must be > 0"))
        region = city.regions.get(sl.region_id)
        if region is None:
            out.append(Violation(sl_id, "sl-region",
                                 f"unknown region {sl.region_id!r}"))
            continue
        if sl.sl_class not in ALLOWED_SL_CLASSES[region.region_type]:
            out.append(Violation(
                sl_id, "sl-class",
                f"{sl.sl_class.value} sublocation not permitted in a "
                f"{region.region_type.value} region"))
        if len(region.boundary) >= 3 and city.region_polygon(sl.region_id).is_valid:
            if not city.region_contains(sl.region_id, sl.center):
                out.append(Violation(
                    sl_id, "sl-containment",
                    f"center lies outside region {sl.region_id}"))
    return out


def nearest_sublocation(city: CityModel, point: Point,
                        sl_class: SLClass) -> Sublocation | None:
    """Closest sublocation of a class; ties broken by lowest id."""
    best: tuple[float, str, Sublocation] | None = None
    for s in city.sublocations_of_class(sl_class):
        key = (dist(s.center, point), s.sl_id, s)
        if best is None or key[:2] < best[:2]:
            best = key
    return best[2] if best else None
