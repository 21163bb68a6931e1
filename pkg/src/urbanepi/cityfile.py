"""City file ingestion and export.

The native format is a versioned YAML document with regions, sublocations and
the road/transit sections. Coordinates are planar meters by default; with
``crs: lonlat`` every coordinate pair is (lon, lat) degrees and gets projected
onto a plane anchored at the centroid of all region vertices. A GeoJSON
FeatureCollection can serve as an alternate geometry source, and the model can
be exported back to GeoJSON for inspection.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import yaml

from .city import CityModel, Exposure, Region, RegionType, SLClass, Sublocation
from .errors import ParseError, ValidationError
from .geometry import lonlat_to_planar
from .roads import RoadGraph
from .transit import DirectedLine, TransitGraph

log = logging.getLogger(__name__)

CITY_VERSION = 1


@dataclass
class CityData:
    model: CityModel
    roads: RoadGraph
    transit: TransitGraph | None


def _as_point(value, where: str, errors: list[str]):
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return (float(value[0]), float(value[1]))
    errors.append(f"{where}: expected [x, y]")
    return None


def parse_city(data: dict, source: str = "<city>") -> CityData:
    """Build the city model and both networks from a parsed document."""
    if not isinstance(data, dict):
        raise ValidationError([f"{source}: document must be a mapping"])
    errors: list[str] = []
    version = data.get("version", CITY_VERSION)
    if version != CITY_VERSION:
        errors.append(f"{source}: unsupported city file version {version}")
    crs = data.get("crs", "planar")
    if crs not in ("planar", "lonlat"):
        errors.append(f"{source}: crs must be 'planar' or 'lonlat'")
        crs = "planar"

    raw_regions = data.get("regions") or []
    raw_subs = data.get("sublocations") or []
    raw_nodes = data.get("road_nodes") or []
    raw_edges = data.get("road_edges") or []
    raw_stops = data.get("transit_stops") or []
    raw_lines = data.get("transit_lines") or []
    known = {"version", "crs", "regions", "sublocations", "road_nodes",
             "road_edges", "transit_stops", "transit_lines"}
    for key in data:
        if key not in known:
            errors.append(f"{source}: unknown section {key!r}")

    project = None
    if crs == "lonlat":
        verts = [v for r in raw_regions for v in (r.get("boundary") or [])]
        if not verts:
            errors.append(f"{source}: lonlat city needs at least one region boundary")
            raise ValidationError(errors)
        lon0 = sum(float(v[0]) for v in verts) / len(verts)
        lat0 = sum(float(v[1]) for v in verts) / len(verts)
        project = lambda p: lonlat_to_planar(p[0], p[1], lon0, lat0)

    def conv(p):
        return project(p) if project else p

    regions: list[Region] = []
    kept_region_ids: set[str] = set()
    for i, raw in enumerate(raw_regions):
        rid = str(raw.get("id", f"region[{i}]"))
        type_name = raw.get("type")
        try:
            rtype = RegionType(type_name)
        except ValueError:
            log.warning("%s: region %s has unsupported type %r; ignored",
                        source, rid, type_name)
            continue
        boundary = []
        for v in raw.get("boundary") or []:
            pt = _as_point(v, f"{source}: region {rid} boundary", errors)
            if pt is not None:
                boundary.append(conv(pt))
        regions.append(Region(rid, rtype, tuple(boundary)))
        kept_region_ids.add(rid)

    sublocations: list[Sublocation] = []
    for i, raw in enumerate(raw_subs):
        sid = str(raw.get("id", f"sublocation[{i}]"))
        rid = str(raw.get("region", ""))
        if rid not in kept_region_ids:
            if any(str(r.get("id")) == rid for r in raw_regions):
                log.warning("%s: sublocation %s belongs to an ignored region %s; "
                            "ignored", source, sid, rid)
                continue
        try:
            sl_class = SLClass(raw.get("class"))
        except ValueError:
            errors.append(f"{source}: sublocation {sid}: unknown class "
                          f"{raw.get('class')!r}")
            continue
        try:
            exposure = Exposure(str(raw.get("exposure", "Indoor")).capitalize())
        except ValueError:
            errors.append(f"{source}: sublocation {sid}: exposure must be "
                          "Indoor or Outdoor")
            continue
        center = _as_point(raw.get("center"), f"{source}: sublocation {sid} center",
                           errors)
        radius = raw.get("radius")
        if not isinstance(radius, (int, float)):
            errors.append(f"{source}: sublocation {sid}: radius must be a number")
            continue
        if center is None:
            continue
        sublocations.append(Sublocation(sid, sl_class, rid, conv(center),
                                        float(radius), exposure))

    nodes: dict[str, tuple[float, float]] = {}
    for i, raw in enumerate(raw_nodes):
        nid = str(raw.get("id", f"node[{i}]"))
        x, y = raw.get("x"), raw.get("y")
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            errors.append(f"{source}: road node {nid}: x and y must be numbers")
            continue
        nodes[nid] = conv((float(x), float(y)))

    edge_specs = []
    for i, raw in enumerate(raw_edges):
        eid = str(raw.get("id", f"edge[{i}]"))
        a, b = str(raw.get("from", "")), str(raw.get("to", ""))
        two_way = bool(raw.get("two_way", True))
        poly = None
        if raw.get("polyline") is not None:
            poly = []
            for v in raw["polyline"]:
                pt = _as_point(v, f"{source}: edge {eid} polyline", errors)
                if pt is not None:
                    poly.append(conv(pt))
        if a not in nodes or b not in nodes:
            errors.append(f"{source}: edge {eid}: unknown endpoint ({a!r}, {b!r})")
            continue
        edge_specs.append((eid, a, b, poly, two_way))

    stops: dict[str, tuple[float, float]] = {}
    for i, raw in enumerate(raw_stops):
        sid = str(raw.get("id", f"stop[{i}]"))
        x, y = raw.get("x"), raw.get("y")
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            errors.append(f"{source}: stop {sid}: x and y must be numbers")
            continue
        stops[sid] = conv((float(x), float(y)))

    lines: list[DirectedLine] = []
    for i, raw in enumerate(raw_lines):
        lid = str(raw.get("id", f"line[{i}]"))
        direction = raw.get("direction", 0)
        seq = [str(s) for s in (raw.get("stops") or [])]
        headway = raw.get("headway", 600.0)
        speed = raw.get("speed", 8.0)
        if not isinstance(direction, int):
            errors.append(f"{source}: line {lid}: direction must be an integer")
            continue
        if not isinstance(headway, (int, float)) or not isinstance(speed, (int, float)):
            errors.append(f"{source}: line {lid}: headway and speed must be numbers")
            continue
        lines.append(DirectedLine(lid, direction, tuple(seq),
                                  float(headway), float(speed)))

    if errors:
        raise ValidationError(errors)
    if not nodes:
        raise ValidationError([f"{source}: city has no road nodes"])

    model = CityModel(regions, sublocations)
    try:
        roads = RoadGraph.build(nodes, edge_specs)
    except ValidationError as exc:
        raise ValidationError([f"{source}: {e}" for e in exc.errors]) from exc
    transit = None
    if stops or lines:
        try:
            transit = TransitGraph(stops, lines)
        except ValidationError as exc:
            raise ValidationError([f"{source}: {e}" for e in exc.errors]) from exc
    return CityData(model, roads, transit)


def load_city(path: str) -> CityData:
    """Load a city from native YAML or from a GeoJSON FeatureCollection."""
    if path.endswith((".geojson", ".json")):
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: {exc}") from exc
        return parse_city(geojson_to_city_dict(doc, path), source=path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return parse_city(data, source=path)


def save_city(city_dict: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(city_dict, fh, sort_keys=False)


def geojson_to_city_dict(doc: dict, source: str = "<geojson>") -> dict:
    """Map a FeatureCollection onto the native city schema.

    Polygons with a ``type`` property become regions, Points with a ``class``
    property become sublocations, LineStrings with road properties become road
    edges (nodes are synthesized at endpoints shared by coordinates).
    """
    if doc.get("type") != "FeatureCollection":
        raise ValidationError([f"{source}: expected a FeatureCollection"])
    regions, subs = [], []
    node_ids: dict[tuple[float, float], str] = {}
    nodes, edges = [], []

    def node_for(pt) -> str:
        key = (float(pt[0]), float(pt[1]))
        if key not in node_ids:
            nid = f"N{len(node_ids):05d}"
            node_ids[key] = nid
            nodes.append({"id": nid, "x": key[0], "y": key[1]})
        return node_ids[key]

    for i, feat in enumerate(doc.get("features", [])):
        geom = feat.get("geometry") or {}
        props = feat.get("properties") or {}
        gtype = geom.get("type")
        if gtype == "Polygon":
            ring = geom.get("coordinates", [[]])[0]
            if ring and ring[0] == ring[-1]:
                ring = ring[:-1]
            regions.append({"id": str(props.get("id", f"R{i:04d}")),
                            "type": props.get("type"),
                            "boundary": [[float(x), float(y)] for x, y in ring]})
        elif gtype == "Point" and "class" in props:
            x, y = geom.get("coordinates", (None, None))
            subs.append({"id": str(props.get("id", f"S{i:04d}")),
                         "class": props.get("class"),
                         "region": str(props.get("region", "")),
                         "center": [float(x), float(y)],
                         "radius": float(props.get("radius", 5.0)),
                         "exposure": props.get("exposure", "Indoor")})
        elif gtype == "LineString":
            coords = geom.get("coordinates", [])
            if len(coords) < 2:
                continue
            edges.append({"id": str(props.get("id", f"E{i:04d}")),
                          "from": node_for(coords[0]),
                          "to": node_for(coords[-1]),
                          "two_way": bool(props.get("two_way", True)),
                          "polyline": [[float(x), float(y)] for x, y in coords]})
    return {"version": CITY_VERSION, "crs": doc.get("crs", "planar"),
            "regions": regions, "sublocations": subs,
            "road_nodes": nodes, "road_edges": edges,
            "transit_stops": [], "transit_lines": []}


def city_to_geojson(model: CityModel) -> dict:
    """Regions and sublocations as a GeoJSON FeatureCollection."""
    features = []
    for rid in sorted(model.regions):
        region = model.regions[rid]
        ring = [list(v) for v in region.boundary]
        if ring:
            ring.append(ring[0])
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [ring]},
            "properties": {"id": rid, "type": region.region_type.value},
        })
    for sid in sorted(model.sublocations):
        sl = model.sublocations[sid]
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": list(sl.center)},
            "properties": {"id": sid, "class": sl.sl_class.value,
                           "region": sl.region_id, "radius": sl.radius,
                           "exposure": sl.exposure.value},
        })
    return {"type": "FeatureCollection", "features": features}
