"""Synthetic grid-city generator for tests and desk-scale scenarios.

The city is a rectangular grid: crossings at every grid point, two-way road
sections along all grid lines, and one region per block. Region types are
dealt over the blocks from the requested counts, each region gets a mix of
sublocations valid for its type, and transit lines thread along grid rows and
columns with a stop pair (one per direction of travel) near each crossing they
pass. Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .city import ALLOWED_SL_CLASSES, RegionType, SLClass
from .errors import SpecError
from .rng import CITYGEN_STREAM, derived_random

# Per region type: (sl class, weight) used to fill sls_per_region slots.
_SL_MIX: dict[RegionType, list[tuple[SLClass, float]]] = {
    RegionType.HOUSING: [(SLClass.HOUSING, 0.7), (SLClass.RECREATIONAL, 0.15),
                         (SLClass.OFFICE, 0.1), (SLClass.CLASSROOM, 0.05)],
    RegionType.OFFICE: [(SLClass.OFFICE, 0.8), (SLClass.RECREATIONAL, 0.2)],
    RegionType.SCHOOL: [(SLClass.CLASSROOM, 0.6), (SLClass.OFFICE, 0.2),
                        (SLClass.RECREATIONAL, 0.2)],
    RegionType.UNIVERSITY: [(SLClass.CLASSROOM, 0.5), (SLClass.HOUSING, 0.2),
                            (SLClass.OFFICE, 0.15), (SLClass.RECREATIONAL, 0.15)],
    RegionType.MEDICAL: [(SLClass.PATIENT_ROOM, 0.6), (SLClass.OFFICE, 0.2),
                         (SLClass.RECREATIONAL, 0.2)],
    RegionType.RECREATIONAL: [(SLClass.RECREATIONAL, 1.0)],
}

_OUTDOOR_FRACTION = {SLClass.RECREATIONAL: 0.5}


@dataclass
class SyntheticCitySpec:
    """Grid dimensions, region counts per type, and network shape."""

    grid_cols: int = 4
    grid_rows: int = 4
    block_size: float = 600.0
    region_counts: dict[RegionType, int] = field(default_factory=lambda: {
        RegionType.HOUSING: 6,
        RegionType.OFFICE: 4,
        RegionType.SCHOOL: 2,
        RegionType.UNIVERSITY: 1,
        RegionType.MEDICAL: 1,
        RegionType.RECREATIONAL: 2,
    })
    sls_per_region: int = 8
    transit_lines: int = 2
    stop_every_blocks: int = 1
    headway: float = 600.0
    line_speed: float = 8.0
    sl_radius: float = 5.0

    def validate(self) -> None:
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise SpecError("grid dimensions must be >= 1")
        if self.block_size <= 0:
            raise SpecError("block_size must be > 0")
        if self.sls_per_region < 1:
            raise SpecError("sls_per_region must be >= 1")
        if any(c < 0 for c in self.region_counts.values()):
            raise SpecError("region counts must be >= 0")
        total = sum(self.region_counts.values())
        if total < 1:
            raise SpecError("at least one region is required")
        if total > self.grid_cols * self.grid_rows:
            raise SpecError(f"{total} regions do not fit "
                            f"{self.grid_cols}x{self.grid_rows} blocks")
        if self.transit_lines < 0 or self.stop_every_blocks < 1:
            raise SpecError("bad transit spec")
        if self.headway <= 0 or self.line_speed <= 0:
            raise SpecError("headway and line_speed must be > 0")


def generate_synthetic_city(spec: SyntheticCitySpec, seed: int) -> dict:
    """Generate a city document in the native schema; see load/parse_city."""
    spec.validate()
    rng = derived_random(seed, CITYGEN_STREAM)
    b = spec.block_size

    nodes = []
    for r in range(spec.grid_rows + 1):
        for c in range(spec.grid_cols + 1):
            nodes.append({"id": f"N{r:03d}_{c:03d}", "x": c * b, "y": r * b})
    edges = []
    eid = 0
    for r in range(spec.grid_rows + 1):
        for c in range(spec.grid_cols):
            edges.append({"id": f"E{eid:05d}", "from": f"N{r:03d}_{c:03d}",
                          "to": f"N{r:03d}_{c + 1:03d}", "two_way": True})
            eid += 1
    for r in range(spec.grid_rows):
        for c in range(spec.grid_cols + 1):
            edges.append({"id": f"E{eid:05d}", "from": f"N{r:03d}_{c:03d}",
                          "to": f"N{r + 1:03d}_{c:03d}", "two_way": True})
            eid += 1

    blocks = [(r, c) for r in range(spec.grid_rows) for c in range(spec.grid_cols)]
    rng.shuffle(blocks)
    assignments: list[tuple[RegionType, tuple[int, int]]] = []
    i = 0
    for rtype in sorted(spec.region_counts, key=lambda t: t.value):
        for _ in range(spec.region_counts[rtype]):
            assignments.append((rtype, blocks[i]))
            i += 1

    margin = min(40.0, b * 0.1)
    regions = []
    sublocations = []
    sl_seq = 0
    for idx, (rtype, (r, c)) in enumerate(assignments):
        rid = f"R{idx:03d}"
        x0, y0 = c * b, r * b
        regions.append({
            "id": rid, "type": rtype.value,
            "boundary": [[x0, y0], [x0 + b, y0], [x0 + b, y0 + b], [x0, y0 + b]],
        })
        mix = _SL_MIX[rtype]
        classes = [cls for cls, _ in mix]
        weights = [w for _, w in mix]
        # First slots cycle through the mix so every listed class appears.
        for k in range(spec.sls_per_region):
            if k < len(classes):
                sl_class = classes[k]
            else:
                sl_class = rng.choices(classes, weights=weights)[0]
            assert sl_class in ALLOWED_SL_CLASSES[rtype]
            cx = rng.uniform(x0 + margin, x0 + b - margin)
            cy = rng.uniform(y0 + margin, y0 + b - margin)
            outdoor = rng.random() < _OUTDOOR_FRACTION.get(sl_class, 0.0)
            sublocations.append({
                "id": f"S{sl_seq:05d}", "class": sl_class.value, "region": rid,
                "center": [round(cx, 3), round(cy, 3)],
                "radius": spec.sl_radius,
                "exposure": "Outdoor" if outdoor else "Indoor",
            })
            sl_seq += 1

    stops = []
    lines = []
    stop_seq = 0
    rows = [spec.grid_rows // 2 + k for k in range(spec.transit_lines)]
    for li, row in enumerate(rows):
        horizontal = row <= spec.grid_rows
        if horizontal:
            y = (row % (spec.grid_rows + 1)) * b
            positions = [(c * b, y) for c in
                         range(0, spec.grid_cols + 1, spec.stop_every_blocks)]
            offset = (0.0, 6.0)
        else:
            col = (row - spec.grid_rows - 1) % (spec.grid_cols + 1)
            x = col * b
            positions = [(x, r * b) for r in
                         range(0, spec.grid_rows + 1, spec.stop_every_blocks)]
            offset = (6.0, 0.0)
        if len(positions) < 2:
            continue
        fwd, rev = [], []
        for px, py in positions:
            sid_f = f"T{stop_seq:04d}"
            stops.append({"id": sid_f, "x": px + offset[0], "y": py + offset[1]})
            stop_seq += 1
            sid_r = f"T{stop_seq:04d}"
            stops.append({"id": sid_r, "x": px - offset[0], "y": py - offset[1]})
            stop_seq += 1
            fwd.append(sid_f)
            rev.append(sid_r)
        lines.append({"id": f"L{li:02d}", "direction": 0, "stops": fwd,
                      "headway": spec.headway, "speed": spec.line_speed})
        lines.append({"id": f"L{li:02d}", "direction": 1,
                      "stops": list(reversed(rev)),
                      "headway": spec.headway, "speed": spec.line_speed})

    return {
        "version": 1,
        "crs": "planar",
        "regions": regions,
        "sublocations": sublocations,
        "road_nodes": nodes,
        "road_edges": edges,
        "transit_stops": stops,
        "transit_lines": lines,
    }
