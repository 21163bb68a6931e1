"""Command-line interface.

Exit codes: 0 success, 2 configuration/input problems, 3 runtime failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import yaml

from .city import validate_city
from .cityfile import city_to_geojson, load_city, save_city
from .citygen import SyntheticCitySpec, generate_synthetic_city
from .config import OUTPUT_DIR_ENV, load_scenario
from .engine import Simulation
from .errors import UrbanEpiError
from .population import population_to_csv_rows, synthesize_population
from .routing import CityRouter

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _cmd_validate_city(args) -> int:
    data = load_city(args.city)
    violations = validate_city(data.model)
    for v in violations:
        print(v)
    if violations:
        print(f"{len(violations)} violation(s)")
        return EXIT_CONFIG
    print(f"{args.city}: ok ({len(data.model.regions)} regions, "
          f"{len(data.model.sublocations)} sublocations)")
    return EXIT_OK


def _cmd_generate_city(args) -> int:
    spec = SyntheticCitySpec()
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
        known = {f for f in SyntheticCitySpec.__dataclass_fields__}
        for key, value in raw.items():
            if key == "region_counts":
                from .city import RegionType
                spec.region_counts = {RegionType(k): int(v)
                                      for k, v in value.items()}
            elif key in known:
                setattr(spec, key, value)
            else:
                raise UrbanEpiError(f"{args.spec}: unknown spec key {key!r}")
    doc = generate_synthetic_city(spec, args.seed)
    save_city(doc, args.output)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_export_geojson(args) -> int:
    data = load_city(args.city)
    doc = city_to_geojson(data.model)
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_route(args) -> int:
    data = load_city(args.city)
    router = CityRouter(data.model, data.roads, data.transit)
    plan = router.plan_points((args.x1, args.y1), (args.x2, args.y2), args.mode)
    if plan.itinerary is not None:
        print(f"mode=transit transfers={plan.itinerary.transfers} "
              f"est_duration={plan.est_duration:.0f}s")
        for leg in plan.itinerary.legs:
            print(f"  ride {leg.line_id}/{leg.direction}: "
                  f"{leg.board_stop} -> {leg.alight_stop}")
        return EXIT_OK
    print(f"mode={plan.mode} length={plan.road_path.total_length:.1f}m "
          f"est_duration={plan.est_duration:.0f}s")
    for x, y in plan.road_path.polyline:
        print(f"  {x:.2f} {y:.2f}")
    return EXIT_OK


def _cmd_transit_route(args) -> int:
    from .transit import route_transit
    data = load_city(args.city)
    if data.transit is None:
        print("city has no transit network", file=sys.stderr)
        return EXIT_CONFIG
    itin = route_transit(data.transit, (args.x1, args.y1), (args.x2, args.y2))
    if itin is None:
        print("no itinerary found (search exhausted); use road travel")
        return EXIT_OK
    print(f"transfers={itin.transfers} est_duration={itin.est_duration:.0f}s")
    print(f"  walk to {itin.access_walk[1]}")
    for leg in itin.legs:
        print(f"  ride {leg.line_id}/{leg.direction}: "
              f"{leg.board_stop} -> {leg.alight_stop}")
    print(f"  walk from {itin.egress_walk[0]}")
    return EXIT_OK


def _cmd_synthesize_population(args) -> int:
    scenario = load_scenario(args.scenario)
    data = load_city(scenario.city_path)
    persons, households = synthesize_population(
        data.model, scenario.demographics,
        args.seed if args.seed is not None else scenario.seed)
    rows = population_to_csv_rows(persons)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(rows) + "\n")
        print(f"wrote {args.output} ({len(persons)} persons, "
              f"{len(households)} households)")
    else:
        for row in rows:
            print(row)
    return EXIT_OK


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario.seed = args.seed
    if args.days is not None:
        scenario.days = args.days
    if args.dt is not None:
        scenario.dt = args.dt
    sim = Simulation(scenario)
    result = sim.run(output_dir=args.output_dir)
    print(f"wrote outputs to {result.output_dir}")
    for key in ("population", "days", "seeded_cases", "transmission_events",
                "ever_infected", "attack_rate"):
        print(f"{key}: {result.summary[key]}")
    return EXIT_OK


def _cmd_report(args) -> int:
    summary_path = os.path.join(args.run_dir, "summary.txt")
    if not os.path.exists(summary_path):
        print(f"no summary.txt under {args.run_dir}", file=sys.stderr)
        return EXIT_CONFIG
    with open(summary_path, "r", encoding="utf-8") as fh:
        print(fh.read().rstrip())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urbanepi",
        description="Agent-based simulator of airborne disease spread "
                    "in a synthetic city")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-city", help="check a city file's invariants")
    p.add_argument("city")
    p.set_defaults(func=_cmd_validate_city)

    p = sub.add_parser("generate-city", help="emit a synthetic grid city")
    p.add_argument("--spec", help="YAML file overriding generator defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_generate_city)

    p = sub.add_parser("export-geojson", help="export regions/sublocations")
    p.add_argument("city")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_export_geojson)

    p = sub.add_parser("route", help="print a door-to-door road route")
    p.add_argument("city")
    p.add_argument("x1", type=float)
    p.add_argument("y1", type=float)
    p.add_argument("x2", type=float)
    p.add_argument("y2", type=float)
    p.add_argument("--mode", default="walk", choices=["walk", "bike", "car"])
    p.set_defaults(func=_cmd_route)

    p = sub.add_parser("transit-route", help="print a transit itinerary")
    p.add_argument("city")
    p.add_argument("x1", type=float)
    p.add_argument("y1", type=float)
    p.add_argument("x2", type=float)
    p.add_argument("y2", type=float)
    p.set_defaults(func=_cmd_transit_route)

    p = sub.add_parser("synthesize-population",
                       help="generate the agent population as CSV")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_synthesize_population)

    p = sub.add_parser("run", help="run a scenario end to end")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--days", type=int)
    p.add_argument("--dt", type=int)
    p.add_argument("--output-dir",
                   help=f"output directory (or ${OUTPUT_DIR_ENV})")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="print the summary of a finished run")
    p.add_argument("run_dir")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UrbanEpiError as exc:
        if hasattr(exc, "errors"):
            for err in exc.errors:
                print(err, file=sys.stderr)
        else:
            print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(exc, file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
