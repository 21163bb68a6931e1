"""Scenario configuration: schema, defaults, loading and validation.

Scenario files are YAML. Validation failures carry the file and line of the
offending key so they can be fixed without guesswork; unknown keys are
rejected. Every default in DEFAULTS is documented in the README reference
table.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import yaml

from .agenda import (DEFAULT_DURATION_BOUNDS, DEFAULT_DURATION_STATS,
                     DEFAULT_ELDER_RECREATION_PROB, DEFAULT_MODAL_SPLIT,
                     DEFAULT_PATTERN_SHARES, DEFAULT_WORK_START_WINDOW,
                     BehaviorPolicy, PatternTable)
from .city import SLClass
from .epidemic import EpidemicParams
from .errors import ConfigError, ParseError, ValidationError
from .population import DemographicConfig, PersonClass
from .routing import DEFAULT_MODE_SPEEDS_MS
from .transit import DEFAULT_MAX_LEVELS, DEFAULT_RADII_M

SCENARIO_VERSION = 1

# Documented toy defaults for a desk-scale scenario.
DEFAULT_AGE_BINS = [
    (0.0, 3.0, 4.0),
    (3.0, 18.0, 16.0),
    (18.0, 25.0, 10.0),
    (25.0, 60.0, 50.0),
    (60.0, 90.0, 20.0),
]
DEFAULT_HOUSEHOLD_PMF = {1: 0.2, 2: 0.3, 3: 0.3, 4: 0.15, 5: 0.05}
DEFAULT_COMMUTE_PMF = [(1000.0, 0.3), (2000.0, 0.4), (4000.0, 0.3)]
DEFAULT_COLLEGE_FRACTION = 0.5
DEFAULT_POPULATION_SIZE = 100
DEFAULT_DT = 60
DEFAULT_DAYS = 1
DEFAULT_TICK_CSV_EVERY = 3600
DEFAULT_SNAPSHOT_EVERY = 0
DEFAULT_SYMPTOMATIC_POLICY = {"home_extension": 1.2,
                              "work_reduction": 0.7,
                              "recreation_avoidance": 0.8}

OUTPUT_DIR_ENV = "URBANEPI_OUTPUT_DIR"


class _LocatedDict(dict):
    """Mapping that remembers the source line of each key."""

    def __init__(self):
        super().__init__()
        self.key_lines: dict[object, int] = {}


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader: _LineLoader, node):
    loader.flatten_mapping(node)
    out = _LocatedDict()
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        out[key] = loader.construct_object(value_node, deep=True)
        out.key_lines[key] = key_node.start_mark.line + 1
    return out


_LineLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def load_yaml_with_lines(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return yaml.load(fh, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc


class _Section:
    """Typed key extraction from one mapping, collecting located errors."""

    def __init__(self, data, source: str, path: str, errors: list[str]):
        self.data = data if isinstance(data, dict) else {}
        self.source = source
        self.path = path
        self.errors = errors
        self._seen: set = set()
        if data is not None and not isinstance(data, dict):
            self.errors.append(f"{source}: {path or 'document'} must be a mapping")

    def _where(self, key) -> str:
        line = None
        if isinstance(self.data, _LocatedDict):
            line = self.data.key_lines.get(key)
        dotted = f"{self.path}.{key}" if self.path else str(key)
        if line is not None:
            return f"{self.source}:{line}: {dotted}"
        return f"{self.source}: {dotted}"

    def error(self, key, message: str) -> None:
        self.errors.append(f"{self._where(key)}: {message}")

    def get(self, key, kind, default=..., required=False):
        self._seen.add(key)
        if key not in self.data:
            if required:
                self.errors.append(f"{self.source}: missing required field "
                                   f"{(self.path + '.') if self.path else ''}{key}")
                return None
            return None if default is ... else default
        value = self.data[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if kind is not None and not isinstance(value, kind):
            self.error(key, f"expected {getattr(kind, '__name__', kind)}, "
                            f"got {type(value).__name__}")
            return None if default is ... else default
        return value

    def subsection(self, key) -> "_Section":
        self._seen.add(key)
        return _Section(self.data.get(key), self.source,
                        f"{self.path}.{key}" if self.path else str(key), self.errors)

    def reject_unknown(self) -> None:
        for key in self.data:
            if key not in self._seen:
                self.error(key, "unknown key")


@dataclass
class BehaviorConfig:
    alert_level: int = 0
    alert_policies: list[BehaviorPolicy] = field(
        default_factory=lambda: [BehaviorPolicy()])
    symptomatic_policy: BehaviorPolicy = field(
        default_factory=lambda: BehaviorPolicy(**DEFAULT_SYMPTOMATIC_POLICY))
    elder_recreation_prob: float = DEFAULT_ELDER_RECREATION_PROB
    work_start_window: tuple[float, float] = DEFAULT_WORK_START_WINDOW
    duration_stats: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_DURATION_STATS))
    duration_bounds: tuple[float, float] = DEFAULT_DURATION_BOUNDS

    def policy_for(self, symptomatic: bool) -> BehaviorPolicy:
        level = min(self.alert_level, len(self.alert_policies) - 1)
        policy = self.alert_policies[level]
        if symptomatic:
            policy = policy.combine(self.symptomatic_policy)
        return policy


@dataclass
class SeedingConfig:
    count: int = 1
    ids: list[int] | None = None


@dataclass
class OutputConfig:
    directory: str = "out"
    tick_csv_every: int = DEFAULT_TICK_CSV_EVERY
    snapshot_every: int = DEFAULT_SNAPSHOT_EVERY


@dataclass
class ScenarioConfig:
    city_path: str
    seed: int
    sigma_per_hour: float
    dt: int = DEFAULT_DT
    days: int = DEFAULT_DAYS
    demographics: DemographicConfig = None
    patterns: PatternTable = None
    behavior: BehaviorConfig = field(default_factory=BehaviorConfig)
    epidemic: EpidemicParams = None
    vaccinated_fraction: float = 0.0
    modal_split: dict[PersonClass, dict[str, float]] = None
    mode_speeds: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_MODE_SPEEDS_MS))
    walk_threshold: float = 3000.0
    transit_radii: tuple[float, ...] = DEFAULT_RADII_M
    transit_max_levels: int = DEFAULT_MAX_LEVELS
    seeding: SeedingConfig = field(default_factory=SeedingConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __eq__(self, other):
        if not isinstance(other, ScenarioConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self) -> dict:
        """Plain-data form; parse_scenario(to_dict()) reproduces the config."""
        demo = self.demographics
        out = {
            "version": SCENARIO_VERSION,
            "city": self.city_path,
            "seed": self.seed,
            "dt": self.dt,
            "days": self.days,
            "population": {
                "size": demo.size,
                "age_bins": [list(b) for b in demo.age_bins],
                "household_size_pmf": {int(k): float(v) for k, v
                                       in demo.household_size_pmf.items()},
                "commute_distance_pmf": [list(b) for b in demo.commute_distance_pmf],
                "college_fraction": demo.college_fraction,
                "female_fraction": demo.female_fraction,
                "workplace_class_mix": {
                    pc.value: {c.value: w for c, w in mix.items()}
                    for pc, mix in (demo.workplace_class_mix or {}).items()
                } or None,
            },
            "patterns": dict(self.patterns.shares),
            "behavior": {
                "alert_level": self.behavior.alert_level,
                "alert_policies": [
                    {"home_extension": p.home_extension,
                     "work_reduction": p.work_reduction,
                     "recreation_avoidance": p.recreation_avoidance}
                    for p in self.behavior.alert_policies],
                "symptomatic": {
                    "home_extension": self.behavior.symptomatic_policy.home_extension,
                    "work_reduction": self.behavior.symptomatic_policy.work_reduction,
                    "recreation_avoidance":
                        self.behavior.symptomatic_policy.recreation_avoidance},
                "elder_recreation_prob": self.behavior.elder_recreation_prob,
                "work_start_window": list(self.behavior.work_start_window),
                "durations": {k: list(v) for k, v
                              in self.behavior.duration_stats.items()},
                "duration_bounds": list(self.behavior.duration_bounds),
            },
            "epidemic": {
                "sigma": self.sigma_per_hour,
                "d_star": self.epidemic.d_star,
                "outdoor_factor": self.epidemic.outdoor_factor,
                "incubation_days": list(self.epidemic.incubation_days),
                "symptomatic_days": list(self.epidemic.symptomatic_days),
                "vaccination_days": list(self.epidemic.vaccination_days),
                "mortality": self.epidemic.mortality,
                "vaccinated_fraction": self.vaccinated_fraction,
            },
            "modal_split": {pc.value: dict(split)
                            for pc, split in self.modal_split.items()},
            "speeds": dict(self.mode_speeds),
            "walk_threshold": self.walk_threshold,
            "transit_radii": list(self.transit_radii),
            "transit_max_levels": self.transit_max_levels,
            "seeding": ({"ids": list(self.seeding.ids)}
                        if self.seeding.ids is not None
                        else {"count": self.seeding.count}),
            "output": {"dir": self.output.directory,
                       "tick_csv_every": self.output.tick_csv_every,
                       "snapshot_every": self.output.snapshot_every},
        }
        if out["population"]["workplace_class_mix"] is None:
            del out["population"]["workplace_class_mix"]
        return out

    def serialize(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _parse_policy(sec: _Section) -> BehaviorPolicy | None:
    he = sec.get("home_extension", float, default=1.0)
    wr = sec.get("work_reduction", float, default=1.0)
    ra = sec.get("recreation_avoidance", float, default=0.0)
    sec.reject_unknown()
    try:
        return BehaviorPolicy(home_extension=he, work_reduction=wr,
                              recreation_avoidance=ra)
    except ConfigError as exc:
        sec.errors.append(f"{sec.source}: {sec.path}: {exc}")
        return None


def _parse_pairs(sec: _Section, key, length=2):
    raw = sec.get(key, list, default=None)
    if raw is None:
        return None
    out = []
    for item in raw:
        if (not isinstance(item, (list, tuple)) or len(item) != length
                or not all(isinstance(v, (int, float)) for v in item)):
            sec.error(key, f"expected a list of {length}-number lists")
            return None
        out.append(tuple(float(v) for v in item))
    return out


def parse_scenario(data, source: str = "<scenario>",
                   base_dir: str = ".") -> ScenarioConfig:
    """Validate a parsed scenario document into a ScenarioConfig.

    Raises ValidationError carrying one located message per problem.
    """
    errors: list[str] = []
    root = _Section(data, source, "", errors)

    version = root.get("version", int, default=SCENARIO_VERSION)
    if version != SCENARIO_VERSION:
        root.error("version", f"unsupported version {version}")
    city_rel = root.get("city", str, required=True)
    seed = root.get("seed", int, required=True)
    dt = root.get("dt", int, default=DEFAULT_DT)
    days = root.get("days", int, default=DEFAULT_DAYS)
    if dt is not None and (dt <= 0 or 86400 % dt != 0):
        root.error("dt", "dt must be a positive divisor of 86400")
    if days is not None and days < 1:
        root.error("days", "days must be >= 1")

    pop = root.subsection("population")
    size = pop.get("size", int, default=DEFAULT_POPULATION_SIZE)
    age_bins = _parse_pairs(pop, "age_bins", length=3) or list(DEFAULT_AGE_BINS)
    hh_raw = pop.get("household_size_pmf", dict,
                     default={int(k): float(v)
                              for k, v in DEFAULT_HOUSEHOLD_PMF.items()})
    household_pmf = {}
    for k, v in (hh_raw or {}).items():
        try:
            household_pmf[int(k)] = float(v)
        except (TypeError, ValueError):
            pop.error("household_size_pmf", f"bad entry {k!r}: {v!r}")
    commute = (_parse_pairs(pop, "commute_distance_pmf")
               or [tuple(p) for p in DEFAULT_COMMUTE_PMF])
    college = pop.get("college_fraction", float, default=DEFAULT_COLLEGE_FRACTION)
    female = pop.get("female_fraction", float, default=0.5)
    wp_mix_raw = pop.get("workplace_class_mix", dict, default=None)
    wp_mix = None
    if wp_mix_raw:
        wp_mix = {}
        for pc_name, mix in wp_mix_raw.items():
            try:
                pc = PersonClass(pc_name)
            except ValueError:
                pop.error("workplace_class_mix", f"unknown person class {pc_name!r}")
                continue
            try:
                wp_mix[pc] = {SLClass(cn): float(w) for cn, w in mix.items()}
            except (ValueError, AttributeError):
                pop.error("workplace_class_mix", f"bad mix for {pc_name!r}")
    pop.reject_unknown()

    pat_raw = root.get("patterns", dict, default=None)
    root._seen.add("patterns")
    try:
        patterns = PatternTable(dict(pat_raw) if pat_raw else None)
    except ConfigError as exc:
        errors.append(f"{source}: patterns: {exc}")
        patterns = PatternTable()

    beh = root.subsection("behavior")
    alert_level = beh.get("alert_level", int, default=0)
    policies_raw = beh.get("alert_policies", list, default=None)
    beh._seen.add("alert_policies")
    alert_policies = []
    if policies_raw is None:
        alert_policies = [BehaviorPolicy()]
    else:
        for i, praw in enumerate(policies_raw):
            psec = _Section(praw, source, f"behavior.alert_policies[{i}]", errors)
            policy = _parse_policy(psec)
            alert_policies.append(policy or BehaviorPolicy())
    symptomatic = _parse_policy(beh.subsection("symptomatic"))
    if symptomatic is None or not beh.data.get("symptomatic"):
        symptomatic = BehaviorPolicy(**DEFAULT_SYMPTOMATIC_POLICY)
    elder_rec = beh.get("elder_recreation_prob", float,
                        default=DEFAULT_ELDER_RECREATION_PROB)
    wraw = beh.data.get("work_start_window")
    beh._seen.add("work_start_window")
    work_window = DEFAULT_WORK_START_WINDOW
    if wraw is not None:
        if (isinstance(wraw, list) and len(wraw) == 2
                and all(isinstance(v, (int, float)) for v in wraw)
                and 0 <= wraw[0] <= wraw[1]):
            work_window = (float(wraw[0]), float(wraw[1]))
        else:
            beh.error("work_start_window", "expected [start_s, end_s]")
    durations_raw = beh.get("durations", dict, default=None)
    duration_stats = dict(DEFAULT_DURATION_STATS)
    if durations_raw:
        for name, pair in durations_raw.items():
            if name not in DEFAULT_DURATION_STATS:
                beh.error("durations", f"unknown activity type {name!r}")
            elif (not isinstance(pair, list) or len(pair) != 2
                  or not all(isinstance(v, (int, float)) for v in pair)):
                beh.error("durations", f"{name}: expected [mean_s, sd_s]")
            else:
                duration_stats[name] = (float(pair[0]), float(pair[1]))
    bounds_raw = beh.get("duration_bounds", list, default=None)
    duration_bounds = DEFAULT_DURATION_BOUNDS
    if bounds_raw is not None:
        if (len(bounds_raw) == 2
                and all(isinstance(v, (int, float)) for v in bounds_raw)
                and 0 < bounds_raw[0] <= bounds_raw[1]):
            duration_bounds = (float(bounds_raw[0]), float(bounds_raw[1]))
        else:
            beh.error("duration_bounds", "expected [lo_s, hi_s] with 0 < lo <= hi")
    beh.reject_unknown()

    epi = root.subsection("epidemic")
    sigma = epi.get("sigma", float, required=True)
    d_star = epi.get("d_star", float, default=2.0)
    outdoor = epi.get("outdoor_factor", float, default=0.5)

    def _days_range(key, default):
        raw = epi.data.get(key)
        epi._seen.add(key)
        if raw is None:
            return default
        if (isinstance(raw, list) and len(raw) == 2
                and all(isinstance(v, (int, float)) for v in raw)):
            return (float(raw[0]), float(raw[1]))
        epi.error(key, "expected [lo_days, hi_days]")
        return default

    inc = _days_range("incubation_days", (1.0, 2.0))
    sym = _days_range("symptomatic_days", (1.0, 7.0))
    vac = _days_range("vaccination_days", (7.0, 21.0))
    mortality = epi.get("mortality", float, default=0.0)
    vaccinated_fraction = epi.get("vaccinated_fraction", float, default=0.0)
    epi.reject_unknown()

    split_raw = root.get("modal_split", dict, default=None)
    modal_split = {k: dict(v) for k, v in DEFAULT_MODAL_SPLIT.items()}
    if split_raw:
        for pc_name, split in split_raw.items():
            try:
                pc = PersonClass(pc_name)
            except ValueError:
                root.error("modal_split", f"unknown person class {pc_name!r}")
                continue
            if not isinstance(split, dict) or not split:
                root.error("modal_split", f"{pc_name}: expected mode->weight mapping")
                continue
            for mode, w in split.items():
                if mode not in ("walk", "bike", "car", "transit"):
                    root.error("modal_split", f"unknown mode {mode!r}")
            modal_split[pc] = {m: float(w) for m, w in split.items()}

    speeds_raw = root.get("speeds", dict, default=None)
    mode_speeds = dict(DEFAULT_MODE_SPEEDS_MS)
    if speeds_raw:
        for mode, v in speeds_raw.items():
            if mode not in DEFAULT_MODE_SPEEDS_MS:
                root.error("speeds", f"unknown mode {mode!r}")
            elif not isinstance(v, (int, float)) or v <= 0:
                root.error("speeds", f"{mode}: speed must be > 0 m/s")
            else:
                mode_speeds[mode] = float(v)

    walk_threshold = root.get("walk_threshold", float, default=3000.0)
    radii_raw = root.get("transit_radii", list, default=None)
    transit_radii = DEFAULT_RADII_M
    if radii_raw is not None:
        if radii_raw and all(isinstance(v, (int, float)) and v >= 0
                             for v in radii_raw):
            transit_radii = tuple(float(v) for v in radii_raw)
        else:
            root.error("transit_radii", "expected a non-empty list of radii >= 0")
    max_levels = root.get("transit_max_levels", int, default=DEFAULT_MAX_LEVELS)
    if max_levels is not None and max_levels < 1:
        root.error("transit_max_levels", "must be >= 1")

    seeding_sec = root.subsection("seeding")
    seed_ids = seeding_sec.get("ids", list, default=None)
    seed_count = seeding_sec.get("count", int, default=1)
    seeding_sec.reject_unknown()
    if seed_ids is not None:
        if not all(isinstance(i, int) for i in seed_ids):
            seeding_sec.error("ids", "expected a list of person ids")
            seed_ids = []
        seeding = SeedingConfig(count=len(seed_ids), ids=list(seed_ids))
    else:
        if seed_count is None or seed_count < 0:
            seeding_sec.error("count", "must be >= 0")
            seed_count = 0
        seeding = SeedingConfig(count=seed_count)

    out_sec = root.subsection("output")
    out_dir = out_sec.get("dir", str, default="out")
    tick_every = out_sec.get("tick_csv_every", int, default=DEFAULT_TICK_CSV_EVERY)
    snap_every = out_sec.get("snapshot_every", int, default=DEFAULT_SNAPSHOT_EVERY)
    out_sec.reject_unknown()
    if tick_every is not None and dt and tick_every % dt != 0:
        out_sec.error("tick_csv_every", f"must be a multiple of dt={dt}")

    root.reject_unknown()
    if errors:
        raise ValidationError(errors)

    demo = DemographicConfig(size=size, age_bins=age_bins,
                             household_size_pmf=household_pmf,
                             commute_distance_pmf=commute,
                             college_fraction=college,
                             female_fraction=female,
                             workplace_class_mix=wp_mix)
    try:
        demo.validate()
    except ConfigError as exc:
        raise ValidationError([f"{source}: population: {exc}"]) from exc

    epidemic = EpidemicParams(sigma_per_hour=sigma, d_star=d_star,
                              outdoor_factor=outdoor, incubation_days=inc,
                              symptomatic_days=sym, vaccination_days=vac,
                              mortality=mortality)
    try:
        epidemic.validate()
    except ConfigError as exc:
        raise ValidationError([f"{source}: epidemic: {exc}"]) from exc
    if not (0.0 <= vaccinated_fraction <= 1.0):
        raise ValidationError([f"{source}: epidemic.vaccinated_fraction "
                               "must be in [0, 1]"])

    behavior = BehaviorConfig(alert_level=alert_level,
                              alert_policies=alert_policies,
                              symptomatic_policy=symptomatic,
                              elder_recreation_prob=elder_rec,
                              work_start_window=work_window,
                              duration_stats=duration_stats,
                              duration_bounds=duration_bounds)

    city_path = city_rel
    if not os.path.isabs(city_path):
        city_path = os.path.normpath(os.path.join(base_dir, city_path))

    return ScenarioConfig(
        city_path=city_path, seed=seed, sigma_per_hour=sigma, dt=dt, days=days,
        demographics=demo, patterns=patterns, behavior=behavior,
        epidemic=epidemic, vaccinated_fraction=vaccinated_fraction,
        modal_split=modal_split, mode_speeds=mode_speeds,
        walk_threshold=walk_threshold, transit_radii=transit_radii,
        transit_max_levels=max_levels, seeding=seeding,
        output=OutputConfig(directory=out_dir, tick_csv_every=tick_every,
                            snapshot_every=snap_every))


def load_scenario(path: str) -> ScenarioConfig:
    """Load and fully validate a scenario file.

    The referenced city file must exist. Raises ParseError or
    ValidationError with located messages.
    """
    data = load_yaml_with_lines(path)
    config = parse_scenario(data, source=path, base_dir=os.path.dirname(path) or ".")
    if not os.path.exists(config.city_path):
        raise ValidationError([f"{path}: city file not found: {config.city_path}"])
    return config
