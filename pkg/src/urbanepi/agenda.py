"""Daily activity schedules.

A pattern is a letter string: H home, W work, R recreation, and * which
becomes medical care for the currently symptomatic and recreation otherwise.
Working-age adults and college students draw a pattern from the configured
pattern table; school-age children always get HWH, children under 3 stay home,
and elders stay home or make one recreation trip.

Expansion turns letters into timed activities at concrete sublocations with
routed travel legs in between. The day starts and ends at home: the morning
home stay lasts until the drawn work start (minus travel) when the pattern
contains work, middle activities get durations drawn from truncated normals,
and the final home stay fills the rest of the day. Anything that cannot be
finished before midnight is dropped from the end of the plan so the agent is
always back home by 24:00.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum

from .city import CityModel, SLClass, nearest_sublocation
from .errors import ConfigError, MissingAnchor
from .geometry import dist
from .population import InfectionStatus, Person, PersonClass
from .routing import CityRouter, TravelPlan

DAY_SECONDS = 86400.0
MIN_ACTIVITY_SECONDS = 60.0

PATTERN_ALPHABET = frozenset("HW*R")

# Survey averages for activity episode durations (seconds).
DEFAULT_DURATION_STATS = {
    "Home": (44640.0, 18480.0),          # 12 h 24 min +/- 5 h 8 min
    "Work": (11040.0, 8940.0),           # 3 h 4 min +/- 2 h 29 min
    "Recreation": (7200.0, 3600.0),      # toy default
    "MedicalCare": (14400.0, 7200.0),    # toy default
}
DEFAULT_DURATION_BOUNDS = (600.0, 57600.0)   # 10 min .. 16 h
DEFAULT_WORK_START_WINDOW = (27000.0, 32400.0)  # 07:30 .. 09:00
DEFAULT_ELDER_RECREATION_PROB = 0.2

DEFAULT_PATTERN_SHARES = {
    "HWH": 53.4,
    "HWH*H": 10.3,
    "HW*WH": 2.7,
    "HWHWH": 27.1,
    "HWHWH*H": 6.5,
}

DEFAULT_MODAL_SPLIT = {
    PersonClass.TODDLER: {"walk": 1.0},
    PersonClass.SCHOOL_AGE: {"walk": 0.7, "transit": 0.3},
    PersonClass.ADULT: {"walk": 0.2, "bike": 0.1, "car": 0.4, "transit": 0.3},
    PersonClass.COLLEGE: {"walk": 0.4, "bike": 0.2, "transit": 0.4},
    PersonClass.ELDER: {"walk": 0.8, "transit": 0.2},
}


class ActivityType(Enum):
    HOME = "Home"
    WORK = "Work"
    RECREATION = "Recreation"
    MEDICAL_CARE = "MedicalCare"


# Sublocation classes in which each activity may take place.
ACTIVITY_PLACES: dict[ActivityType, frozenset[SLClass]] = {
    ActivityType.HOME: frozenset({SLClass.HOUSING}),
    ActivityType.WORK: frozenset({SLClass.OFFICE, SLClass.CLASSROOM,
                                  SLClass.RECREATIONAL, SLClass.PATIENT_ROOM}),
    ActivityType.RECREATION: frozenset({SLClass.RECREATIONAL}),
    ActivityType.MEDICAL_CARE: frozenset({SLClass.PATIENT_ROOM}),
}


@dataclass
class Activity:
    activity_type: ActivityType
    sublocation: str
    start: float
    duration: float

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass
class TravelLeg:
    mode: str
    src_sl: str
    dst_sl: str
    start: float
    duration: float
    plan: TravelPlan | None = None

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass
class DailyAgenda:
    owner: int
    items: list  # Activities interleaved with TravelLegs, time-ordered

    def activities(self) -> list[Activity]:
        return [it for it in self.items if isinstance(it, Activity)]

    def legs(self) -> list[TravelLeg]:
        return [it for it in self.items if isinstance(it, TravelLeg)]


class PatternTable:
    """Activity patterns with percentage shares; must total 100 +/- 0.1."""

    def __init__(self, shares: dict[str, float] | None = None):
        self.shares = dict(shares if shares is not None else DEFAULT_PATTERN_SHARES)
        total = sum(self.shares.values())
        if abs(total - 100.0) > 0.1:
            raise ConfigError(f"pattern shares sum to {total}, expected 100 +/- 0.1")
        for pattern in self.shares:
            _check_pattern(pattern)
        self._patterns = sorted(self.shares)
        self._weights = [self.shares[p] for p in self._patterns]

    def sample(self, rng: random.Random) -> str:
        return rng.choices(self._patterns, weights=self._weights)[0]


@dataclass(frozen=True)
class BehaviorPolicy:
    """Multiplicative behavior adjustments.

    home_extension >= 0 rescales home stays, work_reduction in (0, 1] rescales
    work stays, recreation_avoidance in [0, 1] is the probability of dropping
    a recreation activity. The neutral policy changes nothing.
    """

    home_extension: float = 1.0
    work_reduction: float = 1.0
    recreation_avoidance: float = 0.0

    def __post_init__(self):
        if self.home_extension < 0:
            raise ConfigError("home_extension must be >= 0")
        if not (0.0 < self.work_reduction <= 1.0):
            raise ConfigError("work_reduction must be in (0, 1]")
        if not (0.0 <= self.recreation_avoidance <= 1.0):
            raise ConfigError("recreation_avoidance must be in [0, 1]")

    @property
    def is_neutral(self) -> bool:
        return (self.home_extension == 1.0 and self.work_reduction == 1.0
                and self.recreation_avoidance == 0.0)

    def combine(self, other: "BehaviorPolicy") -> "BehaviorPolicy":
        return BehaviorPolicy(
            home_extension=self.home_extension * other.home_extension,
            work_reduction=self.work_reduction * other.work_reduction,
            recreation_avoidance=1.0 - (1.0 - self.recreation_avoidance)
                                      * (1.0 - other.recreation_avoidance),
        )


NEUTRAL_POLICY = BehaviorPolicy()


@dataclass
class AgendaContext:
    """Everything expansion needs besides the person and the pattern."""

    city: CityModel
    router: CityRouter
    duration_stats: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_DURATION_STATS))
    duration_bounds: tuple[float, float] = DEFAULT_DURATION_BOUNDS
    work_start_window: tuple[float, float] = DEFAULT_WORK_START_WINDOW
    modal_split: dict[PersonClass, dict[str, float]] = field(
        default_factory=lambda: {k: dict(v) for k, v in DEFAULT_MODAL_SPLIT.items()})


def _check_pattern(pattern: str) -> None:
    if not pattern:
        raise ConfigError("empty activity pattern")
    bad = set(pattern) - PATTERN_ALPHABET
    if bad:
        raise ConfigError(f"pattern {pattern!r} uses unknown letters {sorted(bad)}")
    if pattern[0] != "H" or pattern[-1] != "H":
        raise ConfigError(f"pattern {pattern!r} must start and end at home")


def sample_pattern(person_class: PersonClass, rng: random.Random,
                   patterns: PatternTable | None = None,
                   elder_recreation_prob: float = DEFAULT_ELDER_RECREATION_PROB) -> str:
    """Daily pattern for a person class.

    Working adults and college students draw from the pattern table; school
    children always go to school and back; under-3s stay home; elders make an
    occasional recreation round trip.
    """
    if person_class == PersonClass.TODDLER:
        return "H"
    if person_class == PersonClass.SCHOOL_AGE:
        return "HWH"
    if person_class == PersonClass.ELDER:
        return "HRH" if rng.random() < elder_recreation_prob else "H"
    if patterns is None:
        patterns = PatternTable()
    return patterns.sample(rng)


def draw_duration(activity_type: ActivityType, rng: random.Random,
                  stats: dict[str, tuple[float, float]] | None = None,
                  bounds: tuple[float, float] = DEFAULT_DURATION_BOUNDS) -> float:
    """Truncated-normal activity duration (rejection sampled)."""
    stats = stats if stats is not None else DEFAULT_DURATION_STATS
    mean, sd = stats[activity_type.value]
    lo, hi = bounds
    for _ in range(1000):
        x = rng.gauss(mean, sd)
        if lo <= x <= hi:
            return x
    return min(max(mean, lo), hi)


def _draw_mode(person_class: PersonClass, rng: random.Random,
               modal_split: dict[PersonClass, dict[str, float]]) -> str:
    split = modal_split.get(person_class) or {"walk": 1.0}
    modes = sorted(split)
    return rng.choices(modes, weights=[split[m] for m in modes])[0]


def _pick_recreation(city: CityModel, from_sl: str, rng: random.Random) -> str | None:
    """Recreational sublocation, weighted inversely by distance from from_sl."""
    candidates = city.sublocations_of_class(SLClass.RECREATIONAL)
    if not candidates:
        return None
    origin = city.sublocations[from_sl].center
    weights = [1.0 / max(dist(origin, c.center), 1.0) for c in candidates]
    return rng.choices([c.sl_id for c in candidates], weights=weights)[0]


def _resolve_letter(letter: str, person: Person, prev_sl: str, city: CityModel,
                    rng: random.Random) -> tuple[ActivityType, str]:
    if letter == "H":
        return ActivityType.HOME, person.housing_sl
    if letter == "W":
        if person.office_sl is None:
            raise MissingAnchor(
                f"person {person.person_id} has no workplace for pattern letter W")
        return ActivityType.WORK, person.office_sl
    if letter == "*" and person.infection_status == InfectionStatus.SYMPTOMATIC:
        ward = nearest_sublocation(city, city.sublocations[prev_sl].center,
                                   SLClass.PATIENT_ROOM)
        if ward is not None:
            return ActivityType.MEDICAL_CARE, ward.sl_id
        return ActivityType.HOME, person.housing_sl
    # "R", or "*" while healthy
    rec = _pick_recreation(city, prev_sl, rng)
    if rec is None:
        return ActivityType.HOME, person.housing_sl
    return ActivityType.RECREATION, rec


def _assemble(owner: int, acts: list[tuple[ActivityType, str]],
              durations: list[float | None], first_end: float,
              route) -> DailyAgenda:
    """Lay out activities and travel legs sequentially.

    route(src_sl, dst_sl) -> TravelLeg must be stable per pair so that trial
    layouts and the final one agree. Trailing activities are dropped until the
    final home stay starts before midnight.
    """
    acts = list(acts)
    durations = list(durations)
    while len(acts) > 1:
        t = first_end
        for k in range(1, len(acts)):
            if acts[k][1] != acts[k - 1][1]:
                t += route(acts[k - 1][1], acts[k][1]).duration
            if k < len(acts) - 1:
                t += durations[k]
        if t <= DAY_SECONDS - MIN_ACTIVITY_SECONDS:
            break
        if len(acts) <= 2:
            acts = [acts[0]]
            durations = [None]
            break
        del acts[-2]
        del durations[-2]
        if acts[-1] == acts[-2]:  # home next to home after the removal
            del acts[-1]
            del durations[-1]

    if len(acts) == 1:
        return DailyAgenda(owner, [Activity(acts[0][0], acts[0][1],
                                            0.0, DAY_SECONDS)])
    items: list = []
    t = first_end
    items.append(Activity(acts[0][0], acts[0][1], 0.0, first_end))
    for k in range(1, len(acts)):
        if acts[k][1] != acts[k - 1][1]:
            leg = replace(route(acts[k - 1][1], acts[k][1]), start=t)
            t += leg.duration
            items.append(leg)
        if k < len(acts) - 1:
            items.append(Activity(acts[k][0], acts[k][1], t, durations[k]))
            t += durations[k]
        else:
            d = max(DAY_SECONDS - t, MIN_ACTIVITY_SECONDS)
            items.append(Activity(acts[k][0], acts[k][1], t, d))
    return DailyAgenda(owner, items)


def expand_agenda(person: Person, pattern: str, policy: BehaviorPolicy,
                  rng: random.Random, ctx: AgendaContext) -> DailyAgenda:
    """Turn a pattern into a concrete day plan for one person.

    Raises MissingAnchor when the pattern needs a workplace the person does
    not have.
    """
    _check_pattern(pattern)

    # Resolve letters to concrete activities, dropping avoided recreation.
    acts: list[tuple[ActivityType, str]] = []
    for ch in pattern:
        prev_sl = acts[-1][1] if acts else person.housing_sl
        atype, sl = _resolve_letter(ch, person, prev_sl, ctx.city, rng)
        if (atype == ActivityType.RECREATION
                and policy.recreation_avoidance > 0.0
                and rng.random() < policy.recreation_avoidance):
            continue
        if acts and acts[-1] == (atype, sl):
            continue  # merged with the previous stay
        acts.append((atype, sl))
    if len(acts) <= 1:
        return DailyAgenda(person.person_id,
                           [Activity(ActivityType.HOME, person.housing_sl,
                                     0.0, DAY_SECONDS)])

    def scaled_duration(atype: ActivityType) -> float:
        d = draw_duration(atype, rng, ctx.duration_stats, ctx.duration_bounds)
        if atype == ActivityType.HOME:
            d *= policy.home_extension
        elif atype == ActivityType.WORK:
            d *= policy.work_reduction
        return max(d, MIN_ACTIVITY_SECONDS)

    durations: list[float | None] = [None] * len(acts)
    for k in range(1, len(acts) - 1):
        durations[k] = scaled_duration(acts[k][0])

    # One mode draw per origin-destination pair, reused across trial layouts.
    leg_cache: dict[tuple[str, str], TravelLeg] = {}

    def route(src: str, dst: str) -> TravelLeg:
        leg = leg_cache.get((src, dst))
        if leg is None:
            mode = _draw_mode(person.person_class, rng, ctx.modal_split)
            plan = ctx.router.plan(src, dst, mode)
            leg = TravelLeg(plan.mode, src, dst, 0.0, plan.est_duration, plan)
            leg_cache[(src, dst)] = leg
        return leg

    if "W" in pattern:
        work_start = rng.uniform(*ctx.work_start_window)
        first_leg_t = (route(acts[0][1], acts[1][1]).duration
                       if acts[1][1] != acts[0][1] else 0.0)
        first_end = max(MIN_ACTIVITY_SECONDS, work_start - first_leg_t)
    else:
        first_end = min(scaled_duration(ActivityType.HOME),
                        DAY_SECONDS - 2 * MIN_ACTIVITY_SECONDS)

    return _assemble(person.person_id, acts, durations, first_end, route)


def apply_policy(agenda: DailyAgenda, policy: BehaviorPolicy,
                 infection_status: InfectionStatus,
                 rng: random.Random | None = None,
                 router_route=None) -> DailyAgenda:
    """Re-shape an existing agenda under a behavior policy.

    The neutral policy returns the agenda unchanged. Dropping recreation
    requires router_route(src_sl, dst_sl) -> TravelLeg when it creates a new
    origin-destination pair, and an rng when 0 < recreation_avoidance < 1.
    """
    if policy.is_neutral:
        return agenda

    acts_in = agenda.activities()
    leg_before: dict[int, TravelLeg] = {}
    prev_leg = None
    for it in agenda.items:
        if isinstance(it, TravelLeg):
            prev_leg = it
        else:
            if prev_leg is not None:
                leg_before[id(it)] = prev_leg
            prev_leg = None

    acts: list[tuple[ActivityType, str]] = []
    durations: list[float | None] = []
    for act in acts_in:
        if (act.activity_type == ActivityType.RECREATION
                and policy.recreation_avoidance > 0.0):
            if policy.recreation_avoidance >= 1.0:
                continue
            if rng is None:
                raise ValueError("rng required for fractional recreation avoidance")
            if rng.random() < policy.recreation_avoidance:
                continue
        d = act.duration
        if act.activity_type == ActivityType.HOME:
            d *= policy.home_extension
        elif act.activity_type == ActivityType.WORK:
            d *= policy.work_reduction
        if acts and acts[-1] == (act.activity_type, act.sublocation):
            durations[-1] = (durations[-1] or 0.0) + d
            continue
        acts.append((act.activity_type, act.sublocation))
        durations.append(d)
    if len(acts) <= 1:
        home_sl = acts[0][1] if acts else acts_in[0].sublocation
        return DailyAgenda(agenda.owner,
                           [Activity(ActivityType.HOME, home_sl, 0.0, DAY_SECONDS)])

    reuse: dict[tuple[str, str], TravelLeg] = {}
    for act in acts_in:
        leg = leg_before.get(id(act))
        if leg is not None:
            reuse[(leg.src_sl, leg.dst_sl)] = leg

    def route(src: str, dst: str) -> TravelLeg:
        leg = reuse.get((src, dst))
        if leg is not None:
            return leg
        if router_route is None:
            raise ValueError("router_route required to bridge dropped activities")
        leg = router_route(src, dst)
        reuse[(src, dst)] = leg
        return leg

    first_end = min(durations[0] or DAY_SECONDS,
                    DAY_SECONDS - 2 * MIN_ACTIVITY_SECONDS)
    first_end = max(first_end, MIN_ACTIVITY_SECONDS)
    durations[0] = None
    return _assemble(agenda.owner, acts, durations, first_end, route)
