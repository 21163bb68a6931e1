"""Synthetic population: demographic attributes and anchor sublocations.

Everyone belongs to one of five classes derived from age and student status.
Synthesis assigns each person to a housing sublocation by sampled household
size, then places workplaces by drawing a commute distance and picking the
candidate sublocation whose distance from home is closest to the draw.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .city import CityModel, SLClass
from .errors import AssignmentError, ConfigError
from .geometry import Point
from .rng import POPULATION_STREAM, derived_random


class PersonClass(Enum):
    TODDLER = "ChildrenUnder3"
    SCHOOL_AGE = "Children3To18"
    ADULT = "Adults18To60"
    COLLEGE = "CollegeStudents"
    ELDER = "AdultsOver60"


class InfectionStatus(Enum):
    SUSCEPTIBLE = "Susceptible"
    INCUBATING = "Incubating"
    SYMPTOMATIC = "Symptomatic"
    RECOVERED = "Recovered"
    DEAD = "Dead"
    VACCINATED_PENDING = "VaccinatedPending"
    IMMUNIZED = "Immunized"


# Statuses that can still be infected. Pending vaccinees are unprotected
# until immunity onset.
INFECTABLE = frozenset({InfectionStatus.SUSCEPTIBLE,
                        InfectionStatus.VACCINATED_PENDING})

# Workplace sublocation classes each person class may be assigned.
WORKPLACE_CLASSES: dict[PersonClass, frozenset[SLClass]] = {
    PersonClass.SCHOOL_AGE: frozenset({SLClass.CLASSROOM}),
    PersonClass.COLLEGE: frozenset({SLClass.CLASSROOM}),
    PersonClass.ADULT: frozenset(
        {SLClass.OFFICE, SLClass.RECREATIONAL, SLClass.PATIENT_ROOM}),
}


def classify_age(age: float, is_college_student: bool = False) -> PersonClass:
    """Person class from age; intervals are closed below, open above.

    The college flag only matters for ages in [18, 25).
    """
    if age < 0:
        raise ValueError(f"age must be >= 0, got {age}")
    if age < 3:
        return PersonClass.TODDLER
    if age < 18:
        return PersonClass.SCHOOL_AGE
    if age < 25 and is_college_student:
        return PersonClass.COLLEGE
    if age < 60:
        return PersonClass.ADULT
    return PersonClass.ELDER


@dataclass(eq=False)
class Person:
    person_id: int
    age: float
    gender: str                      # "M" | "F"
    person_class: PersonClass
    housing_sl: str
    office_sl: str | None = None
    susceptibility: float = 1.0
    immune: bool = False
    infection_status: InfectionStatus = InfectionStatus.SUSCEPTIBLE
    # Disease bookkeeping, mutated only by the epidemic module.
    status_changed_at: float = 0.0
    next_transition: float | None = None
    next_status: InfectionStatus | None = None
    infected_at: float | None = None


@dataclass
class Household:
    housing_sl: str
    members: list[int] = field(default_factory=list)


@dataclass
class DemographicConfig:
    """Input distributions for population synthesis.

    age_bins: (lo, hi, weight) triples, sampled uniformly within the bin.
    household_size_pmf: size -> weight.
    commute_distance_pmf: (meters, weight) point masses.
    """

    size: int
    age_bins: list[tuple[float, float, float]]
    household_size_pmf: dict[int, float]
    commute_distance_pmf: list[tuple[float, float]]
    college_fraction: float = 0.5
    female_fraction: float = 0.5
    workplace_class_mix: dict[PersonClass, dict[SLClass, float]] | None = None

    def validate(self) -> None:
        if self.size < 1:
            raise ConfigError("population size must be >= 1")
        for name, dist in (("age_bins", self.age_bins),
                           ("household_size_pmf", self.household_size_pmf),
                           ("commute_distance_pmf", self.commute_distance_pmf)):
            if not dist:
                raise ConfigError(f"required distribution {name} is missing or empty")
        for lo, hi, w in self.age_bins:
            if hi <= lo or w < 0:
                raise ConfigError(f"bad age bin ({lo}, {hi}, {w})")
        if any(s < 1 or w < 0 for s, w in self.household_size_pmf.items()):
            raise ConfigError("household sizes must be >= 1 with weights >= 0")
        if any(d < 0 or w < 0 for d, w in self.commute_distance_pmf):
            raise ConfigError("commute distances and weights must be >= 0")
        if not (0.0 <= self.college_fraction <= 1.0):
            raise ConfigError("college_fraction must be in [0, 1]")

    def workplace_mix_for(self, pclass: PersonClass) -> list[tuple[SLClass, float]]:
        allowed = WORKPLACE_CLASSES[pclass]
        if self.workplace_class_mix and pclass in self.workplace_class_mix:
            mix = self.workplace_class_mix[pclass]
            bad = [c for c in mix if c not in allowed]
            if bad:
                raise ConfigError(
                    f"workplace class {bad[0].value} not allowed for {pclass.value}")
            return sorted(mix.items(), key=lambda kv: kv[0].value)
        default = SLClass.CLASSROOM if pclass != PersonClass.ADULT else SLClass.OFFICE
        return [(default, 1.0)]


class _WorkplacePicker:
    """Vectorized 'nearest to distance d' workplace lookup per class."""

    def __init__(self, city: CityModel, sl_class: SLClass):
        subs = city.sublocations_of_class(sl_class)  # already sorted by id
        self.ids = [s.sl_id for s in subs]
        self.xy = np.array([s.center for s in subs], dtype=float) if subs else None

    def pick(self, home: Point, d: float) -> str | None:
        if self.xy is None:
            return None
        dists = np.hypot(self.xy[:, 0] - home[0], self.xy[:, 1] - home[1])
        gap = np.abs(dists - d)
        in_annulus = (dists >= 0.9 * d) & (dists <= 1.1 * d)
        if in_annulus.any():
            gap = np.where(in_annulus, gap, np.inf)
        # argmin returns the first (lowest-id) index on ties
        return self.ids[int(np.argmin(gap))]


def synthesize_population(city: CityModel, demo: DemographicConfig,
                          rng_seed: int) -> tuple[list[Person], list[Household]]:
    """Build the agent population; deterministic for a fixed seed.

    Households are filled by sampled size and assigned to housing
    sublocations round-robin; workplaces are chosen nearest to a drawn
    commute distance, preferring candidates inside a +/-10% annulus.
    """
    demo.validate()
    housing = city.sublocations_of_class(SLClass.HOUSING)
    if not housing:
        raise AssignmentError("city has no Housing sublocations")
    rng = derived_random(rng_seed, POPULATION_STREAM)

    sizes = sorted(demo.household_size_pmf)
    size_weights = [demo.household_size_pmf[s] for s in sizes]
    bin_weights = [w for _lo, _hi, w in demo.age_bins]
    commute_vals = [d for d, _w in demo.commute_distance_pmf]
    commute_weights = [w for _d, w in demo.commute_distance_pmf]
    pickers: dict[SLClass, _WorkplacePicker] = {}

    persons: list[Person] = []
    households: list[Household] = []
    hh_index = 0
    while len(persons) < demo.size:
        hh_size = rng.choices(sizes, weights=size_weights)[0]
        hh_size = min(hh_size, demo.size - len(persons))
        sl = housing[hh_index % len(housing)]
        hh_index += 1
        hh = Household(housing_sl=sl.sl_id)
        for _ in range(hh_size):
            pid = len(persons)
            lo, hi, _w = demo.age_bins[
                rng.choices(range(len(demo.age_bins)), weights=bin_weights)[0]]
            age = rng.uniform(lo, hi)
            college = (18 <= age < 25) and (rng.random() < demo.college_fraction)
            pclass = classify_age(age, college)
            gender = "F" if rng.random() < demo.female_fraction else "M"
            person = Person(person_id=pid, age=age, gender=gender,
                            person_class=pclass, housing_sl=sl.sl_id)
            if pclass in WORKPLACE_CLASSES:
                mix = demo.workplace_mix_for(pclass)
                wp_class = rng.choices([c for c, _ in mix],
                                       weights=[w for _, w in mix])[0]
                if wp_class not in pickers:
                    pickers[wp_class] = _WorkplacePicker(city, wp_class)
                d = rng.choices(commute_vals, weights=commute_weights)[0]
                office = pickers[wp_class].pick(sl.center, d)
                if office is None:
                    raise AssignmentError(
                        f"no {wp_class.value} sublocation available for "
                        f"{pclass.value} person {pid}")
                person.office_sl = office
            hh.members.append(pid)
            persons.append(person)
        households.append(hh)
    return persons, households


def population_to_csv_rows(persons: list[Person]) -> list[str]:
    rows = ["person_id,age,gender,class,housing_sl,office_sl,status"]
    for p in persons:
        rows.append(f"{p.person_id},{p.age:.4f},{p.gender},{p.person_class.value},"
                    f"{p.housing_sl},{p.office_sl or ''},{p.infection_status.value}")
    return rows
