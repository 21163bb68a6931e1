"""Contact detection and infection dynamics.

Inside a shared sublocation every occupant wanders: positions are re-sampled
uniformly in the sublocation disc each step, and an infectious/susceptible
pair accumulates contact time whenever it sits within the contact distance
threshold. Infection per accumulating step is a Bernoulli trial whose
probability comes from a Poisson transmission process, so chaining steps
reproduces the closed form 1 - exp(-sigma * T) exactly. Vehicles are treated
as fully co-located spaces.

Disease progression: incubation (not infectious), symptomatic (infectious),
then recovery or death; vaccination confers immunity only after its own
delay, and a pending vaccinee can still be infected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .geometry import Point, uniform_point_in_disc
from .population import INFECTABLE, InfectionStatus, Person

SECONDS_PER_HOUR = 3600.0
SECONDS_PER_DAY = 86400.0


@dataclass
class EpidemicParams:
    sigma_per_hour: float = 0.3       # toy default; set per scenario
    d_star: float = 2.0               # contact distance threshold (m)
    outdoor_factor: float = 0.5       # sigma multiplier outdoors
    incubation_days: tuple[float, float] = (1.0, 2.0)
    symptomatic_days: tuple[float, float] = (1.0, 7.0)
    vaccination_days: tuple[float, float] = (7.0, 21.0)
    mortality: float = 0.0

    def validate(self) -> None:
        if self.sigma_per_hour < 0:
            raise ConfigError("sigma must be >= 0")
        if self.d_star <= 0:
            raise ConfigError("d_star must be > 0")
        if not (0.0 < self.outdoor_factor <= 1.0):
            raise ConfigError("outdoor_factor must be in (0, 1]")
        for name, (lo, hi) in (("incubation_days", self.incubation_days),
                               ("symptomatic_days", self.symptomatic_days),
                               ("vaccination_days", self.vaccination_days)):
            if lo <= 0 or hi < lo:
                raise ConfigError(f"{name} range must satisfy 0 < lo <= hi")
        if not (0.0 <= self.mortality <= 1.0):
            raise ConfigError("mortality must be in [0, 1]")


@dataclass(frozen=True)
class InfectionEvent:
    time: float
    place_id: str
    place_kind: str        # sublocation class name or "Vehicle"
    infector: int
    infectee: int


@dataclass
class Occupancy:
    """Occupancy snapshot of one sublocation or vehicle.

    radius is None for vehicles, meaning everyone counts as co-located.
    accumulated maps (infector id, infectee id) to close-contact seconds this
    episode; pairs must be dropped when either party leaves the space.
    """

    place_id: str
    place_kind: str
    outdoor: bool
    radius: float | None
    center: Point = (0.0, 0.0)
    infectious: list[Person] = field(default_factory=list)
    infectable: list[Person] = field(default_factory=list)
    accumulated: dict[tuple[int, int], float] = field(default_factory=dict)


def infection_probability(sigma_eff_per_hour: float, contact_seconds: float) -> float:
    """Probability of at least one transmission over a contact of T seconds.

    1 - exp(-sigma * T), with sigma in events per hour of contact. Strictly
    increasing in both arguments and always in [0, 1).
    """
    if sigma_eff_per_hour < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma_eff_per_hour}")
    if contact_seconds < 0:
        raise ValueError(f"contact time must be >= 0, got {contact_seconds}")
    return -math.expm1(-sigma_eff_per_hour * contact_seconds / SECONDS_PER_HOUR)


def step_contacts(occ: Occupancy, dt: float, params: EpidemicParams,
                  pos_rng, trial_rng, now: float) -> list[InfectionEvent]:
    """Advance one contact step for a single space.

    Re-samples occupant positions, accumulates close-contact time per
    infectious/susceptible pair, and fires one Bernoulli infection trial per
    accumulating pair. Newly infected persons switch to incubating via
    begin_infection and are reported as events.
    """
    if not occ.infectious or not occ.infectable:
        return []
    sigma = params.sigma_per_hour * (params.outdoor_factor if occ.outdoor else 1.0)
    p_step = -math.expm1(-sigma * dt / SECONDS_PER_HOUR)

    check_distance = occ.radius is not None
    if check_distance:
        positions = {}
        for person in occ.infectious:
            positions[person.person_id] = uniform_point_in_disc(
                occ.center, occ.radius, pos_rng)
        for person in occ.infectable:
            positions[person.person_id] = uniform_point_in_disc(
                occ.center, occ.radius, pos_rng)
        d_star_sq = params.d_star * params.d_star

    events: list[InfectionEvent] = []
    accumulated = occ.accumulated
    for i_person in occ.infectious:
        iid = i_person.person_id
        if check_distance:
            ix, iy = positions[iid]
        for j_person in occ.infectable:
            if j_person.infection_status not in INFECTABLE:
                continue  # infected earlier in this same step
            jid = j_person.person_id
            if check_distance:
                jx, jy = positions[jid]
                dx, dy = ix - jx, iy - jy
                if dx * dx + dy * dy > d_star_sq:
                    continue
            key = (iid, jid)
            accumulated[key] = accumulated.get(key, 0.0) + dt
            if p_step > 0.0 and trial_rng.random() < p_step * j_person.susceptibility:
                begin_infection(j_person, now, params, trial_rng)
                events.append(InfectionEvent(now, occ.place_id, occ.place_kind,
                                             iid, jid))
    if events:
        occ.infectable = [p for p in occ.infectable
                          if p.infection_status in INFECTABLE]
    return events


def _uniform_days(rng, day_range: tuple[float, float]) -> float:
    lo, hi = day_range
    return rng.uniform(lo, hi) * SECONDS_PER_DAY


def begin_infection(person: Person, now: float, params: EpidemicParams, rng) -> None:
    """Move a susceptible (or pending-vaccinee) person to incubating."""
    if person.infection_status not in INFECTABLE:
        raise ValueError(f"person {person.person_id} is not infectable "
                         f"({person.infection_status.value})")
    person.infection_status = InfectionStatus.INCUBATING
    person.status_changed_at = now
    person.infected_at = now
    person.next_transition = now + _uniform_days(rng, params.incubation_days)
    person.next_status = InfectionStatus.SYMPTOMATIC


def begin_vaccination(person: Person, now: float, params: EpidemicParams, rng) -> None:
    if person.infection_status != InfectionStatus.SUSCEPTIBLE:
        raise ValueError(f"person {person.person_id} cannot be vaccinated "
                         f"({person.infection_status.value})")
    person.infection_status = InfectionStatus.VACCINATED_PENDING
    person.status_changed_at = now
    person.next_transition = now + _uniform_days(rng, params.vaccination_days)
    person.next_status = InfectionStatus.IMMUNIZED


def make_symptomatic(person: Person, now: float, params: EpidemicParams, rng) -> None:
    """Enter the infectious stage; used by seeding and by progression."""
    person.infection_status = InfectionStatus.SYMPTOMATIC
    person.status_changed_at = now
    if person.infected_at is None:
        person.infected_at = now
    person.next_transition = now + _uniform_days(rng, params.symptomatic_days)
    person.next_status = (InfectionStatus.DEAD
                          if rng.random() < params.mortality
                          else InfectionStatus.RECOVERED)


def progress_disease(person: Person, now: float, rng,
                     params: EpidemicParams) -> list[tuple[InfectionStatus, InfectionStatus]]:
    """Apply every stage transition due at or before now.

    Returns the (old, new) status pairs applied, oldest first. A person with
    no pending transition is returned unchanged.
    """
    transitions: list[tuple[InfectionStatus, InfectionStatus]] = []
    while person.next_transition is not None and person.next_transition <= now:
        old = person.infection_status
        when = person.next_transition
        new = person.next_status
        assert new is not None
        if new == InfectionStatus.SYMPTOMATIC:
            make_symptomatic(person, when, params, rng)
        else:
            person.infection_status = new
            person.status_changed_at = when
            person.next_transition = None
            person.next_status = None
        transitions.append((old, new))
    return transitions
