"""Discrete-time simulation engine.

Each tick the engine wakes agents whose activity ended, moves travelers along
their routes, advances transit vehicles (boarding and alighting at visited
stops), runs one contact step inside every space that holds both infectious
and infectable occupants, and applies due disease-stage transitions. Days are
agenda-aligned: fresh agendas are issued at each midnight to agents who are
back home; an agent still catching up on a delayed trip keeps executing the
old plan and sits out until the following midnight.

The whole loop is single-threaded and deterministic: identical scenario and
seed produce byte-identical outputs.
"""

from __future__ import annotations

import heapq
import json
import logging
import os
from dataclasses import dataclass

from . import rng as rngmod
from .agenda import (Activity, AgendaContext, DailyAgenda, TravelLeg,
                     expand_agenda, sample_pattern)
from .city import SLClass
from .cityfile import CityData, load_city
from .config import OUTPUT_DIR_ENV, ScenarioConfig
from .epidemic import (EpidemicParams, InfectionEvent, Occupancy,
                       begin_vaccination, make_symptomatic, progress_disease,
                       step_contacts)
from .errors import InsufficientSusceptibles
from .geometry import Point
from .population import (INFECTABLE, Household, InfectionStatus, Person,
                         synthesize_population)
from .roads import RoutePath, Straight
from .routing import CityRouter
from .transit import TransitItinerary

log = logging.getLogger(__name__)

DAY = 86400

AT_SL, TRAVELING, WAITING, RIDING = range(4)

PLACE_KINDS = [c.value for c in SLClass] + ["Vehicle"]


@dataclass
class TickReport:
    """Counts snapshot; citywide counts always sum to the population size."""

    time: float
    day: int
    citywide: dict[InfectionStatus, int]
    by_region: dict[str, dict[InfectionStatus, int]]
    cumulative_by_place: dict[str, int]
    ever_infected: int


@dataclass
class RunResult:
    summary: dict
    reports: list[TickReport]
    output_dir: str | None


class _Agent:
    __slots__ = ("person", "home_sl", "current_sl", "kin", "steps", "idx",
                 "path", "path_pos", "path_speed", "alight_stop", "wake",
                 "space_key", "point")

    def __init__(self, person: Person):
        self.person = person
        self.home_sl = person.housing_sl
        self.current_sl = person.housing_sl
        self.kin = AT_SL
        self.steps: list = []
        self.idx = 0
        self.path: RoutePath | None = None
        self.path_pos = 0.0
        self.path_speed = 0.0
        self.alight_stop: str | None = None
        self.wake = -1.0
        self.space_key = None
        self.point: Point = (0.0, 0.0)


class _Space:
    __slots__ = ("key", "occ")

    def __init__(self, key, place_id, place_kind, outdoor, radius, center):
        self.key = key
        self.occ = Occupancy(place_id=place_id, place_kind=place_kind,
                             outdoor=outdoor, radius=radius, center=center)


class _Vehicle:
    __slots__ = ("key", "line", "departure", "offsets", "next_stop", "riders",
                 "space", "retired")

    def __init__(self, key, line, departure, offsets):
        self.key = key
        self.line = line
        self.departure = departure
        self.offsets = offsets
        self.next_stop = 0
        self.riders: list[int] = []
        self.retired = False


class Simulation:
    """One seeded run over a scenario; step() advances a single tick."""

    def __init__(self, scenario: ScenarioConfig, city: CityData | None = None,
                 seed: int | None = None):
        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        self.city = city if city is not None else load_city(scenario.city_path)
        self.params: EpidemicParams = scenario.epidemic
        self.dt = scenario.dt
        self.now = 0
        self.day = -1
        self.horizon = scenario.days * DAY

        self.router = CityRouter(
            self.city.model, self.city.roads, self.city.transit,
            mode_speeds=scenario.mode_speeds,
            walk_threshold=scenario.walk_threshold,
            transit_radii=scenario.transit_radii,
            transit_max_levels=scenario.transit_max_levels)
        self.agenda_ctx = AgendaContext(
            city=self.city.model, router=self.router,
            duration_stats=scenario.behavior.duration_stats,
            duration_bounds=scenario.behavior.duration_bounds,
            work_start_window=scenario.behavior.work_start_window,
            modal_split=scenario.modal_split)

        persons, households = synthesize_population(
            self.city.model, scenario.demographics, self.seed)
        self.persons: list[Person] = persons
        self.households: list[Household] = households

        self.pos_rng = rngmod.derived_random(self.seed, rngmod.MOVEMENT_STREAM)
        self.epi_rng = rngmod.derived_random(self.seed, rngmod.EPIDEMIC_STREAM)
        self.seed_rng = rngmod.derived_random(self.seed, rngmod.SEEDING_STREAM)

        self.agents: list[_Agent] = [_Agent(p) for p in persons]
        self.spaces: dict[tuple, _Space] = {}
        self.active_spaces: set[tuple] = set()
        self.travelers: dict[int, _Agent] = {}
        self.waiting: dict[tuple[str, tuple[str, int]], list[_Agent]] = {}
        self.wake_heap: list[tuple[float, int]] = []
        self.transition_heap: list[tuple[float, int]] = []
        self.vehicles: list[_Vehicle] = []
        self._departures: dict[tuple[str, int], int] = {}

        self.events: list[InfectionEvent] = []
        self.seed_events: list[tuple[float, int, str]] = []
        self.infections_by_place: dict[str, int] = {k: 0 for k in PLACE_KINDS}
        self.ever_infected = 0
        self.reports: list[TickReport] = []

        for agent in self.agents:
            agent.point = self.city.model.sublocations[agent.home_sl].center
            self._enter_space(agent, ("sl", agent.home_sl))

        # Initial immunity and vaccination course, then index cases.
        for person in self.persons:
            if person.immune:
                person.infection_status = InfectionStatus.IMMUNIZED
        if scenario.vaccinated_fraction > 0.0:
            for person in self.persons:
                if (person.infection_status == InfectionStatus.SUSCEPTIBLE
                        and self.seed_rng.random() < scenario.vaccinated_fraction):
                    begin_vaccination(person, 0.0, self.params, self.seed_rng)
                    self._schedule_transition(person)
                    self._restate_occupant(self.agents[person.person_id],
                                           InfectionStatus.SUSCEPTIBLE)
        if scenario.seeding.ids is not None:
            seed_infections(self, {"ids": scenario.seeding.ids}, self.seed_rng)
        elif scenario.seeding.count:
            seed_infections(self, {"count": scenario.seeding.count}, self.seed_rng)

        self._start_day(0)

    # ------------------------------------------------------------------
    # space registry

    def _space_for(self, key) -> _Space:
        space = self.spaces.get(key)
        if space is None:
            if key[0] == "sl":
                sl = self.city.model.sublocations[key[1]]
                space = _Space(key, sl.sl_id, sl.sl_class.value,
                               sl.exposure.value == "Outdoor", sl.radius, sl.center)
            else:
                _tag, line_id, direction, k = key
                space = _Space(key, f"{line_id}/{direction}/{k}", "Vehicle",
                               False, None, (0.0, 0.0))
            self.spaces[key] = space
        return space

    def _refresh_active(self, space: _Space) -> None:
        if space.occ.infectious and space.occ.infectable:
            self.active_spaces.add(space.key)
        else:
            self.active_spaces.discard(space.key)

    def _enter_space(self, agent: _Agent, key) -> None:
        space = self._space_for(key)
        person = agent.person
        status = person.infection_status
        if status == InfectionStatus.SYMPTOMATIC:
            space.occ.infectious.append(person)
        elif status in INFECTABLE:
            space.occ.infectable.append(person)
        agent.space_key = key
        if key[0] == "sl":
            agent.current_sl = key[1]
        self._refresh_active(space)

    def _leave_space(self, agent: _Agent) -> None:
        key = agent.space_key
        if key is None:
            return
        space = self.spaces[key]
        person = agent.person
        occ = space.occ
        if person in occ.infectious:
            occ.infectious.remove(person)
        elif person in occ.infectable:
            occ.infectable.remove(person)
        if occ.accumulated:
            pid = person.person_id
            stale = [pair for pair in occ.accumulated if pid in pair]
            for pair in stale:
                del occ.accumulated[pair]
        agent.space_key = None
        self._refresh_active(space)

    def _restate_occupant(self, agent: _Agent, old_status: InfectionStatus) -> None:
        """Re-file an agent in its current space after a status change."""
        key = agent.space_key
        if key is None:
            return
        space = self.spaces[key]
        occ = space.occ
        person = agent.person
        if person in occ.infectious:
            occ.infectious.remove(person)
        elif person in occ.infectable:
            occ.infectable.remove(person)
        if occ.accumulated:
            pid = person.person_id
            for pair in [p for p in occ.accumulated if pid in p]:
                del occ.accumulated[pair]
        status = person.infection_status
        if status == InfectionStatus.SYMPTOMATIC:
            occ.infectious.append(person)
        elif status in INFECTABLE:
            occ.infectable.append(person)
        self._refresh_active(space)

    # ------------------------------------------------------------------
    # agenda compilation and the agent state machine

    def _schedule_transition(self, person: Person) -> None:
        if person.next_transition is not None:
            heapq.heappush(self.transition_heap,
                           (person.next_transition, person.person_id))

    def _straight_path(self, a: Point, b: Point) -> RoutePath:
        return RoutePath([Straight(a, b)], [a, b])

    def _compile(self, day_start: float, agda: DailyAgenda) -> list:
        steps: list = []
        model = self.city.model
        stops = self.city.transit.stops if self.city.transit else {}
        speeds = self.router.mode_speeds
        for item in agda.items:
            if isinstance(item, Activity):
                steps.append(("stay", item.sublocation, day_start + item.end))
                continue
            leg: TravelLeg = item
            plan = leg.plan
            src_pt = model.sublocations[leg.src_sl].center
            dst_pt = model.sublocations[leg.dst_sl].center
            if plan is None or plan.itinerary is None:
                path = (plan.road_path if plan is not None
                        else self._straight_path(src_pt, dst_pt))
                steps.append(("move", path, speeds.get(leg.mode, speeds["walk"])))
                continue
            itin: TransitItinerary = plan.itinerary
            if not itin.legs:
                steps.append(("move", self._straight_path(src_pt, dst_pt),
                              speeds["walk"]))
                continue
            first_board = itin.legs[0].board_stop
            steps.append(("move", self._straight_path(src_pt, stops[first_board]),
                          speeds["walk"]))
            prev_alight = None
            for tleg in itin.legs:
                if prev_alight is not None and prev_alight != tleg.board_stop:
                    steps.append(("move",
                                  self._straight_path(stops[prev_alight],
                                                      stops[tleg.board_stop]),
                                  speeds["walk"]))
                steps.append(("board", tleg.board_stop,
                              (tleg.line_id, tleg.direction), tleg.alight_stop))
                prev_alight = tleg.alight_stop
            steps.append(("move", self._straight_path(stops[prev_alight], dst_pt),
                          speeds["walk"]))
        return steps

    def _start_day(self, day: int) -> None:
        self.day = day
        day_start = float(day * DAY)
        behavior = self.scenario.behavior
        for agent in self.agents:
            person = agent.person
            if person.infection_status == InfectionStatus.DEAD:
                continue
            if agent.idx < len(agent.steps):
                continue  # still finishing yesterday's plan; sits this day out
            if agent.kin != AT_SL or agent.current_sl != agent.home_sl:
                continue
            arng = rngmod.derived_random(self.seed, rngmod.AGENDA_STREAM,
                                         person.person_id, day)
            symptomatic = person.infection_status == InfectionStatus.SYMPTOMATIC
            policy = behavior.policy_for(symptomatic)
            pattern = sample_pattern(person.person_class, arng,
                                     self.scenario.patterns,
                                     behavior.elder_recreation_prob)
            agda = expand_agenda(person, pattern, policy, arng, self.agenda_ctx)
            agent.steps = self._compile(day_start, agda)
            agent.idx = 0
            self._advance(agent)

    def _advance(self, agent: _Agent) -> None:
        """Drive the agent's cursor until it blocks on a stay, wait or move."""
        now = self.now
        while True:
            if agent.idx >= len(agent.steps):
                agent.kin = AT_SL
                return
            step = agent.steps[agent.idx]
            kind = step[0]
            if kind == "stay":
                _k, sl_id, end = step
                if agent.space_key != ("sl", sl_id):
                    self._leave_space(agent)
                    self._enter_space(agent, ("sl", sl_id))
                    agent.point = self.city.model.sublocations[sl_id].center
                agent.kin = AT_SL
                if end > now:
                    agent.wake = end
                    heapq.heappush(self.wake_heap, (end, agent.person.person_id))
                    return
                agent.idx += 1
            elif kind == "move":
                _k, path, speed = step
                if path.total_length <= 1e-9:
                    agent.idx += 1
                    continue
                self._leave_space(agent)
                agent.kin = TRAVELING
                agent.path = path
                agent.path_pos = 0.0
                agent.path_speed = speed
                self.travelers[agent.person.person_id] = agent
                return
            elif kind == "board":
                _k, stop_id, line_key, alight = step
                self._leave_space(agent)
                agent.kin = WAITING
                agent.alight_stop = alight
                agent.point = self.city.transit.stops[stop_id]
                self.waiting.setdefault((stop_id, line_key), []).append(agent)
                return
            else:  # pragma: no cover - compile emits only the three kinds
                raise AssertionError(f"unknown step {kind!r}")

    # ------------------------------------------------------------------
    # per-tick phases

    def _process_wakes(self) -> None:
        heap = self.wake_heap
        now = self.now
        while heap and heap[0][0] <= now:
            end, pid = heapq.heappop(heap)
            agent = self.agents[pid]
            if (agent.kin == AT_SL and agent.wake == end
                    and agent.idx < len(agent.steps)):
                agent.wake = -1.0
                agent.idx += 1
                self._advance(agent)

    def _move_travelers(self) -> None:
        arrived: list[_Agent] = []
        dt = self.dt
        for agent in self.travelers.values():
            agent.path_pos += agent.path_speed * dt
            if agent.path_pos >= agent.path.total_length:
                arrived.append(agent)
            else:
                agent.point = agent.path.point_at(agent.path_pos)
        for agent in arrived:
            del self.travelers[agent.person.person_id]
            agent.point = agent.path.end
            agent.path = None
            agent.idx += 1
            self._advance(agent)

    def _spawn_vehicles(self) -> None:
        transit = self.city.transit
        if transit is None:
            return
        for key in sorted(transit.lines):
            line = transit.lines[key]
            k = self._departures.get(key, 0)
            while k * line.headway <= self.now:
                dep = k * line.headway
                veh = _Vehicle(("veh", key[0], key[1], k), line, dep,
                               transit.line_offsets(key))
                self.vehicles.append(veh)
                k += 1
            self._departures[key] = k

    def _visit_stop(self, veh: _Vehicle, stop_id: str) -> None:
        stop_pt = self.city.transit.stops[stop_id]
        if veh.riders:
            leavers = []
            for pid in veh.riders:
                agent = self.agents[pid]
                if agent.alight_stop == stop_id:
                    leavers.append(agent)
            for agent in leavers:
                veh.riders.remove(agent.person.person_id)
                self._leave_space(agent)
                agent.kin = AT_SL
                agent.point = stop_pt
                agent.alight_stop = None
                agent.idx += 1
                self._advance(agent)
        queue_key = (stop_id, (veh.line.line_id, veh.line.direction))
        queue = self.waiting.get(queue_key)
        if queue:
            for agent in queue:
                agent.kin = RIDING
                veh.riders.append(agent.person.person_id)
                self._enter_space(agent, veh.key)
                agent.point = stop_pt
            queue.clear()

    def _move_vehicles(self) -> None:
        if not self.vehicles:
            return
        retired = False
        for veh in self.vehicles:
            pos = (self.now - veh.departure) * veh.line.speed
            offsets = veh.offsets
            while veh.next_stop < len(offsets) and offsets[veh.next_stop] <= pos:
                self._visit_stop(veh, veh.line.stops[veh.next_stop])
                veh.next_stop += 1
            if veh.next_stop >= len(offsets):
                if veh.riders:  # pragma: no cover - safety net
                    log.warning("agents %s carried past the final stop of %s",
                                veh.riders, veh.key)
                    for pid in list(veh.riders):
                        self.agents[pid].alight_stop = veh.line.stops[-1]
                    self._visit_stop(veh, veh.line.stops[-1])
                veh.retired = True
                retired = True
        if retired:
            self.vehicles = [v for v in self.vehicles if not v.retired]

    def _contact_step(self) -> None:
        if not self.active_spaces:
            return
        now = float(self.now)
        for key in sorted(self.active_spaces):
            space = self.spaces[key]
            events = step_contacts(space.occ, self.dt, self.params,
                                   self.pos_rng, self.epi_rng, now)
            for event in events:
                self.events.append(event)
                self.infections_by_place[event.place_kind] += 1
                self.ever_infected += 1
                person = self.persons[event.infectee]
                self._schedule_transition(person)
            if events:
                self._refresh_active(space)

    def _progress_transitions(self) -> None:
        heap = self.transition_heap
        now = float(self.now)
        while heap and heap[0][0] <= now:
            when, pid = heapq.heappop(heap)
            person = self.persons[pid]
            if person.next_transition is None or person.next_transition != when:
                continue  # superseded (e.g. infected while pending vaccination)
            old = person.infection_status
            transitions = progress_disease(person, now, self.epi_rng, self.params)
            if not transitions:
                continue
            self._schedule_transition(person)
            agent = self.agents[pid]
            self._restate_occupant(agent, old)
            if person.infection_status == InfectionStatus.DEAD:
                self._halt_agent(agent)

    def _halt_agent(self, agent: _Agent) -> None:
        """Freeze a dead agent in place and detach it from movement state."""
        pid = agent.person.person_id
        agent.steps = []
        agent.idx = 0
        if agent.kin == TRAVELING:
            self.travelers.pop(pid, None)
        elif agent.kin == WAITING:
            for queue in self.waiting.values():
                if agent in queue:
                    queue.remove(agent)
        elif agent.kin == RIDING:
            for veh in self.vehicles:
                if veh.key == agent.space_key and pid in veh.riders:
                    veh.riders.remove(pid)
            self._leave_space(agent)
        agent.kin = AT_SL
        agent.wake = -1.0

    # ------------------------------------------------------------------

    def step(self) -> None:
        """Advance the clock by one dt tick."""
        self.now += self.dt
        self._process_wakes()
        if self.now % DAY == 0 and self.now < self.horizon:
            self._start_day(self.now // DAY)
        self._move_travelers()
        self._spawn_vehicles()
        self._move_vehicles()
        self._contact_step()
        self._progress_transitions()

    def collect_statistics(self) -> TickReport:
        """Exact status counts, citywide and per region of current presence."""
        citywide = {s: 0 for s in InfectionStatus}
        by_region: dict[str, dict[InfectionStatus, int]] = {
            rid: {s: 0 for s in InfectionStatus}
            for rid in sorted(self.city.model.regions)}
        subs = self.city.model.sublocations
        for agent in self.agents:
            status = agent.person.infection_status
            citywide[status] += 1
            region = subs[agent.current_sl].region_id
            if region in by_region:
                by_region[region][status] += 1
        return TickReport(time=float(self.now), day=self.now // DAY,
                          citywide=citywide, by_region=by_region,
                          cumulative_by_place=dict(self.infections_by_place),
                          ever_infected=self.ever_infected)

    def run(self, output_dir: str | None = None,
            write_outputs: bool = True) -> RunResult:
        """Run the configured horizon and write the output files."""
        cadence = self.scenario.output.tick_csv_every
        snapshot_every = self.scenario.output.snapshot_every
        if write_outputs:
            output_dir = output_dir or os.environ.get(
                OUTPUT_DIR_ENV, self.scenario.output.directory)
            os.makedirs(output_dir, exist_ok=True)
        snapshots: list[tuple[int, dict]] = []

        self.reports.append(self.collect_statistics())
        ticks = self.horizon // self.dt
        for _ in range(ticks):
            self.step()
            if cadence and self.now % cadence == 0:
                self.reports.append(self.collect_statistics())
            if (write_outputs and snapshot_every
                    and self.now % snapshot_every == 0):
                snapshots.append((self.now, self._agents_geojson()))

        summary = self._summary()
        if write_outputs:
            self._write_outputs(output_dir, snapshots, summary)
        return RunResult(summary=summary, reports=self.reports,
                         output_dir=output_dir if write_outputs else None)

    # ------------------------------------------------------------------
    # outputs

    def _summary(self) -> dict:
        final = self.collect_statistics()
        n = len(self.persons)
        peak_time, peak_count = 0.0, 0
        for rep in self.reports:
            sick = (rep.citywide[InfectionStatus.INCUBATING]
                    + rep.citywide[InfectionStatus.SYMPTOMATIC])
            if sick > peak_count:
                peak_count = sick
                peak_time = rep.time
        return {
            "population": n,
            "days": self.scenario.days,
            "dt": self.dt,
            "seed": self.seed,
            "seeded_cases": len(self.seed_events),
            "transmission_events": len(self.events),
            "ever_infected": self.ever_infected,
            "attack_rate": self.ever_infected / n if n else 0.0,
            "peak_prevalence": peak_count,
            "peak_time_s": peak_time,
            "final_counts": {s.value: c for s, c in final.citywide.items()},
            "infections_by_place": dict(self.infections_by_place),
        }

    def _agents_geojson(self) -> dict:
        features = []
        for agent in self.agents:
            features.append({
                "type": "Feature",
                "geometry": {"type": "Point",
                             "coordinates": [round(agent.point[0], 2),
                                             round(agent.point[1], 2)]},
                "properties": {"id": agent.person.person_id,
                               "status": agent.person.infection_status.value},
            })
        return {"type": "FeatureCollection", "features": features}

    def _write_outputs(self, output_dir: str, snapshots, summary: dict) -> None:
        def path(name):
            return os.path.join(output_dir, name)

        with open(path("events.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("time,place_id,place_kind,infector,infectee\n")
            for ev in self.events:
                fh.write(f"{ev.time:.3f},{ev.place_id},{ev.place_kind},"
                         f"{ev.infector},{ev.infectee}\n")
        with open(path("seeds.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("time,person_id,housing_sl\n")
            for when, pid, sl in self.seed_events:
                fh.write(f"{when:.3f},{pid},{sl}\n")
        statuses = list(InfectionStatus)
        with open(path("ticks.csv"), "w", encoding="utf-8", newline="\n") as fh:
            cols = (["time", "day"] + [s.value.lower() for s in statuses]
                    + ["ever_infected"]
                    + [f"infections_{k.lower()}" for k in PLACE_KINDS])
            fh.write(",".join(cols) + "\n")
            for rep in self.reports:
                row = [f"{rep.time:.0f}", str(rep.day)]
                row += [str(rep.citywide[s]) for s in statuses]
                row.append(str(rep.ever_infected))
                row += [str(rep.cumulative_by_place[k]) for k in PLACE_KINDS]
                fh.write(",".join(row) + "\n")
        with open(path("regions.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("time,region_id,status,count\n")
            for rep in self.reports:
                for rid in rep.by_region:
                    for s in statuses:
                        count = rep.by_region[rid][s]
                        if count:
                            fh.write(f"{rep.time:.0f},{rid},{s.value},{count}\n")
        for when, doc in snapshots:
            with open(path(f"agents_{when:08d}.geojson"), "w",
                      encoding="utf-8") as fh:
                json.dump(doc, fh)
        with open(path("summary.txt"), "w", encoding="utf-8", newline="\n") as fh:
            for key, value in summary.items():
                fh.write(f"{key}: {json.dumps(value, sort_keys=True)}\n")


def seed_infections(sim: Simulation, spec: dict, rng) -> list[int]:
    """Set index cases symptomatic at the current time.

    spec is {"count": n} for a random draw among susceptibles or
    {"ids": [...]} for explicit persons. Seeds skip incubation so short
    scenarios transmit immediately.
    """
    now = float(sim.now)
    if "ids" in spec and spec["ids"] is not None:
        chosen = []
        for pid in spec["ids"]:
            person = sim.persons[pid]
            if person.infection_status not in INFECTABLE:
                raise InsufficientSusceptibles(
                    f"person {pid} is not susceptible ({person.infection_status.value})")
            chosen.append(person)
    else:
        count = int(spec.get("count", 0))
        pool = [p for p in sim.persons
                if p.infection_status == InfectionStatus.SUSCEPTIBLE]
        if count > len(pool):
            raise InsufficientSusceptibles(
                f"requested {count} seed cases, only {len(pool)} susceptible")
        chosen = rng.sample(pool, count) if count else []
        chosen.sort(key=lambda p: p.person_id)
    for person in chosen:
        old = person.infection_status
        make_symptomatic(person, now, sim.params, sim.epi_rng)
        person.infected_at = now
        sim.ever_infected += 1
        sim.seed_events.append((now, person.person_id, person.housing_sl))
        sim._schedule_transition(person)
        sim._restate_occupant(sim.agents[person.person_id], old)
    return [p.person_id for p in chosen]


def run_scenario(scenario: ScenarioConfig, city: CityData | None = None,
                 seed: int | None = None, output_dir: str | None = None,
                 write_outputs: bool = True) -> RunResult:
    """Build a Simulation and run it end to end."""
    sim = Simulation(scenario, city=city, seed=seed)
    return sim.run(output_dir=output_dir, write_outputs=write_outputs)
