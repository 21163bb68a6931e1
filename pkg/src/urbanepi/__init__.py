"""urbanepi: agent-based simulation of airborne disease spread in a city.

The package builds a synthetic city (regions, room-like sublocations, road
and public-transport networks), synthesizes a population with daily activity
agendas, routes every trip over the networks, and advances a discrete-time
contact/infection simulation that is bitwise reproducible for a fixed seed.
"""

from .city import (CityModel, Exposure, Region, RegionType, SLClass,
                   Sublocation, validate_city)
from .cityfile import CityData, city_to_geojson, load_city, save_city
from .citygen import SyntheticCitySpec, generate_synthetic_city
from .config import ScenarioConfig, load_scenario
from .engine import Simulation, TickReport, run_scenario, seed_infections
from .epidemic import (EpidemicParams, InfectionEvent, Occupancy,
                       infection_probability, progress_disease, step_contacts)
from .errors import (AssignmentError, ConfigError, InsufficientSusceptibles,
                     MissingAnchor, ParseError, SpecError, UrbanEpiError,
                     ValidationError)
from .population import (DemographicConfig, Household, InfectionStatus, Person,
                         PersonClass, classify_age, synthesize_population)
from .roads import RoadGraph, RoutePath, route_on_roads, shortest_path
from .routing import CityRouter
from .transit import TransitGraph, TransitItinerary, route_transit

__version__ = "0.1.0"

__all__ = [
    "AssignmentError", "CityData", "CityModel", "CityRouter", "ConfigError",
    "DemographicConfig", "EpidemicParams", "Exposure", "Household",
    "InfectionEvent", "InfectionStatus", "InsufficientSusceptibles",
    "MissingAnchor", "Occupancy", "ParseError", "Person", "PersonClass",
    "Region", "RegionType", "RoadGraph", "RoutePath", "SLClass",
    "ScenarioConfig", "Simulation", "SpecError", "Sublocation",
    "SyntheticCitySpec", "TickReport", "TransitGraph", "TransitItinerary",
    "UrbanEpiError", "ValidationError", "city_to_geojson", "classify_age",
    "generate_synthetic_city", "infection_probability", "load_city",
    "load_scenario", "progress_disease", "route_on_roads", "route_transit",
    "run_scenario", "save_city", "seed_infections", "shortest_path",
    "step_contacts", "synthesize_population", "validate_city",
]
