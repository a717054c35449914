"""City scoring and time-budgeted multi-city itinerary planning."""

from itinerary.dataset import (
    Attraction,
    City,
    Criterion,
    Dataset,
    GeoPoint,
    IndicatorMatrix,
    generate_synthetic,
    load_attractions,
    load_cities,
    load_indicators,
)
from itinerary.geo import TravelRates, haversine_km, rail_leg
from itinerary.mcda import (
    CityScore,
    DecisionConfig,
    correlation_matrix,
    entropy_weights,
    evaluate_cities,
    kmo_statistic,
    pca_composite_score,
    pca_reduce,
    select_top_cities,
    topsis_rank,
)
from itinerary.planner import (
    ItineraryPlan,
    PlannerConfig,
    plan_exhaustive,
    plan_greedy,
    plan_multistart,
)

__version__ = "0.1.0"

__all__ = [
    "Attraction",
    "City",
    "CityScore",
    "Criterion",
    "Dataset",
    "DecisionConfig",
    "GeoPoint",
    "IndicatorMatrix",
    "ItineraryPlan",
    "PlannerConfig",
    "TravelRates",
    "correlation_matrix",
    "entropy_weights",
    "evaluate_cities",
    "generate_synthetic",
    "haversine_km",
    "kmo_statistic",
    "load_attractions",
    "load_cities",
    "load_indicators",
    "pca_composite_score",
    "pca_reduce",
    "plan_exhaustive",
    "plan_greedy",
    "plan_multistart",
    "rail_leg",
    "select_top_cities",
    "topsis_rank",
]
