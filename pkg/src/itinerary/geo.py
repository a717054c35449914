"""Great-circle distance and the rail travel model built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

from itinerary.dataset import GeoPoint

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class TravelRates:
    """Rail speed (km/h), fare (currency/km) and per-arrival local transfer (h)."""

    rail_speed: float = 300.0
    rail_cost_rate: float = 0.5
    local_transfer_time: float = 1.0

    def __post_init__(self) -> None:
        if not self.rail_speed > 0:
            raise ValueError(f"rail_speed must be > 0, got {self.rail_speed}")
        if not self.rail_cost_rate >= 0:
            raise ValueError(f"rail_cost_rate must be >= 0, got {self.rail_cost_rate}")
        if not self.local_transfer_time >= 0:
            raise ValueError(f"local_transfer_time must be >= 0, got {self.local_transfer_time}")


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in km on a sphere of radius 6371 km."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    # rounding can push h a hair past 1 near antipodes
    h = min(1.0, max(0.0, h))
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


def rail_leg(a: GeoPoint, b: GeoPoint, rates: TravelRates | None = None) -> tuple[float, float]:
    """Return ``(hours, cost)`` for a train ride from ``a`` to ``b``.

    Hours include the local transfer on arrival, so ``a == b`` still costs
    ``rates.local_transfer_time`` hours and nothing in fares.
    """
    rates = rates or TravelRates()
    km = haversine_km(a, b)
    return km / rates.rail_speed + rates.local_transfer_time, km * rates.rail_cost_rate
