"""Time-budgeted multi-city itinerary construction.

Time model
----------
The trip starts at ``day_start`` on day 0 and every duration is wall-clock:
``elapsed`` hours since the start map to the absolute hour
``day_start + elapsed``. Trains run at any hour, but an attraction visit must
fit inside one day's window ``[max(open, day_start), min(close, day_end)]``.
Whenever the next visit has to wait (for opening time or for the next
morning) the gap is booked as rest and counts against the budget.

Each leg is ``travel (rail + local transfer) -> rest -> visit`` and the plan
totals are plain left-to-right sums over legs, so they can be recomputed
exactly from the legs alone. The entry city is reached by a zero-distance
leg, i.e. only its local transfer time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from itinerary.dataset import Attraction, Dataset
from itinerary.errors import EmptyCandidateSet, InvalidParameter, TooManyCities
from itinerary.geo import TravelRates, rail_leg

MAX_EXHAUSTIVE_CITIES = 8


@dataclass(frozen=True)
class PlannerConfig:
    total_budget: float = 144.0
    day_start: float = 8.0
    day_end: float = 20.0
    rates: TravelRates = field(default_factory=TravelRates)
    attractions_per_city: int = 1
    multi_start_k: int = 1

    def __post_init__(self) -> None:
        if not self.total_budget > 0:
            raise InvalidParameter(f"total_budget must be > 0, got {self.total_budget}")
        if not 0.0 <= self.day_start < self.day_end <= 24.0:
            raise InvalidParameter(
                f"need 0 <= day_start < day_end <= 24, got {self.day_start}, {self.day_end}"
            )
        if self.attractions_per_city < 1:
            raise InvalidParameter("attractions_per_city must be >= 1")
        if self.multi_start_k < 1:
            raise InvalidParameter("multi_start_k must be >= 1")


@dataclass(frozen=True)
class Clock:
    elapsed: float
    day_start: float = 8.0

    @property
    def absolute(self) -> float:
        return self.day_start + self.elapsed

    @property
    def day(self) -> int:
        return int(self.absolute // 24.0)

    @property
    def time_of_day(self) -> float:
        return self.absolute % 24.0


@dataclass(frozen=True)
class Visit:
    attraction: Attraction
    start: float  # elapsed hours

    @property
    def end(self) -> float:
        return self.start + self.attraction.visit_duration


@dataclass(frozen=True)
class Leg:
    from_city: str
    to_city: str
    depart: float
    travel_hours: float
    rest_hours: float
    visits: tuple[Visit, ...]
    rail_cost: float

    @property
    def arrival(self) -> float:
        return self.depart + self.travel_hours

    @property
    def attraction_ids(self) -> tuple[str, ...]:
        return tuple(v.attraction.id for v in self.visits)

    @property
    def visit_hours(self) -> float:
        return sum(v.attraction.visit_duration for v in self.visits)

    @property
    def ticket_cost(self) -> float:
        return sum(v.attraction.ticket_price for v in self.visits)

    @property
    def leg_cost(self) -> float:
        return self.rail_cost + self.ticket_cost

    @property
    def rating_sum(self) -> float:
        return sum(v.attraction.rating for v in self.visits)

    @property
    def hours(self) -> float:
        return self.travel_hours + self.rest_hours + self.visit_hours


@dataclass(frozen=True)
class ItineraryPlan:
    entry_city: str
    legs: tuple[Leg, ...] = ()

    @property
    def visited_cities(self) -> tuple[str, ...]:
        if not self.legs:
            return (self.entry_city,)
        return tuple(leg.to_city for leg in self.legs)

    @property
    def visited_attractions(self) -> tuple[Attraction, ...]:
        return tuple(v.attraction for leg in self.legs for v in leg.visits)

    @property
    def total_hours(self) -> float:
        return sum(leg.hours for leg in self.legs)

    @property
    def total_cost(self) -> float:
        return sum(leg.leg_cost for leg in self.legs)

    @property
    def attraction_count(self) -> int:
        return sum(len(leg.visits) for leg in self.legs)

    @property
    def rating_sum(self) -> float:
        return sum(leg.rating_sum for leg in self.legs)


def objective_key(plan: ItineraryPlan) -> tuple:
    """Smaller is better: most attractions, then cheapest, best rated, lexicographic."""
    return (-plan.attraction_count, plan.total_cost, -plan.rating_sum, plan.visited_cities)


@dataclass(frozen=True)
class Selection:
    visits: tuple[Visit, ...]
    visit_hours: float
    rest_hours: float
    ticket_cost: float


def visit_window(attraction: Attraction, cfg: PlannerConfig) -> tuple[float, float]:
    """Hour-of-day interval in which a visit to ``attraction`` may take place."""
    return max(attraction.open_hour, cfg.day_start), min(attraction.close_hour, cfg.day_end)


def earliest_start(attraction: Attraction, cursor: float, cfg: PlannerConfig) -> float | None:
    """Elapsed time of the earliest legal visit start at or after ``cursor``.

    ``None`` if the attraction's window is shorter than its visit duration.
    """
    lo, hi = visit_window(attraction, cfg)
    dur = attraction.visit_duration
    if hi - lo < dur:
        return None
    now = cfg.day_start + cursor
    day = math.floor(now / 24.0)
    s = max(now, 24.0 * day + lo)
    if s + dur > 24.0 * day + hi:
        s = 24.0 * (day + 1) + lo
    return cursor + (s - now)


def pick_attractions(
    attractions: Sequence[Attraction],
    clock: Clock,
    cfg: PlannerConfig,
    travel_hours: float = 0.0,
) -> Selection:
    """Choose what to see in a city reached ``travel_hours`` after ``clock``.

    Candidates are tried best-rated first (cheaper, then id, on ties); any
    that cannot be fitted inside its opening window before the budget runs
    out is skipped. At most ``cfg.attractions_per_city`` are taken.
    """
    ranked = sorted(attractions, key=lambda a: (-a.rating, a.ticket_price, a.id))
    cursor = clock.elapsed + travel_hours
    visits: list[Visit] = []
    rest = 0.0
    spent = 0.0
    tickets = 0.0
    for a in ranked:
        if len(visits) >= cfg.attractions_per_city:
            break
        start = earliest_start(a, cursor, cfg)
        if start is None:
            continue
        gap = start - cursor
        new_rest = rest + gap
        new_spent = spent + a.visit_duration
        if clock.elapsed + (travel_hours + new_rest + new_spent) > cfg.total_budget:
            continue
        visits.append(Visit(a, start))
        rest, spent = new_rest, new_spent
        tickets = tickets + a.ticket_price
        cursor = start + a.visit_duration
    return Selection(tuple(visits), spent, rest, tickets)


def _best_attraction_key(attractions: Sequence[Attraction], city_id: str) -> tuple:
    top = min(attractions, key=lambda a: (-a.rating, a.ticket_price))
    return (-top.rating, top.ticket_price, city_id)


def _ranked_entries(dataset: Dataset, candidates: Sequence[str]) -> list[str]:
    return sorted(
        candidates, key=lambda cid: _best_attraction_key(dataset.attractions_in(cid), cid)
    )


def select_entry_city(attractions: Iterable[Attraction], candidate_cities: Iterable[str]) -> str:
    """City holding the best-rated attraction (cheaper, then lower city id, on ties)."""
    candidates = set(candidate_cities)
    if not candidates:
        raise EmptyCandidateSet("no candidate cities")
    best: tuple | None = None
    for a in attractions:
        if a.city_id in candidates:
            key = (-a.rating, a.ticket_price, a.city_id)
            if best is None or key < best:
                best = key
    if best is None:
        raise EmptyCandidateSet("no candidate city has an attraction")
    return best[2]


def _usable_candidates(dataset: Dataset, candidate_cities: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for cid in candidate_cities:
        if cid in seen:
            continue
        seen.add(cid)
        if cid in dataset and dataset.attractions_in(cid):
            out.append(cid)
    if not out:
        raise EmptyCandidateSet("no candidate city with attractions")
    return out


def _make_leg(
    dataset: Dataset,
    src: str,
    dst: str,
    elapsed: float,
    cfg: PlannerConfig,
    rail: dict | None = None,
) -> Leg | None:
    if rail is not None and (src, dst) in rail:
        travel, rail_cost = rail[src, dst]
    else:
        travel, rail_cost = rail_leg(
            dataset.city(src).location, dataset.city(dst).location, cfg.rates
        )
        if rail is not None:
            rail[src, dst] = travel, rail_cost
    if elapsed + travel > cfg.total_budget:
        return None
    sel = pick_attractions(dataset.attractions_in(dst), Clock(elapsed, cfg.day_start), cfg, travel)
    if not sel.visits:
        return None
    leg = Leg(src, dst, elapsed, travel, sel.rest_hours, sel.visits, rail_cost)
    if elapsed + leg.hours > cfg.total_budget:
        return None
    return leg


def plan_greedy(
    dataset: Dataset,
    candidate_cities: Iterable[str],
    cfg: PlannerConfig | None = None,
    entry: str | None = None,
) -> ItineraryPlan:
    """Cheapest-next-city tour from the entry city until nothing else fits.

    ``entry`` overrides the default entry city (the one holding the
    best-rated attraction).
    """
    cfg = cfg or PlannerConfig()
    cands = _usable_candidates(dataset, candidate_cities)
    if entry is None:
        entry = select_entry_city(dataset.attractions, cands)
    elif entry not in cands:
        raise EmptyCandidateSet(f"entry city {entry!r} is not a usable candidate")

    first = _make_leg(dataset, entry, entry, 0.0, cfg)
    if first is None:
        return ItineraryPlan(entry, ())
    legs = [first]
    total = 0.0 + first.hours
    visited = {entry}
    current = entry
    while True:
        best: tuple | None = None
        for cid in cands:
            if cid in visited:
                continue
            leg = _make_leg(dataset, current, cid, total, cfg)
            if leg is None:
                continue
            key = (leg.leg_cost, -leg.rating_sum, cid)
            if best is None or key < best[0]:
                best = (key, leg)
        if best is None:
            break
        leg = best[1]
        legs.append(leg)
        total = total + leg.hours
        visited.add(leg.to_city)
        current = leg.to_city
    return ItineraryPlan(entry, tuple(legs))


def plan_multistart(
    dataset: Dataset,
    candidate_cities: Iterable[str],
    cfg: PlannerConfig | None = None,
    workers: int | None = None,
) -> ItineraryPlan:
    """Run the greedy planner from the ``cfg.multi_start_k`` best entry cities.

    Entry cities are ranked by their best attraction. The winner is picked by
    ``objective_key``, a total order, so ``workers`` never changes the result.
    """
    cfg = cfg or PlannerConfig()
    cands = _usable_candidates(dataset, candidate_cities)
    entries = _ranked_entries(dataset, cands)[: cfg.multi_start_k]

    def run(entry: str) -> ItineraryPlan:
        return plan_greedy(dataset, cands, cfg, entry=entry)

    if workers and workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            plans = list(pool.map(run, entries))
    else:
        plans = [run(e) for e in entries]
    return min(plans, key=objective_key)


def iter_feasible_routes(
    dataset: Dataset, candidate_cities: Iterable[str], cfg: PlannerConfig | None = None
) -> Iterator[tuple[Leg, ...]]:
    """Yield the legs of every feasible ordered subset of candidate cities.

    A route is feasible when each of its legs fits in the budget and visits
    at least one attraction, using the same leg model as the greedy planner.
    """
    cfg = cfg or PlannerConfig()
    cands = sorted(_usable_candidates(dataset, candidate_cities))

    def extend(current: str, total: float, legs: list[Leg], visited: set[str]):
        yield tuple(legs)
        for cid in cands:
            if cid in visited:
                continue
            leg = _make_leg(dataset, current, cid, total, cfg)
            if leg is None:
                continue
            legs.append(leg)
            visited.add(cid)
            yield from extend(cid, total + leg.hours, legs, visited)
            visited.discard(cid)
            legs.pop()

    for entry in cands:
        first = _make_leg(dataset, entry, entry, 0.0, cfg)
        if first is None:
            continue
        yield from extend(entry, 0.0 + first.hours, [first], {entry})


def plan_exhaustive(
    dataset: Dataset, candidate_cities: Iterable[str], cfg: PlannerConfig | None = None
) -> ItineraryPlan:
    """Objective-optimal plan by enumerating every ordered subset of cities.

    Same search tree as ``iter_feasible_routes``; objective totals are carried
    down the tree with the same left-to-right sums the plan properties use.
    """
    cfg = cfg or PlannerConfig()
    cands = sorted(_usable_candidates(dataset, candidate_cities))
    if len(cands) > MAX_EXHAUSTIVE_CITIES:
        raise TooManyCities(
            f"exhaustive search limited to {MAX_EXHAUSTIVE_CITIES} cities, got {len(cands)}"
        )
    best_key: tuple | None = None
    best_legs: tuple[Leg, ...] = ()
    rail: dict = {}

    def extend(current, total, legs, visited, count, cost, rating):
        nonlocal best_key, best_legs
        head = (-count, cost, -rating)
        if best_key is None or head <= best_key[:3]:
            key = head + (tuple(leg.to_city for leg in legs),)
            if best_key is None or key < best_key:
                best_key, best_legs = key, tuple(legs)
        for cid in cands:
            if cid in visited:
                continue
            leg = _make_leg(dataset, current, cid, total, cfg, rail)
            if leg is None:
                continue
            legs.append(leg)
            visited.add(cid)
            extend(
                cid,
                total + leg.hours,
                legs,
                visited,
                count + len(leg.visits),
                cost + leg.leg_cost,
                rating + leg.rating_sum,
            )
            visited.discard(cid)
            legs.pop()

    for entry in cands:
        first = _make_leg(dataset, entry, entry, 0.0, cfg)
        if first is None:
            continue
        extend(
            entry,
            0.0 + first.hours,
            [first],
            {entry},
            len(first.visits),
            0 + first.leg_cost,
            0 + first.rating_sum,
        )
    if best_key is None:
        # nothing fits anywhere: every entry-only plan ties, the smallest id wins
        return ItineraryPlan(cands[0], ())
    return ItineraryPlan(best_legs[0].to_city, best_legs)
