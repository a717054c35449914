"""Serialization of scores and plans, plus the plan self-consistency check."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

from itinerary.dataset import Dataset
from itinerary.geo import rail_leg
from itinerary.mcda import CityScore
from itinerary.planner import ItineraryPlan, PlannerConfig, earliest_start, visit_window

SCORE_COLUMNS = ("city_id", "score", "method", "rank", "kmo")
PLAN_KEYS = ("entry_city", "legs", "total_hours", "total_cost", "attraction_count", "visited_cities")
LEG_KEYS = ("from", "to", "travel_hours", "rest_hours", "attractions", "leg_cost")
ATTRACTION_KEYS = ("id", "name", "rating", "ticket_price", "visit_hours")

TOL = 1e-9


def write_scores(path, scores: Sequence[CityScore], kmo: float) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCORE_COLUMNS)
        for s in scores:
            w.writerow([s.city_id, repr(s.score), s.method, s.rank, repr(float(kmo))])


def read_score_city_ids(path) -> list[str]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    rows.sort(key=lambda r: int(r["rank"]))
    return [r["city_id"] for r in rows]


def plan_to_dict(plan: ItineraryPlan) -> dict[str, Any]:
    legs = []
    for leg in plan.legs:
        legs.append(
            {
                "from": leg.from_city,
                "to": leg.to_city,
                "travel_hours": leg.travel_hours,
                "rest_hours": leg.rest_hours,
                "attractions": [
                    {
                        "id": v.attraction.id,
                        "name": v.attraction.name,
                        "rating": v.attraction.rating,
                        "ticket_price": v.attraction.ticket_price,
                        "visit_hours": v.attraction.visit_duration,
                    }
                    for v in leg.visits
                ],
                "leg_cost": leg.leg_cost,
            }
        )
    return {
        "entry_city": plan.entry_city,
        "legs": legs,
        "total_hours": plan.total_hours,
        "total_cost": plan.total_cost,
        "attraction_count": plan.attraction_count,
        "visited_cities": list(plan.visited_cities),
    }


def plan_to_geojson(plan: ItineraryPlan, dataset: Dataset) -> dict[str, Any]:
    """LineString through the visited cities plus one Point per city.

    The line is omitted for single-city plans, since a LineString needs two
    positions.
    """
    arrivals = {leg.to_city: leg.arrival for leg in plan.legs}
    features = []
    coords = []
    for order, cid in enumerate(plan.visited_cities):
        loc = dataset.city(cid).location
        coords.append([loc.lon, loc.lat])
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [loc.lon, loc.lat]},
                "properties": {
                    "city_id": cid,
                    "name": dataset.city(cid).name,
                    "order": order,
                    "arrival_elapsed_hours": arrivals.get(cid, 0.0),
                },
            }
        )
    if len(coords) >= 2:
        line = {
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": coords},
            "properties": {"route": list(plan.visited_cities)},
        }
        features.insert(0, line)
    return {"type": "FeatureCollection", "features": features}


def dump_json(path, doc: Any) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def verify_plan(doc: dict, dataset: Dataset | None = None, cfg: PlannerConfig | None = None) -> list[str]:
    """Re-derive a serialized plan's totals from its legs and check invariants.

    With ``dataset`` the rail legs and fares are recomputed from coordinates
    and every visit is replayed against its opening window. Returns a list of
    problems; empty means the plan is consistent.
    """
    cfg = cfg or PlannerConfig()
    problems: list[str] = []
    if tuple(sorted(doc)) != tuple(sorted(PLAN_KEYS)):
        return [f"plan keys {sorted(doc)} != {sorted(PLAN_KEYS)}"]
    legs = doc["legs"]
    for i, leg in enumerate(legs):
        if tuple(sorted(leg)) != tuple(sorted(LEG_KEYS)):
            problems.append(f"leg {i}: keys {sorted(leg)}")
            return problems
        for a in leg["attractions"]:
            if tuple(sorted(a)) != tuple(sorted(ATTRACTION_KEYS)):
                problems.append(f"leg {i}: attraction keys {sorted(a)}")
                return problems

    leg_hours = [
        leg["travel_hours"] + leg["rest_hours"] + sum(a["visit_hours"] for a in leg["attractions"])
        for leg in legs
    ]
    if doc["total_hours"] != sum(leg_hours):
        problems.append(f"total_hours {doc['total_hours']} != sum of legs {sum(leg_hours)}")
    cost = sum(leg["leg_cost"] for leg in legs)
    if doc["total_cost"] != cost:
        problems.append(f"total_cost {doc['total_cost']} != sum of legs {cost}")
    count = sum(len(leg["attractions"]) for leg in legs)
    if doc["attraction_count"] != count:
        problems.append(f"attraction_count {doc['attraction_count']} != {count}")
    route = [leg["to"] for leg in legs] if legs else [doc["entry_city"]]
    if doc["visited_cities"] != route:
        problems.append(f"visited_cities {doc['visited_cities']} != leg destinations {route}")
    if len(set(route)) != len(route):
        problems.append("a city is visited twice")
    if legs and (legs[0]["from"] != doc["entry_city"] or legs[0]["to"] != doc["entry_city"]):
        problems.append("first leg does not arrive at the entry city")
    for i in range(1, len(legs)):
        if legs[i]["from"] != legs[i - 1]["to"]:
            problems.append(f"leg {i} departs from {legs[i]['from']}, not {legs[i - 1]['to']}")
    if doc["total_hours"] > cfg.total_budget:
        problems.append(f"total_hours {doc['total_hours']} exceeds budget {cfg.total_budget}")
    for i, leg in enumerate(legs):
        for key in ("travel_hours", "rest_hours", "leg_cost"):
            if leg[key] < 0:
                problems.append(f"leg {i}: negative {key}")
        if not leg["attractions"]:
            problems.append(f"leg {i}: no attraction visited")

    if dataset is None:
        return problems

    by_id = {a.id: a for a in dataset.attractions}
    depart = 0.0
    for i, leg in enumerate(legs):
        if leg["from"] not in dataset or leg["to"] not in dataset:
            problems.append(f"leg {i}: unknown city")
            return problems
        hours, rail_cost = rail_leg(
            dataset.city(leg["from"]).location, dataset.city(leg["to"]).location, cfg.rates
        )
        if leg["travel_hours"] != hours:
            problems.append(f"leg {i}: travel_hours {leg['travel_hours']} != {hours}")
        tickets = sum(a["ticket_price"] for a in leg["attractions"])
        if leg["leg_cost"] != rail_cost + tickets:
            problems.append(f"leg {i}: leg_cost {leg['leg_cost']} != rail + tickets")
        cursor = depart + leg["travel_hours"]
        rest = 0.0
        for entry in leg["attractions"]:
            a = by_id.get(entry["id"])
            if a is None or a.city_id != leg["to"]:
                problems.append(f"leg {i}: attraction {entry['id']} not in {leg['to']}")
                continue
            if (entry["rating"], entry["ticket_price"], entry["visit_hours"]) != (
                a.rating,
                a.ticket_price,
                a.visit_duration,
            ):
                problems.append(f"leg {i}: attraction {a.id} fields differ from dataset")
            start = earliest_start(a, cursor, cfg)
            if start is None:
                problems.append(f"leg {i}: attraction {a.id} can never fit its window")
                continue
            lo, hi = visit_window(a, cfg)
            absolute = cfg.day_start + start
            day = absolute // 24.0
            tod = absolute - 24.0 * day
            if tod < lo - TOL or tod + a.visit_duration > hi + TOL:
                problems.append(f"leg {i}: visit to {a.id} at hour {tod:.3f} outside [{lo}, {hi}]")
            rest = rest + (start - cursor)
            cursor = start + a.visit_duration
        if abs(rest - leg["rest_hours"]) > TOL:
            problems.append(f"leg {i}: rest_hours {leg['rest_hours']} != replayed {rest}")
        depart = depart + leg_hours[i]
    return problems
