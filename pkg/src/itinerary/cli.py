"""Command-line entry point: ``itinerary {generate,evaluate,plan,distance}``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags (flags win). Logging verbosity
is read from ``ITINERARY_LOG`` (quiet, info or debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable

from itinerary.dataset import (
    Dataset,
    GeoPoint,
    generate_synthetic,
    load_attractions,
    load_cities,
    load_indicators,
    write_attractions,
    write_cities,
    write_indicators,
)
from itinerary.errors import InvalidParameter, ItineraryError, MissingFile
from itinerary.geo import TravelRates, haversine_km
from itinerary.mcda import DecisionConfig, evaluate_cities, select_top_cities
from itinerary.planner import PlannerConfig, plan_multistart
from itinerary.report import (
    dump_json,
    plan_to_dict,
    plan_to_geojson,
    read_score_city_ids,
    verify_plan,
    write_scores,
)

log = logging.getLogger("itinerary")

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

# key -> (parser, default)
SETTINGS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "data": (str, None),
    "out": (str, "."),
    "cities": (str, None),
    "attractions": (str, None),
    "indicators": (str, None),
    "criteria": (str, None),
    "scores": (str, None),
    "candidates": (str, None),
    "seed": (int, 7),
    "n_cities": (int, 352),
    "attractions_per_city": (int, 100),
    "n_criteria": (int, 6),
    "kmo_threshold": (float, 0.6),
    "pca_variance_target": (float, 0.85),
    "top_n": (int, 50),
    "budget_hours": (float, 144.0),
    "day_start": (float, 8.0),
    "day_end": (float, 20.0),
    "rail_speed": (float, 300.0),
    "rail_cost_rate": (float, 0.5),
    "local_transfer_time": (float, 1.0),
    "visits_per_city": (int, 1),
    "multi_start": (int, 1),
}

FILE_NAMES = {
    "cities": "cities.csv",
    "attractions": "attractions.csv",
    "indicators": "indicators.csv",
    "criteria": "criteria.csv",
}


def read_config(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    out: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise InvalidParameter(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_settings(args: argparse.Namespace) -> dict[str, Any]:
    settings = {key: default for key, (_, default) in SETTINGS.items()}
    if args.config:
        for key, text in read_config(args.config).items():
            try:
                settings[key] = SETTINGS[key][0](text)
            except ValueError:
                raise InvalidParameter(f"config key {key}: bad value {text!r}") from None
    for key in SETTINGS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    data_dir = Path(settings["data"] if settings["data"] is not None else settings["out"])
    for key, name in FILE_NAMES.items():
        if settings[key] is None:
            settings[key] = str(data_dir / name)
    return settings


def decision_config(s: dict[str, Any]) -> DecisionConfig:
    return DecisionConfig(s["kmo_threshold"], s["pca_variance_target"], s["top_n"])


def planner_config(s: dict[str, Any]) -> PlannerConfig:
    try:
        rates = TravelRates(s["rail_speed"], s["rail_cost_rate"], s["local_transfer_time"])
    except ValueError as exc:
        raise InvalidParameter(str(exc)) from None
    return PlannerConfig(
        total_budget=s["budget_hours"],
        day_start=s["day_start"],
        day_end=s["day_end"],
        rates=rates,
        attractions_per_city=s["visits_per_city"],
        multi_start_k=s["multi_start"],
    )


def _out_dir(s: dict[str, Any]) -> Path:
    out = Path(s["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(s: dict[str, Any]) -> int:
    cities, attractions, matrix = generate_synthetic(
        s["seed"], s["n_cities"], s["attractions_per_city"], s["n_criteria"]
    )
    out = _out_dir(s)
    write_cities(out / FILE_NAMES["cities"], cities)
    write_attractions(out / FILE_NAMES["attractions"], attractions)
    write_indicators(out / FILE_NAMES["indicators"], out / FILE_NAMES["criteria"], matrix)
    print(
        f"wrote {len(cities)} cities, {len(attractions)} attractions, "
        f"{len(matrix.criteria)} criteria to {out}"
    )
    return 0


def cmd_evaluate(s: dict[str, Any]) -> int:
    cfg = decision_config(s)
    matrix = load_indicators(s["indicators"], s["criteria"])
    result = evaluate_cities(matrix, cfg)
    top = select_top_cities(result.scores, cfg.top_n)
    out = _out_dir(s)
    path = out / "scores.csv"
    write_scores(path, top, result.kmo)
    print(f"method={result.method} kmo={result.kmo:.3f} cities={len(top)}/{len(result.scores)}")
    log.info("scores written to %s", path)
    return 0


def _candidates(s: dict[str, Any], dataset: Dataset) -> list[str]:
    if s["candidates"]:
        return [c.strip() for c in s["candidates"].split(",") if c.strip()]
    scores = Path(s["scores"]) if s["scores"] else Path(s["out"]) / "scores.csv"
    if scores.is_file():
        log.info("candidate cities from %s", scores)
        return read_score_city_ids(scores)
    if s["scores"]:
        raise MissingFile(scores)
    return [c.id for c in dataset.cities]


def cmd_plan(s: dict[str, Any], verify: bool = False) -> int:
    cfg = planner_config(s)
    cities = load_cities(s["cities"])
    attractions = load_attractions(s["attractions"], cities)
    dataset = Dataset(tuple(cities), tuple(attractions))
    plan = plan_multistart(dataset, _candidates(s, dataset), cfg)

    doc = plan_to_dict(plan)
    out = _out_dir(s)
    dump_json(out / "plan.json", doc)
    dump_json(out / "route.geojson", plan_to_geojson(plan, dataset))

    print("route: " + " -> ".join(plan.visited_cities))
    print("attractions: " + ", ".join(a.name for a in plan.visited_attractions))
    print(f"total_hours: {plan.total_hours:.2f}")
    print(f"total_cost: {plan.total_cost:.2f}")
    print(f"attraction_count: {plan.attraction_count}")

    if verify:
        reloaded = json.loads((out / "plan.json").read_text(encoding="utf-8"))
        problems = verify_plan(reloaded, dataset, cfg)
        if problems:
            for p in problems:
                print(f"verify: {p}", file=sys.stderr)
            return 1
        print("verify: ok")
    return 0


def cmd_distance(args: argparse.Namespace) -> int:
    try:
        a = GeoPoint(args.lat1, args.lon1)
        b = GeoPoint(args.lat2, args.lon2)
    except ValueError as exc:
        raise InvalidParameter(str(exc)) from None
    print(f"{haversine_km(a, b):.6f}")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value settings file")
    p.add_argument("--out", metavar="DIR", help="output directory (default .)")
    p.add_argument("--data", metavar="DIR", help="input directory (default: --out)")
    p.add_argument("--seed", type=int, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="itinerary", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a seeded synthetic dataset")
    _add_common(gen)
    gen.add_argument("--n-cities", dest="n_cities", type=int, metavar="N")
    gen.add_argument("--attractions-per-city", dest="attractions_per_city", type=int, metavar="N")
    gen.add_argument("--n-criteria", dest="n_criteria", type=int, metavar="N")

    ev = sub.add_parser("evaluate", help="score cities and keep the top N")
    _add_common(ev)
    ev.add_argument("--indicators", metavar="PATH")
    ev.add_argument("--criteria", metavar="PATH")
    ev.add_argument("--top-n", dest="top_n", type=int, metavar="N")
    ev.add_argument("--kmo-threshold", dest="kmo_threshold", type=float, metavar="F")
    ev.add_argument("--pca-variance-target", dest="pca_variance_target", type=float, metavar="F")

    pl = sub.add_parser("plan", help="plan an itinerary over the candidate cities")
    _add_common(pl)
    pl.add_argument("--cities", metavar="PATH")
    pl.add_argument("--attractions", metavar="PATH")
    pl.add_argument("--scores", metavar="PATH", help="scores.csv whose cities are the candidates")
    pl.add_argument("--candidates", metavar="IDS", help="comma-separated candidate city ids")
    pl.add_argument("--budget-hours", dest="budget_hours", type=float, metavar="F")
    pl.add_argument("--rail-speed", dest="rail_speed", type=float, metavar="F")
    pl.add_argument("--rail-cost-rate", dest="rail_cost_rate", type=float, metavar="F")
    pl.add_argument("--local-transfer-time", dest="local_transfer_time", type=float, metavar="F")
    pl.add_argument("--day-start", dest="day_start", type=float, metavar="H")
    pl.add_argument("--day-end", dest="day_end", type=float, metavar="H")
    pl.add_argument("--visits-per-city", dest="visits_per_city", type=int, metavar="N")
    pl.add_argument("--multi-start", dest="multi_start", type=int, metavar="K")
    pl.add_argument("--verify", action="store_true", help="re-check plan.json after writing")

    dist = sub.add_parser("distance", help="haversine distance in km between two points")
    for name in ("lat1", "lon1", "lat2", "lon2"):
        dist.add_argument(name, type=float)
    return parser


def _setup_logging() -> None:
    level = LOG_LEVELS.get(os.environ.get("ITINERARY_LOG", "quiet").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "distance":
            return cmd_distance(args)
        settings = resolve_settings(args)
        if args.command == "generate":
            return cmd_generate(settings)
        if args.command == "evaluate":
            return cmd_evaluate(settings)
        return cmd_plan(settings, verify=args.verify)
    except ItineraryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
