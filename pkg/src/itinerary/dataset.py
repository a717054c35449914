"""Data model, CSV ingestion/export and the seeded synthetic generator.

Files are UTF-8, comma separated, with a fixed header row:

* ``cities.csv``       ``id,name,lat,lon``
* ``attractions.csv``  ``id,city_id,name,rating,ticket_price,visit_duration_h,open_hour,close_hour``
  (``address`` and ``description`` columns are accepted and ignored)
* ``indicators.csv``   ``city_id,<criterion_1>,...,<criterion_k>``
* ``criteria.csv``     ``name,orientation`` with orientation ``benefit`` or ``cost``
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from itinerary.errors import InvalidParameter, MissingFile, RowError, SchemaError, UnknownCity

CITY_COLUMNS = ("id", "name", "lat", "lon")
ATTRACTION_COLUMNS = (
    "id",
    "city_id",
    "name",
    "rating",
    "ticket_price",
    "visit_duration_h",
    "open_hour",
    "close_hour",
)
IGNORED_ATTRACTION_COLUMNS = ("address", "description")
CRITERIA_COLUMNS = ("name", "orientation")
ORIENTATIONS = ("benefit", "cost")

# mainland-China-like bounding box for synthetic coordinates
LAT_RANGE = (18.0, 54.0)
LON_RANGE = (73.0, 135.0)

BASE_CRITERIA = (
    "city_size",
    "ecology",
    "culture_history",
    "accessibility",
    "climate",
    "cuisine",
)


def _normalize_lon(lon: float) -> float:
    lon = math.fmod(lon, 360.0)
    if lon > 180.0:
        lon -= 360.0
    elif lon <= -180.0:
        lon += 360.0
    return lon


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude in degrees; longitude is folded into (-180, 180]."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        lat, lon = float(self.lat), float(self.lon)
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise ValueError(f"non-finite coordinate ({lat}, {lon})")
        if not -90.0 <= lat <= 90.0:
            raise ValueError(f"latitude {lat} outside [-90, 90]")
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", _normalize_lon(lon))


@dataclass(frozen=True)
class City:
    id: str
    name: str
    location: GeoPoint

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("empty city id")
        if not self.name.strip():
            raise ValueError("empty city name")


@dataclass(frozen=True)
class Attraction:
    id: str
    city_id: str
    name: str
    rating: float
    ticket_price: float
    visit_duration: float
    open_hour: float
    close_hour: float

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("empty attraction id")
        for name in ("rating", "ticket_price", "visit_duration", "open_hour", "close_hour"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} is not finite")
            object.__setattr__(self, name, value)
        if not 0.0 <= self.rating <= 5.0:
            raise ValueError(f"rating {self.rating} outside [0, 5]")
        if self.ticket_price < 0:
            raise ValueError(f"negative ticket_price {self.ticket_price}")
        if self.visit_duration <= 0:
            raise ValueError(f"visit_duration {self.visit_duration} must be > 0")
        if not 0.0 <= self.open_hour < 24.0:
            raise ValueError(f"open_hour {self.open_hour} outside [0, 24)")
        if not self.open_hour < self.close_hour <= 24.0:
            raise ValueError(
                f"close_hour {self.close_hour} must be in (open_hour={self.open_hour}, 24]"
            )


@dataclass(frozen=True)
class Criterion:
    name: str
    orientation: str = "benefit"

    def __post_init__(self) -> None:
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {self.orientation!r}")

    @property
    def is_benefit(self) -> bool:
        return self.orientation == "benefit"


@dataclass(frozen=True, eq=False)
class IndicatorMatrix:
    """Cities (rows) by evaluation criteria (columns)."""

    city_ids: tuple[str, ...]
    criteria: tuple[Criterion, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float, copy=True)
        if values.size == 0:
            values = values.reshape(len(self.city_ids), len(self.criteria))
        if values.ndim != 2:
            raise ValueError("indicator values must be a 2-D matrix")
        if values.shape != (len(self.city_ids), len(self.criteria)):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"{len(self.city_ids)} cities x {len(self.criteria)} criteria"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("indicator values must be finite")
        if len(set(self.city_ids)) != len(self.city_ids):
            raise ValueError("duplicate city id in indicator matrix")
        values.setflags(write=False)
        object.__setattr__(self, "city_ids", tuple(self.city_ids))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_rows(
        cls,
        city_ids: Sequence[str],
        values,
        names: Sequence[str] | None = None,
        orientations: Sequence[str] | None = None,
    ) -> "IndicatorMatrix":
        values = np.asarray(values, dtype=float)
        k = values.shape[1] if values.ndim == 2 else 0
        names = list(names) if names is not None else [f"c{j + 1}" for j in range(k)]
        orientations = list(orientations) if orientations is not None else ["benefit"] * len(names)
        criteria = tuple(Criterion(n, o) for n, o in zip(names, orientations))
        return cls(tuple(city_ids), criteria, values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.criteria)

    @property
    def benefit_mask(self) -> np.ndarray:
        return np.array([c.is_benefit for c in self.criteria], dtype=bool)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndicatorMatrix):
            return NotImplemented
        return (
            self.city_ids == other.city_ids
            and self.criteria == other.criteria
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def _attraction_order(a: Attraction) -> tuple:
    return (-a.rating, a.ticket_price, a.id)


@dataclass(frozen=True)
class Dataset:
    """Cities plus their attractions, with lookup helpers used by the planner."""

    cities: tuple[City, ...]
    attractions: tuple[Attraction, ...] = ()
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cities", tuple(self.cities))
        object.__setattr__(self, "attractions", tuple(self.attractions))
        by_id = {}
        for c in self.cities:
            if c.id in by_id:
                raise ValueError(f"duplicate city id {c.id!r}")
            by_id[c.id] = c
        for a in self.attractions:
            if a.city_id not in by_id:
                raise ValueError(f"attraction {a.id!r} references unknown city {a.city_id!r}")
        object.__setattr__(self, "_by_id", by_id)

    def city(self, city_id: str) -> City:
        return self._by_id[city_id]

    def __contains__(self, city_id: object) -> bool:
        return city_id in self._by_id

    @cached_property
    def ranked_attractions(self) -> dict[str, tuple[Attraction, ...]]:
        """Attractions per city ordered by rating desc, price asc, id asc."""
        grouped: dict[str, list[Attraction]] = {c.id: [] for c in self.cities}
        for a in self.attractions:
            grouped[a.city_id].append(a)
        return {cid: tuple(sorted(items, key=_attraction_order)) for cid, items in grouped.items()}

    def attractions_in(self, city_id: str) -> tuple[Attraction, ...]:
        return self.ranked_attractions.get(city_id, ())


# ---------------------------------------------------------------------------
# CSV reading


def _open_rows(path, required: Sequence[str], allowed_extra: Iterable[str] | None = None):
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    fh = path.open(newline="", encoding="utf-8-sig")
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        fh.close()
        raise SchemaError(f"{path}: empty file, expected header {','.join(required)}")
    header = [h.strip() for h in header]
    missing = [c for c in required if c not in header]
    extra = [c for c in header if c not in required]
    if allowed_extra is not None:
        extra = [c for c in extra if c not in set(allowed_extra)]
    else:
        extra = []
    if missing or extra or len(set(header)) != len(header):
        fh.close()
        raise SchemaError(
            f"{path}: header {','.join(header)!r} does not match {','.join(required)!r}"
        )
    return path, fh, reader, header


def _iter_records(path, reader, header):
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise RowError(path, reader.line_num, f"expected {len(header)} fields, got {len(row)}")
        yield reader.line_num, dict(zip(header, (cell.strip() for cell in row)))


def _number(path, line: int, rec: dict, key: str) -> float:
    text = rec[key]
    if text == "":
        raise RowError(path, line, f"missing value for {key}")
    try:
        value = float(text)
    except ValueError:
        raise RowError(path, line, f"{key}={text!r} is not a number") from None
    if not math.isfinite(value):
        raise RowError(path, line, f"{key}={text!r} is not finite")
    return value


def load_cities(path) -> list[City]:
    path, fh, reader, header = _open_rows(path, CITY_COLUMNS)
    cities: list[City] = []
    seen: set[str] = set()
    with fh:
        for line, rec in _iter_records(path, reader, header):
            lat = _number(path, line, rec, "lat")
            lon = _number(path, line, rec, "lon")
            if rec["id"] in seen:
                raise RowError(path, line, f"duplicate city id {rec['id']!r}")
            try:
                city = City(rec["id"], rec["name"], GeoPoint(lat, lon))
            except ValueError as exc:
                raise RowError(path, line, str(exc)) from None
            seen.add(city.id)
            cities.append(city)
    return cities


def load_attractions(path, cities: Iterable[City]) -> list[Attraction]:
    known = {c.id for c in cities}
    path, fh, reader, header = _open_rows(path, ATTRACTION_COLUMNS, IGNORED_ATTRACTION_COLUMNS)
    out: list[Attraction] = []
    seen: set[str] = set()
    with fh:
        for line, rec in _iter_records(path, reader, header):
            if rec["city_id"] not in known:
                raise UnknownCity(path, line, rec["city_id"])
            if rec["id"] in seen:
                raise RowError(path, line, f"duplicate attraction id {rec['id']!r}")
            nums = {
                k: _number(path, line, rec, k)
                for k in ("rating", "ticket_price", "visit_duration_h", "open_hour", "close_hour")
            }
            try:
                attraction = Attraction(
                    id=rec["id"],
                    city_id=rec["city_id"],
                    name=rec["name"],
                    rating=nums["rating"],
                    ticket_price=nums["ticket_price"],
                    visit_duration=nums["visit_duration_h"],
                    open_hour=nums["open_hour"],
                    close_hour=nums["close_hour"],
                )
            except ValueError as exc:
                raise RowError(path, line, str(exc)) from None
            seen.add(attraction.id)
            out.append(attraction)
    return out


def load_criteria(path) -> list[Criterion]:
    path, fh, reader, header = _open_rows(path, CRITERIA_COLUMNS)
    out: list[Criterion] = []
    with fh:
        for line, rec in _iter_records(path, reader, header):
            try:
                out.append(Criterion(rec["name"], rec["orientation"]))
            except ValueError as exc:
                raise RowError(path, line, str(exc)) from None
    return out


def load_indicators(indicators_path, criteria_path) -> IndicatorMatrix:
    """Read the indicator table and attach orientations from the criteria file.

    Column order follows ``indicators.csv``. Empty cells are an error; nothing
    is imputed.
    """
    criteria = load_criteria(criteria_path)
    orientation = {c.name: c for c in criteria}
    if len(orientation) != len(criteria):
        raise SchemaError(f"{criteria_path}: duplicate criterion name")

    indicators_path = Path(indicators_path)
    if not indicators_path.is_file():
        raise MissingFile(indicators_path)
    with indicators_path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{indicators_path}: empty file") from None
        if not header or header[0] != "city_id":
            raise SchemaError(f"{indicators_path}: first column must be city_id")
        names = header[1:]
        if sorted(names) != sorted(orientation) or len(set(names)) != len(names):
            raise SchemaError(
                f"{indicators_path}: criterion columns {names} do not match {criteria_path}"
            )
        city_ids: list[str] = []
        rows: list[list[float]] = []
        for line, rec in _iter_records(indicators_path, reader, header):
            if rec["city_id"] in city_ids:
                raise RowError(indicators_path, line, f"duplicate city_id {rec['city_id']!r}")
            city_ids.append(rec["city_id"])
            rows.append([_number(indicators_path, line, rec, n) for n in names])
    values = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return IndicatorMatrix(tuple(city_ids), tuple(orientation[n] for n in names), values)


# ---------------------------------------------------------------------------
# CSV writing


def _fmt(x: float) -> str:
    return repr(float(x))


def write_cities(path, cities: Iterable[City]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CITY_COLUMNS)
        for c in cities:
            w.writerow([c.id, c.name, _fmt(c.location.lat), _fmt(c.location.lon)])


def write_attractions(path, attractions: Iterable[Attraction]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ATTRACTION_COLUMNS)
        for a in attractions:
            w.writerow(
                [
                    a.id,
                    a.city_id,
                    a.name,
                    _fmt(a.rating),
                    _fmt(a.ticket_price),
                    _fmt(a.visit_duration),
                    _fmt(a.open_hour),
                    _fmt(a.close_hour),
                ]
            )


def write_indicators(indicators_path, criteria_path, matrix: IndicatorMatrix) -> None:
    with Path(indicators_path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["city_id", *matrix.names])
        for cid, row in zip(matrix.city_ids, matrix.values):
            w.writerow([cid, *(_fmt(v) for v in row)])
    with Path(criteria_path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CRITERIA_COLUMNS)
        for c in matrix.criteria:
            w.writerow([c.name, c.orientation])


# ---------------------------------------------------------------------------
# Synthetic data


def criterion_names(n_criteria: int) -> list[Criterion]:
    """The six named evaluation dimensions, then ``criterion_7``... as needed.

    Extra criteria alternate benefit/cost so both orientations get exercised.
    """
    out = [Criterion(name) for name in BASE_CRITERIA[:n_criteria]]
    for j in range(len(out) + 1, n_criteria + 1):
        out.append(Criterion(f"criterion_{j}", "cost" if j % 2 == 0 else "benefit"))
    return out


def generate_synthetic(
    seed: int, n_cities: int, attractions_per_city: int, n_criteria: int
) -> tuple[list[City], list[Attraction], IndicatorMatrix]:
    """Build a reproducible dataset with the same schema as the loaders.

    The only randomness source is MT19937 (``random.Random(seed)``) and only
    its ``random()`` double stream is consumed, so the output is identical on
    every platform and Python version. Draw order: all cities (lat, lon), then
    attractions city by city (rating, price, duration, open, close), then the
    indicator matrix row by row (one shared factor per city plus one noise
    term per cell). Values are rounded so that CSV files stay readable.

    Indicators follow a one-factor model, ``x = 50 + 20 * (load_j * f + noise)``,
    with loadings drawn in [0.2, 0.9]; cost-oriented columns are mirrored.
    A column that comes out constant is redrawn (only possible to avoid when
    there are at least two cities).
    """
    if n_cities < 1 or attractions_per_city < 1:
        raise InvalidParameter("n_cities and attractions_per_city must be >= 1")
    if n_criteria < 2:
        raise InvalidParameter(f"n_criteria must be >= 2, got {n_criteria}")

    rng = random.Random(int(seed))
    u = rng.random

    def normal() -> float:
        # Box-Muller on the raw double stream
        u1 = 1.0 - u()
        u2 = u()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    width = max(3, len(str(n_cities)))
    cities: list[City] = []
    for i in range(n_cities):
        lat = round(LAT_RANGE[0] + (LAT_RANGE[1] - LAT_RANGE[0]) * u(), 4)
        lon = round(LON_RANGE[0] + (LON_RANGE[1] - LON_RANGE[0]) * u(), 4)
        num = str(i + 1).zfill(width)
        cities.append(City(f"c{num}", f"City {num}", GeoPoint(lat, lon)))

    a_width = max(3, len(str(attractions_per_city)))
    attractions: list[Attraction] = []
    for city in cities:
        for k in range(attractions_per_city):
            rating = round(3.0 + 2.0 * u(), 1)
            price = float(round(300.0 * u()))
            duration = 0.5 * (1 + int(8 * u()))  # 0.5 .. 4.0 h
            open_hour = float(6 + int(5 * u()))  # 6 .. 10
            close_hour = float(16 + int(7 * u()))  # 16 .. 22
            anum = str(k + 1).zfill(a_width)
            attractions.append(
                Attraction(
                    id=f"{city.id}-a{anum}",
                    city_id=city.id,
                    name=f"Scenic Spot {anum} of {city.name}",
                    rating=rating,
                    ticket_price=price,
                    visit_duration=duration,
                    open_hour=open_hour,
                    close_hour=close_hour,
                )
            )

    criteria = criterion_names(n_criteria)
    loadings = [0.2 + 0.7 * u() for _ in criteria]
    values = np.empty((n_cities, n_criteria))
    for i in range(n_cities):
        f = normal()
        for j, crit in enumerate(criteria):
            x = loadings[j] * f + normal()
            x = -x if not crit.is_benefit else x
            values[i, j] = round(50.0 + 20.0 * x, 4)
    if n_cities >= 2:
        for j in range(n_criteria):
            while np.ptp(values[:, j]) == 0.0:
                for i in range(n_cities):
                    values[i, j] = round(50.0 + 20.0 * normal(), 4)

    matrix = IndicatorMatrix(tuple(c.id for c in cities), tuple(criteria), values)
    return cities, attractions, matrix
