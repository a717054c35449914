import sys

import pytest

from itinerary.dataset import Attraction, City, Dataset, GeoPoint


def make_attraction(aid, city_id, rating=4.5, price=100.0, duration=2.0, open_hour=0.0, close_hour=24.0):
    return Attraction(aid, city_id, f"Spot {aid}", rating, price, duration, open_hour, close_hour)


def make_dataset(cities, attractions):
    """``cities``: iterable of (id, lat, lon)."""
    return Dataset(
        tuple(City(cid, f"Town {cid}", GeoPoint(lat, lon)) for cid, lat, lon in cities),
        tuple(attractions),
    )


@pytest.fixture
def stranded_dataset():
    """Top-rated city sits far west; three modest cities cluster near Shanghai."""
    return make_dataset(
        [("far", 43.8256, 87.6168), ("sh", 31.2304, 121.4737), ("sz", 31.2989, 120.5853), ("hz", 30.2741, 120.1551)],
        [
            make_attraction("far-1", "far", rating=5.0, price=50.0),
            make_attraction("sh-1", "sh", rating=4.0, price=60.0),
            make_attraction("sz-1", "sz", rating=4.0, price=70.0),
            make_attraction("hz-1", "hz", rating=4.0, price=80.0),
        ],
    )


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
