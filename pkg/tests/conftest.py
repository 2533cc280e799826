import io

import numpy as np
import pytest

from hoopstat.ingest import Dataset, RegionCounts, parse_aggregates
from hoopstat.regions import N_REGIONS, REGION_CODES
from hoopstat.sampler import Counts, Priors


def region_counts(entity_id, season, attempts=None, makes=None, **per_region):
    """Build a RegionCounts from either full vectors or region keyword pairs.

    Keyword form: ``region_counts("BKN", 2021, ATB=(10, 4), FT=(5, 5))``
    where each value is (attempts, makes).
    """
    if attempts is None:
        attempts = np.zeros(N_REGIONS, dtype=np.int64)
        makes = np.zeros(N_REGIONS, dtype=np.int64)
        for code, (a, m) in per_region.items():
            k = REGION_CODES.index(code)
            attempts[k] = a
            makes[k] = m
    return RegionCounts(entity_id=entity_id, season=season, attempts=attempts, makes=makes)


def aggregate_csv(rows):
    """rows: iterable of (entity_id, season, region, attempts, makes)."""
    lines = ["entity_id,season,region,attempts,makes"]
    lines += [",".join(str(x) for x in row) for row in rows]
    return io.StringIO("\n".join(lines) + "\n")


def event_csv(rows):
    lines = ["entity_id,season,region,made"]
    lines += [",".join(str(x) for x in row) for row in rows]
    return io.StringIO("\n".join(lines) + "\n")


@pytest.fixture
def tiny_counts():
    """The enumerable instance: I=3, K=2, attempts {(5,0),(0,5),(5,0)}, no makes."""
    N = np.array([[5, 0], [0, 5], [5, 0]])
    return Counts(attempts=N, makes=np.zeros_like(N))


@pytest.fixture
def tiny_priors():
    return Priors(L=2, J=2, alpha=5.0, beta=5.0, gamma=5.0)


@pytest.fixture
def small_dataset():
    """Five entities, one season, all seven regions populated."""
    rng = np.random.default_rng(20210715)
    rows = []
    for i in range(5):
        attempts = rng.integers(20, 200, size=N_REGIONS)
        makes = rng.binomial(attempts, 0.45)
        rows.append(region_counts(f"T{i:02d}", 2021, attempts=attempts, makes=makes))
    return Dataset(entity_kind="team", rows=rows)


def dataset_from_csv_rows(rows, kind="team"):
    return parse_aggregates(aggregate_csv(rows), kind=kind)
