"""CSV ingestion of shot data into per-entity region count tables.

Two input schemas are accepted:

* event CSV: ``entity_id,season,region,made`` — one row per shot, made in {0,1}
* aggregate CSV: ``entity_id,season,region,attempts,makes``

Both produce a :class:`Dataset` of :class:`RegionCounts` keyed by
(entity_id, season). Region codes are the seven canonical codes from
:mod:`hoopstat.regions`, case-sensitive.
"""

from __future__ import annotations

import csv
import hashlib
import io
import warnings
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .regions import N_REGIONS, REGION_CODES, Region

EVENT_HEADER = ["entity_id", "season", "region", "made"]
AGGREGATE_HEADER = ["entity_id", "season", "region", "attempts", "makes"]

ENTITY_KINDS = ("team", "player")

_MAX_REPORTED_ERRORS = 20


class IngestError(ValueError):
    """Raised when input data fails schema or invariant validation."""


class TopNWarning(UserWarning):
    """Emitted when a top-n filter asks for more rows than exist."""


@dataclass(frozen=True)
class ShotEvent:
    """A single shot attempt: who, when, where, and whether it went in."""

    entity_id: str
    season: int
    region: Region
    made: bool


@dataclass(eq=False)
class RegionCounts:
    """Attempts and makes across the seven regions for one entity-season."""

    entity_id: str
    season: int
    attempts: np.ndarray
    makes: np.ndarray

    def __post_init__(self) -> None:
        self.attempts = np.asarray(self.attempts, dtype=np.int64)
        self.makes = np.asarray(self.makes, dtype=np.int64)
        if self.attempts.shape != (N_REGIONS,) or self.makes.shape != (N_REGIONS,):
            raise IngestError(
                f"{self.key}: count vectors must have length {N_REGIONS}"
            )
        if (self.attempts < 0).any() or (self.makes < 0).any():
            raise IngestError(f"{self.key}: negative counts")
        if (self.makes > self.attempts).any():
            bad = [REGION_CODES[k] for k in np.flatnonzero(self.makes > self.attempts)]
            raise IngestError(f"{self.key}: makes exceed attempts in {', '.join(bad)}")

    @property
    def key(self) -> tuple[str, int]:
        return (self.entity_id, self.season)

    @property
    def total_attempts(self) -> int:
        return int(self.attempts.sum())

    @property
    def total_makes(self) -> int:
        return int(self.makes.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegionCounts):
            return NotImplemented
        return (
            self.key == other.key
            and np.array_equal(self.attempts, other.attempts)
            and np.array_equal(self.makes, other.makes)
        )


@dataclass(eq=False)
class Dataset:
    """A collection of RegionCounts rows with unique (entity_id, season) keys."""

    entity_kind: str
    rows: list[RegionCounts] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.entity_kind not in ENTITY_KINDS:
            raise IngestError(
                f"entity_kind must be one of {ENTITY_KINDS}, got {self.entity_kind!r}"
            )
        if not self.rows:
            raise IngestError("dataset must contain at least one row")
        seen: set[tuple[str, int]] = set()
        for row in self.rows:
            if row.key in seen:
                raise IngestError(f"duplicate (entity_id, season) key {row.key}")
            seen.add(row.key)

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.entity_kind == other.entity_kind and self.rows == other.rows

    @property
    def keys(self) -> list[tuple[str, int]]:
        return [row.key for row in self.rows]

    @property
    def seasons(self) -> list[int]:
        return sorted({row.season for row in self.rows})

    def attempts_matrix(self) -> np.ndarray:
        """(I, K) attempts, row order matching ``rows``."""
        return np.stack([row.attempts for row in self.rows])

    def makes_matrix(self) -> np.ndarray:
        """(I, K) makes, row order matching ``rows``."""
        return np.stack([row.makes for row in self.rows])

    def row_for(self, entity_id: str, season: int | None = None) -> RegionCounts:
        matches = [
            r
            for r in self.rows
            if r.entity_id == entity_id and (season is None or r.season == season)
        ]
        if not matches:
            raise KeyError(f"no entity {entity_id!r}" + (f" in season {season}" if season else ""))
        if len(matches) > 1:
            raise KeyError(f"entity {entity_id!r} appears in seasons "
                           f"{[r.season for r in matches]}; pass season")
        return matches[0]


def _read_header(reader: Iterable[list[str]], expected: list[str]) -> None:
    try:
        header = next(iter(reader))
    except StopIteration:
        raise IngestError("empty file: missing header") from None
    if [h.strip() for h in header] != expected:
        raise IngestError(
            f"bad header {header!r}; expected {','.join(expected)}"
        )


def _raise_if_errors(errors: list[str]) -> None:
    if errors:
        shown = errors[:_MAX_REPORTED_ERRORS]
        more = len(errors) - len(shown)
        msg = "; ".join(shown)
        if more > 0:
            msg += f"; ... {more} more"
        raise IngestError(msg)


def _parse_season(text: str, line: int, errors: list[str]) -> int | None:
    try:
        season = int(text)
    except ValueError:
        errors.append(f"line {line}: season {text!r} is not an integer")
        return None
    if not 1000 <= season <= 9999:
        errors.append(f"line {line}: season {season} is not a 4-digit year")
        return None
    return season


def parse_shot_events(stream: IO[str], kind: str = "team") -> Dataset:
    """Parse event-level CSV (one row per shot) into a Dataset.

    Rows are accumulated per (entity_id, season, region); malformed rows and
    unknown region codes are reported with their line numbers, all at once.
    """
    reader = csv.reader(stream)
    _read_header(reader, EVENT_HEADER)
    region_idx = {code: i for i, code in enumerate(REGION_CODES)}
    acc: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}
    errors: list[str] = []
    n_rows = 0
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            errors.append(f"line {line}: expected 4 fields, got {len(row)}")
            continue
        entity_id, season_s, region_s, made_s = (f.strip() for f in row)
        season = _parse_season(season_s, line, errors)
        if season is None:
            continue
        k = region_idx.get(region_s)
        if k is None:
            errors.append(f"line {line}: unknown region code {region_s!r}")
            continue
        if made_s not in ("0", "1"):
            errors.append(f"line {line}: made must be 0 or 1, got {made_s!r}")
            continue
        key = (entity_id, season)
        counts = acc.get(key)
        if counts is None:
            counts = (np.zeros(N_REGIONS, np.int64), np.zeros(N_REGIONS, np.int64))
            acc[key] = counts
        counts[0][k] += 1
        counts[1][k] += int(made_s)
        n_rows += 1
    _raise_if_errors(errors)
    if n_rows == 0:
        raise IngestError("no data rows")
    rows = [
        RegionCounts(entity_id=eid, season=season, attempts=a, makes=m)
        for (eid, season), (a, m) in sorted(acc.items())
    ]
    return Dataset(entity_kind=kind, rows=rows)


def parse_aggregates(stream: IO[str], kind: str = "team") -> Dataset:
    """Parse pre-aggregated CSV into a Dataset.

    Regions missing for an entity default to attempts=makes=0; repeated
    (entity, season, region) rows are summed.
    """
    reader = csv.reader(stream)
    _read_header(reader, AGGREGATE_HEADER)
    region_idx = {code: i for i, code in enumerate(REGION_CODES)}
    acc: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}
    errors: list[str] = []
    n_rows = 0
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            errors.append(f"line {line}: expected 5 fields, got {len(row)}")
            continue
        entity_id, season_s, region_s, attempts_s, makes_s = (f.strip() for f in row)
        season = _parse_season(season_s, line, errors)
        if season is None:
            continue
        k = region_idx.get(region_s)
        if k is None:
            errors.append(f"line {line}: unknown region code {region_s!r}")
            continue
        try:
            attempts, makes = int(attempts_s), int(makes_s)
        except ValueError:
            errors.append(f"line {line}: attempts/makes must be integers")
            continue
        if attempts < 0 or makes < 0:
            errors.append(f"line {line}: negative counts")
            continue
        if makes > attempts:
            errors.append(
                f"line {line}: makes exceed attempts "
                f"({makes} > {attempts}) for {entity_id} {season} {region_s}"
            )
            continue
        key = (entity_id, season)
        counts = acc.get(key)
        if counts is None:
            counts = (np.zeros(N_REGIONS, np.int64), np.zeros(N_REGIONS, np.int64))
            acc[key] = counts
        counts[0][k] += attempts
        counts[1][k] += makes
        n_rows += 1
    _raise_if_errors(errors)
    if n_rows == 0:
        raise IngestError("no data rows")
    rows = [
        RegionCounts(entity_id=eid, season=season, attempts=a, makes=m)
        for (eid, season), (a, m) in sorted(acc.items())
    ]
    return Dataset(entity_kind=kind, rows=rows)


def dataset_from_events(events: Sequence[ShotEvent], kind: str = "team") -> Dataset:
    """Accumulate in-memory ShotEvents into a Dataset (same rules as the CSV path)."""
    acc: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}
    for ev in events:
        key = (ev.entity_id, ev.season)
        counts = acc.get(key)
        if counts is None:
            counts = (np.zeros(N_REGIONS, np.int64), np.zeros(N_REGIONS, np.int64))
            acc[key] = counts
        counts[0][ev.region.index] += 1
        counts[1][ev.region.index] += int(ev.made)
    if not acc:
        raise IngestError("no events")
    rows = [
        RegionCounts(entity_id=eid, season=season, attempts=a, makes=m)
        for (eid, season), (a, m) in sorted(acc.items())
    ]
    return Dataset(entity_kind=kind, rows=rows)


def write_aggregate_csv(dataset: Dataset, stream: IO[str]) -> None:
    """Serialize a Dataset to the aggregate CSV schema (canonical form).

    Rows are sorted by (entity_id, season) and every region is written, so the
    output is a stable fingerprintable encoding and round-trips through
    :func:`parse_aggregates` unchanged.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(AGGREGATE_HEADER)
    for row in sorted(dataset.rows, key=lambda r: r.key):
        for k, code in enumerate(REGION_CODES):
            writer.writerow(
                [row.entity_id, row.season, code, int(row.attempts[k]), int(row.makes[k])]
            )


def to_aggregate_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    write_aggregate_csv(dataset, buf)
    return buf.getvalue()


def dataset_fingerprint(dataset: Dataset) -> str:
    """Content hash of a Dataset: sha256 over kind plus canonical aggregate CSV."""
    h = hashlib.sha256()
    h.update(dataset.entity_kind.encode())
    h.update(b"\n")
    h.update(to_aggregate_csv(dataset).encode())
    return h.hexdigest()


def top_n_shot_takers(dataset: Dataset, n: int, season: int | None = None) -> Dataset:
    """Keep the n rows with the largest total attempts within one season.

    Ties at the cutoff go to the lexicographically smaller entity_id. If the
    dataset spans multiple seasons, ``season`` must be given. Asking for more
    rows than exist returns everything and emits :class:`TopNWarning`.
    """
    if n < 1:
        raise IngestError(f"n must be >= 1, got {n}")
    rows = dataset.rows
    if season is not None:
        rows = [r for r in rows if r.season == season]
        if not rows:
            raise IngestError(f"no rows for season {season}")
    else:
        seasons = {r.season for r in rows}
        if len(seasons) > 1:
            raise IngestError(
                f"dataset spans seasons {sorted(seasons)}; pass an explicit season"
            )
    if n > len(rows):
        warnings.warn(
            f"asked for top {n} but only {len(rows)} rows present; returning all",
            TopNWarning,
            stacklevel=2,
        )
        n = len(rows)
    ranked = sorted(rows, key=lambda r: (-r.total_attempts, r.entity_id))
    kept = sorted(ranked[:n], key=lambda r: r.key)
    return Dataset(entity_kind=dataset.entity_kind, rows=kept)
