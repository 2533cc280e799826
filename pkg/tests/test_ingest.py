import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoopstat.ingest import (
    Dataset,
    IngestError,
    TopNWarning,
    dataset_fingerprint,
    parse_aggregates,
    parse_shot_events,
    to_aggregate_csv,
    top_n_shot_takers,
)
from hoopstat.regions import N_REGIONS, POINT_VALUES, REGION_CODES, Region

from .conftest import aggregate_csv, event_csv, region_counts


def test_region_point_values():
    expected = {"ATB": 3, "LC3": 3, "RC3": 3, "ITP": 2, "MID": 2, "RA": 2, "FT": 1}
    assert {r.value: r.point_value for r in Region} == expected
    assert REGION_CODES == ("ATB", "LC3", "RC3", "ITP", "MID", "RA", "FT")
    assert POINT_VALUES.tolist() == [3, 3, 3, 2, 2, 2, 1]
    assert N_REGIONS == 7


class TestParseShotEvents:
    def test_accumulates_makes_and_attempts(self):
        ds = parse_shot_events(
            event_csv([("BKN", 2021, "ATB", 1), ("BKN", 2021, "ATB", 0), ("BKN", 2021, "FT", 1)])
        )
        assert len(ds) == 1
        row = ds.rows[0]
        assert row.key == ("BKN", 2021)
        assert row.attempts[Region.ATB.index] == 2
        assert row.makes[Region.ATB.index] == 1
        assert row.attempts[Region.FT.index] == 1
        assert row.makes[Region.FT.index] == 1
        assert row.total_attempts == 3

    def test_unknown_region_names_line(self):
        with pytest.raises(IngestError, match="line 3.*BACKCOURT"):
            parse_shot_events(event_csv([("BKN", 2021, "ATB", 1), ("BKN", 2021, "BACKCOURT", 0)]))

    def test_malformed_made_flag(self):
        with pytest.raises(IngestError, match="line 2.*made"):
            parse_shot_events(event_csv([("BKN", 2021, "ATB", 2)]))

    def test_empty_file_rejected(self):
        with pytest.raises(IngestError, match="empty file"):
            parse_shot_events(io.StringIO(""))
        with pytest.raises(IngestError, match="no data rows"):
            parse_shot_events(io.StringIO("entity_id,season,region,made\n"))

    def test_bad_header(self):
        with pytest.raises(IngestError, match="bad header"):
            parse_shot_events(io.StringIO("a,b,c,d\nBKN,2021,ATB,1\n"))

    def test_rows_sorted_by_key(self):
        ds = parse_shot_events(
            event_csv([("PHX", 2021, "RA", 1), ("BKN", 2021, "FT", 0), ("BKN", 2020, "FT", 0)])
        )
        assert ds.keys == [("BKN", 2020), ("BKN", 2021), ("PHX", 2021)]

    def test_event_count_preserved(self):
        rows = [("A", 2021, REGION_CODES[i % 7], i % 2) for i in range(53)]
        rows += [("B", 2021, REGION_CODES[i % 3], 0) for i in range(21)]
        ds = parse_shot_events(event_csv(rows))
        assert sum(r.total_attempts for r in ds.rows) == 74

    def test_bad_season(self):
        with pytest.raises(IngestError, match="line 2.*4-digit"):
            parse_shot_events(event_csv([("BKN", 21, "ATB", 1)]))


class TestParseAggregates:
    def test_direct_mapping_with_defaults(self):
        ds = parse_aggregates(aggregate_csv([("DEN", 2021, "MID", 500, 210)]))
        row = ds.rows[0]
        assert row.attempts[Region.MID.index] == 500
        assert row.makes[Region.MID.index] == 210
        mask = np.ones(N_REGIONS, bool)
        mask[Region.MID.index] = False
        assert row.attempts[mask].sum() == 0 and row.makes[mask].sum() == 0

    def test_makes_exceed_attempts(self):
        with pytest.raises(IngestError, match="makes exceed attempts"):
            parse_aggregates(aggregate_csv([("DEN", 2021, "MID", 500, 501)]))

    def test_negative_counts(self):
        with pytest.raises(IngestError, match="negative"):
            parse_aggregates(aggregate_csv([("DEN", 2021, "MID", -1, -2)]))

    def test_rows_merge_by_key(self):
        ds = parse_aggregates(
            aggregate_csv([("DEN", 2021, "MID", 100, 40), ("DEN", 2021, "RA", 50, 30)])
        )
        assert len(ds) == 1
        row = ds.rows[0]
        assert row.attempts[Region.MID.index] == 100
        assert row.attempts[Region.RA.index] == 50
        assert row.total_makes == 70

    def test_duplicate_region_rows_sum(self):
        ds = parse_aggregates(
            aggregate_csv([("DEN", 2021, "MID", 100, 40), ("DEN", 2021, "MID", 10, 5)])
        )
        assert ds.rows[0].attempts[Region.MID.index] == 110
        assert ds.rows[0].makes[Region.MID.index] == 45


class TestRoundTrip:
    def test_events_to_aggregates_round_trip(self):
        ds = parse_shot_events(
            event_csv(
                [("BKN", 2021, "ATB", 1), ("BKN", 2021, "RA", 0), ("PHX", 2021, "FT", 1)]
            )
        )
        again = parse_aggregates(io.StringIO(to_aggregate_csv(ds)))
        assert again == ds
        assert dataset_fingerprint(again) == dataset_fingerprint(ds)

    @settings(max_examples=50, deadline=None)
    @given(
        data=st.lists(
            st.tuples(
                st.sampled_from(["A", "B", "C", "DEN"]),
                st.sampled_from([2019, 2020, 2021]),
                st.lists(
                    st.tuples(st.integers(0, 50), st.integers(0, 50)).map(
                        lambda am: (max(am), min(am))
                    ),
                    min_size=7,
                    max_size=7,
                ),
            ),
            min_size=1,
            max_size=6,
            unique_by=lambda t: (t[0], t[1]),
        )
    )
    def test_serialization_round_trip_property(self, data):
        rows = [
            region_counts(
                eid,
                season,
                attempts=np.array([a for a, _ in pairs]),
                makes=np.array([m for _, m in pairs]),
            )
            for eid, season, pairs in data
        ]
        ds = Dataset(entity_kind="player", rows=sorted(rows, key=lambda r: r.key))
        again = parse_aggregates(io.StringIO(to_aggregate_csv(ds)), kind="player")
        assert again == ds


class TestDatasetInvariants:
    def test_duplicate_keys_rejected(self):
        rows = [region_counts("A", 2021, ATB=(1, 0)), region_counts("A", 2021, FT=(1, 1))]
        with pytest.raises(IngestError, match="duplicate"):
            Dataset(entity_kind="team", rows=rows)

    def test_empty_rejected(self):
        with pytest.raises(IngestError, match="at least one row"):
            Dataset(entity_kind="team", rows=[])

    def test_row_invariant_makes_bounded(self):
        with pytest.raises(IngestError, match="makes exceed attempts"):
            region_counts("A", 2021, ATB=(1, 2))


class TestTopN:
    def make(self, totals):
        rows = [
            region_counts(eid, 2021, ATB=(n, 0))
            for eid, n in totals.items()
        ]
        return Dataset(entity_kind="player", rows=rows)

    def test_keeps_largest(self):
        ds = self.make({"a": 10, "b": 30, "c": 20})
        out = top_n_shot_takers(ds, 2)
        assert {r.entity_id for r in out.rows} == {"b", "c"}

    def test_single_row(self):
        ds = self.make({"solo": 5})
        assert top_n_shot_takers(ds, 1).keys == [("solo", 2021)]

    def test_tie_break_lexicographic(self):
        ds = self.make({"zed": 10, "ann": 10, "mid": 20})
        out = top_n_shot_takers(ds, 2)
        assert {r.entity_id for r in out.rows} == {"mid", "ann"}

    def test_n_exceeding_rows_warns(self):
        ds = self.make({"a": 1, "b": 2})
        with pytest.warns(TopNWarning):
            out = top_n_shot_takers(ds, 5)
        assert len(out) == 2

    def test_multi_season_requires_argument(self):
        rows = [region_counts("a", 2020, ATB=(5, 0)), region_counts("a", 2021, ATB=(9, 0))]
        ds = Dataset(entity_kind="player", rows=rows)
        with pytest.raises(IngestError, match="season"):
            top_n_shot_takers(ds, 1)
        out = top_n_shot_takers(ds, 1, season=2020)
        assert out.keys == [("a", 2020)]

    def test_idempotent(self):
        ds = self.make({"a": 10, "b": 30, "c": 20, "d": 7})
        once = top_n_shot_takers(ds, 3)
        twice = top_n_shot_takers(once, 3)
        assert once == twice
