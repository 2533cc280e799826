import json

import pytest

from hoopstat.ingest import Dataset
from hoopstat.sampler import ChainConfig, Priors, load_posterior, run_chain, save_posterior
from hoopstat.sampler.store import StoreError

from .conftest import region_counts


@pytest.fixture(scope="module")
def posterior():
    rows = [
        region_counts("BKN", 2021, ATB=(900, 350), RA=(700, 470), FT=(500, 410)),
        region_counts("PHX", 2021, MID=(650, 290), RA=(600, 380), FT=(450, 350)),
    ]
    ds = Dataset(entity_kind="team", rows=rows)
    return run_chain(ds, Priors(L=2, J=2), ChainConfig(iterations=50, burn_in=10, thin=2, seed=21))


class TestPosteriorStore:
    def test_round_trip_bit_exact(self, posterior, tmp_path):
        out = save_posterior(posterior, tmp_path / "fit")
        loaded = load_posterior(out)
        assert len(loaded) == len(posterior)
        assert loaded.priors == posterior.priors
        assert loaded.config == posterior.config
        assert loaded.dataset == posterior.dataset
        assert loaded.dataset_fingerprint == posterior.dataset_fingerprint
        for a, b in zip(loaded.draws, posterior.draws):
            assert a.equals(b)

    def test_save_twice_byte_identical(self, posterior, tmp_path):
        a = save_posterior(posterior, tmp_path / "a")
        b = save_posterior(posterior, tmp_path / "b")
        assert (a / "draws.jsonl").read_bytes() == (b / "draws.jsonl").read_bytes()
        assert (a / "meta.json").read_bytes() == (b / "meta.json").read_bytes()

    def test_missing_directory_rejected(self, tmp_path):
        with pytest.raises(StoreError, match="not a posterior directory"):
            load_posterior(tmp_path / "nope")

    def test_corrupted_counts_detected(self, posterior, tmp_path):
        out = save_posterior(posterior, tmp_path / "fit")
        meta = json.loads((out / "meta.json").read_text())
        meta["counts"]["attempts"][0][0] += 1
        (out / "meta.json").write_text(json.dumps(meta))
        with pytest.raises(StoreError, match="fingerprint mismatch"):
            load_posterior(out)

    def test_truncated_draws_detected(self, posterior, tmp_path):
        out = save_posterior(posterior, tmp_path / "fit")
        lines = (out / "draws.jsonl").read_text().splitlines()
        (out / "draws.jsonl").write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(StoreError, match="holds"):
            load_posterior(out)

    def test_entity_index_preserved(self, posterior, tmp_path):
        out = save_posterior(posterior, tmp_path / "fit")
        loaded = load_posterior(out)
        assert loaded.entity_index == [("BKN", 2021), ("PHX", 2021)]
