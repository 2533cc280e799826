import numpy as np
import pytest
from scipy import stats

from hoopstat.ingest import Dataset, dataset_fingerprint
from hoopstat.predictive import (
    EpaaDraws,
    PredictiveConfig,
    PredictiveError,
    average_team_points,
    epaa,
    expected_points,
    load_points,
    membership_probs,
    save_points,
    simulate_dataset,
)
from hoopstat.regions import POINT_VALUES, Region
from hoopstat.sampler import (
    ChainConfig,
    Counts,
    ModelState,
    PosteriorDraws,
    Priors,
    exact_posterior_tiny,
    run_chain,
)

from .conftest import region_counts


def one_hot_p(region: Region) -> np.ndarray:
    p = np.zeros(7)
    p[region.index] = 1.0
    return p


def fixed_posterior(dataset, states, seed=0):
    """Wrap hand-built states as a PosteriorDraws artifact."""
    L = states[0].n_selection_clusters
    J = states[0].n_accuracy_clusters
    cfg = ChainConfig(iterations=len(states), burn_in=0, thin=1, seed=seed)
    return PosteriorDraws(
        draws=states,
        priors=Priors(L=L, J=J),
        config=cfg,
        dataset=dataset,
        dataset_fingerprint=dataset_fingerprint(dataset),
    )


def single_cluster_state(p_vec, q_vec):
    return ModelState(
        p=np.array([p_vec]),
        q=np.array([q_vec]),
        w=np.array([1]),
        z=np.array([1]),
        pi=np.array([1.0]),
        theta=np.array([1.0]),
    )


@pytest.fixture
def ft_dataset():
    return Dataset(entity_kind="team", rows=[region_counts("FT_TEAM", 2021, FT=(100, 90))])


@pytest.fixture
def ft_perfect():
    # all makes: consistent with degenerate q=1 states
    return Dataset(entity_kind="team", rows=[region_counts("FT_TEAM", 2021, FT=(100, 100))])


@pytest.fixture
def atb_perfect():
    return Dataset(entity_kind="team", rows=[region_counts("ATB_TEAM", 2021, ATB=(100, 100))])


class TestMembershipProbs:
    def test_single_cluster(self, ft_dataset):
        state = single_cluster_state(one_hot_p(Region.FT), np.full(7, 0.9))
        sel, acc = membership_probs(ft_dataset.rows[0], state)
        assert sel.tolist() == [1.0]
        assert acc.tolist() == [1.0]

    def test_identical_clusters_split_evenly(self, ft_dataset):
        p = np.full((2, 7), 1 / 7)
        q = np.full((2, 7), 0.5)
        state = ModelState(
            p=p, q=q, w=np.array([1]), z=np.array([1]),
            pi=np.array([0.5, 0.5]), theta=np.array([0.5, 0.5]),
        )
        sel, acc = membership_probs(ft_dataset.rows[0], state)
        assert sel == pytest.approx([0.5, 0.5], abs=1e-12)
        assert acc == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_outputs_normalized(self, small_dataset):
        post = run_chain(
            small_dataset, Priors(L=3, J=3), ChainConfig(iterations=30, burn_in=10, seed=2)
        )
        for draw in post.draws[:5]:
            sel, acc = membership_probs(small_dataset.rows[0], draw)
            assert abs(sel.sum() - 1) <= 1e-12
            assert abs(acc.sum() - 1) <= 1e-12

    def test_conflicting_degenerate_q_raises(self, ft_dataset):
        # every accuracy cluster says q=0 in FT, but makes were observed there
        state = ModelState(
            p=np.array([one_hot_p(Region.FT)]),
            q=np.array([np.zeros(7)]),
            w=np.array([1]),
            z=np.array([1]),
            pi=np.array([1.0]),
            theta=np.array([1.0]),
        )
        with pytest.raises(PredictiveError, match="q=0 in region 7"):
            membership_probs(ft_dataset.rows[0], state)

    def test_averaged_memberships_match_enumeration(self):
        # K=7 tiny instance: the Rao-Blackwellized membership average over
        # chain draws must agree with the exact enumeration oracle
        rows = [
            region_counts("A", 2021, ATB=(5, 1)),
            region_counts("B", 2021, RA=(5, 3)),
            region_counts("C", 2021, ATB=(5, 2)),
        ]
        ds = Dataset(entity_kind="team", rows=rows)
        priors = Priors(L=2, J=2)
        tiny = exact_posterior_tiny(Counts.from_dataset(ds), priors)
        post = run_chain(ds, priors, ChainConfig(iterations=14000, burn_in=2000, seed=8))
        for i, row in enumerate(ds.rows):
            sel_avg = np.zeros(2)
            for draw in post.draws:
                sel, _ = membership_probs(row, draw)
                sel_avg += sel
            sel_avg /= len(post)
            assert np.abs(sel_avg - tiny.w_probs[i]).max() < 0.02


class TestExpectedPoints:
    def test_all_ft_made_scores_n_shots(self, ft_perfect):
        state = single_cluster_state(one_hot_p(Region.FT), np.ones(7))
        post = fixed_posterior(ft_perfect, [state])
        pts = expected_points(
            ft_perfect.rows[0], post, PredictiveConfig(n_shots=500, seed=1),
            with_region_detail=True,
        )
        assert pts.totals.tolist() == [500]
        att, mk = pts.region_detail
        assert att[0, Region.FT.index] == 500
        assert np.array_equal(att, mk)

    def test_all_atb_made_attains_three_n(self, atb_perfect):
        state = single_cluster_state(one_hot_p(Region.ATB), np.ones(7))
        post = fixed_posterior(atb_perfect, [state])
        pts = expected_points(atb_perfect.rows[0], post, PredictiveConfig(n_shots=8000, seed=1))
        assert pts.totals.tolist() == [24000]

    def test_bounds_hold(self, ft_dataset):
        state = single_cluster_state(np.full(7, 1 / 7), np.full(7, 0.5))
        post = fixed_posterior(ft_dataset, [state.copy() for _ in range(50)])
        cfg = PredictiveConfig(n_shots=200, samples_per_draw=20, seed=3)
        pts = expected_points(ft_dataset.rows[0], post, cfg)
        assert len(pts) == 1000
        assert pts.totals.min() >= 0 and pts.totals.max() <= 600

    def test_seed_determinism(self, small_dataset):
        post = run_chain(
            small_dataset, Priors(L=2, J=2), ChainConfig(iterations=40, burn_in=20, seed=5)
        )
        cfg = PredictiveConfig(n_shots=1000, seed=11)
        a = expected_points(small_dataset.rows[0], post, cfg)
        b = expected_points(small_dataset.rows[0], post, cfg)
        assert np.array_equal(a.totals, b.totals)

    def test_per_game_scaling(self, ft_perfect):
        state = single_cluster_state(one_hot_p(Region.FT), np.ones(7))
        post = fixed_posterior(ft_perfect, [state])
        pts = expected_points(
            ft_perfect.rows[0], post, PredictiveConfig(n_shots=7200, games_divisor=72, seed=0)
        )
        assert pts.per_game.tolist() == [100.0]

    def test_empty_posterior_rejected(self, ft_dataset):
        post = fixed_posterior(ft_dataset, [single_cluster_state(one_hot_p(Region.FT), np.ones(7))])
        post.draws = []
        with pytest.raises(PredictiveError, match="no draws"):
            expected_points(ft_dataset.rows[0], post, PredictiveConfig(n_shots=10, seed=0))

    def test_raising_q_never_lowers_mean_coupled(self):
        # stochastic dominance via a shared uniform stream and the
        # inverse-transform binomial: pathwise monotone in q
        rng = np.random.default_rng(17)
        p_vec = np.full(7, 1 / 7)
        q_lo = np.full(7, 0.4)
        q_hi = np.clip(q_lo + 0.15, 0, 1)
        n_shots = 120
        totals_lo = np.empty(2000)
        totals_hi = np.empty(2000)
        for s in range(2000):
            att = rng.multinomial(n_shots, p_vec)
            u = rng.random(7)
            mk_lo = stats.binom.ppf(u, att, q_lo)
            mk_hi = stats.binom.ppf(u, att, q_hi)
            assert (mk_hi >= mk_lo).all()
            totals_lo[s] = mk_lo @ POINT_VALUES
            totals_hi[s] = mk_hi @ POINT_VALUES
        assert (totals_hi >= totals_lo).all()
        assert totals_hi.mean() >= totals_lo.mean()


class TestAverageTeam:
    def test_singleton_team_identical_to_expected_points(self, ft_dataset):
        state = single_cluster_state(np.full(7, 1 / 7), np.full(7, 0.6))
        post = fixed_posterior(ft_dataset, [state.copy() for _ in range(25)])
        cfg = PredictiveConfig(n_shots=300, seed=9)
        direct = expected_points(ft_dataset.rows[0], post, cfg)
        averaged = average_team_points(post, cfg)
        assert np.array_equal(direct.totals, averaged.totals)
        assert averaged.entity_label == "average-team"

    def two_team_posterior(self, n_draws):
        rows = [
            region_counts("FT_ONLY", 2021, FT=(100, 100)),
            region_counts("ATB_ONLY", 2021, ATB=(100, 100)),
        ]
        ds = Dataset(entity_kind="team", rows=rows)
        state = ModelState(
            p=np.stack([one_hot_p(Region.FT), one_hot_p(Region.ATB)]),
            q=np.array([np.ones(7)]),
            w=np.array([1, 2]),
            z=np.array([1, 1]),
            pi=np.array([0.5, 0.5]),
            theta=np.array([1.0]),
        )
        return ds, fixed_posterior(ds, [state.copy() for _ in range(n_draws)])

    def test_two_team_mixture_mean(self):
        ds, post = self.two_team_posterior(2000)
        cfg = PredictiveConfig(n_shots=100, seed=13)
        pts = average_team_points(post, cfg)
        # per-team totals are exactly 100 and 300; picks are uniform
        assert set(np.unique(pts.totals)) == {100, 300}
        se = pts.totals.std(ddof=1) / np.sqrt(len(pts))
        assert abs(pts.totals.mean() - 200) < 3 * se

    def test_mean_matches_average_of_team_means(self, small_dataset):
        post = run_chain(
            small_dataset, Priors(L=2, J=2), ChainConfig(iterations=600, burn_in=100, seed=6)
        )
        cfg = PredictiveConfig(n_shots=400, seed=21)
        avg = average_team_points(post, cfg)
        team_means = []
        for i, row in enumerate(small_dataset.rows):
            pts = expected_points(row, post, PredictiveConfig(n_shots=400, seed=100 + i))
            team_means.append(pts.totals.mean())
        expected_mean = np.mean(team_means)
        se = avg.totals.std(ddof=1) / np.sqrt(len(avg))
        assert abs(avg.totals.mean() - expected_mean) < 3 * se + 1.0


class TestEpaa:
    def test_self_vs_self_near_zero(self, small_dataset):
        post = run_chain(
            small_dataset, Priors(L=2, J=2), ChainConfig(iterations=700, burn_in=200, seed=30)
        )
        solo = Dataset(entity_kind="team", rows=[small_dataset.rows[0]])
        solo_post = fixed_posterior(solo, [s.copy() for s in post.draws], seed=post.config.seed)
        result = epaa(
            small_dataset.rows[0], post, solo_post, PredictiveConfig(n_shots=500, seed=41)
        )
        se = result.diffs.std(ddof=1) / np.sqrt(len(result))
        assert abs(result.epaa_mean) < 3 * se

    def test_forced_outcome_exact(self):
        player_ds = Dataset(entity_kind="player", rows=[region_counts("P", 2021, ATB=(50, 50))])
        team_ds = Dataset(entity_kind="team", rows=[region_counts("T", 2021, FT=(50, 50))])
        player_post = fixed_posterior(
            player_ds, [single_cluster_state(one_hot_p(Region.ATB), np.ones(7))]
        )
        team_post = fixed_posterior(
            team_ds, [single_cluster_state(one_hot_p(Region.FT), np.ones(7))]
        )
        result = epaa(
            player_ds.rows[0], player_post, team_post, PredictiveConfig(n_shots=100, seed=0)
        )
        assert result.diffs.tolist() == [200]
        assert result.epaa_mean == 200.0

    def test_pairing_lengths(self, small_dataset):
        post = run_chain(
            small_dataset, Priors(L=2, J=2), ChainConfig(iterations=50, burn_in=10, seed=3)
        )
        result = epaa(
            small_dataset.rows[1], post, post, PredictiveConfig(n_shots=100, seed=5)
        )
        assert len(result) == len(post)

    def test_draw_count_mismatch_rejected(self, small_dataset):
        post_a = run_chain(
            small_dataset, Priors(L=1, J=1), ChainConfig(iterations=20, burn_in=10, seed=3)
        )
        post_b = run_chain(
            small_dataset, Priors(L=1, J=1), ChainConfig(iterations=21, burn_in=10, seed=3)
        )
        with pytest.raises(PredictiveError, match="equal retained draw counts"):
            epaa(small_dataset.rows[0], post_a, post_b, PredictiveConfig(n_shots=10, seed=0))

    def test_region_dimension_mismatch_rejected(self, small_dataset, ft_dataset):
        post = fixed_posterior(
            ft_dataset, [single_cluster_state(one_hot_p(Region.FT), np.ones(7))]
        )
        k2_state = ModelState(
            p=np.array([[0.5, 0.5]]),
            q=np.array([[0.5, 0.5]]),
            w=np.array([1]),
            z=np.array([1]),
            pi=np.array([1.0]),
            theta=np.array([1.0]),
        )
        bad = fixed_posterior(ft_dataset, [k2_state])
        with pytest.raises(PredictiveError, match="region counts differ"):
            epaa(ft_dataset.rows[0], post, bad, PredictiveConfig(n_shots=10, seed=0))


class TestSimulateDataset:
    def test_degenerate_selection(self):
        state = ModelState(
            p=np.array([one_hot_p(Region.ATB)]),
            q=np.array([np.full(7, 0.5)]),
            w=np.array([1, 1]),
            z=np.array([1, 1]),
            pi=np.array([1.0]),
            theta=np.array([1.0]),
        )
        ds = simulate_dataset(state, np.array([50, 80]), seed=1)
        for row in ds.rows:
            assert row.attempts[Region.ATB.index] == row.total_attempts

    def test_certain_makes(self):
        state = single_cluster_state(np.full(7, 1 / 7), np.ones(7))
        state = ModelState(
            p=state.p, q=state.q, w=np.array([1]), z=np.array([1]),
            pi=state.pi, theta=state.theta,
        )
        ds = simulate_dataset(state, np.array([200]), seed=2)
        assert np.array_equal(ds.rows[0].attempts, ds.rows[0].makes)

    def test_law_of_large_numbers(self):
        p_vec = np.array([0.30, 0.05, 0.05, 0.15, 0.10, 0.20, 0.15])
        state = single_cluster_state(p_vec, np.full(7, 0.5))
        ds = simulate_dataset(state, np.array([1_000_000]), seed=3)
        props = ds.rows[0].attempts / 1_000_000
        assert np.abs(props - p_vec).max() < 0.002

    def test_zero_shots_allowed(self):
        state = single_cluster_state(np.full(7, 1 / 7), np.full(7, 0.5))
        ds = simulate_dataset(state, np.array([0]), seed=4)
        assert ds.rows[0].total_attempts == 0

    def test_deterministic(self):
        state = single_cluster_state(np.full(7, 1 / 7), np.full(7, 0.5))
        a = simulate_dataset(state, np.array([500]), seed=9)
        b = simulate_dataset(state, np.array([500]), seed=9)
        assert a == b


class TestPointsPersistence:
    def test_round_trip(self, ft_dataset, tmp_path):
        state = single_cluster_state(np.full(7, 1 / 7), np.full(7, 0.5))
        post = fixed_posterior(ft_dataset, [state.copy() for _ in range(10)])
        pts = expected_points(ft_dataset.rows[0], post, PredictiveConfig(n_shots=100, seed=1))
        out = save_points(pts, tmp_path / "pts", kind="ep", posterior_fingerprints={"posterior": "abc"})
        meta, idx, totals = load_points(out)
        assert meta["kind"] == "ep"
        assert meta["label"] == "FT_TEAM:2021"
        assert np.array_equal(totals, pts.totals)
        assert np.array_equal(idx, pts.draw_indices)

    def test_epaa_round_trip(self, tmp_path):
        draws = EpaaDraws(
            player_label="P:2021",
            diffs=np.array([5, -3, 2]),
            n_shots=10,
            games_divisor=72.0,
            draw_indices=np.array([0, 1, 2]),
        )
        out = save_points(draws, tmp_path / "e", kind="epaa", posterior_fingerprints={})
        meta, idx, totals = load_points(out)
        assert meta["kind"] == "epaa"
        assert totals.tolist() == [5, -3, 2]
        assert meta["mean_total"] == pytest.approx(draws.epaa_mean)
