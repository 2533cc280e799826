"""Posterior-predictive point totals: EP for entities, EPAA for players.

For each retained posterior draw, an entity's cluster memberships are
resolved from its observed counts by Bayes' theorem, region attempt counts
are drawn from the selected cluster's Multinomial, and makes per region from
the accuracy cluster's Binomials; the point total is the point-value-weighted
sum of makes. Each draw consumes its own RNG substream derived from
(seed, draw index), so results do not depend on evaluation order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .ingest import Dataset, RegionCounts
from .regions import N_REGIONS, POINT_VALUES
from .sampler.gibbs import (
    IMPOSSIBLE,
    accuracy_log_weights,
    selection_log_weights,
)
from .sampler.model import ModelState, PosteriorDraws


class PredictiveError(RuntimeError):
    pass


@dataclass(frozen=True)
class PredictiveConfig:
    """Knobs for predictive simulation.

    n_shots is the hypothetical season shot count; games_divisor scales
    season totals to per-game numbers (72 games for the 2020-21 season).
    """

    n_shots: int
    games_divisor: float = 72.0
    samples_per_draw: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_shots < 1:
            raise PredictiveError(f"n_shots must be >= 1, got {self.n_shots}")
        if not self.games_divisor > 0:
            raise PredictiveError(f"games_divisor must be > 0, got {self.games_divisor}")
        if self.samples_per_draw < 1:
            raise PredictiveError(
                f"samples_per_draw must be >= 1, got {self.samples_per_draw}"
            )


@dataclass(eq=False)
class PointsDraws:
    """Simulated season point totals, one entry per draw and repeat."""

    entity_label: str
    totals: np.ndarray  # int64, len = retained draws * samples_per_draw
    games_divisor: float
    n_shots: int
    draw_indices: np.ndarray  # int64, posterior draw index per sample
    region_detail: tuple[np.ndarray, np.ndarray] | None = None  # (attempts, makes)

    def __post_init__(self) -> None:
        self.totals = np.asarray(self.totals, dtype=np.int64)
        self.draw_indices = np.asarray(self.draw_indices, dtype=np.int64)
        hi = 3 * self.n_shots
        if self.totals.size and ((self.totals < 0) | (self.totals > hi)).any():
            raise PredictiveError(f"totals outside [0, {hi}]")

    @property
    def per_game(self) -> np.ndarray:
        return self.totals / self.games_divisor

    def __len__(self) -> int:
        return len(self.totals)


@dataclass(eq=False)
class EpaaDraws:
    """Paired player-minus-average-team point differences."""

    player_label: str
    diffs: np.ndarray
    n_shots: int
    games_divisor: float
    draw_indices: np.ndarray

    def __post_init__(self) -> None:
        self.diffs = np.asarray(self.diffs, dtype=np.int64)
        self.draw_indices = np.asarray(self.draw_indices, dtype=np.int64)
        hi = 3 * self.n_shots
        if self.diffs.size and np.abs(self.diffs).max() > hi:
            raise PredictiveError(f"diffs outside [-{hi}, {hi}]")

    @property
    def epaa_mean(self) -> float:
        return float(self.diffs.mean())

    @property
    def per_game(self) -> np.ndarray:
        return self.diffs / self.games_divisor

    def __len__(self) -> int:
        return len(self.diffs)


def _normalize_log_weights(logw: np.ndarray, conflicts: list[str]) -> np.ndarray:
    m = logw.max()
    if not np.isfinite(m) or m < IMPOSSIBLE:
        detail = "; ".join(conflicts) if conflicts else "all clusters impossible"
        raise PredictiveError(f"zero membership weight for every cluster: {detail}")
    w = np.exp(logw - m)
    return w / w.sum()


def _q_conflicts(counts: RegionCounts, draw: ModelState) -> list[str]:
    out = []
    for j in range(draw.n_accuracy_clusters):
        for k in range(draw.n_regions):
            if draw.q[j, k] == 0.0 and counts.makes[k] > 0:
                out.append(f"accuracy cluster {j + 1} has q=0 in region {k + 1} with makes observed")
            elif draw.q[j, k] == 1.0 and counts.makes[k] < counts.attempts[k]:
                out.append(f"accuracy cluster {j + 1} has q=1 in region {k + 1} with misses observed")
    return out


def membership_probs(counts: RegionCounts, draw: ModelState) -> tuple[np.ndarray, np.ndarray]:
    """Posterior membership probabilities for one entity under one draw.

    Bayes' theorem over the draw's profiles and weights; both outputs are
    normalized simplexes.
    """
    sel_log = selection_log_weights(counts.attempts[None, :], draw.p, draw.pi)[0]
    acc_log = accuracy_log_weights(
        counts.attempts[None, :], counts.makes[None, :], draw.q, draw.theta
    )[0]
    sel = _normalize_log_weights(sel_log, [])
    acc = _normalize_log_weights(acc_log, _q_conflicts(counts, draw))
    return sel, acc


def _sample_labels(probs: np.ndarray, reps: int, rng: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(probs)
    u = rng.random(reps) * cum[-1]
    return np.minimum(np.searchsorted(cum, u, side="right"), len(probs) - 1)


def _resolve_point_values(n_regions: int, point_values: np.ndarray | None) -> np.ndarray:
    if point_values is not None:
        pv = np.asarray(point_values, dtype=np.int64)
        if pv.shape != (n_regions,):
            raise PredictiveError(f"point_values must have shape ({n_regions},)")
        return pv
    if n_regions != N_REGIONS:
        raise PredictiveError(
            f"no default point values for K={n_regions}; pass point_values"
        )
    return POINT_VALUES


def _draw_totals(
    counts: RegionCounts,
    draw: ModelState,
    n_shots: int,
    reps: int,
    rng: np.random.Generator,
    point_values: np.ndarray,
    detail: list | None,
) -> np.ndarray:
    sel, acc = membership_probs(counts, draw)
    ws = _sample_labels(sel, reps, rng)
    zs = _sample_labels(acc, reps, rng)
    totals = np.empty(reps, dtype=np.int64)
    attempts_out = np.empty((reps, draw.n_regions), dtype=np.int64) if detail is not None else None
    makes_out = np.empty((reps, draw.n_regions), dtype=np.int64) if detail is not None else None
    pairs = np.unique(np.stack([ws, zs], axis=1), axis=0)
    for a, b in pairs:
        idx = np.flatnonzero((ws == a) & (zs == b))
        pvec = draw.p[a]
        pvec = pvec / pvec.sum()
        att = rng.multinomial(n_shots, pvec, size=len(idx))
        mk = rng.binomial(att, draw.q[b][None, :])
        totals[idx] = mk @ point_values
        if attempts_out is not None:
            attempts_out[idx] = att
            makes_out[idx] = mk
    if detail is not None:
        detail.append((attempts_out, makes_out))
    return totals


def expected_points(
    counts: RegionCounts,
    posterior: PosteriorDraws,
    cfg: PredictiveConfig,
    point_values: np.ndarray | None = None,
    with_region_detail: bool = False,
) -> PointsDraws:
    """Posterior-predictive point totals for one entity's observed counts."""
    if not posterior.draws:
        raise PredictiveError("posterior holds no draws")
    pv = _resolve_point_values(posterior.draws[0].n_regions, point_values)
    n_draws = len(posterior)
    reps = cfg.samples_per_draw
    children = np.random.SeedSequence(cfg.seed).spawn(n_draws)
    totals = np.empty(n_draws * reps, dtype=np.int64)
    detail: list | None = [] if with_region_detail else None
    for s, draw in enumerate(posterior.draws):
        rng = np.random.default_rng(children[s])
        totals[s * reps : (s + 1) * reps] = _draw_totals(
            counts, draw, cfg.n_shots, reps, rng, pv, detail
        )
    region_detail = None
    if detail is not None:
        region_detail = (
            np.concatenate([d[0] for d in detail]),
            np.concatenate([d[1] for d in detail]),
        )
    return PointsDraws(
        entity_label=f"{counts.entity_id}:{counts.season}",
        totals=totals,
        games_divisor=cfg.games_divisor,
        n_shots=cfg.n_shots,
        draw_indices=np.repeat(np.arange(n_draws), reps),
        region_detail=region_detail,
    )


def average_team_points(
    posterior_team: PosteriorDraws, cfg: PredictiveConfig
) -> PointsDraws:
    """Point totals for the 'average team': per draw, a uniformly chosen team.

    The team pick consumes a dedicated substream, so with a single team in
    the posterior the totals coincide exactly with ``expected_points`` for
    that team under the same seed.
    """
    if not posterior_team.draws:
        raise PredictiveError("team posterior holds no draws")
    rows = posterior_team.dataset.rows
    pv = _resolve_point_values(posterior_team.draws[0].n_regions, None)
    n_draws = len(posterior_team)
    reps = cfg.samples_per_draw
    children = np.random.SeedSequence(cfg.seed).spawn(n_draws + 1)
    pick_rng = np.random.default_rng(children[n_draws])
    picks = pick_rng.integers(0, len(rows), size=n_draws)
    totals = np.empty(n_draws * reps, dtype=np.int64)
    for s, draw in enumerate(posterior_team.draws):
        rng = np.random.default_rng(children[s])
        totals[s * reps : (s + 1) * reps] = _draw_totals(
            rows[picks[s]], draw, cfg.n_shots, reps, rng, pv, None
        )
    return PointsDraws(
        entity_label="average-team",
        totals=totals,
        games_divisor=cfg.games_divisor,
        n_shots=cfg.n_shots,
        draw_indices=np.repeat(np.arange(n_draws), reps),
    )


def epaa(
    player_counts: RegionCounts,
    posterior_player: PosteriorDraws,
    posterior_team: PosteriorDraws,
    cfg: PredictiveConfig,
) -> EpaaDraws:
    """Expected points above average: paired player-vs-average-team totals.

    Draw s of the player leg is paired with draw s of the team leg; each leg
    runs on its own seed-derived stream.
    """
    k_player = posterior_player.draws[0].n_regions if posterior_player.draws else 0
    k_team = posterior_team.draws[0].n_regions if posterior_team.draws else 0
    if k_player != k_team:
        raise PredictiveError(
            f"posterior region counts differ: player K={k_player}, team K={k_team}"
        )
    if len(posterior_player) != len(posterior_team):
        raise PredictiveError(
            "paired sampling needs equal retained draw counts: "
            f"player {len(posterior_player)}, team {len(posterior_team)}"
        )
    leg_seeds = np.random.SeedSequence(cfg.seed).generate_state(2, np.uint64)
    player_pts = expected_points(
        player_counts, posterior_player, replace(cfg, seed=int(leg_seeds[0]))
    )
    team_pts = average_team_points(posterior_team, replace(cfg, seed=int(leg_seeds[1])))
    return EpaaDraws(
        player_label=player_pts.entity_label,
        diffs=player_pts.totals - team_pts.totals,
        n_shots=cfg.n_shots,
        games_divisor=cfg.games_divisor,
        draw_indices=player_pts.draw_indices.copy(),
    )


def simulate_dataset(
    true_state: ModelState,
    shots_per_entity: np.ndarray,
    seed: int,
    season: int = 2021,
    entity_kind: str = "team",
    entity_prefix: str = "E",
) -> Dataset:
    """Draw a synthetic dataset from a fully specified model state.

    Intended for recovery tests: attempts follow each entity's selection
    profile, makes its accuracy profile. Requires the canonical seven-region
    layout so the result is a regular ingest Dataset.
    """
    if true_state.n_regions != N_REGIONS:
        raise PredictiveError(
            f"simulate_dataset needs K={N_REGIONS} regions, got {true_state.n_regions}"
        )
    shots = np.asarray(shots_per_entity, dtype=np.int64)
    if shots.shape != (true_state.n_entities,):
        raise PredictiveError(
            f"shots_per_entity must have length {true_state.n_entities}"
        )
    if (shots < 0).any():
        raise PredictiveError("shots_per_entity must be non-negative")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    rows = []
    width = max(3, len(str(true_state.n_entities - 1)))
    for i in range(true_state.n_entities):
        pvec = true_state.p[true_state.w[i] - 1]
        pvec = pvec / pvec.sum()
        att = rng.multinomial(int(shots[i]), pvec)
        mk = rng.binomial(att, true_state.q[true_state.z[i] - 1])
        rows.append(
            RegionCounts(
                entity_id=f"{entity_prefix}{i:0{width}d}",
                season=season,
                attempts=att,
                makes=mk,
            )
        )
    return Dataset(entity_kind=entity_kind, rows=rows)


POINTS_NAME = "points.jsonl"
POINTS_META_NAME = "meta.json"


def save_points(
    points: PointsDraws | EpaaDraws,
    out_dir: str | Path,
    kind: str,
    posterior_fingerprints: dict[str, str],
    config: dict | None = None,
) -> Path:
    """Persist simulated totals (or EPAA diffs) with a config sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    values = points.totals if isinstance(points, PointsDraws) else points.diffs
    label = points.entity_label if isinstance(points, PointsDraws) else points.player_label
    meta = {
        "kind": kind,
        "label": label,
        "n_shots": points.n_shots,
        "games_divisor": points.games_divisor,
        "n_samples": int(len(values)),
        "config": config or {},
        "posterior_fingerprints": posterior_fingerprints,
        "mean_total": float(values.mean()) if len(values) else 0.0,
    }
    (out / POINTS_META_NAME).write_text(json.dumps(meta, indent=2) + "\n")
    divisor = points.games_divisor
    with (out / POINTS_NAME).open("w") as fh:
        for i, total in zip(points.draw_indices.tolist(), values.tolist()):
            fh.write(
                json.dumps(
                    {"draw_index": i, "total": total, "per_game": total / divisor},
                    separators=(",", ":"),
                )
            )
            fh.write("\n")
    return out


def load_points(in_dir: str | Path) -> tuple[dict, np.ndarray, np.ndarray]:
    """Read a persisted points directory; returns (meta, draw_indices, totals)."""
    src = Path(in_dir)
    meta_path = src / POINTS_META_NAME
    points_path = src / POINTS_NAME
    if not meta_path.is_file() or not points_path.is_file():
        raise PredictiveError(f"not a points directory: {src}")
    meta = json.loads(meta_path.read_text())
    idx: list[int] = []
    totals: list[int] = []
    with points_path.open() as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                idx.append(obj["draw_index"])
                totals.append(obj["total"])
    if len(totals) != meta["n_samples"]:
        raise PredictiveError(
            f"{points_path} holds {len(totals)} samples, meta says {meta['n_samples']}"
        )
    return meta, np.array(idx, dtype=np.int64), np.array(totals, dtype=np.int64)
