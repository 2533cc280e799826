"""Read-only HTTP API over persisted artifacts.

Serves the five comparison capabilities (EPAA densities, the sortable player
table, raw draw downloads, team shot trends, and EPAA over time) from a
directory of previously computed artifacts. Nothing is sampled here: every
number is computed once at startup from the persisted draws, through the same
report functions the CLI uses, and the in-memory catalog is immutable.

Expected layout under the artifacts root:

    seasons/<year>/epaa/            an ``hoopstat epaa`` output directory
        players/<id>_<year>/points.jsonl + meta.json
    teams/counts.csv                aggregate CSV for the trends endpoint
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse

from .ingest import parse_aggregates
from .regions import REGION_CODES
from .report import RankedRow, rank_entities, summarize_values

HISTOGRAM_THRESHOLD = 20_000
HISTOGRAM_BINS = 100


@dataclass(eq=False)
class PlayerArtifact:
    player_id: str
    season: int
    label: str
    points_path: Path
    fingerprint: str
    n_shots: int
    games_divisor: float
    diffs: np.ndarray
    epaa_mean: float


@dataclass(eq=False)
class ArtifactCatalog:
    root: Path
    players: dict[int, dict[str, PlayerArtifact]] = field(default_factory=dict)
    tables: dict[int, list[RankedRow]] = field(default_factory=dict)
    player_meta: dict[int, dict[str, dict]] = field(default_factory=dict)
    trends_rows: list[dict] = field(default_factory=list)
    teams: dict[int, list[str]] = field(default_factory=dict)

    @property
    def seasons(self) -> list[int]:
        return sorted(set(self.players) | set(self.teams))

    @property
    def loaded(self) -> bool:
        return bool(self.players) or bool(self.trends_rows)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _load_player_dir(player_dir: Path, season: int) -> PlayerArtifact:
    meta = json.loads((player_dir / "meta.json").read_text())
    points_path = player_dir / "points.jsonl"
    diffs = []
    with points_path.open() as fh:
        for line in fh:
            if line.strip():
                diffs.append(json.loads(line)["total"])
    diffs = np.array(diffs, dtype=np.int64)
    label = meta["label"]
    player_id = label.rsplit(":", 1)[0]
    return PlayerArtifact(
        player_id=player_id,
        season=season,
        label=label,
        points_path=points_path,
        fingerprint=_sha256(points_path),
        n_shots=meta["n_shots"],
        games_divisor=meta["games_divisor"],
        diffs=diffs,
        epaa_mean=float(diffs.mean()) if diffs.size else 0.0,
    )


def load_catalog(root: Path) -> ArtifactCatalog:
    """Scan the artifacts directory and precompute all served values."""
    if not root.is_dir():
        raise FileNotFoundError(f"artifacts directory does not exist: {root}")
    catalog = ArtifactCatalog(root=root)
    seasons_dir = root / "seasons"
    if seasons_dir.is_dir():
        for season_dir in sorted(seasons_dir.iterdir()):
            if not season_dir.is_dir() or not season_dir.name.isdigit():
                continue
            season = int(season_dir.name)
            players_root = season_dir / "epaa" / "players"
            if not players_root.is_dir():
                continue
            players = {}
            for player_dir in sorted(players_root.iterdir()):
                if (player_dir / "points.jsonl").is_file():
                    art = _load_player_dir(player_dir, season)
                    players[art.player_id] = art
            if players:
                catalog.players[season] = players
                summaries = [
                    summarize_values(a.label, a.diffs / a.games_divisor)
                    for a in players.values()
                ]
                ranked = rank_entities(summaries, by="mean")
                catalog.tables[season] = ranked
                rank_of = {r.summary.label: r.rank for r in ranked}
                catalog.player_meta[season] = {
                    a.player_id: {"rank": rank_of[a.label]} for a in players.values()
                }
    counts_path = root / "teams" / "counts.csv"
    if counts_path.is_file():
        with counts_path.open() as fh:
            ds = parse_aggregates(fh, kind="team")
        for row in ds.rows:
            total = row.total_attempts
            catalog.teams.setdefault(row.season, [])
            if row.entity_id not in catalog.teams[row.season]:
                catalog.teams[row.season].append(row.entity_id)
            for k, code in enumerate(REGION_CODES):
                attempts = int(row.attempts[k])
                makes = int(row.makes[k])
                catalog.trends_rows.append(
                    {
                        "team": row.entity_id,
                        "season": row.season,
                        "region": code,
                        "attempt_share": attempts / total if total else 0.0,
                        "make_rate": makes / attempts if attempts else None,
                    }
                )
    return catalog


def _parse_players_param(players: str) -> list[str]:
    ids = [p for p in (s.strip() for s in players.split(",")) if p]
    if not 1 <= len(ids) <= 4:
        raise HTTPException(status_code=400, detail="players must list 1 to 4 ids")
    return ids


def build_app(artifacts: Path, cors_origin: str = "*", ui_dir: str | None = None) -> FastAPI:
    catalog = load_catalog(Path(artifacts))
    app = FastAPI(title="hoopstat", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    def require_loaded() -> None:
        if not catalog.loaded:
            raise HTTPException(status_code=503, detail="artifact catalog is empty")

    def season_players(season: int) -> dict[str, PlayerArtifact]:
        players = catalog.players.get(season)
        if players is None:
            raise HTTPException(status_code=404, detail=f"no artifacts for season {season}")
        return players

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "loaded": catalog.loaded}

    @app.get("/api/catalog")
    def get_catalog():
        require_loaded()
        return {
            "seasons": catalog.seasons,
            "entities": {
                str(season): {
                    "players": sorted(catalog.players.get(season, {})),
                    "teams": sorted(catalog.teams.get(season, [])),
                }
                for season in catalog.seasons
            },
            "fingerprints": {
                str(season): {
                    pid: art.fingerprint
                    for pid, art in catalog.players.get(season, {}).items()
                }
                for season in catalog.seasons
            },
        }

    @app.get("/api/epaa/density")
    def epaa_density(season: int, players: str = Query(...)):
        require_loaded()
        ids = _parse_players_param(players)
        arts = season_players(season)
        out = []
        for pid in ids:
            art = arts.get(pid)
            if art is None:
                raise HTTPException(status_code=400, detail=f"unknown player {pid!r}")
            entry = {
                "player": pid,
                "label": art.label,
                "n": int(art.diffs.size),
                "n_shots": art.n_shots,
                "games_divisor": art.games_divisor,
                "epaa_mean": art.epaa_mean,
                "epaa_mean_per_game": art.epaa_mean / art.games_divisor,
            }
            if art.diffs.size > HISTOGRAM_THRESHOLD:
                counts, edges = np.histogram(art.diffs, bins=HISTOGRAM_BINS)
                entry["kind"] = "binned"
                entry["bins"] = {"edges": edges.tolist(), "counts": counts.tolist()}
            else:
                entry["kind"] = "raw"
                entry["values"] = art.diffs.tolist()
            out.append(entry)
        return {"season": season, "players": out}

    @app.get("/api/epaa/table")
    def epaa_table(season: int):
        require_loaded()
        season_players(season)
        rows = []
        for ranked in catalog.tables[season]:
            d = ranked.to_dict()
            d["player"] = d["label"].rsplit(":", 1)[0]
            rows.append(d)
        return {"season": season, "rows": rows}

    @app.api_route("/api/epaa/draws", methods=["GET", "HEAD"])
    def epaa_draws(season: int, player: str):
        require_loaded()
        art = season_players(season).get(player)
        if art is None:
            raise HTTPException(status_code=404, detail=f"unknown player {player!r}")
        return FileResponse(
            art.points_path,
            media_type="application/jsonl",
            filename=f"{player}_{season}_epaa.jsonl",
            headers={"X-Content-SHA256": art.fingerprint},
        )

    @app.get("/api/teams/trends")
    def teams_trends(team: str | None = None, season: int | None = None):
        require_loaded()
        rows = catalog.trends_rows
        if team is not None:
            rows = [r for r in rows if r["team"] == team]
        if season is not None:
            rows = [r for r in rows if r["season"] == season]
        return {"rows": rows}

    @app.get("/api/epaa/timeseries")
    def epaa_timeseries(players: str = Query(...)):
        require_loaded()
        ids = _parse_players_param(players)
        series = []
        for pid in ids:
            points = []
            for season in sorted(catalog.players):
                art = catalog.players[season].get(pid)
                if art is None:
                    continue
                points.append(
                    {
                        "season": season,
                        "epaa_mean": art.epaa_mean,
                        "epaa_mean_per_game": art.epaa_mean / art.games_divisor,
                        "rank": catalog.player_meta[season][pid]["rank"],
                    }
                )
            series.append({"player": pid, "points": points})
        return {"series": series}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    app.state.catalog = catalog
    return app
