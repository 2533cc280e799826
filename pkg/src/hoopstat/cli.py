"""Command-line pipeline: ingest -> fit -> predict -> report -> serve.

Exit codes: 0 success, 1 data or runtime failure, 2 usage/config error.
Every command writes a ``manifest.json`` into its output directory recording
resolved flags, input fingerprints, and the seed, so a run can be reproduced
exactly; all other output files are byte-identical across reruns with the
same flags.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .ingest import (
    AGGREGATE_HEADER,
    EVENT_HEADER,
    Dataset,
    IngestError,
    dataset_fingerprint,
    parse_aggregates,
    parse_shot_events,
    top_n_shot_takers,
    write_aggregate_csv,
)
from .predictive import (
    PredictiveConfig,
    PredictiveError,
    epaa,
    expected_points,
    save_points,
    simulate_dataset,
)
from .report import rank_entities, summarize, table_to_json, write_table_csv
from .sampler import (
    ChainConfig,
    ConfigError,
    ModelState,
    PosteriorDraws,
    Priors,
    SamplerError,
    effective_sample_size,
    load_posterior,
    run_chain,
    save_posterior,
    trace_export,
)
from .sampler.store import StoreError

MONITORED_SELECTORS = ("logpost", "pi[1]", "theta[1]", "p[1][1]", "q[1][1]")


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("HOOPSTAT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"HOOPSTAT_SEED must be an integer, got {env!r}") from None
    return 0


def _file_sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _dir_fingerprint(path: Path) -> str:
    h = hashlib.sha256()
    for f in sorted(p for p in path.rglob("*") if p.is_file() and p.name != "manifest.json"):
        h.update(str(f.relative_to(path)).encode())
        h.update(_file_sha256(f).encode())
    return h.hexdigest()


def _write_manifest(
    out_dir: Path,
    command: str,
    flags: dict,
    inputs: dict[str, str],
    outputs: list[str],
    seed: int,
    started: float,
    hash_files: list[Path] | None = None,
) -> None:
    if hash_files is None:
        hash_files = [
            f
            for f in sorted(out_dir.rglob("*"))
            if f.is_file() and f.name != "manifest.json"
        ]
    output_hashes = {
        str(f.relative_to(out_dir)): _file_sha256(f) for f in hash_files
    }
    manifest = {
        "command": command,
        "flags": flags,
        "input_fingerprints": inputs,
        "output_paths": sorted(outputs),
        "output_hashes": output_hashes,
        "seed": seed,
        "duration_seconds": round(time.monotonic() - started, 3),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _load_dataset(path: Path, kind: str) -> Dataset:
    """Parse event or aggregate CSV, deciding by the header line."""
    with path.open() as fh:
        header = fh.readline().strip().split(",")
        fh.seek(0)
        if [h.strip() for h in header] == EVENT_HEADER:
            return parse_shot_events(fh, kind=kind)
        if [h.strip() for h in header] == AGGREGATE_HEADER:
            return parse_aggregates(fh, kind=kind)
    raise IngestError(
        f"{path}: header matches neither the event schema "
        f"({','.join(EVENT_HEADER)}) nor the aggregate schema ({','.join(AGGREGATE_HEADER)})"
    )


def _fit_one_chain(args: tuple) -> PosteriorDraws:
    dataset, priors, config = args
    return run_chain(dataset, priors, config)


def _print_ess_table(posterior: PosteriorDraws) -> None:
    if len(posterior) < 10:
        print("ESS table skipped: fewer than 10 retained draws")
        return
    print(f"{'scalar':<10} {'ESS':>10}  flag")
    for selector in MONITORED_SELECTORS:
        try:
            values = np.array([v for _, v in trace_export(posterior, selector)])
        except Exception:
            continue
        res = effective_sample_size(values)
        print(f"{selector:<10} {res.ess:>10.1f}  {res.flag or '-'}")


def _print_conjugate_check(posterior: PosteriorDraws) -> None:
    """With a single cluster per facet the posterior is available in closed
    form; print both so a smoke run is checkable at a glance."""
    priors = posterior.priors
    if priors.L != 1 or priors.J != 1:
        return
    N = posterior.dataset.attempts_matrix().sum(axis=0)
    M = posterior.dataset.makes_matrix().sum(axis=0)
    K = N.shape[0]
    p_mean = np.mean([s.p[0] for s in posterior.draws], axis=0)
    q_mean = np.mean([s.q[0] for s in posterior.draws], axis=0)
    p_exact = (priors.alpha + N) / (K * priors.alpha + N.sum())
    q_exact = (priors.beta_a + M) / (priors.beta_a + priors.beta_b + N)
    print("closed-form check (single-cluster conjugacy):")
    print("  p chain mean:  ", np.array2string(p_mean, precision=4))
    print("  p closed form: ", np.array2string(p_exact, precision=4))
    print("  q chain mean:  ", np.array2string(q_mean, precision=4))
    print("  q closed form: ", np.array2string(q_exact, precision=4))


def cmd_fit(args: argparse.Namespace) -> int:
    started = time.monotonic()
    seed = _resolve_seed(args.seed)
    priors = Priors(
        L=args.L,
        J=args.J,
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        beta_a=args.beta_a,
        beta_b=args.beta_b,
    )
    config = ChainConfig(iterations=args.iters, burn_in=args.burn_in, thin=args.thin, seed=seed)
    if args.chains < 1:
        raise ConfigError(f"--chains must be >= 1, got {args.chains}")

    data_path = Path(args.data)
    dataset = _load_dataset(data_path, args.kind)
    if args.top_n is not None:
        dataset = top_n_shot_takers(dataset, args.top_n, season=args.season)
    print(
        f"fitting {dataset.entity_kind} data: {len(dataset)} entities, "
        f"L={priors.L} J={priors.J}, {config.iterations} iterations "
        f"({config.burn_in} burn-in, thin {config.thin}), seed {seed}"
    )

    if args.chains == 1:
        posterior = run_chain(dataset, priors, config)
    else:
        chain_seeds = [
            int(s)
            for s in np.random.SeedSequence(entropy=seed).generate_state(args.chains, np.uint64)
        ]
        jobs = [
            (dataset, priors, replace(config, seed=chain_seed)) for chain_seed in chain_seeds
        ]
        with ProcessPoolExecutor(max_workers=min(args.chains, os.cpu_count() or 1)) as pool:
            chains = list(pool.map(_fit_one_chain, jobs))
        draws = [d for chain in chains for d in chain.draws]
        merged_config = ChainConfig(
            iterations=config.burn_in + len(draws) * config.thin,
            burn_in=config.burn_in,
            thin=config.thin,
            seed=seed,
        )
        posterior = PosteriorDraws(
            draws=draws,
            priors=priors,
            config=merged_config,
            dataset=dataset,
            dataset_fingerprint=dataset_fingerprint(dataset),
        )

    out = Path(args.out)
    save_posterior(posterior, out)
    _print_ess_table(posterior)
    _print_conjugate_check(posterior)
    print(f"retained {len(posterior)} draws -> {out}")
    _write_manifest(
        out,
        "fit",
        {
            "data": str(data_path),
            "kind": args.kind,
            "L": priors.L,
            "J": priors.J,
            "alpha": priors.alpha,
            "beta": priors.beta,
            "gamma": priors.gamma,
            "beta_a": priors.beta_a,
            "beta_b": priors.beta_b,
            "iters": config.iterations,
            "burn_in": config.burn_in,
            "thin": config.thin,
            "chains": args.chains,
            "top_n": args.top_n,
            "season": args.season,
        },
        {str(data_path): _file_sha256(data_path)},
        ["meta.json", "draws.jsonl"],
        seed,
        started,
    )
    return 0


def _select_rows(dataset: Dataset, entity: str) -> list:
    if entity == "all":
        return list(dataset.rows)
    rows = [r for r in dataset.rows if r.entity_id == entity]
    if not rows:
        valid = ", ".join(sorted({r.entity_id for r in dataset.rows}))
        raise PredictiveError(f"unknown entity {entity!r}; valid ids: {valid}")
    return rows


def _entity_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(entropy=seed).generate_state(n, np.uint64)]


def cmd_ep(args: argparse.Namespace) -> int:
    started = time.monotonic()
    seed = _resolve_seed(args.seed)
    posterior_dir = Path(args.posterior)
    posterior = load_posterior(posterior_dir)
    rows = _select_rows(posterior.dataset, args.entity)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    summaries = []
    outputs = []
    seeds = _entity_seeds(seed, len(rows))
    for row, row_seed in zip(rows, seeds):
        cfg = PredictiveConfig(
            n_shots=args.n_shots,
            games_divisor=args.games,
            samples_per_draw=args.samples_per_draw,
            seed=row_seed,
        )
        pts = expected_points(row, posterior, cfg)
        dest = out / "entities" / f"{row.entity_id}_{row.season}"
        save_points(
            pts, dest, kind="ep",
            posterior_fingerprints={"posterior": posterior.dataset_fingerprint},
            config={
                "n_shots": cfg.n_shots,
                "games_divisor": cfg.games_divisor,
                "samples_per_draw": cfg.samples_per_draw,
                "seed": cfg.seed,
            },
        )
        outputs.append(str(dest.relative_to(out)))
        summaries.append(summarize(pts))
    ranked = rank_entities(summaries, by="median")
    with (out / "table.csv").open("w") as fh:
        write_table_csv(ranked, fh)
    (out / "table.json").write_text(table_to_json(ranked) + "\n")
    outputs += ["table.csv", "table.json"]
    top = ranked[0].summary
    print(f"{len(ranked)} entities; top by median: {top.label} at {top.median:.1f} per game")
    _write_manifest(
        out,
        "ep",
        {
            "posterior": str(posterior_dir),
            "n_shots": args.n_shots,
            "games": args.games,
            "samples_per_draw": args.samples_per_draw,
            "entity": args.entity,
        },
        {str(posterior_dir): _dir_fingerprint(posterior_dir)},
        outputs,
        seed,
        started,
    )
    return 0


def cmd_epaa(args: argparse.Namespace) -> int:
    started = time.monotonic()
    seed = _resolve_seed(args.seed)
    player_dir = Path(args.player_posterior)
    team_dir = Path(args.team_posterior)
    posterior_player = load_posterior(player_dir)
    posterior_team = load_posterior(team_dir)

    if args.n_shots == "observed":
        n_shots_for = lambda row: row.total_attempts
    else:
        try:
            fixed = int(args.n_shots)
        except ValueError:
            raise ConfigError(
                f"--n-shots must be an integer or 'observed', got {args.n_shots!r}"
            ) from None
        n_shots_for = lambda row: fixed

    rows = _select_rows(posterior_player.dataset, args.entity)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summaries = []
    outputs = []
    seeds = _entity_seeds(seed, len(rows))
    for row, row_seed in zip(rows, seeds):
        cfg = PredictiveConfig(
            n_shots=n_shots_for(row),
            games_divisor=args.games,
            samples_per_draw=args.samples_per_draw,
            seed=row_seed,
        )
        result = epaa(row, posterior_player, posterior_team, cfg)
        dest = out / "players" / f"{row.entity_id}_{row.season}"
        save_points(
            result, dest, kind="epaa",
            posterior_fingerprints={
                "player": posterior_player.dataset_fingerprint,
                "team": posterior_team.dataset_fingerprint,
            },
            config={
                "n_shots": cfg.n_shots,
                "games_divisor": cfg.games_divisor,
                "samples_per_draw": cfg.samples_per_draw,
                "seed": cfg.seed,
            },
        )
        outputs.append(str(dest.relative_to(out)))
        summaries.append(summarize(result))
    ranked = rank_entities(summaries, by="mean")
    with (out / "table.csv").open("w") as fh:
        write_table_csv(ranked, fh)
    (out / "table.json").write_text(table_to_json(ranked) + "\n")
    outputs += ["table.csv", "table.json"]
    top = ranked[0].summary
    print(f"{len(ranked)} players; top by mean EPAA: {top.label} at {top.mean:.2f} per game")
    _write_manifest(
        out,
        "epaa",
        {
            "player_posterior": str(player_dir),
            "team_posterior": str(team_dir),
            "n_shots": args.n_shots,
            "games": args.games,
            "samples_per_draw": args.samples_per_draw,
            "entity": args.entity,
        },
        {
            str(player_dir): _dir_fingerprint(player_dir),
            str(team_dir): _dir_fingerprint(team_dir),
        },
        outputs,
        seed,
        started,
    )
    return 0


def _state_from_truth(obj: dict) -> ModelState:
    try:
        state = ModelState(
            p=np.array(obj["p"], dtype=np.float64),
            q=np.array(obj["q"], dtype=np.float64),
            w=np.array(obj["w"], dtype=np.int64),
            z=np.array(obj["z"], dtype=np.int64),
            pi=np.array(obj["pi"], dtype=np.float64),
            theta=np.array(obj["theta"], dtype=np.float64),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestError(f"malformed truth file: {exc}") from exc
    state.validate()
    return state


def cmd_simulate(args: argparse.Namespace) -> int:
    started = time.monotonic()
    seed = _resolve_seed(args.seed)
    truth_path = Path(args.truth)
    try:
        obj = json.loads(truth_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read truth file {truth_path}: {exc}") from exc
    state = _state_from_truth(obj)
    shots = np.full(state.n_entities, args.shots_per_entity, dtype=np.int64)
    dataset = simulate_dataset(
        state,
        shots,
        seed=seed,
        season=int(obj.get("season", 2021)),
        entity_kind=obj.get("entity_kind", "team"),
    )
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w") as fh:
        write_aggregate_csv(dataset, fh)
    print(f"simulated {len(dataset)} entities x {args.shots_per_entity} shots -> {out_path}")
    _write_manifest(
        out_path.parent,
        "simulate",
        {"truth": str(truth_path), "shots_per_entity": args.shots_per_entity, "out": str(out_path)},
        {str(truth_path): _file_sha256(truth_path)},
        [out_path.name],
        seed,
        started,
        hash_files=[out_path],
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import build_app

    if not 1 <= args.port <= 65535:
        print(f"error: port {args.port} out of range 1..65535", file=sys.stderr)
        return 1
    artifacts = Path(args.artifacts)
    app = build_app(artifacts, cors_origin=args.cors_origin, ui_dir=args.ui)
    print(f"hoopstat service ready on http://{args.host}:{args.port}", flush=True)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoopstat",
        description="Shot-profile clustering, expected points, and EPAA.",
    )
    parser.add_argument("--version", action="version", version=f"hoopstat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit the mixture model by Gibbs sampling")
    fit.add_argument("--data", required=True, help="event or aggregate CSV")
    fit.add_argument("--kind", choices=("team", "player"), default="team")
    fit.add_argument("--L", type=int, default=20, help="selection clusters (default 20)")
    fit.add_argument("--J", type=int, default=20, help="accuracy clusters (default 20)")
    fit.add_argument("--alpha", type=float, default=5.0)
    fit.add_argument("--beta", type=float, default=5.0)
    fit.add_argument("--gamma", type=float, default=5.0)
    fit.add_argument("--beta-a", type=float, default=1.0, dest="beta_a")
    fit.add_argument("--beta-b", type=float, default=1.0, dest="beta_b")
    fit.add_argument("--iters", type=int, default=10000)
    fit.add_argument("--burn-in", type=int, default=3000, dest="burn_in")
    fit.add_argument("--thin", type=int, default=1)
    fit.add_argument("--chains", type=int, default=1)
    fit.add_argument("--top-n", type=int, default=None, dest="top_n",
                     help="keep only the n biggest shot takers before fitting")
    fit.add_argument("--season", type=int, default=None)
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=cmd_fit)

    ep = sub.add_parser("ep", help="posterior-predictive expected points")
    ep.add_argument("--posterior", required=True)
    ep.add_argument("--n-shots", type=int, default=8000, dest="n_shots")
    ep.add_argument("--games", type=float, default=72.0)
    ep.add_argument("--samples-per-draw", type=int, default=1, dest="samples_per_draw")
    ep.add_argument("--entity", default="all")
    ep.add_argument("--seed", type=int, default=None)
    ep.add_argument("--out", required=True)
    ep.set_defaults(func=cmd_ep)

    ea = sub.add_parser("epaa", help="expected points above average per player")
    ea.add_argument("--player-posterior", required=True, dest="player_posterior")
    ea.add_argument("--team-posterior", required=True, dest="team_posterior")
    ea.add_argument("--n-shots", default="observed", dest="n_shots",
                    help="integer or 'observed' (player's season attempts)")
    ea.add_argument("--games", type=float, default=72.0)
    ea.add_argument("--samples-per-draw", type=int, default=1, dest="samples_per_draw")
    ea.add_argument("--entity", default="all")
    ea.add_argument("--seed", type=int, default=None)
    ea.add_argument("--out", required=True)
    ea.set_defaults(func=cmd_epaa)

    sim = sub.add_parser("simulate", help="draw a synthetic dataset from a truth state")
    sim.add_argument("--truth", required=True, help="JSON file with p,q,w,z,pi,theta")
    sim.add_argument("--shots-per-entity", type=int, required=True, dest="shots_per_entity")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", required=True, help="output aggregate CSV path")
    sim.set_defaults(func=cmd_simulate)

    srv = sub.add_parser("serve", help="serve persisted artifacts over HTTP")
    srv.add_argument("--artifacts", required=True)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--cors-origin", default="*", dest="cors_origin")
    srv.add_argument("--ui", default=None, help="optional static directory to mount at /")
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, StoreError, PredictiveError, SamplerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
