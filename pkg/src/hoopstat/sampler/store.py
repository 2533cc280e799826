"""On-disk format for fitted posteriors.

A posterior is a directory holding ``meta.json`` (priors, chain config,
dataset fingerprint, entity index, and the fitted count table) plus
``draws.jsonl`` with one full parameter draw per line. Floats are written
with Python's shortest round-trip representation, so save/load is bit-exact
and a fixed seed yields byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..ingest import Dataset, RegionCounts, dataset_fingerprint
from .model import ChainConfig, ModelState, PosteriorDraws, Priors

META_NAME = "meta.json"
DRAWS_NAME = "draws.jsonl"


class StoreError(RuntimeError):
    """Raised when a persisted posterior is missing or inconsistent."""


def _state_to_obj(state: ModelState) -> dict:
    return {
        "p": state.p.tolist(),
        "q": state.q.tolist(),
        "w": state.w.tolist(),
        "z": state.z.tolist(),
        "pi": state.pi.tolist(),
        "theta": state.theta.tolist(),
    }


def _state_from_obj(obj: dict) -> ModelState:
    return ModelState(
        p=np.array(obj["p"], dtype=np.float64),
        q=np.array(obj["q"], dtype=np.float64),
        w=np.array(obj["w"], dtype=np.int64),
        z=np.array(obj["z"], dtype=np.int64),
        pi=np.array(obj["pi"], dtype=np.float64),
        theta=np.array(obj["theta"], dtype=np.float64),
    )


def save_posterior(posterior: PosteriorDraws, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds = posterior.dataset
    meta = {
        "priors": {
            "L": posterior.priors.L,
            "J": posterior.priors.J,
            "alpha": posterior.priors.alpha,
            "beta": posterior.priors.beta,
            "gamma": posterior.priors.gamma,
            "beta_a": posterior.priors.beta_a,
            "beta_b": posterior.priors.beta_b,
        },
        "config": {
            "iterations": posterior.config.iterations,
            "burn_in": posterior.config.burn_in,
            "thin": posterior.config.thin,
            "seed": posterior.config.seed,
        },
        "dataset_fingerprint": posterior.dataset_fingerprint,
        "entity_kind": ds.entity_kind,
        "entity_index": [[eid, season] for eid, season in ds.keys],
        "counts": {
            "attempts": ds.attempts_matrix().tolist(),
            "makes": ds.makes_matrix().tolist(),
        },
        "n_draws": len(posterior),
    }
    (out / META_NAME).write_text(json.dumps(meta, indent=2) + "\n")
    with (out / DRAWS_NAME).open("w") as fh:
        for state in posterior.draws:
            fh.write(json.dumps(_state_to_obj(state), separators=(",", ":")))
            fh.write("\n")
    return out


def load_posterior(in_dir: str | Path) -> PosteriorDraws:
    src = Path(in_dir)
    meta_path = src / META_NAME
    draws_path = src / DRAWS_NAME
    if not meta_path.is_file() or not draws_path.is_file():
        raise StoreError(f"not a posterior directory (need {META_NAME} and {DRAWS_NAME}): {src}")
    meta = json.loads(meta_path.read_text())
    priors = Priors(**meta["priors"])
    config = ChainConfig(**meta["config"])
    attempts = np.array(meta["counts"]["attempts"], dtype=np.int64)
    makes = np.array(meta["counts"]["makes"], dtype=np.int64)
    rows = [
        RegionCounts(entity_id=eid, season=int(season), attempts=attempts[i], makes=makes[i])
        for i, (eid, season) in enumerate(meta["entity_index"])
    ]
    dataset = Dataset(entity_kind=meta["entity_kind"], rows=rows)
    fingerprint = dataset_fingerprint(dataset)
    if fingerprint != meta["dataset_fingerprint"]:
        raise StoreError(
            f"dataset fingerprint mismatch in {src}: meta says "
            f"{meta['dataset_fingerprint'][:12]}.., counts hash to {fingerprint[:12]}.."
        )
    draws = []
    with draws_path.open() as fh:
        for line in fh:
            if line.strip():
                draws.append(_state_from_obj(json.loads(line)))
    if len(draws) != meta["n_draws"]:
        raise StoreError(
            f"{draws_path} holds {len(draws)} draws, meta.json says {meta['n_draws']}"
        )
    for state in draws:
        state.validate()
    return PosteriorDraws(
        draws=draws,
        priors=priors,
        config=config,
        dataset=dataset,
        dataset_fingerprint=fingerprint,
    )
