"""Gibbs sampling for the two-facet mixture model.

One sweep updates, in this fixed order: selection labels w, accuracy labels
z, selection profiles p, accuracy profiles q, weights pi, weights theta.
Label updates are computed in log space with max-subtraction; exact zeros in
profiles are mapped to a large negative sentinel instead of -inf so that
count-weighted sums stay NaN-free (0 * sentinel == 0 handles zero counts).

A chain is strictly sequential; all randomness flows through a single
numpy Generator, so a fixed seed reproduces the chain bit for bit.
"""

from __future__ import annotations

import numpy as np

from ..ingest import Dataset, dataset_fingerprint
from .kmeans import kmeans_init
from .model import (
    ChainConfig,
    CountsLike,
    ModelState,
    PosteriorDraws,
    Priors,
    SamplerError,
    as_counts,
    check_dimensions,
)

# log(0) stand-in: finite so 0-count * sentinel = 0; any genuinely possible
# configuration scores far above IMPOSSIBLE even at extreme counts.
LOG_ZERO = -1e30
IMPOSSIBLE = -1e20


def _guarded_log(x: np.ndarray) -> np.ndarray:
    out = np.full(np.shape(x), LOG_ZERO)
    np.log(x, out=out, where=np.asarray(x) > 0)
    return out


def selection_log_weights(attempts: np.ndarray, p: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Unnormalized log P(w = l) per entity: log pi_l + sum_k N^k log p_l^k.

    ``attempts`` is (I, K) or (K,); result is (I, L) or (L,).
    """
    return _guarded_log(pi) + np.asarray(attempts, dtype=np.float64) @ _guarded_log(p).T


def accuracy_log_weights(
    attempts: np.ndarray, makes: np.ndarray, q: np.ndarray, theta: np.ndarray
) -> np.ndarray:
    """Unnormalized log P(z = j) per entity from per-region binomial terms."""
    makes = np.asarray(makes, dtype=np.float64)
    misses = np.asarray(attempts, dtype=np.float64) - makes
    return _guarded_log(theta) + makes @ _guarded_log(q).T + misses @ _guarded_log(1.0 - q).T


def _sample_label_rows(logw: np.ndarray, rng: np.random.Generator, facet: str) -> np.ndarray:
    """Sample one label per row from unnormalized log weights; 0-based."""
    m = logw.max(axis=1)
    bad = ~np.isfinite(m) | (m < IMPOSSIBLE)
    if bad.any():
        rows = np.flatnonzero(bad)[:10].tolist()
        raise SamplerError(
            f"no admissible {facet} cluster for entity rows {rows}; "
            f"max log-weights {logw.max(axis=1)[rows]}"
        )
    probs = np.exp(logw - m[:, None])
    cum = np.cumsum(probs, axis=1)
    u = rng.random(logw.shape[0]) * cum[:, -1]
    labels = (cum < u[:, None]).sum(axis=1)
    return np.minimum(labels, logw.shape[1] - 1)


def _dirichlet_rows(alpha: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample Dirichlet rows via normalized gammas; alpha is (..., K) positive."""
    g = rng.standard_gamma(alpha)
    s = g.sum(axis=-1, keepdims=True)
    degenerate = ~(s > 0)
    if degenerate.any():
        g = np.where(degenerate, 1.0, g)
        s = g.sum(axis=-1, keepdims=True)
    return g / s


def _sweep_arrays(
    N: np.ndarray,
    M: np.ndarray,
    p: np.ndarray,
    q: np.ndarray,
    pi: np.ndarray,
    theta: np.ndarray,
    priors: Priors,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One full conditional sweep on raw arrays; returned labels are 0-based.

    The label conditionals depend only on the current profiles and weights,
    so the previous labels never enter the sweep.
    """
    L, J = priors.L, priors.J
    K = N.shape[1]

    w0 = _sample_label_rows(selection_log_weights(N, p, pi), rng, "selection")
    z0 = _sample_label_rows(accuracy_log_weights(N, M, q, theta), rng, "accuracy")

    sel_counts = np.zeros((L, K))
    np.add.at(sel_counts, w0, N)
    p = _dirichlet_rows(priors.alpha + sel_counts, rng)

    made = np.zeros((J, K))
    att = np.zeros((J, K))
    np.add.at(made, z0, M)
    np.add.at(att, z0, N)
    q = rng.beta(priors.beta_a + made, priors.beta_b + (att - made))

    pi = _dirichlet_rows(priors.beta + np.bincount(w0, minlength=L).astype(np.float64), rng)
    theta = _dirichlet_rows(
        priors.gamma + np.bincount(z0, minlength=J).astype(np.float64), rng
    )
    return p, q, w0, z0, pi, theta


def gibbs_sweep(
    state: ModelState, data: CountsLike, priors: Priors, rng: np.random.Generator
) -> ModelState:
    """Run one full sweep and return the new state (the input is not mutated)."""
    counts = as_counts(data)
    check_dimensions(state, counts, priors)
    p, q, w0, z0, pi, theta = _sweep_arrays(
        counts.attempts, counts.makes, state.p, state.q, state.pi, state.theta, priors, rng
    )
    return ModelState(p=p, q=q, w=w0 + 1, z=z0 + 1, pi=pi, theta=theta)


def run_chain(dataset: Dataset, priors: Priors, config: ChainConfig) -> PosteriorDraws:
    """Fit the model: k-means start, ``iterations`` sweeps, thinned retention.

    The same (dataset, priors, config) always produces bit-identical draws:
    the initializer and the chain consume independent seed-derived streams.
    """
    counts = as_counts(dataset)
    state = kmeans_init(counts, priors, seed=config.seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(1,)))

    N, M = counts.attempts, counts.makes
    p, q = state.p, state.q
    pi, theta = state.pi, state.theta

    draws: list[ModelState] = []
    burn, thin = config.burn_in, config.thin
    for t in range(1, config.iterations + 1):
        p, q, w0, z0, pi, theta = _sweep_arrays(N, M, p, q, pi, theta, priors, rng)
        if t > burn and (t - burn) % thin == 0:
            snapshot = ModelState(
                p=p.copy(), q=q.copy(), w=w0 + 1, z=z0 + 1, pi=pi.copy(), theta=theta.copy()
            )
            snapshot.validate()
            draws.append(snapshot)
    return PosteriorDraws(
        draws=draws,
        priors=priors,
        config=config,
        dataset=dataset,
        dataset_fingerprint=dataset_fingerprint(dataset),
    )
