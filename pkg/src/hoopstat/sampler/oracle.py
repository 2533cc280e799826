"""Exact posterior enumeration for tiny instances.

Integrates the profile and weight parameters analytically (Dirichlet-
Multinomial and Beta-Binomial conjugacy) and enumerates label assignments
outright. The two facets factorize a posteriori: the selection likelihood
involves only (w, p, pi) and the accuracy likelihood only (z, q, theta), so
each side is enumerated on its own. Intended as an independent check of the
Gibbs sampler on instances small enough to enumerate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import gammaln, logsumexp

from .model import ConfigError, CountsLike, Priors, as_counts

ENUMERATION_BOUND = 10**6


@dataclass(eq=False)
class TinyPosterior:
    """Exact posterior summaries from full enumeration.

    ``w_support``/``z_support`` hold every label assignment (0-based rows of
    shape (n_assignments, I)) with their posterior probabilities, so callers
    can sample exactly from the posterior.
    """

    w_probs: np.ndarray  # (I, L) exact P(w_i = l | data), columns 1..L at index l-1
    z_probs: np.ndarray  # (I, J)
    p_mean: np.ndarray  # (L, K) posterior mean of selection profiles
    q_mean: np.ndarray  # (J, K) posterior mean of accuracy profiles
    w_cocluster: np.ndarray  # (I, I) exact P(w_i = w_j | data)
    z_cocluster: np.ndarray  # (I, I)
    entity_selection_profile: np.ndarray  # (I, K) E[p_{w_i}^k | data]
    entity_accuracy_profile: np.ndarray  # (I, K) E[q_{z_i}^k | data]
    w_support: np.ndarray  # (n_w, I) label assignments, 0-based
    w_assignment_probs: np.ndarray  # (n_w,)
    z_support: np.ndarray  # (n_z, I)
    z_assignment_probs: np.ndarray  # (n_z,)


def _enumerate_facet(
    counts_a: np.ndarray,
    counts_b: np.ndarray | None,
    n_clusters: int,
    profile_conc: float | tuple[float, float],
    weight_conc: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Enumerate one facet; returns (support, probs, marginals, profile_mean,
    entity_profile).

    With ``counts_b`` None this is the Dirichlet-Multinomial selection facet
    over attempt counts ``counts_a``; otherwise the Beta-Binomial accuracy
    facet with makes ``counts_a`` and misses ``counts_b``.
    """
    I, K = counts_a.shape
    support = np.array(list(product(range(n_clusters), repeat=I)), dtype=np.int64)
    n_assign = support.shape[0]
    log_scores = np.empty(n_assign)
    profile_given = np.empty((n_assign, n_clusters, K))
    for a_idx in range(n_assign):
        assign = support[a_idx]
        score = 0.0
        for l in range(n_clusters):
            members = assign == l
            occupancy = int(members.sum())
            sa = counts_a[members].sum(axis=0)
            if counts_b is None:
                alpha = float(profile_conc)  # type: ignore[arg-type]
                score += gammaln(alpha + sa).sum() - gammaln(K * alpha + sa.sum())
                profile_given[a_idx, l] = (alpha + sa) / (K * alpha + sa.sum())
            else:
                a, b = profile_conc  # type: ignore[misc]
                sb = counts_b[members].sum(axis=0)
                score += (
                    gammaln(a + sa) + gammaln(b + sb) - gammaln(a + b + sa + sb)
                ).sum()
                profile_given[a_idx, l] = (a + sa) / (a + b + sa + sb)
            score += gammaln(weight_conc + occupancy)
        log_scores[a_idx] = score
    probs = np.exp(log_scores - logsumexp(log_scores))
    probs /= probs.sum()

    marginals = np.zeros((I, n_clusters))
    entity_profile = np.zeros((I, K))
    for i in range(I):
        for l in range(n_clusters):
            mask = support[:, i] == l
            marginals[i, l] = probs[mask].sum()
            entity_profile[i] += probs[mask] @ profile_given[mask, l]
    profile_mean = np.tensordot(probs, profile_given, axes=1)
    return support, probs, marginals, profile_mean, entity_profile


def _cocluster(support: np.ndarray, probs: np.ndarray) -> np.ndarray:
    I = support.shape[1]
    co = np.empty((I, I))
    for i in range(I):
        same = support == support[:, i : i + 1]
        co[i] = probs @ same
    return co


def exact_posterior_tiny(data: CountsLike, priors: Priors) -> TinyPosterior:
    """Exact posterior by enumeration; refuses instances beyond 10^6 assignments."""
    counts = as_counts(data)
    I = counts.n_entities
    work = float(priors.L) ** I * float(priors.J) ** I
    if work > ENUMERATION_BOUND:
        raise ConfigError(
            f"instance too large to enumerate: L^I * J^I = {work:.3g} "
            f"exceeds {ENUMERATION_BOUND}"
        )
    w_support, w_probs_joint, w_marg, p_mean, sel_profile = _enumerate_facet(
        counts.attempts, None, priors.L, priors.alpha, priors.beta
    )
    z_support, z_probs_joint, z_marg, q_mean, acc_profile = _enumerate_facet(
        counts.makes,
        counts.attempts - counts.makes,
        priors.J,
        (priors.beta_a, priors.beta_b),
        priors.gamma,
    )
    return TinyPosterior(
        w_probs=w_marg,
        z_probs=z_marg,
        p_mean=p_mean,
        q_mean=q_mean,
        w_cocluster=_cocluster(w_support, w_probs_joint),
        z_cocluster=_cocluster(z_support, z_probs_joint),
        entity_selection_profile=sel_profile,
        entity_accuracy_profile=acc_profile,
        w_support=w_support,
        w_assignment_probs=w_probs_joint,
        z_support=z_support,
        z_assignment_probs=z_probs_joint,
    )
