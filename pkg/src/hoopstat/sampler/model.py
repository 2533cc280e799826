"""Model parameter containers and the joint density for the two-facet mixture.

The model clusters entities along two independent facets: a shot-selection
facet (Multinomial counts over regions, Dirichlet profile prior, latent label
w) and a shot-accuracy facet (per-region Binomial makes, Beta profile prior,
latent label z). Cluster weights pi and theta carry symmetric Dirichlet
priors. Labels w and z are 1-based throughout, matching the persisted form.

The sampler core is generic over the number of regions K: it consumes a
:class:`Counts` pair of (attempts, makes) matrices, which production code
builds from an ingest :class:`~hoopstat.ingest.Dataset` (K=7) and tests may
build directly at any K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from ..ingest import Dataset

SIMPLEX_TOL = 1e-12


class ConfigError(ValueError):
    """Raised for invalid prior or chain configuration."""


class SamplerError(RuntimeError):
    """Raised when sampling hits an impossible state (diagnostics attached)."""


@dataclass(eq=False)
class Counts:
    """Attempt and make matrices, shape (I, K), rows aligned with ``keys``."""

    attempts: np.ndarray
    makes: np.ndarray
    keys: list[tuple[str, int]] | None = None

    def __post_init__(self) -> None:
        self.attempts = np.asarray(self.attempts, dtype=np.int64)
        self.makes = np.asarray(self.makes, dtype=np.int64)
        if self.attempts.ndim != 2 or self.attempts.shape != self.makes.shape:
            raise ConfigError("attempts and makes must be equal-shape (I, K) matrices")
        if (self.attempts < 0).any() or (self.makes < 0).any():
            raise ConfigError("counts must be non-negative")
        if (self.makes > self.attempts).any():
            raise ConfigError("makes cannot exceed attempts")

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> "Counts":
        return cls(
            attempts=dataset.attempts_matrix(),
            makes=dataset.makes_matrix(),
            keys=dataset.keys,
        )

    @property
    def n_entities(self) -> int:
        return self.attempts.shape[0]

    @property
    def n_regions(self) -> int:
        return self.attempts.shape[1]


CountsLike = Union[Counts, Dataset]


def as_counts(data: CountsLike) -> Counts:
    if isinstance(data, Counts):
        return data
    return Counts.from_dataset(data)


@dataclass(frozen=True)
class Priors:
    """Cluster counts and concentration parameters.

    alpha: Dirichlet concentration for selection profiles p.
    beta / gamma: Dirichlet concentrations for the weights pi / theta.
    beta_a / beta_b: Beta prior on every accuracy probability q (flat by default).
    """

    L: int
    J: int
    alpha: float = 5.0
    beta: float = 5.0
    gamma: float = 5.0
    beta_a: float = 1.0
    beta_b: float = 1.0

    def __post_init__(self) -> None:
        if self.L < 1 or self.J < 1:
            raise ConfigError(f"L and J must be >= 1, got L={self.L}, J={self.J}")
        for name in ("alpha", "beta", "gamma", "beta_a", "beta_b"):
            v = getattr(self, name)
            if not (v > 0 and np.isfinite(v)):
                raise ConfigError(f"{name} must be a positive finite real, got {v}")


@dataclass(frozen=True)
class ChainConfig:
    iterations: int
    burn_in: int
    thin: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigError(
                f"burn_in must satisfy 0 <= burn_in < iterations, "
                f"got burn_in={self.burn_in}, iterations={self.iterations}"
            )
        if self.thin < 1:
            raise ConfigError(f"thin must be >= 1, got {self.thin}")
        if not -(2**63) <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if self.retained() < 1:
            raise ConfigError(
                f"config retains no draws: floor(({self.iterations} - {self.burn_in})"
                f"/{self.thin}) = 0"
            )

    def retained(self) -> int:
        return (self.iterations - self.burn_in) // self.thin

    def retained_iterations(self) -> np.ndarray:
        """1-based sweep indices of the retained draws."""
        return self.burn_in + self.thin * np.arange(1, self.retained() + 1)


@dataclass(eq=False)
class ModelState:
    """One full parameter draw: profiles, labels, and cluster weights."""

    p: np.ndarray  # (L, K) row-stochastic selection profiles
    q: np.ndarray  # (J, K) accuracy probabilities in [0, 1]
    w: np.ndarray  # (I,) selection labels in {1..L}
    z: np.ndarray  # (I,) accuracy labels in {1..J}
    pi: np.ndarray  # (L,) selection weights, simplex
    theta: np.ndarray  # (J,) accuracy weights, simplex

    def __post_init__(self) -> None:
        self.p = np.asarray(self.p, dtype=np.float64)
        self.q = np.asarray(self.q, dtype=np.float64)
        self.w = np.asarray(self.w, dtype=np.int64)
        self.z = np.asarray(self.z, dtype=np.int64)
        self.pi = np.asarray(self.pi, dtype=np.float64)
        self.theta = np.asarray(self.theta, dtype=np.float64)

    @property
    def n_selection_clusters(self) -> int:
        return self.p.shape[0]

    @property
    def n_accuracy_clusters(self) -> int:
        return self.q.shape[0]

    @property
    def n_entities(self) -> int:
        return self.w.shape[0]

    @property
    def n_regions(self) -> int:
        return self.p.shape[1]

    def validate(self) -> None:
        L, K = self.p.shape
        J, Kq = self.q.shape
        if Kq != K:
            raise ConfigError(f"p and q disagree on region count: {K} vs {Kq}")
        if self.pi.shape != (L,) or self.theta.shape != (J,):
            raise ConfigError("pi/theta shapes do not match profile matrices")
        if self.w.shape != self.z.shape:
            raise ConfigError("w and z must have equal length")
        if abs(self.pi.sum() - 1.0) > SIMPLEX_TOL or abs(self.theta.sum() - 1.0) > SIMPLEX_TOL:
            raise ConfigError("pi/theta must each sum to 1")
        if np.abs(self.p.sum(axis=1) - 1.0).max() > SIMPLEX_TOL:
            raise ConfigError("each row of p must sum to 1")
        if (self.p < 0).any():
            raise ConfigError("p entries must be non-negative")
        if ((self.q < 0) | (self.q > 1)).any():
            raise ConfigError("q entries must lie in [0, 1]")
        if not ((self.w >= 1) & (self.w <= L)).all():
            raise ConfigError(f"w labels must lie in 1..{L}")
        if not ((self.z >= 1) & (self.z <= J)).all():
            raise ConfigError(f"z labels must lie in 1..{J}")

    def copy(self) -> "ModelState":
        return ModelState(
            p=self.p.copy(),
            q=self.q.copy(),
            w=self.w.copy(),
            z=self.z.copy(),
            pi=self.pi.copy(),
            theta=self.theta.copy(),
        )

    def equals(self, other: "ModelState") -> bool:
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("p", "q", "w", "z", "pi", "theta")
        )


@dataclass(eq=False)
class PosteriorDraws:
    """Retained post-burn-in chain plus everything needed to reuse it.

    The fitted dataset rides along (it is small next to the draws) so that
    artifacts are self-contained: predictive sampling needs the observed
    counts to resolve cluster memberships.
    """

    draws: list[ModelState]
    priors: Priors
    config: ChainConfig
    dataset: Dataset
    dataset_fingerprint: str

    def __post_init__(self) -> None:
        expected = self.config.retained()
        if len(self.draws) != expected:
            raise ConfigError(
                f"draw count {len(self.draws)} does not match config ({expected})"
            )

    @property
    def entity_index(self) -> list[tuple[str, int]]:
        return self.dataset.keys

    def __len__(self) -> int:
        return len(self.draws)


def check_dimensions(state: ModelState, data: CountsLike, priors: Priors) -> None:
    counts = as_counts(data)
    if state.p.shape != (priors.L, counts.n_regions):
        raise ConfigError(
            f"p shape {state.p.shape} does not match (L={priors.L}, K={counts.n_regions})"
        )
    if state.q.shape != (priors.J, counts.n_regions):
        raise ConfigError(
            f"q shape {state.q.shape} does not match (J={priors.J}, K={counts.n_regions})"
        )
    if state.n_entities != counts.n_entities:
        raise ConfigError(
            f"state covers {state.n_entities} entities, data has {counts.n_entities}"
        )


def _log_dirichlet_pdf(x: np.ndarray, alpha: float) -> float:
    k = x.shape[-1]
    const = gammaln(k * alpha) - k * gammaln(alpha)
    return float(const * (x.size // k) + xlogy(alpha - 1.0, x).sum())


def log_joint(state: ModelState, data: CountsLike, priors: Priors) -> float:
    """Unnormalized log joint density of (data, state).

    Multinomial and binomial coefficients depend only on the data and are
    dropped; all parameter-dependent terms are included.
    """
    counts = as_counts(data)
    N, M = counts.attempts, counts.makes
    wi = state.w - 1
    zi = state.z - 1
    pw = state.p[wi]  # (I, K)
    qz = state.q[zi]  # (I, K)
    ll = xlogy(N, pw).sum()
    ll += xlogy(M, qz).sum() + xlog1py(N - M, -qz).sum()
    ll += np.log(state.pi[wi]).sum() + np.log(state.theta[zi]).sum()
    lp = _log_dirichlet_pdf(state.p, priors.alpha)
    lp += _log_dirichlet_pdf(state.pi, priors.beta)
    lp += _log_dirichlet_pdf(state.theta, priors.gamma)
    a, b = priors.beta_a, priors.beta_b
    beta_const = gammaln(a + b) - gammaln(a) - gammaln(b)
    lp += beta_const * state.q.size
    lp += (xlogy(a - 1.0, state.q) + xlog1py(b - 1.0, -state.q)).sum()
    return float(ll + lp)
