"""Two-facet mixture model: Gibbs inference, initialization, diagnostics."""

from .diagnostics import EssResult, SelectorError, effective_sample_size, trace_export
from .gibbs import (
    accuracy_log_weights,
    gibbs_sweep,
    run_chain,
    selection_log_weights,
)
from .kmeans import kmeans, kmeans_init, within_cluster_ss
from .model import (
    ChainConfig,
    ConfigError,
    Counts,
    ModelState,
    PosteriorDraws,
    Priors,
    SamplerError,
    as_counts,
    log_joint,
)
from .oracle import TinyPosterior, exact_posterior_tiny
from .store import StoreError, load_posterior, save_posterior

__all__ = [
    "ChainConfig",
    "ConfigError",
    "Counts",
    "EssResult",
    "ModelState",
    "PosteriorDraws",
    "Priors",
    "SamplerError",
    "SelectorError",
    "StoreError",
    "TinyPosterior",
    "accuracy_log_weights",
    "as_counts",
    "effective_sample_size",
    "exact_posterior_tiny",
    "gibbs_sweep",
    "kmeans",
    "kmeans_init",
    "load_posterior",
    "log_joint",
    "run_chain",
    "save_posterior",
    "selection_log_weights",
    "trace_export",
    "within_cluster_ss",
]
