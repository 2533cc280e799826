"""Bayesian shot-profile clustering: expected points and EPAA from region counts."""

from .ingest import (
    Dataset,
    IngestError,
    RegionCounts,
    ShotEvent,
    TopNWarning,
    dataset_fingerprint,
    parse_aggregates,
    parse_shot_events,
    to_aggregate_csv,
    top_n_shot_takers,
    write_aggregate_csv,
)
from .predictive import (
    EpaaDraws,
    PointsDraws,
    PredictiveConfig,
    PredictiveError,
    average_team_points,
    epaa,
    expected_points,
    membership_probs,
    simulate_dataset,
)
from .regions import N_REGIONS, POINT_VALUES, REGION_CODES, REGIONS, Region
from .report import (
    Correlation,
    RankedRow,
    ReportError,
    SummaryRow,
    correlate,
    rank_entities,
    summarize,
    summarize_values,
)
from .sampler import (
    ChainConfig,
    ConfigError,
    Counts,
    ModelState,
    PosteriorDraws,
    Priors,
    SamplerError,
    effective_sample_size,
    exact_posterior_tiny,
    gibbs_sweep,
    kmeans_init,
    load_posterior,
    log_joint,
    run_chain,
    save_posterior,
    trace_export,
)

__version__ = "0.1.0"
