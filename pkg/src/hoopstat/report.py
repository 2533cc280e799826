"""Summaries, rankings, and external-metric correlations."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import IO, Mapping, Sequence, Union

import numpy as np

from .predictive import EpaaDraws, PointsDraws

METRICS_HEADER = ["entity_id", "season", "metric", "value"]


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class SummaryRow:
    """Central summary of one entity's simulated values."""

    label: str
    mean: float
    median: float
    ci80: tuple[float, float]
    ci95: tuple[float, float]
    sd: float


@dataclass(frozen=True)
class RankedRow:
    rank: int
    summary: SummaryRow

    def to_dict(self) -> dict:
        s = self.summary
        return {
            "label": s.label,
            "rank": self.rank,
            "mean": s.mean,
            "median": s.median,
            "sd": s.sd,
            "ci80_lo": s.ci80[0],
            "ci80_hi": s.ci80[1],
            "ci95_lo": s.ci95[0],
            "ci95_hi": s.ci95[1],
        }


def summarize_values(
    label: str, values: np.ndarray, levels: tuple[float, float] = (0.80, 0.95)
) -> SummaryRow:
    """Mean, median, sd, and central quantile intervals of a sample.

    Quantiles use linear interpolation between order statistics; the two
    levels must be ascending so the narrow interval nests inside the wide one.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ReportError(f"no values to summarize for {label!r}")
    if not (0 < levels[0] < levels[1] < 1):
        raise ReportError(f"levels must satisfy 0 < lo < hi < 1, got {levels}")
    lo80 = (1 - levels[0]) / 2
    lo95 = (1 - levels[1]) / 2
    q = np.quantile(x, [lo95, lo80, 0.5, 1 - lo80, 1 - lo95], method="linear")
    return SummaryRow(
        label=label,
        mean=float(x.mean()),
        median=float(q[2]),
        ci80=(float(q[1]), float(q[3])),
        ci95=(float(q[0]), float(q[4])),
        sd=float(x.std(ddof=1)) if x.size > 1 else 0.0,
    )


def summarize(
    draws: Union[PointsDraws, EpaaDraws],
    levels: tuple[float, float] = (0.80, 0.95),
    scale: str = "per_game",
) -> SummaryRow:
    """Summarize simulated points (or EPAA diffs) per game or as season totals."""
    if scale not in ("per_game", "total"):
        raise ReportError(f"scale must be per_game or total, got {scale!r}")
    label = draws.entity_label if isinstance(draws, PointsDraws) else draws.player_label
    values = draws.per_game if scale == "per_game" else (
        draws.totals if isinstance(draws, PointsDraws) else draws.diffs
    )
    return summarize_values(label, values, levels)


def rank_entities(summaries: Sequence[SummaryRow], by: str = "median") -> list[RankedRow]:
    """Order summaries descending by mean or median.

    Ties share the smaller rank (competition ranking) and tied entries are
    ordered by label.
    """
    if by not in ("mean", "median"):
        raise ReportError(f"by must be mean or median, got {by!r}")
    if not summaries:
        raise ReportError("nothing to rank")
    ordered = sorted(summaries, key=lambda s: (-getattr(s, by), s.label))
    out: list[RankedRow] = []
    for pos, s in enumerate(ordered, start=1):
        if out and getattr(s, by) == getattr(out[-1].summary, by):
            rank = out[-1].rank
        else:
            rank = pos
        out.append(RankedRow(rank=rank, summary=s))
    return out


@dataclass(frozen=True)
class Correlation:
    r: float
    n: int


def correlate(x: Mapping[str, float], y: Mapping[str, float]) -> Correlation:
    """Pearson correlation over the keys present in both maps."""
    labels = sorted(set(x) & set(y))
    if len(labels) < 3:
        raise ReportError(f"label intersection too small: {len(labels)} < 3")
    xv = np.array([x[l] for l in labels], dtype=np.float64)
    yv = np.array([y[l] for l in labels], dtype=np.float64)
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    sx = float(np.sqrt((xc**2).sum()))
    sy = float(np.sqrt((yc**2).sum()))
    if sx == 0 or sy == 0:
        raise ReportError("correlation undefined: a vector is constant on the intersection")
    r = float((xc @ yc) / (sx * sy))
    return Correlation(r=max(-1.0, min(1.0, r)), n=len(labels))


def load_external_metrics(stream: IO[str]) -> dict[str, dict[str, float]]:
    """Read a metric CSV into metric -> {"entity:season" -> value} maps."""
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ReportError("empty metrics file") from None
    if [h.strip() for h in header] != METRICS_HEADER:
        raise ReportError(f"bad header {header!r}; expected {','.join(METRICS_HEADER)}")
    out: dict[str, dict[str, float]] = {}
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ReportError(f"line {line}: expected 4 fields")
        entity_id, season_s, metric, value_s = (f.strip() for f in row)
        try:
            season = int(season_s)
            value = float(value_s)
        except ValueError:
            raise ReportError(f"line {line}: bad season or value") from None
        out.setdefault(metric, {})[f"{entity_id}:{season}"] = value
    return out


def write_table_csv(rows: Sequence[RankedRow], stream: IO[str]) -> None:
    if not rows:
        raise ReportError("no rows to write")
    fields = list(rows[0].to_dict().keys())
    writer = csv.DictWriter(stream, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.to_dict())


def table_to_json(rows: Sequence[RankedRow]) -> str:
    return json.dumps([row.to_dict() for row in rows], indent=2)
