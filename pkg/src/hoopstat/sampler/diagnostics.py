"""Chain diagnostics: effective sample size and trace extraction."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .model import PosteriorDraws, log_joint


@dataclass(frozen=True)
class EssResult:
    """ESS estimate plus a flag for degenerate inputs.

    flag is None for a regular estimate, "constant-series" when the input has
    zero variance, or "antithetic" when negative autocorrelation pushes the
    raw estimate above the series length (reported value is clamped).
    """

    ess: float
    flag: str | None = None

    def __float__(self) -> float:
        return self.ess


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    xc = x - x.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n].real / n
    return acov


def effective_sample_size(series: np.ndarray) -> EssResult:
    """Geyer initial-positive-sequence ESS estimate.

    Sums autocovariance pairs (lag 2m, 2m+1) until the first nonpositive
    pair. The result always lies in (0, len(series)].
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 10:
        raise ValueError("series must be 1-d with at least 10 values")
    if not np.isfinite(x).all():
        raise ValueError("series contains non-finite values")
    n = x.shape[0]
    if (x == x[0]).all():
        return EssResult(ess=float(n), flag="constant-series")
    acov = _autocovariance(x)
    gamma0 = acov[0]
    if gamma0 <= 0 or not np.isfinite(gamma0):
        return EssResult(ess=float(n), flag="constant-series")

    asymptotic_var = -gamma0
    m = 0
    while 2 * m + 1 < n:
        pair = acov[2 * m] + acov[2 * m + 1]
        if pair <= 0:
            break
        asymptotic_var += 2.0 * pair
        m += 1
    if asymptotic_var <= 0:
        return EssResult(ess=float(n), flag="antithetic")
    ess = n * gamma0 / asymptotic_var
    if ess > n:
        return EssResult(ess=float(n), flag="antithetic")
    return EssResult(ess=float(ess))


_SELECTOR_RE = re.compile(
    r"^(?:(logpost)|(pi|theta|w|z)\[(\d+)\]|(p|q)\[(\d+)\]\[(\d+)\])$"
)

SELECTOR_FORMS = (
    "logpost",
    "pi[l]  (l in 1..L)",
    "theta[j]  (j in 1..J)",
    "p[l][k]  (k in 1..K)",
    "q[j][k]",
    "w[i]  (i in 1..I)",
    "z[i]",
)


class SelectorError(ValueError):
    pass


def _check_index(value: int, upper: int, what: str, selector: str) -> int:
    if not 1 <= value <= upper:
        raise SelectorError(
            f"selector {selector!r}: {what} index {value} out of range 1..{upper}"
        )
    return value - 1


def trace_export(posterior: PosteriorDraws, selector: str) -> list[tuple[int, float]]:
    """(iteration, value) rows for a scalar across all retained draws.

    Indices in selectors are 1-based, matching the label convention; the
    iteration column is the original sweep number of each retained draw.
    """
    match = _SELECTOR_RE.match(selector.strip())
    if match is None:
        raise SelectorError(
            f"unknown selector {selector!r}; valid forms: " + ", ".join(SELECTOR_FORMS)
        )
    first = posterior.draws[0]
    L, J = first.n_selection_clusters, first.n_accuracy_clusters
    I, K = first.n_entities, first.n_regions

    if match.group(1):
        values = [log_joint(s, posterior.dataset, posterior.priors) for s in posterior.draws]
    elif match.group(2):
        name, idx = match.group(2), int(match.group(3))
        upper = {"pi": L, "theta": J, "w": I, "z": I}[name]
        i = _check_index(idx, upper, name, selector)
        values = [float(getattr(s, name)[i]) for s in posterior.draws]
    else:
        name, row, col = match.group(4), int(match.group(5)), int(match.group(6))
        upper = L if name == "p" else J
        r = _check_index(row, upper, "cluster", selector)
        c = _check_index(col, K, "region", selector)
        values = [float(getattr(s, name)[r, c]) for s in posterior.draws]

    iterations = posterior.config.retained_iterations()
    return [(int(t), v) for t, v in zip(iterations, values)]
