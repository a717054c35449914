"""City evaluation: correlation, KMO adequacy, PCA scoring, entropy-weighted TOPSIS.

All functions are pure. Scores always land in [0, 1] and rankings break ties
by ``city_id`` so results do not depend on input order.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from itinerary.dataset import IndicatorMatrix
from itinerary.errors import (
    ConstantColumn,
    EigenFailure,
    EmptyMatrix,
    InvalidParameter,
    SingularMatrix,
    TooFewRows,
    WeightMismatch,
)

log = logging.getLogger(__name__)

PCA = "pca"
ENTROPY_TOPSIS = "entropy_topsis"
METHODS = (PCA, ENTROPY_TOPSIS)

RCOND_FLOOR = 1e-12
EIGEN_FLOOR = 1e-10


@dataclass(frozen=True)
class DecisionConfig:
    kmo_threshold: float = 0.6
    pca_variance_target: float = 0.85
    top_n: int = 50

    def __post_init__(self) -> None:
        if not 0.0 < self.kmo_threshold < 1.0:
            raise InvalidParameter(f"kmo_threshold must be in (0, 1), got {self.kmo_threshold}")
        if not 0.0 < self.pca_variance_target <= 1.0:
            raise InvalidParameter(
                f"pca_variance_target must be in (0, 1], got {self.pca_variance_target}"
            )
        if int(self.top_n) != self.top_n or self.top_n < 1:
            raise InvalidParameter(f"top_n must be a positive integer, got {self.top_n}")


@dataclass(frozen=True)
class CityScore:
    city_id: str
    score: float
    method: str
    rank: int


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    names: tuple[str, ...]
    r: np.ndarray


@dataclass(frozen=True, eq=False)
class PcaResult:
    """Eigen-decomposition of the correlation matrix of standardized data.

    ``components``, ``eigenvalues`` and ``explained_ratio`` cover every
    component in descending-variance order; the first ``n_components`` are
    the retained ones. ``components[k]`` is the k-th unit loading vector.
    """

    components: np.ndarray
    eigenvalues: np.ndarray
    explained_ratio: np.ndarray
    n_components: int
    standardized: np.ndarray

    @property
    def retained_components(self) -> np.ndarray:
        return self.components[: self.n_components]

    @property
    def retained_ratio(self) -> np.ndarray:
        return self.explained_ratio[: self.n_components]

    @property
    def scores(self) -> np.ndarray:
        """City coordinates on the retained components (rows = cities)."""
        return self.standardized @ self.retained_components.T

    def reconstruct(self) -> np.ndarray:
        """Standardized data rebuilt from all components."""
        return (self.standardized @ self.components.T) @ self.components


class Evaluation(NamedTuple):
    scores: list[CityScore]
    method: str
    kmo: float


def _values(X) -> np.ndarray:
    return X.values if isinstance(X, IndicatorMatrix) else np.asarray(X, dtype=float)


def _names(X, k: int) -> tuple[str, ...]:
    return X.names if isinstance(X, IndicatorMatrix) else tuple(f"c{j + 1}" for j in range(k))


def _check_not_empty(values: np.ndarray) -> None:
    if values.ndim != 2 or values.shape[0] == 0 or values.shape[1] == 0:
        raise EmptyMatrix("indicator matrix is empty")


def _standardize(values: np.ndarray, names: Sequence[str]) -> np.ndarray:
    mean = values.mean(axis=0)
    std = values.std(axis=0, ddof=1)
    for j, s in enumerate(std):
        if not s > 0:
            raise ConstantColumn(names[j])
    return (values - mean) / std


def correlation_matrix(X) -> CorrelationMatrix:
    """Pearson correlations between criterion columns."""
    values = _values(X)
    _check_not_empty(values)
    n, k = values.shape
    names = _names(X, k)
    if n < 3:
        raise TooFewRows(f"correlation needs at least 3 rows, got {n}")
    z = _standardize(values, names)
    r = (z.T @ z) / (n - 1)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    r.setflags(write=False)
    return CorrelationMatrix(tuple(names), r)


def kmo_statistic(R) -> float:
    """Overall Kaiser-Meyer-Olkin sampling adequacy.

    Partial correlations come from the anti-image of ``inv(R)``. A matrix with
    no off-diagonal correlation gives 0/0, which is reported as 0.0.
    """
    r = R.r if isinstance(R, CorrelationMatrix) else np.asarray(R, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] < 2:
        raise InvalidParameter(f"KMO needs a square matrix of at least 2x2, got {r.shape}")
    off = ~np.eye(r.shape[0], dtype=bool)
    r2 = float(np.sum(r[off] ** 2))
    if r2 == 0.0:
        log.debug("no off-diagonal correlation; KMO defined as 0")
        return 0.0
    cond = np.linalg.cond(r)
    if not np.isfinite(cond) or 1.0 / cond < RCOND_FLOOR:
        raise SingularMatrix(f"correlation matrix is singular (cond={cond:.3g})")
    q = np.linalg.inv(r)
    d = np.sqrt(np.outer(np.diag(q), np.diag(q)))
    a = -q / d
    a2 = float(np.sum(a[off] ** 2))
    return min(1.0, max(0.0, r2 / (r2 + a2)))


def _orient_sign(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    # first of the (near-)largest entries, so symmetric ties are stable
    j = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    return -v if v[j] < 0 else v


def pca_reduce(X, cfg: DecisionConfig | None = None) -> PcaResult:
    cfg = cfg or DecisionConfig()
    values = _values(X)
    _check_not_empty(values)
    n, k = values.shape
    names = _names(X, k)
    if n < 2:
        raise TooFewRows(f"PCA needs at least 2 rows, got {n}")
    if n <= k:
        warnings.warn(f"PCA on {n} rows x {k} columns: fewer rows than columns", stacklevel=2)
    z = _standardize(values, names)
    r = (z.T @ z) / (n - 1)
    r = (r + r.T) / 2.0
    try:
        evals, evecs = np.linalg.eigh(r)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]
    if not np.all(np.isfinite(evals)) or evals[-1] < -EIGEN_FLOOR:
        raise EigenFailure(f"eigenvalues not usable: {evals}")
    evals = np.where(evals < 0.0, 0.0, evals)
    comps = np.array([_orient_sign(evecs[:, i]) for i in range(k)])
    ratio = evals / evals.sum()
    cum = np.cumsum(ratio)
    keep = int(np.searchsorted(cum, cfg.pca_variance_target - 1e-12)) + 1
    keep = max(1, min(k, keep))
    return PcaResult(comps, evals, ratio, keep, z)


def _minmax(x: np.ndarray) -> np.ndarray:
    lo, hi = float(np.min(x)), float(np.max(x))
    span = hi - lo
    if span <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        return np.full(x.shape, 0.5)
    return np.clip((x - lo) / span, 0.0, 1.0)


def pca_composite_score(p: PcaResult) -> np.ndarray:
    """Explained-ratio weighted sum of retained scores, rescaled to [0, 1]."""
    if p.n_components < 1:
        raise InvalidParameter("PCA result has no retained component")
    raw = p.scores @ p.retained_ratio
    return _minmax(raw)


def _align_and_normalize(X: IndicatorMatrix) -> np.ndarray:
    values = X.values.astype(float)
    aligned = np.where(X.benefit_mask, values, values.max(axis=0) - values)
    lo = aligned.min(axis=0)
    span = aligned.max(axis=0) - lo
    out = np.zeros_like(aligned)
    live = span > 0
    out[:, live] = (aligned[:, live] - lo[live]) / span[live]
    return out


def entropy_weights(X: IndicatorMatrix) -> np.ndarray:
    """Entropy weights over criteria; columns with more dispersion weigh more.

    Cost columns are flipped (``max - x``) and every column min-max scaled
    before the entropy is taken.
    """
    _check_not_empty(X.values)
    n, k = X.shape
    if n < 2:
        raise TooFewRows(f"entropy weighting needs at least 2 rows, got {n}")
    x = _align_and_normalize(X)
    col_sum = x.sum(axis=0)
    e = np.ones(k)
    for j in range(k):
        if col_sum[j] <= 0.0:
            continue  # uniform p, entropy exactly 1
        p = x[:, j] / col_sum[j]
        nz = p[p > 0]
        e[j] = -float(np.sum(nz * np.log(nz))) / math.log(n)
    d = np.clip(1.0 - e, 0.0, None)
    total = d.sum()
    if total <= 0.0:
        return np.full(k, 1.0 / k)
    return d / total


def _ranked(city_ids: Sequence[str], scores: Sequence[float], method: str) -> list[CityScore]:
    order = sorted(range(len(city_ids)), key=lambda i: (-scores[i], city_ids[i]))
    return [
        CityScore(city_ids[i], float(scores[i]), method, rank)
        for rank, i in enumerate(order, start=1)
    ]


def topsis_closeness(X: IndicatorMatrix, w) -> np.ndarray:
    values = X.values
    _check_not_empty(values)
    n, k = values.shape
    w = np.asarray(w, dtype=float)
    if w.shape != (k,):
        raise WeightMismatch(f"expected {k} weights, got shape {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise WeightMismatch("weights must be finite and non-negative")
    if abs(float(w.sum()) - 1.0) > 1e-9:
        raise WeightMismatch(f"weights sum to {w.sum()!r}, expected 1")

    norm = np.sqrt(np.sum(values**2, axis=0))
    v = np.zeros_like(values, dtype=float)
    live = norm > 0
    v[:, live] = values[:, live] / norm[live]
    u = v * w
    benefit = X.benefit_mask
    best = np.where(benefit, u.max(axis=0), u.min(axis=0))
    worst = np.where(benefit, u.min(axis=0), u.max(axis=0))
    d_best = np.sqrt(np.sum((u - best) ** 2, axis=1))
    d_worst = np.sqrt(np.sum((u - worst) ** 2, axis=1))
    denom = d_best + d_worst
    c = np.full(n, 0.5)
    nz = denom > 0
    c[nz] = d_worst[nz] / denom[nz]
    return np.clip(c, 0.0, 1.0)


def topsis_rank(X: IndicatorMatrix, w) -> list[CityScore]:
    """Rank cities by closeness to the ideal point (vector-normalized TOPSIS)."""
    c = topsis_closeness(X, w)
    return _ranked(X.city_ids, c.tolist(), ENTROPY_TOPSIS)


def evaluate_cities(X: IndicatorMatrix, cfg: DecisionConfig | None = None) -> Evaluation:
    """Score every city, choosing PCA when KMO exceeds the threshold.

    Otherwise the entropy-weighted TOPSIS route is used.
    """
    cfg = cfg or DecisionConfig()
    _check_not_empty(X.values)
    if X.shape[1] < 2:
        raise InvalidParameter("evaluation needs at least 2 criteria")
    kmo = kmo_statistic(correlation_matrix(X))
    if kmo > cfg.kmo_threshold:
        raw = pca_composite_score(pca_reduce(X, cfg))
        scores = _ranked(X.city_ids, raw.tolist(), PCA)
        method = PCA
    else:
        scores = topsis_rank(X, entropy_weights(X))
        method = ENTROPY_TOPSIS
    log.info("evaluated %d cities: method=%s kmo=%.3f", len(scores), method, kmo)
    return Evaluation(scores, method, kmo)


def select_top_cities(scores: Sequence[CityScore], top_n: int) -> list[CityScore]:
    return sorted(scores, key=lambda s: s.rank)[: max(0, int(top_n))]
