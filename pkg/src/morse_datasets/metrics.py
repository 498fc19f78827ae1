"""Model-free difficulty metrics for labelled datasets.

Each class is modelled as an isotropic Gaussian around its centroid with the
class's average per-dimension variance.  From the centroid geometry we get
lower and upper bounds on the error probability (``L`` and ``U``), the mean
spread-to-nearest-neighbour ratio ``D`` and the count ``T`` of class pairs
whose per-feature L1 centroid distance is below a threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

REPORT_VERSION = 1
DEFAULT_T_THRESHOLD = 0.05


class EmptyClassError(ValueError):
    pass


class CoincidentCentroidsError(ArithmeticError):
    """``D`` diverges: a class with nonzero spread shares its centroid with another."""

    def __init__(self, classes):
        self.classes = list(classes)
        super().__init__(f"classes {self.classes} have d_min = 0 with sigma > 0; D is infinite")


@dataclass
class ClassStats:
    centroids: np.ndarray  # (M, N)
    sigma: np.ndarray  # (M,)
    prior: np.ndarray  # (M,)

    @property
    def n_classes(self) -> int:
        return len(self.sigma)


@dataclass
class DistanceTable:
    d2: np.ndarray
    d1: np.ndarray
    d_min: np.ndarray


@dataclass
class MetricsReport:
    L: float
    U: float
    D: float
    T: int
    t_threshold: float
    stats: ClassStats
    distances: DistanceTable
    diagnostics: list[str] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return self.stats.n_classes

    @property
    def n_features(self) -> int:
        return self.stats.centroids.shape[1]

    def to_dict(self, tables: bool = False) -> dict:
        d = {
            "version": REPORT_VERSION,
            "kind": "metrics",
            "M": self.n_classes,
            "N": self.n_features,
            "L": self.L,
            "U": self.U,
            "D": self.D if math.isfinite(self.D) else "inf",
            "T": self.T,
            "t_threshold": self.t_threshold,
            "diagnostics": list(self.diagnostics),
        }
        if tables:
            d["centroids"] = self.stats.centroids.tolist()
            d["sigma"] = self.stats.sigma.tolist()
            d["prior"] = self.stats.prior.tolist()
            d["d2"] = self.distances.d2.tolist()
            d["d1"] = self.distances.d1.tolist()
            d["d_min"] = self.distances.d_min.tolist()
        return d

    def to_json(self, tables: bool = False) -> str:
        return json.dumps(self.to_dict(tables), indent=2)


def class_statistics(dataset=None, *, X=None, y=None, n_classes: int | None = None) -> ClassStats:
    """Centroid, pooled std and prior for every class.

    Takes a :class:`~morse_datasets.generator.Dataset` (all samples, train and
    test) or raw ``X``/``y`` arrays.  Variances are population variances.
    """
    if dataset is not None:
        X, y, n_classes = dataset.X, dataset.y, dataset.n_classes
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    counts = np.bincount(y, minlength=n_classes)
    if (counts == 0).any():
        raise EmptyClassError(f"classes without samples: {np.flatnonzero(counts == 0).tolist()}")
    centroids = np.empty((n_classes, X.shape[1]))
    sigma = np.empty(n_classes)
    for m in range(n_classes):
        Xm = X[y == m]
        centroids[m] = Xm.mean(axis=0)
        sigma[m] = math.sqrt(Xm.var(axis=0).mean())
    return ClassStats(centroids, sigma, counts / counts.sum())


def distance_table(stats: ClassStats, n_features: int | None = None) -> DistanceTable:
    c = stats.centroids
    if len(c) < 2:
        raise ValueError("need at least two classes")
    n = c.shape[1] if n_features is None else n_features
    diff = c[:, None, :] - c[None, :, :]
    d2 = np.sqrt((diff**2).sum(axis=-1))
    d1 = np.abs(diff).sum(axis=-1) / n
    off = d2 + np.diag(np.full(len(c), np.inf))
    return DistanceTable(d2, d1, off.min(axis=1))


def q_function(x):
    """Standard normal upper tail probability P(Z > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def _pair_q(dist, sigma):
    # Q(d / 2 sigma); zero spread means Q(+inf) = 0 unless the centroids coincide
    dist = np.asarray(dist, dtype=np.float64)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=np.float64), dist.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.where(sigma > 0, dist / (2 * sigma), np.where(dist > 0, np.inf, 0.0))
    return q_function(arg)


def metric_L(stats: ClassStats, distances: DistanceTable) -> float:
    terms = _pair_q(distances.d_min, stats.sigma)
    return float(np.dot(stats.prior, terms))


def metric_U(stats: ClassStats, distances: DistanceTable) -> float:
    q = _pair_q(distances.d2, stats.sigma[:, None])
    np.fill_diagonal(q, 0.0)
    return float(np.dot(stats.prior, q.sum(axis=1)))


def metric_D(stats: ClassStats, distances: DistanceTable) -> float:
    sigma, d_min = stats.sigma, distances.d_min
    bad = (d_min == 0) & (sigma > 0)
    if bad.any():
        raise CoincidentCentroidsError(np.flatnonzero(bad))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sigma > 0, sigma / d_min, 0.0)
    return float(ratio.sum() / len(sigma))


def metric_T(distances: DistanceTable, threshold: float = DEFAULT_T_THRESHOLD) -> int:
    """Number of unordered class pairs with ``d1 < threshold``."""
    iu = np.triu_indices(len(distances.d1), k=1)
    return int((distances.d1[iu] < threshold).sum())


def compute_metrics(dataset=None, *, X=None, y=None, n_classes=None,
                    threshold: float = DEFAULT_T_THRESHOLD) -> MetricsReport:
    """All four metrics in one report.  A divergent ``D`` is stored as inf."""
    stats = class_statistics(dataset, X=X, y=y, n_classes=n_classes)
    dist = distance_table(stats)
    diagnostics = []
    try:
        D = metric_D(stats, dist)
    except CoincidentCentroidsError as exc:
        D = math.inf
        diagnostics.append(str(exc))
    return MetricsReport(
        L=metric_L(stats, dist),
        U=metric_U(stats, dist),
        D=D,
        T=metric_T(dist, threshold),
        t_threshold=threshold,
        stats=stats,
        distances=dist,
        diagnostics=diagnostics,
    )


class DegenerateVarianceError(ValueError):
    pass


def pearson_correlation(xs, ys) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) < 2:
        raise ValueError("need two equal-length sequences of at least 2 values")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = math.sqrt(np.dot(dx, dx))
    sy = math.sqrt(np.dot(dy, dy))
    if sx == 0 or sy == 0:
        raise DegenerateVarianceError("correlation undefined for a constant sequence")
    return float(np.clip(np.dot(dx, dy) / (sx * sy), -1.0, 1.0))
