"""Generate -> metrics -> train sweeps over dataset variants.

An :class:`ExperimentSpec` names variants ``(family, sigma)``, size factors,
densities and seeds.  :func:`run_experiment` runs every combination and
returns a JSON-ready report with one row per (variant, size, density, seed),
a per-combination summary averaged over seeds, and, for the
``metric_correlation`` suite, Pearson correlations of each metric with the
mean test accuracy.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io
from .generator import Dataset, GenerationConfig, generate_dataset, variant_config
from .metrics import DEFAULT_T_THRESHOLD, compute_metrics, pearson_correlation
from .mlp import MlpConfig, init_network, train

REPORT_VERSION = 1
SUITES = ("noise_sweep", "size_sweep", "density_sweep", "metric_correlation")
METRIC_NAMES = ("L", "U", "D", "T")
DILATED_L2 = 1e-5


class ExperimentError(ValueError):
    pass


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**6)


@dataclass
class ExperimentSpec:
    suite: str
    variants: list[tuple[int, int]]
    size_factors: list[Fraction] = field(default_factory=lambda: [Fraction(1)])
    densities: list[float] = field(default_factory=lambda: [1.0])
    scale: Fraction = Fraction(1)
    seeds: list[int] = field(default_factory=lambda: [0])
    hidden: int = 1024
    epochs: int = 30
    batch_size: int = 128
    learning_rate: float = 1e-3
    l2_lambda: float | None = None
    threshold: float = DEFAULT_T_THRESHOLD
    cache_dir: str | None = None
    output: str | None = None

    def __post_init__(self):
        self.variants = [(int(f), int(s)) for f, s in self.variants]
        self.size_factors = [_fraction(x) for x in self.size_factors]
        self.densities = [float(d) for d in self.densities]
        self.scale = _fraction(self.scale)
        self.seeds = [int(s) for s in self.seeds]
        self.validate()

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ExperimentError(f"unknown suite {self.suite!r}; expected one of {SUITES}")
        if not self.variants:
            raise ExperimentError("variant list is empty")
        if not self.size_factors or not self.densities or not self.seeds:
            raise ExperimentError("size_factors, densities and seeds must be non-empty")
        if self.scale <= 0:
            raise ExperimentError("scale must be positive")
        for f, s in self.variants:
            variant_config(f, s)  # raises on invalid
        if any(x <= 0 for x in self.size_factors):
            raise ExperimentError("size factors must be positive")
        if any(not 0 < d <= 1 for d in self.densities):
            raise ExperimentError("densities must lie in (0, 1]")
        if self.suite == "metric_correlation" and len(self.variants) < 2:
            raise ExperimentError("metric_correlation needs at least two variants")

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentSpec:
        d = dict(d)
        d.pop("version", None)
        if "variants" not in d and "families" in d:
            d["variants"] = list(itertools.product(d.pop("families"), d.pop("sigmas", [0])))
        try:
            return cls(**d)
        except TypeError as exc:
            raise ExperimentError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> ExperimentSpec:
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "variants": [list(v) for v in self.variants],
            "size_factors": [str(x) for x in self.size_factors],
            "densities": self.densities,
            "scale": str(self.scale),
            "seeds": self.seeds,
            "hidden": self.hidden,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "l2_lambda": self.l2_lambda,
            "threshold": self.threshold,
        }

    def dataset_config(self, family: int, sigma: int, size_factor: Fraction, seed: int) -> GenerationConfig:
        # desk scaling touches per_class only
        return variant_config(family, sigma, size_factor * self.scale, master_seed=seed)

    def mlp_config(self, n_features: int, family: int, density: float, seed: int) -> MlpConfig:
        l2 = self.l2_lambda
        if l2 is None:
            l2 = DILATED_L2 if family == 4 and density == 1.0 else 0.0
        return MlpConfig(
            layer_sizes=(n_features, self.hidden, 64),
            density=density,
            l2_lambda=l2,
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            init_seed=seed,
            shuffle_seed=seed,
        )


def obtain_dataset(cfg: GenerationConfig, cache_dir=None) -> Dataset:
    """Generate ``cfg``'s dataset, reusing a digest-named cached file when present."""
    if cache_dir is None:
        return generate_dataset(cfg)
    path = Path(cache_dir) / f"{cfg.digest().hex()[:32]}.morseds"
    if path.exists():
        ds = io.load_dataset(path)
        if ds.config_digest == cfg.digest() and ds.config == cfg:
            return ds
    ds = generate_dataset(cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    io.save_dataset(ds, path)
    return ds


def _finite(x):
    return x if math.isfinite(x) else "inf"


def run_experiment(spec: ExperimentSpec, *, log=None) -> dict:
    spec.validate()
    rows = []
    summary = []
    for (family, sigma), size, density in itertools.product(spec.variants, spec.size_factors, spec.densities):
        group = []
        for seed in spec.seeds:
            cfg = spec.dataset_config(family, sigma, size, seed)
            where = f"variant {family}.{sigma} size {size} density {density} seed {seed}"
            try:
                ds = obtain_dataset(cfg, spec.cache_dir)
                rep = compute_metrics(ds, threshold=spec.threshold)
                mcfg = spec.mlp_config(ds.n_features, family, density, seed)
                tr = train(init_network(mcfg), ds, mcfg)
            except Exception as exc:
                raise ExperimentError(f"{where}: {exc}") from exc
            row = {
                "variant": f"{family}.{sigma}",
                "family": family,
                "sigma": sigma,
                "size_factor": str(size),
                "density": density,
                "seed": seed,
                "per_class": cfg.per_class,
                "L": rep.L,
                "U": rep.U,
                "D": _finite(rep.D),
                "T": rep.T,
                "train_accuracy": tr.train_accuracy,
                "test_accuracy": tr.test_accuracy,
                "train_minus_test": tr.generalization_gap,
            }
            rows.append(row)
            group.append(row)
            if log is not None:
                log(f"{where}: test accuracy {tr.test_accuracy:.2f}")
        summary.append(_summarize(group))
    report = {
        "version": REPORT_VERSION,
        "kind": "experiment",
        "suite": spec.suite,
        "spec": spec.to_dict(),
        "rows": rows,
        "summary": summary,
    }
    if spec.suite == "metric_correlation":
        report["correlation"] = correlate(summary)
    if spec.output:
        write_report(report, spec.output)
    return report


def _summarize(group: list[dict]) -> dict:
    first = group[0]
    out = {k: first[k] for k in ("variant", "family", "sigma", "size_factor", "density", "per_class")}
    for key in (*METRIC_NAMES, "train_accuracy", "test_accuracy", "train_minus_test"):
        vals = [r[key] for r in group]
        out[key] = "inf" if "inf" in vals else float(np.mean(vals))
    out["seeds"] = [r["seed"] for r in group]
    return out


def correlate(summary: list[dict], accuracy_key: str = "test_accuracy") -> dict:
    """Pearson correlation of each metric with accuracy, one point per summary row."""
    acc = [r[accuracy_key] for r in summary]
    out = {}
    for name in METRIC_NAMES:
        vals = [r[name] for r in summary]
        if "inf" in vals:
            out[name] = None
            continue
        try:
            out[name] = pearson_correlation(vals, acc)
        except ValueError:
            out[name] = None
    return out


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def write_report(report: dict, path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")
