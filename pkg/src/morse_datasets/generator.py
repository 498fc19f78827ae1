"""Synthesis of Morse frame datasets.

A sample is built in four stages: the codeword is laid out as runs of marks
and gaps inside a fixed-length frame (:func:`partition_frame`), marks get
random intensities (:func:`render_intensity`), Gaussian noise is added
everywhere (:func:`apply_noise`) and the frame is scaled to [0, 1] and
quantized to thousandths (:func:`normalize`).

Random draws go through a generator object with numpy's
``integers(low, high)`` and ``normal(loc, scale, size)`` signatures, so tests
can substitute a stub.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from . import rng as rngmod
from .codebook import N_CLASSES, Codeword, SymbolKind, all_codewords, codeword_extent_bounds

BASE_PER_CLASS = 7000
TEST_FRACTION = Fraction(1, 7)
CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


def _interval(value, name):
    lo, hi = (int(v) for v in value)
    if lo < 1 or lo > hi:
        raise ConfigError(f"{name} must satisfy 1 <= lower <= upper, got [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True)
class GenerationConfig:
    """Every knob of the generator.

    Length ranges are inclusive integer intervals.  ``noise_sigma`` and the
    intensity parameters are in raw units, before division by
    ``intensity_max``.
    """

    frame_len: int = 64
    dot_range: tuple[int, int] = (1, 3)
    dash_range: tuple[int, int] = (4, 9)
    space_range: tuple[int, int] = (1, 3)
    leading_spaces: bool = False
    noise_sigma: float = 0.0
    intensity_mean: float = 12.0
    intensity_std: float = 4 / 3
    intensity_max: float = 16.0
    per_class: int = BASE_PER_CLASS
    master_seed: int = 0
    quantization_decimals: int = 3

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "dot_range", _interval(self.dot_range, "dot_range"))
        set_(self, "dash_range", _interval(self.dash_range, "dash_range"))
        set_(self, "space_range", _interval(self.space_range, "space_range"))
        set_(self, "frame_len", int(self.frame_len))
        set_(self, "per_class", int(self.per_class))
        set_(self, "noise_sigma", float(self.noise_sigma))
        set_(self, "leading_spaces", bool(self.leading_spaces))
        set_(self, "master_seed", rngmod.check_seed(self.master_seed))
        if self.frame_len < 1:
            raise ConfigError("frame_len must be positive")
        if self.per_class < 1:
            raise ConfigError("per_class must be positive")
        if not self.noise_sigma >= 0:
            raise ConfigError("noise_sigma must be non-negative")
        if self.quantization_decimals != 3:
            raise ConfigError("only 3-decimal quantization is supported")
        if self.intensity_std < 0 or self.intensity_max <= 0:
            raise ConfigError("intensity_std must be >= 0 and intensity_max > 0")
        # marks must sit in the upper half of the range at three standard deviations
        if self.intensity_mean - 3 * self.intensity_std < self.intensity_max / 2 - 1e-12:
            raise ConfigError("intensity_mean - 3*intensity_std must be >= intensity_max/2")
        widest = max(codeword_extent_bounds(cw, self)[1] for cw in all_codewords())
        if widest > self.frame_len:
            raise ConfigError(f"longest codeword spans {widest} > frame_len {self.frame_len}")

    def replace(self, **changes) -> GenerationConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("dot_range", "dash_range", "space_range"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> GenerationConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names - {"version"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: v for k, v in d.items() if k in names})

    def to_json(self) -> str:
        return json.dumps({"version": CONFIG_VERSION, **self.to_dict()}, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> GenerationConfig:
        d = json.loads(text)
        version = d.get("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {version}")
        return cls.from_dict(d)

    def digest(self) -> bytes:
        """32-byte SHA-256 of the canonical JSON form."""
        canon = json.dumps({"version": CONFIG_VERSION, **self.to_dict()}, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).digest()


def variant_config(family: int, sigma, size_factor=1, *, master_seed: int = 0) -> GenerationConfig:
    """Config for dataset variant ``family.sigma`` scaled by ``size_factor``.

    Family 1 is the baseline plus noise, 2 adds leading spaces, 3 further
    widens dashes to [3, 9] and 4 dilates family 3 by four.
    """
    if family not in (1, 2, 3, 4) or isinstance(family, bool):
        raise ConfigError(f"family must be 1..4, got {family!r}")
    if sigma not in (0, 1, 2, 3, 4) or isinstance(sigma, bool):
        raise ConfigError(f"sigma must be one of 0..4, got {sigma!r}")
    if not isinstance(size_factor, Rational):
        size_factor = Fraction(size_factor).limit_denominator(10**6)
    if size_factor <= 0:
        raise ConfigError("size_factor must be positive")
    per_class = int(Fraction(BASE_PER_CLASS) * size_factor + Fraction(1, 2))
    kw = dict(noise_sigma=float(sigma), per_class=max(per_class, 1), master_seed=master_seed)
    if family >= 2:
        kw["leading_spaces"] = True
    if family >= 3:
        kw["dash_range"] = (3, 9)
    if family == 4:
        kw.update(frame_len=256, dot_range=(4, 12), dash_range=(12, 36), space_range=(4, 12))
    return GenerationConfig(**kw)


class RunKind(enum.Enum):
    MARK_DOT = "dot"
    MARK_DASH = "dash"
    GAP = "gap"
    LEAD = "lead"
    TRAIL = "trail"

    @property
    def is_mark(self) -> bool:
        return self in (RunKind.MARK_DOT, RunKind.MARK_DASH)


@dataclass(frozen=True)
class FrameLayout:
    runs: tuple[tuple[RunKind, int], ...]

    @property
    def frame_len(self) -> int:
        return sum(n for _, n in self.runs)

    def mark_mask(self) -> np.ndarray:
        """Boolean vector, True at mark positions."""
        kinds = np.array([k.is_mark for k, _ in self.runs])
        return np.repeat(kinds, [n for _, n in self.runs])


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    label_index: int


def partition_frame(codeword: Codeword, cfg: GenerationConfig, rng) -> FrameLayout:
    kinds = []
    lows = []
    highs = []
    for i, sym in enumerate(codeword.symbols):
        if i:
            kinds.append(RunKind.GAP)
            lows.append(cfg.space_range[0])
            highs.append(cfg.space_range[1])
        if sym is SymbolKind.DOT:
            kinds.append(RunKind.MARK_DOT)
            lo, hi = cfg.dot_range
        else:
            kinds.append(RunKind.MARK_DASH)
            lo, hi = cfg.dash_range
        lows.append(lo)
        highs.append(hi)
    lengths = rng.integers(np.array(lows), np.array(highs) + 1)
    runs = [(k, int(n)) for k, n in zip(kinds, lengths)]
    slack = cfg.frame_len - sum(n for _, n in runs)
    lead = int(rng.integers(0, slack + 1)) if cfg.leading_spaces else 0
    if lead:
        runs.insert(0, (RunKind.LEAD, lead))
    if slack - lead:
        runs.append((RunKind.TRAIL, slack - lead))
    return FrameLayout(tuple(runs))


def render_intensity(layout: FrameLayout, cfg: GenerationConfig, rng) -> np.ndarray:
    marks = layout.mark_mask()
    frame = np.zeros(marks.size)
    draws = rng.normal(cfg.intensity_mean, cfg.intensity_std, size=int(marks.sum()))
    frame[marks] = np.clip(draws, 0.0, cfg.intensity_max)
    return frame


def apply_noise(frame, sigma: float, rng, upper: float = 16.0) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    if sigma == 0:
        return frame.copy()
    noisy = frame + rng.normal(0.0, sigma, size=frame.shape)
    return np.clip(noisy, 0.0, upper)


def quantize(frame, cfg: GenerationConfig) -> np.ndarray:
    """Thousandths of ``frame / intensity_max``, rounded half away from zero."""
    scaled = np.asarray(frame, dtype=np.float64) / cfg.intensity_max * 1000.0
    return (np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)).astype(np.int64)


def normalize(frame, cfg: GenerationConfig) -> np.ndarray:
    return quantize(frame, cfg) / 1000.0


def generate_sample(codeword: Codeword, cfg: GenerationConfig, rng) -> Sample:
    layout = partition_frame(codeword, cfg, rng)
    raw = render_intensity(layout, cfg, rng)
    noisy = apply_noise(raw, cfg.noise_sigma, rng, upper=cfg.intensity_max)
    return Sample(normalize(noisy, cfg), codeword.index)


def sample_stream(cfg: GenerationConfig, label_index: int, ordinal: int) -> np.random.Generator:
    return rngmod.substream(cfg.master_seed, rngmod.SAMPLE, label_index, ordinal)


def generate_class_block(cfg: GenerationConfig, label_index: int) -> np.ndarray:
    """All ``per_class`` samples of one class as thousandths, shape (per_class, frame_len)."""
    cw = all_codewords()[label_index]
    out = np.empty((cfg.per_class, cfg.frame_len), dtype=np.uint16)
    for k in range(cfg.per_class):
        rng = sample_stream(cfg, label_index, k)
        layout = partition_frame(cw, cfg, rng)
        raw = render_intensity(layout, cfg, rng)
        out[k] = quantize(apply_noise(raw, cfg.noise_sigma, rng, upper=cfg.intensity_max), cfg)
    return out


def split_mask(cfg: GenerationConfig) -> np.ndarray:
    """Boolean test-membership vector in dataset (class-major) order.

    Each class contributes ``round(per_class / 7)`` test samples, picked by a
    permutation keyed on the master seed and the class.
    """
    n = cfg.per_class
    n_test = int(n * TEST_FRACTION + Fraction(1, 2))
    is_test = np.zeros(N_CLASSES * n, dtype=bool)
    for label in range(N_CLASSES):
        perm = rngmod.substream(cfg.master_seed, rngmod.SPLIT, label).permutation(n)
        is_test[label * n + perm[:n_test]] = True
    return is_test


class Dataset:
    """Quantized samples in class-major order with a fixed train/test split.

    ``X`` holds values in [0, 1] (exact thousandths), ``y`` the label indices.
    """

    def __init__(self, X, y, is_test, config: GenerationConfig | None = None,
                 n_classes: int = N_CLASSES, config_digest: bytes | None = None):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        self.is_test = np.asarray(is_test, dtype=bool)
        self.config = config
        self.n_classes = int(n_classes)
        if config_digest is None and config is not None:
            config_digest = config.digest()
        self.config_digest = config_digest
        if self.X.ndim != 2 or len(self.X) != len(self.y) or len(self.y) != len(self.is_test):
            raise ValueError("X, y and is_test must describe the same samples")

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def per_class(self) -> int | None:
        counts = np.bincount(self.y, minlength=self.n_classes)
        return int(counts[0]) if (counts == counts[0]).all() else None

    @property
    def train_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.is_test)

    @property
    def test_indices(self) -> np.ndarray:
        return np.flatnonzero(self.is_test)

    def split(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        if which == "train":
            idx = self.train_indices
        elif which == "test":
            idx = self.test_indices
        else:
            raise ValueError(f"split must be 'train' or 'test', got {which!r}")
        return self.X[idx], self.y[idx]

    def thousandths(self) -> np.ndarray:
        return np.rint(self.X * 1000.0).astype(np.uint16)

    def __len__(self):
        return len(self.y)

    def __getitem__(self, i) -> Sample:
        return Sample(self.X[i], int(self.y[i]))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.n_classes == other.n_classes
            and self.config == other.config
            and self.config_digest == other.config_digest
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.is_test, other.is_test)
        )

    def __repr__(self):
        return (f"Dataset(n_samples={len(self)}, n_features={self.n_features}, "
                f"n_classes={self.n_classes}, n_test={int(self.is_test.sum())})")


def generate_dataset(cfg: GenerationConfig, workers: int = 1) -> Dataset:
    """Mass-produce ``per_class`` samples for each of the 64 labels.

    Each sample draws from its own stream keyed on (seed, label, ordinal), so
    ``workers > 1`` (one process task per class) gives identical output.
    """
    labels = range(N_CLASSES)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(generate_class_block, [cfg] * N_CLASSES, labels))
    else:
        blocks = [generate_class_block(cfg, label) for label in labels]
    X = np.concatenate(blocks) / 1000.0
    y = np.repeat(np.arange(N_CLASSES), cfg.per_class)
    return Dataset(X, y, split_mask(cfg), config=cfg)


def confusion_probability(codeword: Codeword, cfg: GenerationConfig, exact: bool = False):
    """Chance that one element of ``codeword`` takes an ambiguous length.

    Each dot, dash and intermediate gap is weighted equally; an element is
    ambiguous when its length falls in the overlap of its own range with the
    range it can be mistaken for (dashes vs dots, dots vs dashes, gaps vs
    dashes).  Lengths are discrete and uniform.
    """

    def frac_in(own, other):
        overlap = max(0, min(own[1], other[1]) - max(own[0], other[0]) + 1)
        return Fraction(overlap, own[1] - own[0] + 1)

    total = codeword.n_dots + codeword.n_dashes + codeword.n_gaps
    p = (
        Fraction(codeword.n_dashes, total) * frac_in(cfg.dash_range, cfg.dot_range)
        + Fraction(codeword.n_dots, total) * frac_in(cfg.dot_range, cfg.dash_range)
        + Fraction(codeword.n_gaps, total) * frac_in(cfg.space_range, cfg.dash_range)
    )
    return p if exact else float(p)


def run_lengths(values) -> list[tuple[bool, int]]:
    """Decompose a frame into (is_mark, length) runs of nonzero/zero values."""
    nz = np.asarray(values) != 0
    if nz.size == 0:
        return []
    edges = np.flatnonzero(np.diff(nz)) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [nz.size]))
    return [(bool(nz[s]), int(e - s)) for s, e in zip(starts, ends)]


def decode_codeword(values, cfg: GenerationConfig) -> Codeword | None:
    """Recover the codeword of a noise-free frame by thresholding mark lengths.

    Marks no longer than ``dot_range[1]`` read as dots.  Returns None when the
    run pattern does not spell any codeword.  Only meaningful for disjoint
    dot and dash ranges.
    """
    runs = run_lengths(values)
    code = "".join("." if n <= cfg.dot_range[1] else "-" for mark, n in runs if mark)
    return _by_code().get(code)


@lru_cache(maxsize=None)
def _by_code() -> dict[str, Codeword]:
    return {cw.code: cw for cw in all_codewords()}
