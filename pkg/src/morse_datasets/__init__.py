"""Morse code classification datasets of tunable difficulty.

Generate datasets, score their difficulty with centroid-based metrics and
train a small dense or sparse perceptron on them.
"""

from .codebook import Codeword, SymbolKind, all_codewords, codeword_extent_bounds, codeword_of
from .generator import (
    Dataset,
    GenerationConfig,
    confusion_probability,
    generate_dataset,
    generate_sample,
    variant_config,
)
from .io import export_csv, load_dataset, save_dataset
from .metrics import compute_metrics, pearson_correlation, q_function
from .mlp import MlpConfig, evaluate, init_network, train

__version__ = "0.1.0"

__all__ = [
    "Codeword",
    "Dataset",
    "GenerationConfig",
    "MlpConfig",
    "SymbolKind",
    "all_codewords",
    "codeword_extent_bounds",
    "codeword_of",
    "compute_metrics",
    "confusion_probability",
    "evaluate",
    "export_csv",
    "generate_dataset",
    "generate_sample",
    "init_network",
    "load_dataset",
    "pearson_correlation",
    "q_function",
    "save_dataset",
    "train",
    "variant_config",
]
