"""Fixed table of the 64 Morse class labels.

The table lives in ``data/codebook_v1.tsv`` (one ``<label>\\t<code>`` line per
class, ``.`` for a dot and ``-`` for a dash).  Lines are stored in index
order: letters A-Z, digits 0-9, then the 28 symbols.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .generator import GenerationConfig

CODEBOOK_FILE = "codebook_v1.tsv"
N_CLASSES = 64
MAX_SYMBOLS = 8


class SymbolKind(enum.Enum):
    DOT = "."
    DASH = "-"


class UnknownLabelError(KeyError):
    """Raised for a character outside the 64-label set."""

    def __init__(self, label):
        super().__init__(label)
        self.label = label

    def __str__(self):
        return f"unknown Morse label {self.label!r}"


class CodebookError(ValueError):
    """The fixture file is malformed."""


@dataclass(frozen=True)
class Codeword:
    label: str
    index: int
    symbols: tuple[SymbolKind, ...]

    @property
    def n_dots(self) -> int:
        return sum(s is SymbolKind.DOT for s in self.symbols)

    @property
    def n_dashes(self) -> int:
        return sum(s is SymbolKind.DASH for s in self.symbols)

    @property
    def n_gaps(self) -> int:
        return len(self.symbols) - 1

    @property
    def code(self) -> str:
        """Dot/dash string, e.g. ``'.-.-.'`` for ``'+'``."""
        return "".join(s.value for s in self.symbols)


def parse_codebook(text: str) -> tuple[Codeword, ...]:
    """Parse and validate a codebook document.

    Raises :class:`CodebookError` on a wrong line count, duplicate labels or
    codes, empty or over-long codes, or characters other than ``.`` and ``-``.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != N_CLASSES:
        raise CodebookError(f"expected {N_CLASSES} entries, found {len(lines)}")
    words = []
    seen_labels: set[str] = set()
    seen_codes: set[str] = set()
    for i, line in enumerate(lines):
        try:
            label, code = line.split("\t")
        except ValueError:
            raise CodebookError(f"line {i + 1}: expected '<label>\\t<code>'") from None
        if len(label) != 1 or not label.isprintable() or label.isspace():
            raise CodebookError(f"line {i + 1}: label must be one printable character")
        if not code or len(code) > MAX_SYMBOLS or set(code) - {".", "-"}:
            raise CodebookError(f"line {i + 1}: bad code {code!r}")
        if label in seen_labels:
            raise CodebookError(f"duplicate label {label!r}")
        if code in seen_codes:
            raise CodebookError(f"duplicate code {code!r}")
        seen_labels.add(label)
        seen_codes.add(code)
        words.append(Codeword(label, i, tuple(SymbolKind(c) for c in code)))
    return tuple(words)


@lru_cache(maxsize=None)
def all_codewords() -> tuple[Codeword, ...]:
    """All 64 codewords in index order."""
    text = resources.files("morse_datasets").joinpath("data", CODEBOOK_FILE).read_text("utf-8")
    return parse_codebook(text)


@lru_cache(maxsize=None)
def _by_label() -> dict[str, Codeword]:
    return {cw.label: cw for cw in all_codewords()}


def codeword_of(label: str) -> Codeword:
    try:
        return _by_label()[label]
    except KeyError:
        raise UnknownLabelError(label) from None


def codeword_extent_bounds(codeword: Codeword, cfg: GenerationConfig) -> tuple[int, int]:
    """Shortest and longest frame span the codeword can occupy under ``cfg``."""
    lo = (
        codeword.n_dots * cfg.dot_range[0]
        + codeword.n_dashes * cfg.dash_range[0]
        + codeword.n_gaps * cfg.space_range[0]
    )
    hi = (
        codeword.n_dots * cfg.dot_range[1]
        + codeword.n_dashes * cfg.dash_range[1]
        + codeword.n_gaps * cfg.space_range[1]
    )
    return lo, hi
