import itertools

import pytest

from morse_datasets.codebook import (
    CodebookError,
    SymbolKind,
    UnknownLabelError,
    all_codewords,
    codeword_extent_bounds,
    codeword_of,
    parse_codebook,
)
from morse_datasets.generator import GenerationConfig, variant_config

from .conftest import DATA

DOT, DASH = SymbolKind.DOT, SymbolKind.DASH


def load_itu():
    table = {}
    for line in (DATA / "itu_m1677.tsv").read_text("utf-8").splitlines():
        if line and not line.startswith("#"):
            label, code = line.split("\t")
            table[label] = code
    return table


def achievable_extents(cw, cfg):
    # enumerate every reachable total span, one element at a time
    totals = {0}
    ranges = []
    for i, s in enumerate(cw.symbols):
        if i:
            ranges.append(cfg.space_range)
        ranges.append(cfg.dot_range if s is DOT else cfg.dash_range)
    for lo, hi in ranges:
        totals = {t + n for t in totals for n in range(lo, hi + 1)}
    return totals


def test_plus_from_paper():
    assert codeword_of("+").symbols == (DOT, DASH, DOT, DASH, DOT)


@pytest.mark.parametrize("label, expected", [("E", (DOT,)), ("0", (DASH,) * 5)])
def test_against_itu_fixture(label, expected):
    assert codeword_of(label).symbols == expected
    assert codeword_of(label).code == load_itu()[label]


def test_all_itu_entries_agree():
    itu = load_itu()
    for label, code in itu.items():
        assert codeword_of(label).code == code, label


def test_unknown_label():
    with pytest.raises(UnknownLabelError, match="'~'"):
        codeword_of("~")


def test_table_shape():
    words = all_codewords()
    assert len(words) == 64
    assert [w.index for w in words] == list(range(64))
    assert len({w.label for w in words}) == 64
    assert len({w.symbols for w in words}) == 64
    assert all(1 <= len(w.symbols) <= 8 for w in words)
    assert len(words[codeword_of("+").index].symbols) == 5


def test_index_order():
    labels = [w.label for w in all_codewords()]
    assert labels[:26] == [chr(c) for c in range(ord("A"), ord("Z") + 1)]
    assert labels[26:36] == list("0123456789")


def test_round_trip():
    for w in all_codewords():
        assert codeword_of(w.label) == w


def test_extent_bounds_plus_baseline_enumerated():
    cw = codeword_of("+")
    cfg = GenerationConfig()
    # full product enumeration over every length combination
    ranges = [cfg.dot_range, cfg.space_range, cfg.dash_range, cfg.space_range,
              cfg.dot_range, cfg.space_range, cfg.dash_range, cfg.space_range, cfg.dot_range]
    sums = [sum(c) for c in itertools.product(*(range(lo, hi + 1) for lo, hi in ranges))]
    assert (min(sums), max(sums)) == (15, 39)
    assert codeword_extent_bounds(cw, cfg) == (15, 39)


def test_extent_bounds_single_dot():
    assert codeword_extent_bounds(codeword_of("E"), GenerationConfig()) == (1, 3)


def test_extent_bounds_zero_dilated():
    cfg = variant_config(4, 0)
    totals = achievable_extents(codeword_of("0"), cfg)
    assert (min(totals), max(totals)) == (76, 228)
    assert codeword_extent_bounds(codeword_of("0"), cfg) == (76, 228)


@pytest.mark.parametrize("family", [1, 3, 4])
def test_every_codeword_fits(family):
    cfg = variant_config(family, 0)
    for w in all_codewords():
        lo, hi = codeword_extent_bounds(w, cfg)
        assert lo <= hi <= cfg.frame_len
        assert hi == max(achievable_extents(w, cfg))


def test_parse_rejects_bad_documents():
    good = "\n".join(f"{w.label}\t{w.code}" for w in all_codewords())
    assert len(parse_codebook(good)) == 64
    with pytest.raises(CodebookError, match="64"):
        parse_codebook("\n".join(good.splitlines()[:-1]))
    dup = good.replace("B\t-...", "B\t.-")
    with pytest.raises(CodebookError, match="duplicate code"):
        parse_codebook(dup)
    with pytest.raises(CodebookError, match="bad code"):
        parse_codebook(good.replace("E\t.", "E\t.x"))
