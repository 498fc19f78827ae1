import struct

import numpy as np
import pytest

from morse_datasets.generator import Dataset, generate_dataset, variant_config
from morse_datasets.io import (
    MAGIC,
    BadMagicError,
    BoundsViolationError,
    CorruptFileError,
    DatasetFileError,
    config_sidecar,
    encode_dataset,
    export_csv,
    load_dataset,
    read_csv,
    save_dataset,
)


@pytest.fixture(scope="module")
def small():
    return generate_dataset(variant_config(2, 3, master_seed=17).replace(per_class=7))


def test_round_trip(tmp_path, small):
    path = tmp_path / "d.morseds"
    save_dataset(small, path)
    back = load_dataset(path)
    assert back == small
    assert back.config == small.config
    assert np.array_equal(back.train_indices, small.train_indices)


def test_layout(tmp_path, small):
    path = tmp_path / "d.morseds"
    save_dataset(small, path)
    raw = path.read_bytes()
    magic, n, m, count, per_class = struct.unpack_from("<8sIIQI", raw)
    assert (magic, n, m, count, per_class) == (MAGIC, 64, 64, 448, 7)
    assert raw[28:60] == small.config.digest()
    header = 60
    rec = 2 + 2 * 64
    assert len(raw) == header + count * rec + (count + 7) // 8
    label0, *vals0 = struct.unpack_from("<65H", raw, header)
    assert label0 == small.y[0]
    assert np.array_equal(np.array(vals0) / 1000, small.X[0])
    bits = np.unpackbits(np.frombuffer(raw[header + count * rec:], np.uint8), bitorder="little")[:count]
    assert np.array_equal(bits.astype(bool), small.is_test)


def test_thousandths_encoding():
    ds = Dataset([[0.772, 0.0, 1.0]], [0], [False], n_classes=1)
    raw = encode_dataset(ds)
    assert struct.unpack_from("<4H", raw, 60) == (0, 772, 0, 1000)


def test_truncated(tmp_path, small):
    path = tmp_path / "d.morseds"
    save_dataset(small, path)
    raw = path.read_bytes()
    for cut, section in [(20, "header"), (60 + 100, "body"), (len(raw) - 1, "footer")]:
        path.write_bytes(raw[:cut])
        with pytest.raises(CorruptFileError, match=section) as err:
            load_dataset(path)
        assert err.value.section == section


def test_bad_magic(tmp_path, small):
    path = tmp_path / "d.morseds"
    save_dataset(small, path)
    path.write_bytes(b"NOTMORSE" + path.read_bytes()[8:])
    with pytest.raises(BadMagicError):
        load_dataset(path)


def test_bounds_violation(tmp_path, small):
    path = tmp_path / "d.morseds"
    save_dataset(small, path)
    raw = bytearray(path.read_bytes())
    struct.pack_into("<H", raw, 60 + 2, 1001)
    path.write_bytes(bytes(raw))
    with pytest.raises(BoundsViolationError, match="1001"):
        load_dataset(path)


def test_digest_mismatch(tmp_path, small):
    path = tmp_path / "d.morseds"
    save_dataset(small, path)
    config_sidecar(path).write_text(small.config.replace(master_seed=1).to_json())
    with pytest.raises(DatasetFileError, match="digest"):
        load_dataset(path)


def test_without_sidecar(tmp_path, small):
    path = tmp_path / "d.morseds"
    save_dataset(small, path)
    config_sidecar(path).unlink()
    back = load_dataset(path)
    assert back.config is None and back.config_digest == small.config_digest
    assert np.array_equal(back.X, small.X)


def test_too_many_features():
    ds = Dataset(np.zeros((1, 65536)), [0], [False], n_classes=1)
    with pytest.raises(OverflowError):
        encode_dataset(ds)


def test_byte_identical_regeneration(tmp_path):
    cfg = variant_config(3, 2, master_seed=5).replace(per_class=3)
    save_dataset(generate_dataset(cfg), tmp_path / "a")
    save_dataset(generate_dataset(cfg), tmp_path / "b")
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


class TestCsv:
    def test_single_sample(self, tmp_path):
        ds = Dataset([[0.5, 0.0, 1.0]], [3], [False], n_classes=4)
        path = tmp_path / "x.csv"
        export_csv(ds, path)
        lines = path.read_text().splitlines()
        assert lines == ["label,f0,f1,f2", "3,0.500,0.000,1.000"]

    def test_round_trip(self, tmp_path, small):
        path = tmp_path / "x.csv"
        export_csv(small, path)
        X, y = read_csv(path)
        assert np.array_equal(y, small.y)
        assert np.array_equal(X, small.X)
        assert len(path.read_text().splitlines()) == len(small) + 1

    def test_matches_binary(self, tmp_path, small):
        save_dataset(small, tmp_path / "d")
        export_csv(small, tmp_path / "d.csv")
        X, _ = read_csv(tmp_path / "d.csv")
        assert np.array_equal(X, load_dataset(tmp_path / "d").X)
