import struct

import numpy as np
import pytest

from densimat.io import format_float, read_csv, read_dmf1, write_csv, write_dmf1


@pytest.mark.parametrize("shape,matrix", [((5, 7), False), ((3, 4, 4), True), ((2, 3, 5, 4, 4), True)])
def test_dmf1_round_trip(tmp_path, shape, matrix):
    rng = np.random.default_rng(0)
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    p = tmp_path / "f.dmf1"
    write_dmf1(p, a)
    raw = p.read_bytes()
    assert raw[:4] == b"DMF1"
    rank = struct.unpack_from("<I", raw, 4)[0]
    assert rank == len(shape) - (2 if matrix else 0)
    comps = struct.unpack_from("<I", raw, 8 + 4 * rank)[0]
    assert comps == (16 if matrix else 1)
    assert len(raw) == 12 + 4 * rank + 16 * a.size
    assert np.array_equal(read_dmf1(p), a)


def test_dmf1_rejects_other_files(tmp_path):
    p = tmp_path / "x"
    p.write_bytes(b"NOPE" + bytes(8))
    with pytest.raises(ValueError):
        read_dmf1(p)


def test_csv_keeps_every_bit(tmp_path):
    rng = np.random.default_rng(1)
    rows = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-300, 300, size=(20, 3))
    p = tmp_path / "t.csv"
    write_csv(p, ["a", "b", "c"], rows.tolist())
    header, back = read_csv(p)
    assert header == ["a", "b", "c"]
    assert np.array_equal(back, rows)


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(3) == "3"
    assert format_float("A") == "A"
