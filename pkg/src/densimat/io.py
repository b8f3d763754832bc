"""DMF1 binary field dumps and CSV traces."""
import csv
import struct
from pathlib import Path

import numpy as np

MAGIC = b"DMF1"


def write_dmf1(path, samples, matrix_valued=None):
    """Write complex samples as DMF1.

    Layout (little-endian): magic, u32 rank, u32 dims[rank], u32 components,
    then interleaved float64 (re, im) in row-major order. Matrix-valued arrays
    end in a (4, 4) block which becomes the 16 components.
    """
    a = np.asarray(samples, dtype=np.complex128)
    if matrix_valued is None:
        matrix_valued = a.ndim >= 2 and a.shape[-2:] == (4, 4)
    if matrix_valued:
        dims, comps = a.shape[:-2], 16
    else:
        dims, comps = a.shape, 1
    header = MAGIC + struct.pack("<I", len(dims)) + struct.pack(f"<{len(dims)}I", *dims) \
        + struct.pack("<I", comps)
    body = np.ascontiguousarray(a).astype("<c16").tobytes()
    Path(path).write_bytes(header + body)


def read_dmf1(path):
    """Read a DMF1 file; matrix-valued dumps come back with a trailing (4, 4)."""
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ValueError(f"{path}: not a DMF1 file")
    (rank,) = struct.unpack_from("<I", raw, 4)
    dims = struct.unpack_from(f"<{rank}I", raw, 8)
    off = 8 + 4 * rank
    (comps,) = struct.unpack_from("<I", raw, off)
    off += 4
    if comps not in (1, 16):
        raise ValueError(f"{path}: bad component count {comps}")
    count = int(np.prod(dims, dtype=np.int64)) * comps
    data = np.frombuffer(raw, dtype="<c16", count=count, offset=off)
    shape = tuple(dims) + ((4, 4) if comps == 16 else ())
    return data.reshape(shape).astype(np.complex128)


def write_csv(path, header, rows):
    """CSV with a header row; floats written with 17 significant digits, labels as-is."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) for v in row])


def format_float(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.17g" % float(v)


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [row for row in r]
    try:
        return header, np.array([[float(x) for x in row] for row in rows])
    except ValueError:
        return header, rows
