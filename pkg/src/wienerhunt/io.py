"""Image, table and record files.

Float images (``.wimg``) are one ASCII header line
``WHIMG1 <side> <min> <max>`` followed by ``side * side`` little-endian
float32 values in row-major order. ``.pgm`` files are 8-bit previews,
affinely rescaled from min/max. Tables are CSV with a header row; records
are ``key = value`` lines in a fixed order.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Mapping

import numpy as np

MAGIC = "WHIMG1"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_image(path, img) -> Path:
    path = Path(path)
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise ValueError(f"expected a square image, got shape {img.shape}")
    data = img.astype("<f4")
    header = f"{MAGIC} {img.shape[0]} {float(data.min())!r} {float(data.max())!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(data.tobytes(order="C"))
    return path


def read_image(path) -> np.ndarray:
    """Read a ``.wimg``, ``.pgm`` or ``.npy`` image as float64."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".npy":
        return np.load(path).astype(float)
    if suffix == ".pgm":
        return read_pgm(path)
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if not header or header[0] != MAGIC:
            raise ValueError(f"{path} is not a {MAGIC} image")
        side = int(header[1])
        data = np.frombuffer(fh.read(), dtype="<f4")
    if data.size != side * side:
        raise ValueError(f"{path}: expected {side * side} values, found {data.size}")
    return data.reshape(side, side).astype(float)


def write_pgm(path, img) -> Path:
    """8-bit binary PGM preview, rescaled so min -> 0 and max -> 255."""
    path = Path(path)
    img = np.asarray(img, dtype=float)
    lo, hi = float(img.min()), float(img.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pix = np.clip(np.rint((img - lo) * scale), 0, 255).astype(np.uint8)
    rows, cols = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())
    return path


def _pgm_tokens(raw: bytes, count: int):
    tokens, pos = [], 0
    while len(tokens) < count:
        while raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        start = pos
        while not raw[pos : pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos].decode("ascii"))
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Read a plain (P2) or binary (P5) PGM file, 8 or 16 bit."""
    raw = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(raw, 4)
    w, h, maxval = int(w), int(h), int(maxval)
    if magic == "P2":
        vals, _ = _pgm_tokens(raw[pos:] + b" ", w * h)
        return np.array(vals, dtype=float).reshape(h, w)
    if magic != "P5":
        raise ValueError(f"unsupported PGM variant {magic}")
    dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
    n_bytes = w * h * np.dtype(dtype).itemsize
    body = raw[pos + 1 : pos + 1 + n_bytes]
    return np.frombuffer(body, dtype=dtype).reshape(h, w).astype(float)


def center_square(img: np.ndarray) -> np.ndarray:
    h, w = img.shape
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    return img[top : top + s, left : left + s]


def write_csv(path, columns: Mapping[str, np.ndarray]) -> Path:
    """Write equal-length columns; floats use ``repr`` so values round-trip."""
    path = Path(path)
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError("columns have different lengths")
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(names)
        for row in zip(*cols):
            wr.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    names, body = rows[0], rows[1:]
    out = {}
    for i, name in enumerate(names):
        vals = [r[i] for r in body]
        try:
            out[name] = np.array([float(v) for v in vals])
        except ValueError:
            out[name] = np.array(vals)
    return out


def write_record(path, record: Mapping[str, object]) -> Path:
    path = Path(path)
    lines = [f"{k} = {_fmt(v)}" for k, v in record.items()]
    path.write_text("\n".join(lines) + "\n")
    return path


def parse_record(text: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def read_record(path) -> dict[str, str]:
    return parse_record(Path(path).read_text())


def record_float(record: Mapping[str, str], key: str) -> float:
    v = record[key]
    return math.nan if v in ("", "None") else float(v)
