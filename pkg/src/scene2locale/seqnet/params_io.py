"""Binary parameter files.

Layout (all integers little-endian):

    b"S2LP"  u32 version
    u16 len + UTF-8 language id
    u16 len + UTF-8 alphabet (blank marker first, newline separated)
    u32 array count
    per array: u16 len + UTF-8 name, u32 ndim, ndim x u32 dims
    array payloads in table order, float32 little-endian, C order
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .alphabet import Alphabet
from .network import SeqNetParams

MAGIC = b"S2LP"
VERSION = 1


def _pack_str(s: str) -> bytes:
    b = s.encode("utf-8")
    return struct.pack("<H", len(b)) + b


def save_params(params: SeqNetParams, path) -> None:
    params.validate()
    out = [MAGIC, struct.pack("<I", VERSION), _pack_str(params.language),
           _pack_str("\n".join((params.alphabet.blank,) + params.alphabet.labels))]
    names = sorted(params.weights)
    out.append(struct.pack("<I", len(names)))
    for name in names:
        arr = params.weights[name]
        out.append(_pack_str(name))
        out.append(struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape))
    for name in names:
        out.append(np.ascontiguousarray(params.weights[name], dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(out))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ValueError("truncated parameter file")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def string(self) -> str:
        (n,) = self.unpack("<H")
        return self.take(n).decode("utf-8")


def load_params(path) -> SeqNetParams:
    r = _Reader(Path(path).read_bytes())
    if r.take(4) != MAGIC:
        raise ValueError(f"{path}: not a parameter file")
    (version,) = r.unpack("<I")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported parameter file version {version}")
    language = r.string()
    symbols = r.string().split("\n")
    alphabet = Alphabet(tuple(symbols[1:]), blank=symbols[0])
    (count,) = r.unpack("<I")
    table = []
    for _ in range(count):
        name = r.string()
        (ndim,) = r.unpack("<I")
        table.append((name, r.unpack(f"<{ndim}I")))
    weights = {}
    for name, shape in table:
        n = int(np.prod(shape))
        weights[name] = np.frombuffer(r.take(4 * n), dtype="<f4").astype(np.float64).reshape(shape)
    if r.pos != len(r.data):
        raise ValueError(f"{path}: trailing bytes after parameter payload")
    params = SeqNetParams(language, alphabet, weights)
    params.validate()
    return params
